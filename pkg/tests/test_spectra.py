"""Spectral toolbox: charpoly, eigen decompositions, exp/log, Sylvester."""

import random
from fractions import Fraction

import mpmath as mp
import pytest

from gibbs.spectra import MatrixSpace, charpoly, default_ring, sym_eig, sym_exp, sym_log, sylvester_param

from conftest import commuting_example_space, random_space, random_symmetric


def test_charpoly_diagonal_pencil():
    L = MatrixSpace(
        [[Fraction(0)] * 2 for _ in range(2)],
        [[[Fraction(1), 0], [0, Fraction(2)]]],
    )
    cp = charpoly(L)
    # det(diag(y, 2y) - l) = l^2 - 3y l + 2y^2
    assert cp.m == 2
    assert tuple(cp.multiplicities) == (1, 1)


def test_charpoly_multiplicity_pattern():
    # the commuting example has generic eigenvalues 2y, (4 +- sqrt 2) y: m = 3
    cp = charpoly(commuting_example_space())
    assert cp.m == 3
    # a genuinely repeated pattern: diag(y, y, 2y)
    L = MatrixSpace(
        [[Fraction(0)] * 3 for _ in range(3)],
        [[[Fraction(1), 0, 0], [0, Fraction(1), 0], [0, 0, Fraction(2)]]],
    )
    cp2 = charpoly(L)
    assert cp2.m == 2
    assert sorted(cp2.multiplicities, reverse=True) == [2, 1]


def test_sym_eig_reconstructs(rng):
    M = random_symmetric(rng, 4)
    eig = sym_eig(M, 113)
    with mp.workprec(150):
        n = 4
        R = [[sum(eig.vectors[i][k] * eig.values[k] * eig.vectors[j][k] for k in range(n)) for j in range(n)] for i in range(n)]
        err = max(abs(R[i][j] - mp.mpf(M[i][j].numerator) / M[i][j].denominator) for i in range(n) for j in range(n))
    assert err < mp.mpf(10) ** -25
    assert list(eig.values) == sorted(eig.values, reverse=True)


def test_exp_log_round_trip(rng):
    for _ in range(10):
        M = random_symmetric(rng, 3)
        X = sym_exp(M, 113)
        back = sym_log(X, 113)
        err = max(abs(back[i][j] - float(M[i][j])) for i in range(3) for j in range(3))
        assert float(err) < 1e-12


def test_log_rejects_indefinite():
    with pytest.raises(ValueError):
        sym_log([[Fraction(-1), 0], [0, Fraction(1)]], 53)


def test_exp_zero_is_identity():
    X = sym_exp([[Fraction(0)] * 3 for _ in range(3)], 53)
    for i in range(3):
        for j in range(3):
            assert abs(X[i][j] - (1 if i == j else 0)) < 1e-15


def _sylvester_residual(L, rng, precision=113):
    """|E2| at a random point with z = exp(l), X = exp(A(y)); relative."""
    cp = charpoly(L)
    sp = sylvester_param(L, cp)
    y = [Fraction(rng.randint(-2, 2), rng.randint(1, 3)) for _ in range(L.d)]
    eig = sym_eig(L.evaluate(y), precision)
    with mp.workprec(precision + 30):
        # cluster into m distinct values
        vals = []
        for v in eig.values:
            if not vals or abs(vals[-1] - v) > mp.mpf(10) ** -15:
                vals.append(v)
        if len(vals) != cp.m:
            return None
        X = sym_exp(L.evaluate(y), precision)
        assignment = {}
        for k, nm in enumerate(L.y_names()):
            assignment[nm] = mp.mpf(y[k].numerator) / y[k].denominator
        for i, v in enumerate(vals):
            assignment["l_%d" % (i + 1)] = v
            assignment["z_%d" % (i + 1)] = mp.exp(v)
        k = 0
        worst = mp.mpf(0)
        for i in range(L.n):
            for j in range(i, L.n):
                assignment["x_%d_%d" % (i + 1, j + 1)] = X[i][j]
        for entry in sp.E2:
            num = mp.mpf(0)
            scale = mp.mpf(0)
            for exps, coeff in entry.terms.items():
                t = mp.mpf(coeff.numerator) / coeff.denominator
                for v, e in enumerate(exps):
                    if e:
                        t *= assignment[entry.ring.names[v]] ** e
                num += t
                scale = max(scale, abs(t))
            if scale > 0:
                worst = max(worst, abs(num) / scale)
        return float(worst)


def sylvester_property(rng, count):
    """Check the cleared-denominator interpolation identity on random spaces.

    Returns the number of instances checked; asserts residual < 1e-10 on
    each (points where eigenvalues collide are redrawn).
    """
    checked = 0
    trials = 0
    while checked < count and trials < 2 * count:
        trials += 1
        n = rng.randint(2, 5)
        d = rng.randint(1, 3)
        L = random_space(rng, n, d)
        res = _sylvester_residual(L, rng)
        if res is None:
            continue
        assert res < 1e-10
        checked += 1
    return checked


def test_sylvester_identity_random_spaces(rng):
    assert sylvester_property(rng, 12) == 12


def test_default_ring_names():
    L = random_space(random.Random(5), 3, 2)
    ring = default_ring(L, 2)
    assert list(ring.names[:2]) == ["y_1", "y_2"]
    assert "l_1" in ring.names and "z_2" in ring.names and "x_1_3" in ring.names
