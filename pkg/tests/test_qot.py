"""Couplings on tensor-product spaces: marginals, Gibbs points, Segre equations."""

import math
import random
from fractions import Fraction

import mpmath as mp
import numpy as np
import pytest

from gibbs.implicit_num import sample_manifold
from gibbs.qot import (
    QotShape,
    partial_trace,
    qot_gibbs_point,
    qot_image_membership,
    qot_space,
    segre_equations,
)
from gibbs.spectra import x_name

from conftest import random_symmetric


def _random_pd(rng, d, shift=None):
    """Random rational positive definite matrix (diagonally dominant)."""
    M = random_symmetric(rng, d)
    bound = max(sum(abs(M[i][j]) for j in range(d)) for i in range(d))
    s = shift if shift is not None else bound + 1
    for i in range(d):
        M[i][i] += s
    return M


def _set_trace(M, target):
    """Scale a PD matrix so its trace equals target (a Fraction)."""
    t = sum(M[i][i] for i in range(len(M)))
    return [[v * target / t for v in row] for row in M]


def test_row_indexing():
    shape = QotShape(2, 3)
    assert shape.n == 6
    assert shape.row(1, 1) == 1
    assert shape.row(2, 3) == 6
    with pytest.raises(IndexError):
        shape.row(3, 1)


def test_partial_trace_of_product(rng):
    shape = QotShape(2, 2)
    Y = _set_trace(_random_pd(rng, 2), Fraction(5))
    Z = _set_trace(_random_pd(rng, 2), Fraction(5))
    X = qot_gibbs_point(Y, Z)
    Y2, Z2 = partial_trace(X, shape)
    assert Y2 == Y
    assert Z2 == Z


def test_partial_trace_formula():
    # y_11 of a 2x2 (x) 2x2 coupling is x_{11,11} + x_{12,12}
    shape = QotShape(2, 2)
    X = [[Fraction(i == j) * (i + 1) for j in range(4)] for i in range(4)]
    Y, Z = partial_trace(X, shape)
    assert Y[0][0] == X[0][0] + X[1][1]
    assert Z[0][0] == X[0][0] + X[2][2]


def test_qot_space_dimensions():
    assert qot_space(QotShape(2, 2)).d == 5
    assert qot_space(QotShape(3, 3)).d == 11
    assert qot_space(QotShape(1, 3)).d == 6


def test_reference_gibbs_point():
    Y = [[Fraction(5), Fraction(1)], [Fraction(1), Fraction(6)]]
    Z = [[Fraction(7), Fraction(2)], [Fraction(2), Fraction(4)]]
    X = qot_gibbs_point(Y, Z)
    expected = [
        [35, 10, 7, 2],
        [10, 20, 2, 4],
        [7, 2, 42, 12],
        [2, 4, 12, 24],
    ]
    assert X == [[Fraction(v, 11) for v in row] for row in expected]


def test_identity_margins():
    one = [[Fraction(1), 0], [0, Fraction(1)]]
    X = qot_gibbs_point(one, one)
    assert X == [[Fraction(1, 2) if i == j else Fraction(0) for j in range(4)] for i in range(4)]


def test_gibbs_point_rejects_bad_margins():
    one = [[Fraction(1), 0], [0, Fraction(1)]]
    two = [[Fraction(2), 0], [0, Fraction(2)]]
    with pytest.raises(ValueError):
        qot_gibbs_point(one, two)
    indef = [[Fraction(1), 0], [0, Fraction(1)]]
    indef[1][1] = Fraction(-3)
    bal = [[Fraction(-1), 0], [0, Fraction(-1)]]
    with pytest.raises(ValueError):
        qot_gibbs_point(bal, [[Fraction(-2), 0], [0, Fraction(0)]])


def _evaluate_exact(p, X, shape):
    point = {}
    for a in range(1, shape.n + 1):
        for b in range(a, shape.n + 1):
            point[x_name(a, b)] = Fraction(X[a - 1][b - 1])
    return p.evaluate(point)


def test_segre_equations_vanish_on_products(rng):
    shape = QotShape(2, 2)
    gens = segre_equations(shape).generators
    for _ in range(50):
        Y = _random_pd(rng, 2)
        Z = _set_trace(_random_pd(rng, 2), sum(Y[i][i] for i in range(2)))
        X = qot_gibbs_point(Y, Z)
        for g in gens:
            assert _evaluate_exact(g, X, shape) == 0


def test_segre_equations_vanish_on_manifold():
    shape = QotShape(2, 2)
    L = qot_space(shape)
    gens = segre_equations(shape).generators
    S = sample_manifold(L, 12, seed=9, precision=113)
    with mp.workprec(150):
        for _y, X in S.points:
            point = {}
            for a in range(shape.n):
                for b in range(a, shape.n):
                    point[x_name(a + 1, b + 1)] = X[a][b]
            for g in gens:
                total = mp.mpf(0)
                scale = mp.mpf(0)
                for exps, coeff in g.terms.items():
                    t = mp.mpf(coeff.numerator) / coeff.denominator
                    for v, e in enumerate(exps):
                        if e:
                            t *= point[g.ring.names[v]] ** e
                    total += t
                    scale = max(scale, abs(t))
                if scale > 0:
                    assert abs(total) / scale < mp.mpf(10) ** -25


def test_segre_equations_nontrivial():
    shape = QotShape(2, 2)
    gens = segre_equations(shape).generators
    degs = sorted(g.total_degree() for g in gens)
    assert degs[0] == 1 and degs[-1] == 2
    # a generic symmetric matrix violates the rank-1 structure
    X = [[Fraction(1) if i == j else Fraction(0) for j in range(4)] for i in range(4)]
    X[0][3] = X[3][0] = Fraction(1, 2)
    assert any(_evaluate_exact(g, X, shape) != 0 for g in gens)


def test_membership_predicate():
    one = [[Fraction(1), 0], [0, Fraction(1)]]
    assert qot_image_membership(one, one)
    two = [[Fraction(2), 0], [0, Fraction(2)]]
    assert not qot_image_membership(one, two)
    indef = [[Fraction(1), 0], [0, Fraction(-3)]]
    scaled = [[Fraction(-1), 0], [0, Fraction(-1)]]
    assert not qot_image_membership(indef, [[Fraction(-2), 0], [0, Fraction(0)]])


def test_partial_trace_adjoint_to_kron(rng):
    # <Y (x) id, X> = <Y, ptr_1(X)> and <id (x) Z, X> = <Z, ptr_2(X)>
    shape = QotShape(2, 2)
    X = random_symmetric(rng, 4)
    Y = random_symmetric(rng, 2)
    Z = random_symmetric(rng, 2)
    ptY, ptZ = partial_trace(X, shape)
    from gibbs.qot import _identity, _kron

    lhs1 = sum(_kron(Y, _identity(2))[i][j] * X[i][j] for i in range(4) for j in range(4))
    rhs1 = sum(Y[i][j] * ptY[i][j] for i in range(2) for j in range(2))
    assert lhs1 == rhs1
    lhs2 = sum(_kron(_identity(2), Z)[i][j] * X[i][j] for i in range(4) for j in range(4))
    rhs2 = sum(Z[i][j] * ptZ[i][j] for i in range(2) for j in range(2))
    assert lhs2 == rhs2
