"""Canonical pencils: Segre symbols, banded relations, block determinants."""

import math
from fractions import Fraction

import mpmath as mp
import pytest

from gibbs.implicit_num import sample_manifold
from gibbs.pencils import (
    SegreSymbol,
    banded_relations,
    banded_space,
    block_det_constraints,
    canonical_pencil,
    dx_minors,
    parse_segre,
    x_ring,
)
from gibbs.spectra import x_name


def test_parse_and_repr():
    s = parse_segre("[3,1]")
    assert s.groups == [(3,), (1,)]
    assert s.n == 4
    assert repr(s) == "[3,1]"
    g = parse_segre("[(3,1)]")
    assert g.groups == [(3, 1)]
    assert repr(g) == "[(3,1)]"
    assert repr(parse_segre("[(2,2),1]")) == "[(2,2),1]"


def test_symbol_validation():
    with pytest.raises(ValueError):
        SegreSymbol([(1, 3)])  # not weakly decreasing
    with pytest.raises(ValueError):
        SegreSymbol([(2,), (2,)], [Fraction(1), Fraction(1)])  # repeated alpha
    with pytest.raises(ValueError):
        SegreSymbol([(2,)], [Fraction(1), Fraction(2)])  # alpha count


def test_canonical_block_structure():
    # one block of size 2 with alpha = a: anti-banded with the sub-band of 1s
    s = SegreSymbol([(2,)], [Fraction(3)])
    L = canonical_pencil(s)
    assert L.n == 2 and L.d == 2
    A1, A2 = L.basis
    assert A1 == [[Fraction(0), Fraction(3)], [Fraction(3), Fraction(1)]]
    assert A2 == [[Fraction(0), Fraction(1)], [Fraction(1), Fraction(0)]]


def test_canonical_pencil_block_layout():
    s = parse_segre("[3,1]")
    L = canonical_pencil(s)
    assert L.n == 4
    A1, A2 = L.basis
    # the size-1 block sits in the last diagonal entry with its alpha
    assert A2[3][3] == 1
    assert A1[3][3] == s.alphas[1]
    # off-block entries vanish
    assert all(A1[i][3] == 0 and A2[i][3] == 0 for i in range(3))


def test_banded_relations_small():
    ring = x_ring(3)
    forms = banded_relations(3, ring)
    assert [str(f) for f in forms] == ["x_1_3 - x_2_2 + x_3_3"]
    assert len(banded_relations(4)) == 3
    with pytest.raises(ValueError):
        banded_relations(2)


def _residual_on_manifold(polys, L, samples=8, seed=4, precision=113):
    S = sample_manifold(L, samples, seed=seed, precision=precision)
    worst = mp.mpf(0)
    with mp.workprec(precision + 30):
        for _y, X in S.points:
            point = {}
            for a in range(L.n):
                for b in range(a, L.n):
                    point[x_name(a + 1, b + 1)] = X[a][b]
            for p in polys:
                total = mp.mpf(0)
                scale = mp.mpf(0)
                for exps, coeff in p.terms.items():
                    t = mp.mpf(coeff.numerator) / coeff.denominator
                    for v, e in enumerate(exps):
                        if e:
                            t *= point[p.ring.names[v]] ** e
                    total += t
                    scale = max(scale, abs(t))
                if scale > 0:
                    worst = max(worst, abs(total) / scale)
    return float(worst)


def test_banded_relations_vanish_numerically():
    for n in (4, 5, 6):
        L = banded_space(n)
        assert _residual_on_manifold(banded_relations(n), L) < 1e-25


def test_dx_minors_vanish_numerically():
    for n in (4, 5):
        L = banded_space(n)
        assert _residual_on_manifold(dx_minors(n), L) < 1e-25


def test_dx_minors_count():
    # 2x2 minors of a 2 x (n-1) matrix
    for n in (3, 4, 5):
        assert len(dx_minors(n)) == math.comb(n - 1, 2)


def test_block_det_constraints_grouped():
    # two trace-matched 2x2 blocks: off-block linears plus one det equality
    out = block_det_constraints(parse_segre("[(2,2)]"))
    strings = sorted(str(p) for p in out)
    assert strings == sorted(
        [
            "x_1_3",
            "x_1_4",
            "x_2_3",
            "x_2_4",
            "-x_1_2^2 + x_1_1*x_2_2 + x_3_4^2 - x_3_3*x_4_4",
        ]
    )


def test_block_det_constraints_distinct_alphas():
    # distinct eigenvalue parameters: traces differ, only off-block linears
    out = block_det_constraints(parse_segre("[3,1]"))
    assert sorted(str(p) for p in out) == ["x_1_4", "x_2_4", "x_3_4"]


def test_block_det_constraints_single_block():
    assert block_det_constraints(parse_segre("[4]")) == []


def test_block_det_constraints_vanish_numerically():
    for text in ("[(2,2)]", "[(3,1)]", "[(2,1),1]", "[2,1,1]"):
        symbol = parse_segre(text)
        out = block_det_constraints(symbol)
        if not out:
            continue
        L = canonical_pencil(symbol)
        assert _residual_on_manifold(out, L) < 1e-25


def test_all_quartic_segre_symbols():
    # every Segre symbol of n = 4 yields a valid rank-2 pencil
    symbols = [
        "[4]",
        "[3,1]",
        "[(3,1)]",
        "[2,2]",
        "[(2,2)]",
        "[2,(1,1)]",
        "[(2,1),1]",
        "[(2,1,1)]",
        "[2,1,1]",
        "[1,1,1,1]",
        "[(1,1),1,1]",
        "[(1,1),(1,1)]",
        "[(1,1,1),1]",
    ]
    assert len(symbols) == 13
    for text in symbols:
        L = canonical_pencil(parse_segre(text))
        assert L.n == 4 and L.d == 2
