"""Eigenvalue-relation detection: lattices, toric binomials, retries."""

import random
from fractions import Fraction

from gibbs.ratpoly import VarRing
from gibbs.relations import detect_relations, relation_linear_forms, toric_ideal
from gibbs.spectra import MatrixSpace, charpoly

from conftest import commuting_example_space, random_space, toric_surface_space


def test_toric_surface_lattice():
    L = toric_surface_space()
    cp = charpoly(L)
    rel = detect_relations(L, cp)
    # eigenvalues 2y1, y1 + y2, 2y2: the single relation l1 - 2 l2 + l3 = 0
    assert rel.m == 3
    assert len(rel.lattice) == 1
    r = rel.lattice[0]
    assert sorted(r) == [-2, 1, 1] or sorted(r) == [-1, -1, 2]


def test_commuting_example_relation():
    L = commuting_example_space()
    cp = charpoly(L)
    rel = detect_relations(L, cp)
    # eigenvalues 2y, (4 + sqrt 2) y, (4 - sqrt 2) y: 4 l1 = l2 + l3
    assert len(rel.lattice) == 1
    r = sorted(rel.lattice[0], key=abs, reverse=True)
    assert sorted(abs(v) for v in rel.lattice[0]) == [1, 1, 4]


def test_generic_space_has_no_relations(rng):
    L = random_space(rng, 3, 3)
    cp = charpoly(L)
    rel = detect_relations(L, cp)
    assert rel.lattice == []
    assert rel.certification["max_residual"] < 1e-30 or rel.lattice == []


def test_affine_shift_detected():
    # A0 = id shifts all eigenvalues by 1: relations pick up a constant part
    one = [[Fraction(1) if i == j else Fraction(0) for j in range(3)] for i in range(3)]
    L0 = toric_surface_space()
    L = MatrixSpace(one, L0.basis)
    cp = charpoly(L)
    rel = detect_relations(L, cp)
    # the pure difference relation l1 - 2 l2 + l3 survives the shift exactly
    assert len(rel.lattice) == 1


def test_toric_ideal_binomials():
    L = toric_surface_space()
    cp = charpoly(L)
    rel = detect_relations(L, cp)
    ring = VarRing(["z_1", "z_2", "z_3"], "grevlex")
    binomials = toric_ideal(rel, ring)
    assert len(binomials) == 1
    b = binomials[0]
    assert len(b.terms) == 2
    assert sorted(abs(c) for c in b.terms.values()) == [1, 1]
    # z^alpha - z^beta with alpha - beta the lattice vector
    (e1, c1), (e2, c2) = sorted(b.terms.items())
    diff = [a - b_ for a, b_ in zip(e2, e1)]
    assert diff in (rel.lattice[0], [-v for v in rel.lattice[0]])


def test_relation_linear_forms():
    L = toric_surface_space()
    cp = charpoly(L)
    rel = detect_relations(L, cp)
    ring = VarRing(["l_1", "l_2", "l_3"], "grevlex")
    forms = relation_linear_forms(rel, ring)
    assert len(forms) == 1
    assert forms[0].total_degree() == 1


def test_determinism():
    L = toric_surface_space()
    cp = charpoly(L)
    a = detect_relations(L, cp, seed=7)
    b = detect_relations(L, cp, seed=7)
    assert a.lattice == b.lattice
    assert a.certification["base_point"] == b.certification["base_point"]
