"""Numerical implicitization: sampling, kernels, rationalization, verification."""

import math

import pytest

from gibbs.groebner import Ideal, buchberger, contains
from gibbs.implicit_num import (
    implicitize_numeric,
    kernel_ideal,
    kernel_of_degree,
    monomials_up_to_degree,
    rationalize_vector,
    sample_manifold,
    verify_polynomial,
)
from gibbs.pencils import x_ring
from gibbs.ratpoly import parse_poly

from conftest import toric_surface_space


def test_toric_surface_numeric_kernel():
    L = toric_surface_space()
    kb, polys = implicitize_numeric(L, 2, seed=3)
    assert len(kb.vectors) > 0
    # a multi-dimensional kernel is read off through its echelon form
    ring = x_ring(3)
    gens = kernel_ideal(kb, ring=ring)
    for g in gens:
        assert verify_polynomial(g, L)
    ideal = Ideal(ring, gens)
    gb = buchberger(ideal)
    assert contains(gb, parse_poly(ring, "x_2_2^2 - x_1_1*x_3_3"))
    for nm in ("x_1_2", "x_1_3", "x_2_3"):
        assert contains(gb, parse_poly(ring, nm))


def test_kernel_ideal_echelonizes():
    L = toric_surface_space()
    N = len(monomials_up_to_degree(6, 2))
    S = sample_manifold(L, N + 100, seed=5)
    kb = kernel_of_degree(S, 2)
    gens = kernel_ideal(kb)
    # distinct leading monomials after echelonization
    leads = [g.leading_term()[0] for g in gens]
    assert len(set(leads)) == len(leads) == len(kb.vectors)


def test_full_rank_means_no_relations(rng):
    from conftest import random_space

    L = random_space(rng, 3, 3)
    N = len(monomials_up_to_degree(6, 1))
    S = sample_manifold(L, N + 50, seed=2)
    kb = kernel_of_degree(S, 1)
    assert kb.vectors == []


def test_kernel_needs_enough_samples():
    L = toric_surface_space()
    S = sample_manifold(L, 5, seed=0)
    with pytest.raises(ValueError):
        kernel_of_degree(S, 2)


def test_rationalize_simple_vectors():
    assert rationalize_vector([0.5, 1.0]) == [1, 2]
    third = 1.0 / 3.0
    assert rationalize_vector([1.0, third]) == [3, 1]
    assert rationalize_vector([-2.0, 4.0]) == [1, -2]


def test_rationalize_rejects_irrational():
    with pytest.raises(ValueError):
        rationalize_vector([1.0, math.pi], tol=1e-12, max_den=100)


def test_sampling_is_deterministic():
    L = toric_surface_space()
    a = sample_manifold(L, 7, seed=42)
    b = sample_manifold(L, 7, seed=42)
    assert [p[0] for p in a.points] == [p[0] for p in b.points]
    assert all(
        xa[i][j] == xb[i][j]
        for (_, xa), (_, xb) in zip(a.points, b.points)
        for i in range(3)
        for j in range(3)
    )


def test_verify_polynomial_accepts_and_rejects():
    L = toric_surface_space()
    ring = x_ring(3)
    assert verify_polynomial(parse_poly(ring, "x_2_2^2 - x_1_1*x_3_3"), L)
    assert not verify_polynomial(parse_poly(ring, "x_1_1 - 1"), L)
