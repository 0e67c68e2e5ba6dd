"""Shared fixtures and generators for the test suite."""

import random
from fractions import Fraction

import pytest

from gibbs.spectra import MatrixSpace


def random_symmetric(rng, n, lo=-3, hi=3, den=2):
    M = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            v = Fraction(rng.randint(lo, hi), rng.randint(1, den))
            M[i][j] = v
            M[j][i] = v
    return M


def random_space(rng, n, d, linear=True):
    """A random LSSM/ASSM with independent basis matrices (retries as needed)."""
    zero = [[Fraction(0)] * n for _ in range(n)]
    for _ in range(60):
        A0 = zero if linear else random_symmetric(rng, n)
        basis = [random_symmetric(rng, n) for _ in range(d)]
        try:
            return MatrixSpace(A0, basis)
        except ValueError:
            continue
    raise RuntimeError("could not draw an independent basis")


@pytest.fixture
def rng():
    return random.Random(20240824)


def intro_space():
    """The 3x3 space spanned by id + (E_ij + E_ji) for the three off-diagonals."""
    def unit(i, j):
        M = [[Fraction(1) if a == b else Fraction(0) for b in range(3)] for a in range(3)]
        M[i][j] += 1
        M[j][i] += 1
        return M

    return MatrixSpace([[Fraction(0)] * 3 for _ in range(3)], [unit(0, 1), unit(0, 2), unit(1, 2)])


def toric_surface_space():
    """Diagonal 3x3 pencil whose exponential image closes to x11*x33 = x22^2."""
    return MatrixSpace(
        [[Fraction(0)] * 3 for _ in range(3)],
        [
            [[Fraction(2), 0, 0], [0, Fraction(1), 0], [0, 0, Fraction(0)]],
            [[Fraction(0), 0, 0], [0, Fraction(1), 0], [0, 0, Fraction(2)]],
        ],
    )


def hankel_space():
    """4x4 Hankel matrices with upper-left entry fixed to zero (d = 6)."""
    mats = []
    for k in range(3, 9):
        M = [[Fraction(0)] * 4 for _ in range(4)]
        for i in range(4):
            for j in range(4):
                if i + j + 2 == k:
                    M[i][j] = Fraction(1)
        mats.append(M)
    zero = [[Fraction(0)] * 4 for _ in range(4)]
    return MatrixSpace(zero, mats)


def commuting_example_space():
    """The 3x3 rank-one family spanned by [[4,1,1],[1,3,1],[1,1,3]]."""
    A1 = [
        [Fraction(4), Fraction(1), Fraction(1)],
        [Fraction(1), Fraction(3), Fraction(1)],
        [Fraction(1), Fraction(1), Fraction(3)],
    ]
    return MatrixSpace([[Fraction(0)] * 3 for _ in range(3)], [A1])
