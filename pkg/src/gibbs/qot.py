"""Quantum optimal transport on a tensor-product state space.

Couplings are symmetric PSD matrices on R^{d1 d2} with rows indexed by
pairs (i, j) in [d1] x [d2]; the two partial traces produce the marginals
(Y, Z).  The feasible marginals are PSD pairs with equal trace, the
constraint space is spanned by A (x) id and id (x) B, the entropy-maximal
coupling with margins (Y, Z) is (Y (x) Z)/trace(Y), and the closure of all
such couplings satisfies the Segre equations (rank-1 structure in the
symmetric pair coordinates).
"""

from fractions import Fraction

from .groebner import Ideal
from .pencils import x_ring
from .spectra import MatrixSpace, sym_eig, x_name

__all__ = [
    "QotShape",
    "partial_trace",
    "qot_space",
    "qot_gibbs_point",
    "segre_equations",
    "qot_image_membership",
]


class QotShape:
    """Index bookkeeping for couplings on [d1] x [d2]."""

    __slots__ = ("d1", "d2")

    def __init__(self, d1, d2):
        if d1 < 1 or d2 < 1:
            raise ValueError("factor dimensions must be positive")
        self.d1 = d1
        self.d2 = d2

    @property
    def n(self):
        return self.d1 * self.d2

    def row(self, i, j):
        """Row index of the pair (i, j), all 1-based."""
        if not (1 <= i <= self.d1 and 1 <= j <= self.d2):
            raise IndexError("pair (%d, %d) out of range" % (i, j))
        return (i - 1) * self.d2 + j


def partial_trace(X, shape):
    """The two marginals (Y, Z) of a symmetric coupling matrix.

    y_ik = sum_j x_{ij,kj} and z_jl = sum_i x_{ij,il}.
    """
    n = shape.n
    if len(X) != n or any(len(row) != n for row in X):
        raise ValueError("expected a %dx%d matrix" % (n, n))
    d1, d2 = shape.d1, shape.d2
    Y = [[None] * d1 for _ in range(d1)]
    Z = [[None] * d2 for _ in range(d2)]
    for i in range(1, d1 + 1):
        for k in range(1, d1 + 1):
            acc = 0
            for j in range(1, d2 + 1):
                acc = acc + X[shape.row(i, j) - 1][shape.row(k, j) - 1]
            Y[i - 1][k - 1] = acc
    for j in range(1, d2 + 1):
        for l in range(1, d2 + 1):
            acc = 0
            for i in range(1, d1 + 1):
                acc = acc + X[shape.row(i, j) - 1][shape.row(i, l) - 1]
            Z[j - 1][l - 1] = acc
    return Y, Z


def _sym_units(d):
    """Symmetric matrix units: E_ii, then E_ij + E_ji for i < j."""
    out = []
    for i in range(d):
        E = [[Fraction(0)] * d for _ in range(d)]
        E[i][i] = Fraction(1)
        out.append(E)
    for i in range(d):
        for j in range(i + 1, d):
            E = [[Fraction(0)] * d for _ in range(d)]
            E[i][j] = Fraction(1)
            E[j][i] = Fraction(1)
            out.append(E)
    return out


def _kron(A, B):
    ra, rb = len(A), len(B)
    out = [[Fraction(0)] * (ra * rb) for _ in range(ra * rb)]
    for i in range(ra):
        for k in range(ra):
            if A[i][k] == 0:
                continue
            for j in range(rb):
                for l in range(rb):
                    out[i * rb + j][k * rb + l] = Fraction(A[i][k]) * Fraction(B[j][l])
    return out


def _identity(d):
    return [[Fraction(1) if i == j else Fraction(0) for j in range(d)] for i in range(d)]


def qot_space(shape):
    """The constraint LSSM spanned by A (x) id and id (x) B.

    The overlap id (x) id is counted once by dropping id (x) E_11; the
    dimension is C(d1+1,2) + C(d2+1,2) - 1.
    """
    d1, d2 = shape.d1, shape.d2
    basis = []
    for U in _sym_units(d1):
        basis.append(_kron(U, _identity(d2)))
    for idx, U in enumerate(_sym_units(d2)):
        if idx == 0 and d1 > 0:
            # id (x) E_11 lies in the span of the two unit families combined
            continue
        basis.append(_kron(_identity(d1), U))
    if d1 == 1:
        # id (x) E_11 is no longer redundant relative to the single A-unit;
        # re-adding it recovers the full second factor
        basis = [_kron(_identity(d1), U) for U in _sym_units(d2)]
    n = shape.n
    zero = [[Fraction(0)] * n for _ in range(n)]
    return MatrixSpace(zero, basis)


def qot_gibbs_point(Y, Z):
    """The entropy-maximal coupling (Y (x) Z)/trace(Y) with margins (Y, Z)."""
    Y = [[Fraction(v) for v in row] for row in Y]
    Z = [[Fraction(v) for v in row] for row in Z]
    tY = sum(Y[i][i] for i in range(len(Y)))
    tZ = sum(Z[j][j] for j in range(len(Z)))
    if tY != tZ:
        raise ValueError("margins must have equal trace")
    for M in (Y, Z):
        eig = sym_eig(M, 53)
        if min(float(v) for v in eig.values) <= 0:
            raise ValueError("margins must be positive definite")
    K = _kron(Y, Z)
    return [[v / tY for v in row] for row in K]


def _pairs(d):
    return [(i, k) for i in range(1, d + 1) for k in range(i, d + 1)]


def _coordinate(ring, shape, i, j, k, l):
    """The coordinate x_{ij,kl} as a ring variable (symmetrized)."""
    a = shape.row(i, j)
    b = shape.row(k, l)
    return ring.var(x_name(a, b))


def _representative(shape, i, k, j, l):
    """Index pair (a, b), a <= b, for the monomial y_ik z_jl.

    The two coupling coordinates x_{ij,kl} and x_{il,kj} carry the same
    monomial; the representative is the lexicographically smallest pair.
    """
    cands = []
    for (jj, ll) in ((j, l), (l, j)):
        a = shape.row(i, jj)
        b = shape.row(k, ll)
        if a > b:
            a, b = b, a
        cands.append((a, b))
    return min(cands)


def segre_equations(shape, ring=None):
    """Equations of the closure of the coupling manifold.

    Linear forms x_{ij,kl} - x_{il,kj} identify coordinates carrying the
    same monomial y_ik z_jl, and the 2x2 minors of the representative
    matrix (rows: symmetric pairs of the first factor, columns: of the
    second) impose the rank-1 tensor structure.
    """
    d1, d2 = shape.d1, shape.d2
    n = shape.n
    if ring is None:
        ring = x_ring(n)
    gens = []
    for i in range(1, d1 + 1):
        for k in range(i + 1, d1 + 1):
            for j in range(1, d2 + 1):
                for l in range(j + 1, d2 + 1):
                    gens.append(
                        _coordinate(ring, shape, i, j, k, l)
                        - _coordinate(ring, shape, i, l, k, j)
                    )
    rows = _pairs(d1)
    cols = _pairs(d2)
    M = []
    for (i, k) in rows:
        row = []
        for (j, l) in cols:
            a, b = _representative(shape, i, k, j, l)
            row.append(ring.var(x_name(a, b)))
        M.append(row)
    for r1 in range(len(rows)):
        for r2 in range(r1 + 1, len(rows)):
            for c1 in range(len(cols)):
                for c2 in range(c1 + 1, len(cols)):
                    gens.append(M[r1][c1] * M[r2][c2] - M[r1][c2] * M[r2][c1])
    return Ideal(ring, gens)


def qot_image_membership(Y, Z, tol=1e-10):
    """True iff (Y, Z) is a feasible margin pair: both PSD, equal traces."""
    tY = sum(float(Y[i][i]) for i in range(len(Y)))
    tZ = sum(float(Z[j][j]) for j in range(len(Z)))
    scale = max(abs(tY), abs(tZ), 1.0)
    if abs(tY - tZ) > tol * scale:
        return False
    for M in (Y, Z):
        eig = sym_eig(M, 53)
        if min(float(v) for v in eig.values) < -tol * scale:
            return False
    return True
