"""Affine spaces of symmetric matrices and their spectral toolkit.

A :class:`MatrixSpace` is an affine space ``A0 + span(A1..Ad)`` of symmetric
``n x n`` matrices with rational entries.  This module provides:

* exact characteristic polynomials of the generic element ``A(y)`` via the
  Faddeev--LeVerrier recurrence over ``Q[y]``,
* the generic number ``m`` of distinct eigenvalues (and their multiplicities),
  decided symbolically through a pseudo-remainder gcd in ``Q(y)[lambda]``,
* the cleared-denominator Sylvester parametrization of ``exp(A(y))`` in the
  auxiliary eigenvalue variables ``l_i`` and exponential variables ``z_i``,
* arbitrary-precision symmetric eigendecomposition (cyclic Jacobi, mpmath)
  plus the matrix exponential and logarithm built on top of it.
"""

from fractions import Fraction

import mpmath as mp

from .ratpoly import MultiPoly, VarRing

__all__ = [
    "MatrixSpace",
    "CharPoly",
    "SylvesterParam",
    "SymEig",
    "charpoly",
    "sylvester_param",
    "sym_eig",
    "sym_exp",
    "sym_log",
    "default_ring",
    "x_name",
]


def _to_fraction_matrix(rows):
    out = []
    for row in rows:
        out.append([Fraction(v) for v in row])
    return out


def _is_symmetric_exact(mat):
    n = len(mat)
    return all(len(row) == n for row in mat) and all(
        mat[i][j] == mat[j][i] for i in range(n) for j in range(i + 1, n)
    )


def _upper_triangle_vector(mat):
    n = len(mat)
    return [mat[i][j] for i in range(n) for j in range(i, n)]


def _exact_rank(vectors):
    """Rank over Q of a list of rational row vectors (Gaussian elimination)."""
    rows = [list(v) for v in vectors]
    rank = 0
    ncols = len(rows[0]) if rows else 0
    col = 0
    while rank < len(rows) and col < ncols:
        pivot = None
        for r in range(rank, len(rows)):
            if rows[r][col] != 0:
                pivot = r
                break
        if pivot is None:
            col += 1
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        pv = rows[rank][col]
        for r in range(rank + 1, len(rows)):
            if rows[r][col] != 0:
                f = rows[r][col] / pv
                rows[r] = [a - f * b for a, b in zip(rows[r], rows[rank])]
        rank += 1
        col += 1
    return rank


class MatrixSpace:
    """An affine space ``A0 + span(A1..Ad)`` of symmetric rational matrices."""

    __slots__ = ("n", "d", "A0", "basis")

    def __init__(self, A0, basis):
        A0 = _to_fraction_matrix(A0)
        basis = [_to_fraction_matrix(B) for B in basis]
        n = len(A0)
        if not _is_symmetric_exact(A0):
            raise ValueError("A0 must be a symmetric square matrix")
        for k, B in enumerate(basis):
            if len(B) != n or not _is_symmetric_exact(B):
                raise ValueError("basis matrix %d is not symmetric %dx%d" % (k + 1, n, n))
        if basis:
            vecs = [_upper_triangle_vector(B) for B in basis]
            if _exact_rank(vecs) != len(basis):
                raise ValueError("basis matrices are linearly dependent")
        self.n = n
        self.d = len(basis)
        self.A0 = A0
        self.basis = basis

    @property
    def is_linear(self):
        """True when A0 = 0, i.e. the space passes through the origin."""
        return all(v == 0 for row in self.A0 for v in row)

    def y_names(self):
        return ["y_%d" % (k + 1) for k in range(self.d)]

    def evaluate(self, y):
        """Exact rational matrix ``A0 + sum y_k A_k`` for rational ``y``."""
        if len(y) != self.d:
            raise ValueError("expected %d coordinates, got %d" % (self.d, len(y)))
        y = [Fraction(v) for v in y]
        n = self.n
        out = [[self.A0[i][j] for j in range(n)] for i in range(n)]
        for c, B in zip(y, self.basis):
            if c == 0:
                continue
            for i in range(n):
                for j in range(n):
                    out[i][j] += c * B[i][j]
        return out

    def symbolic_matrix(self, ring, y_vars=None):
        """Entries of ``A(y)`` as MultiPoly in ``ring``.

        ``y_vars`` names the coordinate variables (default ``y_1..y_d``).
        """
        if y_vars is None:
            y_vars = self.y_names()
        gens = [ring.var(nm) for nm in y_vars]
        n = self.n
        out = [[ring.const(self.A0[i][j]) for j in range(n)] for i in range(n)]
        for g, B in zip(gens, self.basis):
            for i in range(n):
                for j in range(n):
                    if B[i][j] != 0:
                        out[i][j] = out[i][j] + ring.const(B[i][j]) * g
        return out


def x_name(i, j):
    """Canonical name of the symmetric-matrix coordinate, 1-based, i <= j."""
    if i > j:
        i, j = j, i
    return "x_%d_%d" % (i, j)


def default_ring(L, m, order="grevlex"):
    """The working ring [y_1..y_d, l_1..l_m, z_1..z_m, x_i_j (i<=j)]."""
    names = L.y_names()
    names += ["l_%d" % (i + 1) for i in range(m)]
    names += ["z_%d" % (i + 1) for i in range(m)]
    names += [x_name(i, j) for i in range(1, L.n + 1) for j in range(i, L.n + 1)]
    return VarRing(names, order)


class CharPoly:
    """Characteristic polynomial ``det(A(y) - lambda id)`` of a MatrixSpace.

    ``coeffs[i]`` is the coefficient of ``lambda^i`` for ``i < n``; the
    leading coefficient is ``(-1)^n``.  ``m`` is the generic number of
    distinct eigenvalues and ``multiplicities`` their (sorted, descending)
    generic multiplicities.
    """

    __slots__ = ("n", "ring", "coeffs", "m", "multiplicities")

    def __init__(self, n, ring, coeffs, m, multiplicities):
        self.n = n
        self.ring = ring
        self.coeffs = list(coeffs)
        self.m = m
        self.multiplicities = tuple(multiplicities)

    def lead_sign(self):
        return 1 if self.n % 2 == 0 else -1

    def evaluate_at(self, y):
        """Rational coefficient list [c_0 .. c_{n-1}, (-1)^n] at rational y."""
        assignment = {"y_%d" % (k + 1): Fraction(v) for k, v in enumerate(y)}
        vals = [c.evaluate(assignment) for c in self.coeffs]
        vals.append(Fraction(self.lead_sign()))
        return vals


def _poly_mat_mul(A, B, ring):
    n = len(A)
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            acc = ring.zero()
            for k in range(n):
                acc = acc + A[i][k] * B[k][j]
            row.append(acc)
        out.append(row)
    return out


def _poly_trace(A, ring):
    acc = ring.zero()
    for i in range(len(A)):
        acc = acc + A[i][i]
    return acc


def _lambda_derivative(coeffs):
    return [coeffs[i] * Fraction(i) for i in range(1, len(coeffs))]


def _lambda_degree(coeffs):
    for i in range(len(coeffs) - 1, -1, -1):
        if not coeffs[i].is_zero():
            return i
    return -1


def _strip_rational_content(coeffs):
    """Divide a lambda-coefficient list by its common rational content."""
    from math import gcd

    num_gcd = 0
    den_lcm = 1
    for c in coeffs:
        for coeff in c.terms.values():
            num_gcd = gcd(num_gcd, abs(coeff.numerator))
            den_lcm = den_lcm * coeff.denominator // gcd(den_lcm, coeff.denominator)
    if num_gcd == 0:
        return coeffs
    scale = Fraction(den_lcm, num_gcd)
    return [c * scale for c in coeffs]


def _pseudo_rem(f, g, ring):
    """Pseudo-remainder of f by g as polynomials in lambda over Q[y]."""
    f = list(f)
    dg = _lambda_degree(g)
    lg = g[dg]
    while True:
        df = _lambda_degree(f)
        if df < dg:
            break
        lf = f[df]
        # f := lg * f - lf * lambda^(df-dg) * g
        shift = df - dg
        newf = [lg * c for c in f]
        for k in range(dg + 1):
            newf[k + shift] = newf[k + shift] - lf * g[k]
        f = newf[: df + 1]
        while f and f[-1].is_zero():
            f.pop()
        if not f:
            break
        f = _strip_rational_content(f)
    return f


def _prs_gcd(f, g, ring):
    """gcd of f and g in Q(y)[lambda], up to a factor in Q[y] (PRS)."""
    f = [c for c in f]
    g = [c for c in g]
    while f and f[-1].is_zero():
        f.pop()
    while g and g[-1].is_zero():
        g.pop()
    if _lambda_degree(f) < _lambda_degree(g):
        f, g = g, f
    while g:
        r = _pseudo_rem(f, g, ring)
        f, g = g, r
    return f


def charpoly(L):
    """Exact characteristic polynomial of the generic element of ``L``.

    Coefficients are computed by the Faddeev--LeVerrier recurrence over the
    polynomial ring Q[y_1..y_d]; the generic eigenvalue-multiplicity pattern
    is read off the iterated gcd(P, dP/dlambda) degree sequence, computed by
    pseudo-remainder sequences so the answer is sample-independent.
    """
    n = L.n
    ring = VarRing(L.y_names() if L.d > 0 else ["y_1"], "grevlex")
    A = L.symbolic_matrix(ring, L.y_names() if L.d > 0 else [])
    if L.d == 0:
        A = [[ring.const(L.A0[i][j]) for j in range(n)] for i in range(n)]

    # Faddeev--LeVerrier for det(lambda*id - A) = lambda^n + b_1 lambda^{n-1} + ... + b_n
    ident = [[ring.one() if i == j else ring.zero() for j in range(n)] for i in range(n)]
    M = [row[:] for row in ident]
    b = []
    for k in range(1, n + 1):
        AM = _poly_mat_mul(A, M, ring)
        ck = _poly_trace(AM, ring) * Fraction(-1, k)
        b.append(ck)
        if k < n:
            M = [[AM[i][j] + (ck if i == j else ring.zero()) for j in range(n)] for i in range(n)]

    sign = 1 if n % 2 == 0 else -1
    # coefficient of lambda^i in det(A - lambda id) is (-1)^n * b_{n-i}
    coeffs = [(b[n - 1 - i] * Fraction(sign)) for i in range(n)]

    # monic lambda-coefficient list of det(lambda id - A) for the gcd chain
    monic = b[::-1] + [ring.one()]
    degrees = [n]
    cur = monic
    while _lambda_degree(cur) > 0:
        der = _lambda_derivative(cur)
        g = _prs_gcd(cur, der, ring)
        dg = _lambda_degree(g)
        degrees.append(dg)
        if dg <= 0:
            break
        cur = g
    if degrees[-1] != 0:
        degrees.append(0)

    # count_k = number of distinct roots with multiplicity >= k
    counts = [degrees[k - 1] - degrees[k] for k in range(1, len(degrees))]
    multiplicities = []
    for k in range(len(counts), 0, -1):
        exact = counts[k - 1] - (counts[k] if k < len(counts) else 0)
        multiplicities.extend([k] * exact)
    multiplicities.sort(reverse=True)
    m = len(multiplicities)
    assert sum(multiplicities) == n

    return CharPoly(n, ring, coeffs, m, multiplicities)


class SylvesterParam:
    """Cleared-denominator entries of ``phi(y, l, z) - X``.

    ``E2[k]`` runs over the upper triangle (i <= j, row-major); each entry is
    ``D * phi_ij - D * x_i_j`` where ``phi`` interpolates ``exp`` through the
    m generic eigenvalues and ``D`` is the Vandermonde determinant
    ``prod_{i<j} (l_i - l_j)``.
    """

    __slots__ = ("ring", "E2", "D", "m", "n")

    def __init__(self, ring, E2, D, m, n):
        self.ring = ring
        self.E2 = E2
        self.D = D
        self.m = m
        self.n = n


def sylvester_param(L, cp, ring=None):
    """Cleared-denominator Sylvester parametrization of exp over ``L``.

    With m generic distinct eigenvalues, the minimal polynomial of a generic
    element is prod_i (lambda - l_i), so

        exp(A(y)) = sum_i z_i * prod_{j != i} (A(y) - l_j id) / (l_i - l_j)

    with z_i standing for exp(l_i).  Multiplying by the Vandermonde
    determinant D clears every denominator; the per-term scale works out to
    s_i = (-1)^(i-1) * prod_{j<k, j,k != i} (l_j - l_k).
    """
    m = cp.m
    n = L.n
    if ring is None:
        ring = default_ring(L, m)
    lv = [ring.var("l_%d" % (i + 1)) for i in range(m)]
    zv = [ring.var("z_%d" % (i + 1)) for i in range(m)]
    A = L.symbolic_matrix(ring)

    D = ring.one()
    for i in range(m):
        for j in range(i + 1, m):
            D = D * (lv[i] - lv[j])

    total = [[ring.zero() for _ in range(n)] for _ in range(n)]
    for i in range(m):
        # s_i = D / prod_{j != i} (l_i - l_j), expanded without division
        s = ring.one() if i % 2 == 0 else -ring.one()
        for j in range(m):
            if j == i:
                continue
            for k in range(j + 1, m):
                if k == i:
                    continue
                s = s * (lv[j] - lv[k])
        term = [[s * zv[i] if a == b else ring.zero() for b in range(n)] for a in range(n)]
        for j in range(m):
            if j == i:
                continue
            factor = [[A[a][b] - (lv[j] if a == b else ring.zero()) for b in range(n)] for a in range(n)]
            term = _poly_mat_mul(term, factor, ring)
        for a in range(n):
            for b in range(n):
                total[a][b] = total[a][b] + term[a][b]

    E2 = []
    for a in range(n):
        for b in range(a, n):
            xab = ring.var(x_name(a + 1, b + 1))
            E2.append(total[a][b] - D * xab)
    return SylvesterParam(ring, E2, D, m, n)


# ---------------------------------------------------------------------------
# numeric spectral kernels (mpmath, configurable binary precision)
# ---------------------------------------------------------------------------


def _to_mpf(v):
    if isinstance(v, Fraction):
        return mp.mpf(v.numerator) / mp.mpf(v.denominator)
    return mp.mpf(v)


class SymEig:
    """Eigendecomposition of a symmetric matrix: V diag(values) V^T."""

    __slots__ = ("values", "vectors", "precision")

    def __init__(self, values, vectors, precision):
        self.values = values
        self.vectors = vectors
        self.precision = precision


def sym_eig(M, precision=53):
    """Cyclic-Jacobi eigendecomposition at the given binary precision.

    Returns eigenvalues in descending order; ``vectors`` has the matching
    eigenvectors as columns.  Raises ValueError on non-symmetric input.
    """
    n = len(M)
    with mp.workprec(precision + 20):
        A = [[_to_mpf(M[i][j]) for j in range(n)] for i in range(n)]
        scale = mp.mpf(0)
        for i in range(n):
            for j in range(n):
                scale += A[i][j] ** 2
        scale = mp.sqrt(scale)
        sym_tol = mp.mpf(2) ** (10 - precision) * (scale if scale > 0 else mp.mpf(1))
        for i in range(n):
            for j in range(i + 1, n):
                if abs(A[i][j] - A[j][i]) > sym_tol:
                    raise ValueError("matrix is not symmetric within tolerance")
                avg = (A[i][j] + A[j][i]) / 2
                A[i][j] = avg
                A[j][i] = avg
        V = [[mp.mpf(1) if i == j else mp.mpf(0) for j in range(n)] for i in range(n)]
        if scale == 0:
            values = [mp.mpf(0)] * n
            return SymEig(values, V, precision)
        off_tol = mp.mpf(2) ** (6 - precision) * scale
        for _sweep in range(80):
            off = mp.mpf(0)
            for p in range(n):
                for q in range(p + 1, n):
                    off += A[p][q] ** 2
            if mp.sqrt(2 * off) < off_tol:
                break
            for p in range(n):
                for q in range(p + 1, n):
                    apq = A[p][q]
                    if abs(apq) <= off_tol / (10 * n * n):
                        continue
                    theta = (A[q][q] - A[p][p]) / (2 * apq)
                    if theta >= 0:
                        t = 1 / (theta + mp.sqrt(theta * theta + 1))
                    else:
                        t = -1 / (-theta + mp.sqrt(theta * theta + 1))
                    c = 1 / mp.sqrt(t * t + 1)
                    s = t * c
                    for k in range(n):
                        akp = A[k][p]
                        akq = A[k][q]
                        A[k][p] = c * akp - s * akq
                        A[k][q] = s * akp + c * akq
                    for k in range(n):
                        apk = A[p][k]
                        aqk = A[q][k]
                        A[p][k] = c * apk - s * aqk
                        A[q][k] = s * apk + c * aqk
                    for k in range(n):
                        vkp = V[k][p]
                        vkq = V[k][q]
                        V[k][p] = c * vkp - s * vkq
                        V[k][q] = s * vkp + c * vkq
        order = sorted(range(n), key=lambda i: -A[i][i])
        values = [A[i][i] for i in order]
        vectors = [[V[r][i] for i in order] for r in range(n)]
        return SymEig(values, vectors, precision)


def _apply_spectral(M, f, precision):
    eig = sym_eig(M, precision)
    n = len(eig.values)
    with mp.workprec(precision + 20):
        fv = [f(v) for v in eig.values]
        V = eig.vectors
        out = [[mp.mpf(0)] * n for _ in range(n)]
        for i in range(n):
            for j in range(i, n):
                acc = mp.mpf(0)
                for k in range(n):
                    acc += V[i][k] * fv[k] * V[j][k]
                out[i][j] = acc
                out[j][i] = acc
        return out


def sym_exp(M, precision=53):
    """Matrix exponential of a symmetric matrix via eigendecomposition."""
    return _apply_spectral(M, mp.exp, precision)


def sym_log(M, precision=53):
    """Matrix logarithm of a positive definite symmetric matrix."""
    eig = sym_eig(M, precision)
    tol = mp.mpf(2) ** (6 - precision) * (max(abs(v) for v in eig.values) + 1)
    if min(eig.values) <= tol:
        raise ValueError("matrix is not positive definite")
    n = len(eig.values)
    with mp.workprec(precision + 20):
        fv = [mp.log(v) for v in eig.values]
        V = eig.vectors
        out = [[mp.mpf(0)] * n for _ in range(n)]
        for i in range(n):
            for j in range(i, n):
                acc = mp.mpf(0)
                for k in range(n):
                    acc += V[i][k] * fv[k] * V[j][k]
                out[i][j] = acc
                out[j][i] = acc
        return out
