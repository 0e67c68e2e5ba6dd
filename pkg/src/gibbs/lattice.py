"""Integer-lattice utilities: LLL reduction, Hermite normal form, kernels.

All routines work on small dense integer matrices (dimensions well under
100) represented as lists of lists of Python ints; exact arithmetic uses
fractions.Fraction where rational Gram--Schmidt data is needed.
"""

from fractions import Fraction
from math import gcd

__all__ = ["lll_reduce", "row_hnf", "integer_kernel", "saturate_lattice", "primitive"]


def primitive(vec):
    """Scale an integer vector to content 1 with a positive leading entry."""
    g = 0
    for v in vec:
        g = gcd(g, abs(v))
    if g == 0:
        return list(vec)
    out = [v // g for v in vec]
    for v in out:
        if v != 0:
            if v < 0:
                out = [-w for w in out]
            break
    return out


def lll_reduce(basis, delta=Fraction(99, 100)):
    """LLL-reduce a list of integer row vectors (textbook algorithm)."""
    B = [list(map(int, row)) for row in basis]
    n = len(B)
    if n <= 1:
        return B

    def gso(B):
        n = len(B)
        mu = [[Fraction(0)] * n for _ in range(n)]
        Bstar = []
        norms = []
        for i in range(n):
            v = [Fraction(x) for x in B[i]]
            for j in range(len(Bstar)):
                if norms[j] == 0:
                    mu[i][j] = Fraction(0)
                    continue
                num = sum(Fraction(B[i][k]) * Bstar[j][k] for k in range(len(v)))
                mu[i][j] = num / norms[j]
                v = [a - mu[i][j] * b for a, b in zip(v, Bstar[j])]
            Bstar.append(v)
            norms.append(sum(a * a for a in v))
        return mu, norms

    mu, norms = gso(B)
    k = 1
    while k < n:
        for j in range(k - 1, -1, -1):
            q = mu[k][j]
            r = int(q + Fraction(1, 2)) if q >= 0 else -int(-q + Fraction(1, 2))
            if r != 0:
                B[k] = [a - r * b for a, b in zip(B[k], B[j])]
                mu, norms = gso(B)
        if norms[k] >= (delta - mu[k][k - 1] ** 2) * norms[k - 1]:
            k += 1
        else:
            B[k], B[k - 1] = B[k - 1], B[k]
            mu, norms = gso(B)
            k = max(k - 1, 1)
    return B


def row_hnf(mat):
    """Row Hermite normal form (integer row operations only).

    Returns (H, U) with H = U * mat, U unimodular; zero rows of H are at the
    bottom.
    """
    A = [list(map(int, row)) for row in mat]
    m = len(A)
    ncols = len(A[0]) if m else 0
    U = [[1 if i == j else 0 for j in range(m)] for i in range(m)]
    row = 0
    for col in range(ncols):
        # find a pivot and clear the column below by gcd steps
        piv = None
        for r in range(row, m):
            if A[r][col] != 0:
                piv = r
                break
        if piv is None:
            continue
        A[row], A[piv] = A[piv], A[row]
        U[row], U[piv] = U[piv], U[row]
        for r in range(row + 1, m):
            while A[r][col] != 0:
                q = A[row][col] // A[r][col]
                A[row] = [a - q * b for a, b in zip(A[row], A[r])]
                U[row] = [a - q * b for a, b in zip(U[row], U[r])]
                A[row], A[r] = A[r], A[row]
                U[row], U[r] = U[r], U[row]
        if A[row][col] < 0:
            A[row] = [-a for a in A[row]]
            U[row] = [-a for a in U[row]]
        # reduce entries above the pivot
        for r in range(row):
            q = A[r][col] // A[row][col]
            if q != 0:
                A[r] = [a - q * b for a, b in zip(A[r], A[row])]
                U[r] = [a - q * b for a, b in zip(U[r], U[row])]
        row += 1
        if row == m:
            break
    return A, U


def integer_kernel(mat):
    """Basis of the saturated integer (left) null space {v : v * mat = 0}.

    Rows of the result form a basis of the full lattice of integer vectors
    annihilating the rows-space... precisely: v ranges over Z^m with
    sum_i v_i * mat[i] = 0, for mat with m rows.
    """
    m = len(mat)
    if m == 0:
        return []
    H, U = row_hnf(mat)
    out = [U[i] for i in range(m) if all(x == 0 for x in H[i])]
    return out


def saturate_lattice(rows):
    """Saturation of the lattice spanned by integer row vectors.

    Returns a basis of span_Q(rows) ∩ Z^n, LLL-reduced for small entries.
    """
    rows = [list(map(int, r)) for r in rows if any(v != 0 for v in r)]
    if not rows:
        return []
    ncols = len(rows[0])
    # kernel-of-kernel: K = {v : v ⊥ rowspace-annihilator} is the saturation
    ann = integer_kernel([[rows[i][j] for i in range(len(rows))] for j in range(ncols)])
    # ann rows are integer vectors w in Z^ncols with sum_j w_j * rows[_][j]... careful:
    # we transposed, so ann = {w in Z^ncols : w * rows^T = 0} = vectors orthogonal to all rows
    if not ann:
        # rows span Q^ncols: saturation is Z^ncols
        basis = [[1 if i == j else 0 for j in range(ncols)] for i in range(ncols)]
        return basis
    sat = integer_kernel([[ann[i][j] for i in range(len(ann))] for j in range(ncols)])
    # sat = {v in Z^ncols : v ⊥ all annihilators} = saturation of the row lattice
    basis = lll_reduce(sat)
    return [primitive(b) for b in basis if any(v != 0 for v in b)]
