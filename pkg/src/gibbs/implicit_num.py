"""Numerical implicitization of exponential images of matrix spaces.

Sample the manifold exp(A(y)), build the Vandermonde matrix of all
monomials of degree <= D in the matrix coordinates, and read vanishing
polynomials off its numerical kernel.  Kernel vectors are rationalized by
continued fractions and re-verified on fresh samples at elevated precision.
"""

import random
from fractions import Fraction
from itertools import combinations_with_replacement

import mpmath as mp
import numpy as np

from .ratpoly import MultiPoly
from .pencils import x_ring
from .spectra import sym_eig, sym_exp, x_name

__all__ = [
    "SampleSet",
    "KernelBasis",
    "sample_manifold",
    "kernel_of_degree",
    "rationalize_vector",
    "verify_polynomial",
    "monomials_up_to_degree",
    "kernel_ideal",
    "refine_kernel_vector",
    "implicitize_numeric",
]


class SampleSet:
    """Reproducible samples (y, exp(A(y))) on the exponential image."""

    __slots__ = ("L", "points", "seed", "precision", "box")

    def __init__(self, L, points, seed, precision, box):
        self.L = L
        self.points = points
        self.seed = seed
        self.precision = precision
        self.box = box


class KernelBasis:
    """Numerical kernel of the degree-D Vandermonde matrix.

    ``monomials`` lists exponent tuples over the upper-triangle coordinates
    x_i_j (i <= j, row-major); ``vectors`` the kernel coefficient vectors
    (numpy float until rationalized); ``singular_values`` the trailing
    spectrum; ``verified`` per-vector verification flags.
    """

    __slots__ = ("degree", "monomials", "vectors", "singular_values", "verified")

    def __init__(self, degree, monomials, vectors, singular_values):
        self.degree = degree
        self.monomials = monomials
        self.vectors = vectors
        self.singular_values = singular_values
        self.verified = [False] * len(vectors)

    def polynomial(self, index, ring=None, coefficients=None):
        """Build the MultiPoly of kernel vector ``index`` (or given coeffs)."""
        nvars = len(self.monomials[0]) if self.monomials else 0
        n = _matrix_size_from_vars(nvars)
        if ring is None:
            ring = x_ring(n)
        coeffs = coefficients if coefficients is not None else self.vectors[index]
        terms = {}
        for mono, c in zip(self.monomials, coeffs):
            c = Fraction(c) if not isinstance(c, float) else Fraction(c).limit_denominator(10**12)
            if c != 0:
                terms[tuple(mono)] = Fraction(c)
        return MultiPoly(ring, terms)


def _matrix_size_from_vars(nvars):
    n = 1
    while n * (n + 1) // 2 < nvars:
        n += 1
    if n * (n + 1) // 2 != nvars:
        raise ValueError("variable count %d is not a triangular number" % nvars)
    return n


def _random_rational_point(rng, d, box):
    hi, den = box
    return [Fraction(rng.randint(-hi, hi), den) for _ in range(d)]


def sample_manifold(L, M, seed=0, precision=53, box=(10, 7)):
    """Draw M reproducible samples (y, exp(A(y))) from the manifold.

    Coordinates come from the rational grid {k/den : |k| <= hi}; points are
    halved until the spectrum of A(y) sits inside [-4, 4] so the
    exponentials stay well-scaled.
    """
    rng = random.Random(seed)
    points = []
    for _ in range(M):
        y = _random_rational_point(rng, L.d, box)
        for _ in range(12):
            eig = sym_eig(L.evaluate(y), 53)
            radius = max((abs(float(v)) for v in eig.values), default=0.0)
            if radius <= 4.0:
                break
            y = [v / 2 for v in y]
        X = sym_exp(L.evaluate(y), precision)
        points.append((tuple(y), X))
    return SampleSet(L, points, seed, precision, box)


def monomials_up_to_degree(nvars, D):
    """Exponent tuples of total degree <= D, graded and deterministic."""
    out = []
    for deg in range(D + 1):
        batch = set()
        for combo in combinations_with_replacement(range(nvars), deg):
            e = [0] * nvars
            for v in combo:
                e[v] += 1
            batch.add(tuple(e))
        out.extend(sorted(batch))
    return out


def kernel_of_degree(S, D, tol=None):
    """Vanishing polynomials of degree <= D as a numerical kernel.

    The Vandermonde columns are scaled to unit norm before the SVD and the
    scaling is undone afterwards; kernel vectors are right singular vectors
    with singular value below tol * sigma_max.  Full column rank means no
    relations of degree <= D.
    """
    L = S.L
    nvars = L.n * (L.n + 1) // 2
    monos = monomials_up_to_degree(nvars, D)
    N = len(monos)
    M = len(S.points)
    if M < N:
        raise ValueError("need at least %d samples for degree %d, got %d" % (N, D, M))
    if tol is None:
        tol = 1e-8 if S.precision <= 53 else 1e-16

    # per-sample coordinate values in float64, then power tables
    coords = np.empty((M, nvars))
    for s, (_y, X) in enumerate(S.points):
        k = 0
        for i in range(L.n):
            for j in range(i, L.n):
                coords[s, k] = float(X[i][j])
                k += 1
    powers = [None] * nvars
    for v in range(nvars):
        tab = np.empty((D + 1, M))
        tab[0] = 1.0
        for e in range(1, D + 1):
            tab[e] = tab[e - 1] * coords[:, v]
        powers[v] = tab

    A = np.empty((M, N))
    for c, mono in enumerate(monos):
        col = None
        for v, e in enumerate(mono):
            if e:
                col = powers[v][e] if col is None else col * powers[v][e]
        A[:, c] = 1.0 if col is None else col

    scales = np.linalg.norm(A, axis=0)
    scales[scales == 0] = 1.0
    A /= scales
    _u, sigma, vt = np.linalg.svd(A, full_matrices=False)
    del _u, A
    smax = sigma[0] if len(sigma) else 0.0
    kernel = []
    for idx in range(N - 1, -1, -1):
        if sigma[idx] < tol * smax:
            vec = vt[idx] / scales
            vec = vec / np.linalg.norm(vec)
            kernel.append(vec)
        else:
            break
    kernel.reverse()
    trailing = sigma[max(0, N - max(len(kernel), 8)) :].tolist()
    return KernelBasis(D, monos, kernel, trailing)


def rationalize_vector(v, tol=1e-7, max_den=10**9):
    """Rationalize a numeric kernel vector into a content-1 integer vector.

    The vector is normalized by its first numerically nonzero entry, each
    entry is replaced by its continued-fraction convergent within tol, and
    denominators are cleared.  Raises ValueError when an entry admits no
    convergent with denominator <= max_den inside tol.
    """
    from math import gcd

    v = [float(x) for x in v]
    scale = max(abs(x) for x in v)
    if scale == 0:
        raise ValueError("zero vector")
    pivot = next(x for x in v if abs(x) > 1e-6 * scale)
    rationals = []
    for x in v:
        x = x / pivot
        f = Fraction(x).limit_denominator(max_den)
        if abs(float(f) - x) > tol * max(1.0, abs(x)):
            raise ValueError("entry %r is not rationalizable within tol" % x)
        rationals.append(f)
    den = 1
    for f in rationals:
        den = den * f.denominator // gcd(den, f.denominator)
    ints = [int(f * den) for f in rationals]
    g = 0
    for a in ints:
        g = gcd(g, abs(a))
    if g > 1:
        ints = [a // g for a in ints]
    for a in ints:
        if a != 0:
            if a < 0:
                ints = [-b for b in ints]
            break
    return ints


def _eval_poly_mp(p, assignment):
    """Evaluate a MultiPoly at an mpf assignment; returns (value, term_scale)."""
    idx = p.ring._index
    total = mp.mpf(0)
    scale = mp.mpf(0)
    values = [assignment[nm] for nm in p.ring.names]
    for exps, coeff in p.terms.items():
        t = mp.mpf(coeff.numerator) / mp.mpf(coeff.denominator)
        for v, e in enumerate(exps):
            if e:
                t *= values[v] ** e
        total += t
        scale = max(scale, abs(t))
    return total, scale


def verify_polynomial(p, L, k=20, precision=113, seed=17, box=(10, 7)):
    """True iff p vanishes on k fresh samples at the stated precision.

    The residual is measured relative to the largest term magnitude, with
    threshold 10^(-0.15 * precision).
    """
    S = sample_manifold(L, k, seed=seed, precision=precision, box=box)
    threshold = mp.mpf(10) ** (-0.15 * precision)
    with mp.workprec(precision + 20):
        for _y, X in S.points:
            assignment = {}
            for i in range(L.n):
                for j in range(i, L.n):
                    assignment[x_name(i + 1, j + 1)] = X[i][j]
            value, scale = _eval_poly_mp(p, assignment)
            if scale == 0:
                continue
            if abs(value) > threshold * scale:
                return False
    return True


def kernel_ideal(kb, ring=None, tol=1e-6, max_den=10**9):
    """Echelonize the kernel span into rationalized generators.

    Kernel vectors are brought to reduced row echelon form with pivots on
    the largest monomial in the ring order, so each generator has a
    distinct leading term and small rational coefficients.  Returns the
    list of MultiPoly generators (content-1 integer coefficients).
    """
    if not kb.vectors:
        return []
    nvars = len(kb.monomials[0])
    n = _matrix_size_from_vars(nvars)
    if ring is None:
        ring = x_ring(n)
    # columns ordered by descending ring order of the monomials
    order = sorted(range(len(kb.monomials)), key=lambda i: ring.exp_key(kb.monomials[i]), reverse=True)
    K = np.array([np.asarray(v, dtype=float) for v in kb.vectors])[:, order]
    rows, cols = K.shape
    r = 0
    for c in range(cols):
        if r >= rows:
            break
        piv = r + int(np.argmax(np.abs(K[r:, c])))
        if abs(K[piv, c]) < 1e-8:
            continue
        K[[r, piv]] = K[[piv, r]]
        K[r] /= K[r, c]
        for other in range(rows):
            if other != r and abs(K[other, c]) > 0:
                K[other] -= K[other, c] * K[r]
        r += 1
    gens = []
    for row in K[:r]:
        ints = rationalize_vector(row, tol=tol, max_den=max_den)
        terms = {}
        for pos, c in zip(order, ints):
            if c:
                terms[tuple(kb.monomials[pos])] = Fraction(c)
        gens.append(MultiPoly(ring, terms))
    return gens


def refine_kernel_vector(S, monomials, vec, support_tol=1e-3):
    """Re-solve a kernel vector on its thresholded support alone.

    A singular vector from an ill-conditioned Vandermonde carries admixture
    of near-kernel noise directions with amplitude ~ noise / spectral gap,
    which ruins rationalization.  Restricting to the columns where the
    vector is non-negligible gives a small well-separated kernel problem
    whose solution is clean.  Returns the refined full-length vector, or
    None when the restricted kernel is not one-dimensional.
    """
    vec = np.asarray(vec, dtype=float)
    vmax = np.max(np.abs(vec))
    if vmax == 0:
        return None
    support = [c for c in range(len(monomials)) if abs(vec[c]) > support_tol * vmax]
    if not 0 < len(support) < len(monomials):
        return None
    n = S.L.n
    nvars = n * (n + 1) // 2
    M = len(S.points)
    coords = np.empty((M, nvars))
    for s, (_y, X) in enumerate(S.points):
        k = 0
        for i in range(n):
            for j in range(i, n):
                coords[s, k] = float(X[i][j])
                k += 1
    V = np.empty((M, len(support)))
    for ci, c in enumerate(support):
        col = np.ones(M)
        for v, e in enumerate(monomials[c]):
            if e:
                col = col * coords[:, v] ** e
        V[:, ci] = col
    scale = np.linalg.norm(V, axis=0)
    scale[scale == 0] = 1.0
    _u, sv, vt = np.linalg.svd(V / scale, full_matrices=False)
    if not len(sv) or int(np.sum(sv < 1e-10 * max(sv[0], 1.0))) != 1:
        return None
    refined = np.zeros(len(monomials))
    for c, val in zip(support, vt[-1] / scale):
        refined[c] = val
    return refined


def implicitize_numeric(L, D, margin=200, seed=0, precision=53, tol=None, verify=True):
    """End-to-end numerical implicitization at degree <= D.

    Returns (KernelBasis, polynomials): the kernel with rationalized,
    verified polynomials attached (KernelBasis.verified flags updated).
    Vectors that fail to rationalize or verify directly are retried after
    support-restriction refinement.
    """
    nvars = L.n * (L.n + 1) // 2
    N = len(monomials_up_to_degree(nvars, D))
    S = sample_manifold(L, N + margin, seed=seed, precision=precision)
    kb = kernel_of_degree(S, D, tol=tol)
    ring = x_ring(L.n)
    polys = []
    for i, vec in enumerate(kb.vectors):
        candidates = [vec]
        refined = refine_kernel_vector(S, kb.monomials, vec)
        if refined is not None:
            candidates.append(refined)
        best = None
        for cand in candidates:
            try:
                ints = rationalize_vector(cand)
            except ValueError:
                continue
            p = kb.polynomial(i, ring=ring, coefficients=ints)
            if not verify:
                best = p
                break
            if verify_polynomial(p, L, precision=max(113, precision)):
                kb.verified[i] = True
                best = p
                break
            if best is None:
                best = p
        polys.append(best)
    return kb, polys
