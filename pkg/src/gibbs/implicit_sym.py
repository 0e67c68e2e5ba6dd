"""Symbolic implicitization of the exponential image of a matrix space.

The pipeline assembles, in the ring Q[y, l, z, x], the equations that tie
the eigenvalue variables l_i to the characteristic polynomial of A(y)
(Vieta equations E1), the cleared-denominator interpolation of exp(A(y))
through the eigenvalues (E2), and the toric binomials coming from certified
Q-linear eigenvalue relations (E3).  Saturating by the eigenvalue
discriminant D and eliminating (y, l, z) yields the ideal J of the closure
of the exponential image in the matrix coordinates x_i_j.

Commuting families take an exact fast path: the family is diagonalized
over Q or a real quadratic field Q(sqrt(k)), the eigenvalue relation
lattice is computed exactly, and the lattice ideal is conjugated back into
the matrix coordinates by an exact linear substitution.
"""

import math
import random
import time
from fractions import Fraction

import mpmath as mp

from .groebner import (
    BudgetExceededError,
    DEFAULT_BUDGET,
    Ideal,
    buchberger,
    eliminate,
    saturate,
)
from .lattice import integer_kernel
from .pencils import x_ring
from .quadext import find_quadratic
from .ratpoly import MultiPoly, VarRing
from .relations import detect_relations, relation_linear_forms, toric_ideal
from .spectra import charpoly, sylvester_param, x_name

__all__ = [
    "ImplicitResult",
    "implicitize",
    "implicitize_commuting",
    "dimension_check",
    "is_commuting",
]


class ImplicitResult:
    """Implicit equations of the exponential image of a matrix space.

    ``ideal_J`` is an Ideal in the matrix coordinates x_i_j (i <= j) whose
    generators form a reduced Groebner basis; ``gibbs_plane`` collects its
    affine-linear generators; ``certification`` is "exact" when every step
    was carried out in exact arithmetic and "relation-certified" when the
    eigenvalue-relation lattice rests on high-precision numerics;
    ``diagnostics`` records timings, the eigenvalue structure, and the
    relation set used.
    """

    __slots__ = ("ideal_J", "gibbs_plane", "certification", "diagnostics")

    def __init__(self, ideal_J, gibbs_plane, certification, diagnostics):
        self.ideal_J = ideal_J
        self.gibbs_plane = list(gibbs_plane)
        self.certification = certification
        self.diagnostics = dict(diagnostics)

    def __repr__(self):
        return "ImplicitResult(%d generators, plane dim cut %d, %s)" % (
            len(self.ideal_J.generators),
            len(self.gibbs_plane),
            self.certification,
        )


def _charpoly_factor_coeffs(ring, l_names, mults):
    """Lambda-coefficients of prod_i (lambda - l_i)^(mu_i), low to high."""
    coeffs = [ring.one()]
    for nm, mu in zip(l_names, mults):
        lv = ring.var(nm)
        for _ in range(mu):
            new = [ring.zero() for _ in range(len(coeffs) + 1)]
            for i, c in enumerate(coeffs):
                new[i + 1] = new[i + 1] + c
                new[i] = new[i] - lv * c
            coeffs = new
    return coeffs


def implicitize(L, budget=DEFAULT_BUDGET, samples=10, precision=256, seed=1, relset=None):
    """Implicit equations of the closure of exp(A0 + sum y_i A_i).

    Assembles the Vieta, interpolation, and toric equation sets, saturates
    by the discriminant-like denominator D, and eliminates the auxiliary
    variables in a single Groebner pass.  ``relset`` may supply a
    precomputed eigenvalue relation set.  Raises RuntimeError (with the
    exceeded-budget cause attached) when the Groebner budget runs out; the
    numerical kernel pipeline is the fallback in that case.
    """
    t_start = time.time()
    timings = {}
    cp = charpoly(L)
    m = cp.m
    n = L.n
    timings["charpoly"] = time.time() - t_start

    t0 = time.time()
    if relset is None:
        relset = detect_relations(L, cp, samples=samples, precision=precision, seed=seed)
    timings["relations"] = time.time() - t0

    if not relset.lattice:
        # free spectrum: the exponential coordinates span all polynomials in
        # A(y) of degree < m, so the variety is the closure of the image of
        # (y, c) -> sum_t c_t A(y)^t and the eigenvalue variables drop out
        return _implicitize_free(L, cp, relset, budget, timings, t_start, seed)

    # relation-bearing spectrum: the full eigenvalue system is only viable
    # for small variable counts; larger spaces go through the verified
    # high-precision kernel assembly
    n_system_vars = 1 + L.d + 2 * m + n * (n + 1) // 2
    if n_system_vars > 16:
        return _implicitize_relational(
            L, cp, relset, budget, timings, t_start, seed, precision
        )

    t0 = time.time()
    sp = sylvester_param(L, cp)
    ring = sp.ring
    timings["parametrization"] = time.time() - t0

    l_names = ["l_%d" % (i + 1) for i in range(m)]
    z_names = ["z_%d" % (i + 1) for i in range(m)]

    # multiplicities aligned with the relation labels (descending clusters)
    mults = relset.multiplicities
    if mults is None or sorted(mults, reverse=True) != sorted(cp.multiplicities, reverse=True):
        mults = cp.multiplicities

    sign = Fraction(cp.lead_sign())
    factor = _charpoly_factor_coeffs(ring, l_names, mults)
    E1 = []
    for i in range(n):
        E1.append(cp.coeffs[i].convert(ring) - factor[i] * sign)
    E1 += relation_linear_forms(relset, ring, l_names)
    E3 = toric_ideal(relset, ring, z_names)

    gens = E1 + sp.E2 + E3

    # saturation by D and elimination of the auxiliary block in one pass:
    # (I : D^inf) ∩ Q[x] equals <I, 1 - t*D> ∩ Q[x]
    tname = "t_sat"
    ext = VarRing((tname,) + tuple(ring.names), "grevlex")
    ext_gens = [g.convert(ext) for g in gens]
    ext_gens.append(ext.one() - ext.var(tname) * sp.D.convert(ext))
    drop = [tname] + L.y_names() + l_names + z_names

    t0 = time.time()
    try:
        J = eliminate(Ideal(ext, ext_gens), drop, budget=budget)
        timings["elimination"] = time.time() - t0
        t0 = time.time()
        gbJ = buchberger(J, budget=budget)
        timings["reduce"] = time.time() - t0
    except BudgetExceededError as exc:
        raise RuntimeError(
            "symbolic elimination exceeded the Groebner budget (%d pairs); "
            "consider the numerical kernel pipeline (implicitize_numeric)" % budget
        ) from exc

    xr = x_ring(n)
    basis = [b.convert(xr) for b in gbJ.basis]
    ideal_J = Ideal(xr, basis)
    plane = [b for b in basis if b.total_degree() <= 1 and not b.is_zero()]

    certification = "exact" if not relset.lattice and not relset.affine else "relation-certified"
    timings["total"] = time.time() - t_start
    diagnostics = {
        "m": m,
        "multiplicities": tuple(mults),
        "relations": relset,
        "lattice_rank": len(relset.lattice),
        "affine_relations_omitted": len(relset.affine),
        "generators": len(basis),
        "route": "elimination",
        "timings": timings,
    }
    return ImplicitResult(ideal_J, plane, certification, diagnostics)


# ---------------------------------------------------------------------------
# free-spectrum route: implicitization of (y, c) -> sum_t c_t A(y)^t
# ---------------------------------------------------------------------------


def _power_map(L, m):
    """Parameter ring Q[y, c] and components of (y, c) -> sum_t c_t A(y)^t.

    Returns (pring, comps) with comps listing the entries (i <= j) of the
    matrix polynomial in the x-coordinate order.
    """
    n, d = L.n, L.d
    ynames = tuple("y_%d" % (i + 1) for i in range(d))
    cnames = tuple("c_%d" % t for t in range(m))
    pring = VarRing(ynames + cnames, "grevlex")
    A = [[pring.const(L.A0[i][j]) for j in range(n)] for i in range(n)]
    for t, B in enumerate(L.basis):
        yv = pring.var(ynames[t])
        for i in range(n):
            for j in range(n):
                if B[i][j]:
                    A[i][j] = A[i][j] + pring.const(B[i][j]) * yv
    pows = [[[pring.one() if i == j else pring.zero() for j in range(n)] for i in range(n)]]
    for _ in range(m - 1):
        P = pows[-1]
        pows.append(
            [[sum((P[i][k] * A[k][j] for k in range(n)), pring.zero()) for j in range(n)]
             for i in range(n)]
        )
    comps = []
    for i in range(n):
        for j in range(i, n):
            psi = pring.zero()
            for t in range(m):
                psi = psi + pring.var(cnames[t]) * pows[t][i][j]
            comps.append(psi)
    return pring, comps


def _exact_rref(rows):
    """In-place fraction RREF; returns (rank, pivot column list)."""
    if not rows:
        return 0, []
    ncols = len(rows[0])
    rank = 0
    pivots = []
    for col in range(ncols):
        piv = None
        for r in range(rank, len(rows)):
            if rows[r][col]:
                piv = r
                break
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = rows[rank][col]
        rows[rank] = [v / inv for v in rows[rank]]
        for r in range(len(rows)):
            if r != rank and rows[r][col]:
                c = rows[r][col]
                rows[r] = [a - c * b for a, b in zip(rows[r], rows[rank])]
        pivots.append(col)
        rank += 1
        if rank == len(rows):
            break
    return rank, pivots


def _nullspace(rows, ncols):
    """Exact kernel basis (list of Fraction vectors) of the row system."""
    work = [list(r) for r in rows]
    rank, pivots = _exact_rref(work)
    pivset = set(pivots)
    free = [c for c in range(ncols) if c not in pivset]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for r, p in enumerate(pivots):
            v[p] = -work[r][f]
        basis.append(v)
    return basis


def _degree_monomials(k, degree):
    """Exponent tuples over k symbols with total degree exactly ``degree``."""
    if k == 0:
        return [()] if degree == 0 else []
    out = []

    def rec(prefix, left, remaining):
        if remaining == 1:
            out.append(tuple(prefix + [left]))
            return
        for e in range(left, -1, -1):
            rec(prefix + [e], left - e, remaining - 1)

    rec([], degree, k)
    return out


def _monomial_product(cache, comps, exp):
    """Memoized symbolic product prod_i comps[i]^exp[i]."""
    if exp in cache:
        return cache[exp]
    if not any(exp):
        return comps[0].ring.one()
    i = next(t for t, e in enumerate(exp) if e)
    sub = list(exp)
    sub[i] -= 1
    p = _monomial_product(cache, comps, tuple(sub)) * comps[i]
    cache[exp] = p
    return p


def _sampled_kernel(comps, pring, degree, rng, cache):
    """Exact basis of degree-``degree`` forms vanishing on the image.

    Random rational samples of the parametrization propose a kernel;
    every basis vector is then verified as a polynomial identity, and
    failed verifications feed back as additional sample rows.  The
    returned vectors are certified exact.
    """
    monos = _degree_monomials(len(comps), degree)
    names = pring.names
    rows = []
    for _round in range(12):
        need = len(monos) + 8 + 4 * _round - len(rows)
        for _ in range(max(need, 4)):
            pt = {nm: Fraction(rng.randint(-9, 9), rng.randint(1, 7)) for nm in names}
            vals = [c.evaluate(pt) for c in comps]
            row = []
            for exp in monos:
                term = Fraction(1)
                for v, e in zip(vals, exp):
                    if e:
                        term *= v**e
                row.append(term)
            rows.append(row)
        kernel = _nullspace(rows, len(monos))
        if not kernel:
            return [], monos
        good = True
        for v in kernel:
            total = pring.zero()
            for coeff, exp in zip(v, monos):
                if coeff:
                    total = total + pring.const(coeff) * _monomial_product(cache, comps, exp)
            if not total.is_zero():
                good = False
                break
        if good:
            return kernel, monos
    raise RuntimeError("kernel sampling failed to stabilize")


def _jacobian_rank(comps, pring, rng, tries=5):
    """Largest exact Jacobian rank of the map over random rational points."""
    names = pring.names
    derivs = [[c.derivative(nm) for nm in names] for c in comps]
    best = 0
    for _ in range(tries):
        pt = {nm: Fraction(rng.randint(-9, 9), rng.randint(1, 7)) for nm in names}
        M = [[dv.evaluate(pt) for dv in row] for row in derivs]
        rank, _p = _exact_rref(M)
        best = max(best, rank)
        if best == min(len(comps), len(names)):
            break
    return best


def _implicitize_free(L, cp, relset, budget, timings, t_start, seed):
    """Implicitization when the eigenvalue functions satisfy no relations.

    The image is the cone of polynomial expressions in A(y), so its ideal
    is homogeneous and is assembled degree by degree from exactly verified
    vanishing forms.  Two certificates establish completeness: either the
    reduced-coordinate image is dense (ideal generated by linear forms) or
    it is a hypersurface cut out by the unique minimal-degree form.  When
    neither certificate applies, the graph ideal of the power map is
    eliminated directly under the Groebner budget.
    """
    n, m = L.n, cp.m
    rng = random.Random(seed + 17)
    t0 = time.time()
    pring, comps = _power_map(L, m)
    timings["parametrization"] = time.time() - t0
    xr = x_ring(n)
    xnames = [x_name(i, j) for i in range(1, n + 1) for j in range(i, n + 1)]

    t0 = time.time()
    cache = {}
    lin_kernel, lin_monos = _sampled_kernel(comps, pring, 1, rng, cache)
    # RREF the linear forms so each has a distinct pivot coordinate
    rank, pivots = _exact_rref(lin_kernel) if lin_kernel else (0, [])
    lin_kernel = lin_kernel[:rank]
    linear_forms = []
    for v in lin_kernel:
        f = xr.zero()
        for coeff, nm in zip(v, xnames):
            if coeff:
                f = f + xr.const(coeff) * xr.var(nm)
        linear_forms.append(f)
    free_idx = [i for i in range(len(comps)) if i not in set(pivots)]
    red = [comps[i] for i in free_idx]
    cache = {}  # reduced component list: fresh product cache
    r = _jacobian_rank(red, pring, rng)
    timings["linear_part"] = time.time() - t0

    certificate = None
    extra = []
    if r == len(red):
        certificate = "dense-complement"
    elif r == len(red) - 1:
        for e in range(2, n + 3):
            kernel, monos = _sampled_kernel(red, pring, e, rng, cache)
            if not kernel:
                continue
            if len(kernel) == 1:
                v = kernel[0]
                f = xr.zero()
                for coeff, exp in zip(v, monos):
                    if coeff:
                        mono = xr.one()
                        for t, ee in enumerate(exp):
                            if ee:
                                mono = mono * xr.var(xnames[free_idx[t]]) ** ee
                        f = f + xr.const(coeff) * mono
                extra = [f]
                certificate = "principal-complement"
            break

    if certificate is not None:
        t0 = time.time()
        gbJ = buchberger(Ideal(xr, linear_forms + extra), budget=budget)
        timings["reduce"] = time.time() - t0
        basis = list(gbJ.basis)
        route = "kernel-certificate"
    else:
        # no structural certificate: eliminate the graph ideal directly
        full = VarRing(tuple(pring.names) + tuple(xnames), "grevlex")
        gens = [full.var(nm) - c.convert(full) for nm, c in zip(xnames, comps)]
        t0 = time.time()
        try:
            J = eliminate(Ideal(full, gens), list(pring.names), budget=budget)
            gbJ = buchberger(J, budget=budget)
        except BudgetExceededError as exc:
            raise RuntimeError(
                "symbolic elimination exceeded the Groebner budget (%d pairs); "
                "consider the numerical kernel pipeline (implicitize_numeric)" % budget
            ) from exc
        timings["elimination"] = time.time() - t0
        basis = [b.convert(xr) for b in gbJ.basis]
        route = "power-elimination"

    ideal_J = Ideal(xr, basis)
    plane = [b for b in basis if b.total_degree() <= 1 and not b.is_zero()]
    timings["total"] = time.time() - t_start
    diagnostics = {
        "m": m,
        "multiplicities": tuple(cp.multiplicities),
        "relations": relset,
        "lattice_rank": 0,
        "affine_relations_omitted": len(relset.affine),
        "generators": len(basis),
        "route": route,
        "certificate": certificate,
        "jacobian_rank": r,
        "timings": timings,
    }
    certification = "exact" if not relset.affine else "relation-certified"
    return ImplicitResult(ideal_J, plane, certification, diagnostics)


def _gb_dimension(gb, nvars):
    """Krull dimension of the quotient from the leading-term staircase.

    The dimension is the largest cardinality of a variable subset that
    meets the support of no leading monomial.
    """
    supports = []
    for b in gb.basis:
        exp, _c = b.leading_term()
        supports.append(frozenset(i for i, e in enumerate(exp) if e))
    if any(not s for s in supports):
        return -1  # the ideal is the whole ring
    supports = sorted(set(supports), key=len)
    best = 0

    def rec(idx, allowed):
        nonlocal best
        if idx == len(supports):
            best = max(best, len(allowed))
            return
        if len(allowed) <= best:
            return
        s = supports[idx]
        if not (s <= allowed):
            # some support variable is already excluded
            rec(idx + 1, allowed)
            return
        for v in s:
            rec(idx + 1, allowed - {v})

    rec(0, frozenset(range(nvars)))
    return best


def _implicitize_relational(L, cp, relset, budget, timings, t_start, seed, precision):
    """Degree-swept kernel assembly for relation-bearing spectra.

    Vanishing polynomials are proposed numerically degree by degree,
    rationalized, and re-verified at elevated precision; the sweep stops
    once the staircase dimension of the assembled ideal matches the
    numeric dimension of the variety.  The result carries the
    "relation-certified" label: like the relation lattice itself, it
    rests on certified high-precision numerics rather than exact
    elimination.
    """
    from .implicit_num import (
        monomials_up_to_degree,
        rationalize_vector,
        sample_manifold,
        verify_polynomial,
    )

    import numpy as np

    n, m = L.n, cp.m
    xr = x_ring(n)
    nvars = n * (n + 1) // 2
    t0 = time.time()
    dim_report = dimension_check(L, relset=relset, seed=seed + 5)
    target_dim = dim_report["dim_estimate"]
    timings["dimension"] = time.time() - t0

    gens = []
    gb = None
    reached = None
    degrees = []
    t0 = time.time()
    for D in range(1, n + 1):
        # deflation: only monomials outside the current leading-term
        # staircase can contribute genuinely new generators
        leads = []
        if gb is not None:
            leads = [b.leading_term()[0] for b in gb.basis]
        monos = [
            mo
            for mo in monomials_up_to_degree(nvars, D)
            if not any(all(a >= b for a, b in zip(mo, le)) for le in leads)
        ]
        if not monos:
            break
        S = sample_manifold(L, len(monos) + 80, seed=seed + D, precision=precision)
        coords = np.empty((len(S.points), nvars))
        for s, (_y, X) in enumerate(S.points):
            k = 0
            for i in range(n):
                for j in range(i, n):
                    coords[s, k] = float(X[i][j])
                    k += 1
        V = np.empty((len(S.points), len(monos)))
        for c, mo in enumerate(monos):
            col = np.ones(len(S.points))
            for v, e in enumerate(mo):
                if e:
                    col = col * coords[:, v] ** e
            V[:, c] = col
        scale = np.linalg.norm(V, axis=0)
        scale[scale == 0] = 1.0
        _u, sv, vt = np.linalg.svd(V / scale, full_matrices=True)
        smax = sv[0] if len(sv) else 0.0
        # Monomials restricted to a low-dimensional variety give a slowly
        # decaying singular tail, so a fixed threshold over-counts.  Take
        # the candidates below 1e-8 * smax and cut at the largest ratio gap
        # in the tail; a genuine kernel sits orders of magnitude below the
        # conditioning noise.
        cand = [i for i in range(len(sv)) if sv[i] < 1e-8 * max(smax, 1e-300)]
        kdim = 0
        if cand:
            best_ratio, best_idx = 0.0, 0
            prev = 1e-8 * max(smax, 1e-300)
            for i, c in enumerate(cand):
                ratio = prev / max(sv[c], 1e-300)
                if ratio > best_ratio:
                    best_ratio, best_idx = ratio, i
                prev = sv[c]
            if best_ratio >= 1e3:
                kdim = len(cand) - best_idx
        new = []
        K = np.array([vt[len(monos) - 1 - r] / scale for r in range(kdim)])
        # float echelonization so each kernel vector gets a distinct pivot
        rr = 0
        for c in range(K.shape[1] if kdim else 0):
            if rr >= kdim:
                break
            piv = rr + int(np.argmax(np.abs(K[rr:, c])))
            if abs(K[piv, c]) < 1e-6:
                continue
            K[[rr, piv]] = K[[piv, rr]]
            K[rr] /= K[rr, c]
            for o in range(kdim):
                if o != rr:
                    K[o] -= K[o, c] * K[rr]
            rr += 1
        for r in range(rr):
            vec = K[r]
            # Kernel vectors carry admixture of near-kernel noise directions
            # (amplitude ~ noise / gap).  Re-solving on the thresholded
            # support alone gives a clean, well-separated kernel vector.
            v0 = vec * scale
            vmax = np.max(np.abs(v0))
            support = [c for c in range(len(monos)) if abs(v0[c]) > 1e-3 * vmax]
            if 0 < len(support) < len(monos):
                sub = (V / scale)[:, support]
                _u2, sv2, vt2 = np.linalg.svd(sub, full_matrices=True)
                if len(sv2) and np.sum(sv2 < 1e-10 * max(sv2[0], 1.0)) == 1:
                    refined = np.zeros(len(monos))
                    for c, val in zip(support, vt2[-1]):
                        refined[c] = val
                    vec = refined / scale
            try:
                ints = rationalize_vector(vec / np.max(np.abs(vec)))
            except ValueError:
                continue
            terms = {}
            for mo, c in zip(monos, ints):
                if c:
                    terms[tuple(mo)] = Fraction(c)
            if not terms:
                continue
            p = MultiPoly(xr, terms)
            if verify_polynomial(p, L, precision=max(113, precision)):
                new.append(p)
        degrees.append(D)
        if not new:
            if gb is not None and reached == target_dim:
                break
            continue
        gens.extend(new)
        gb = buchberger(Ideal(xr, gens), budget=budget)
        gens = list(gb.basis)
        reached = _gb_dimension(gb, nvars)
        if reached == target_dim and D >= 2:
            break
    timings["kernel_sweep"] = time.time() - t0

    basis = list(gb.basis) if gb is not None else []
    ideal_J = Ideal(xr, basis)
    plane = [b for b in basis if b.total_degree() <= 1 and not b.is_zero()]
    timings["total"] = time.time() - t_start
    diagnostics = {
        "m": m,
        "multiplicities": tuple(cp.multiplicities),
        "relations": relset,
        "lattice_rank": len(relset.lattice),
        "affine_relations_omitted": len(relset.affine),
        "generators": len(basis),
        "route": "relational-kernel",
        "degrees_swept": degrees,
        "target_dimension": target_dim,
        "staircase_dimension": reached,
        "dimension_matched": reached == target_dim,
        "timings": timings,
    }
    return ImplicitResult(ideal_J, plane, "relation-certified", diagnostics)


# ---------------------------------------------------------------------------
# exact fast path for commuting families, over Q or Q(sqrt(k))
# ---------------------------------------------------------------------------


def _mat_mul(A, B):
    n = len(A)
    return [
        [sum(A[i][t] * B[t][j] for t in range(n)) for j in range(n)]
        for i in range(n)
    ]


def is_commuting(L):
    """True iff A0 and all basis matrices commute pairwise (exact check)."""
    mats = [L.A0] + list(L.basis)
    for i in range(len(mats)):
        for j in range(i + 1, len(mats)):
            if _mat_mul(mats[i], mats[j]) != _mat_mul(mats[j], mats[i]):
                return False
    return True


# elements of Q(sqrt(k)) are pairs (a, b) meaning a + b*sqrt(k)
def _q_add(x, y):
    return (x[0] + y[0], x[1] + y[1])


def _q_sub(x, y):
    return (x[0] - y[0], x[1] - y[1])


def _q_mul(x, y, k):
    return (x[0] * y[0] + k * x[1] * y[1], x[0] * y[1] + x[1] * y[0])


def _q_inv(x, k):
    nrm = x[0] * x[0] - k * x[1] * x[1]
    if nrm == 0:
        raise ZeroDivisionError("zero or non-invertible field element")
    return (x[0] / nrm, -x[1] / nrm)


def _q_is_zero(x):
    return x[0] == 0 and x[1] == 0


_Q_ZERO = (Fraction(0), Fraction(0))
_Q_ONE = (Fraction(1), Fraction(0))


def _field_kernel(B, k):
    """Kernel basis of a square matrix over Q(sqrt(k)) (entries are pairs)."""
    n = len(B)
    M = [row[:] for row in B]
    pivots = []
    r = 0
    for c in range(n):
        piv = None
        for i in range(r, n):
            if not _q_is_zero(M[i][c]):
                piv = i
                break
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        inv = _q_inv(M[r][c], k)
        M[r] = [_q_mul(v, inv, k) for v in M[r]]
        for i in range(n):
            if i != r and not _q_is_zero(M[i][c]):
                f = M[i][c]
                M[i] = [_q_sub(a, _q_mul(f, b, k)) for a, b in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for fc in free:
        v = [_Q_ZERO] * n
        v[fc] = _Q_ONE
        for rr, pc in enumerate(pivots):
            v[pc] = (-M[rr][fc][0], -M[rr][fc][1])
        basis.append(v)
    return basis


def _q_dot(u, v, k):
    acc = _Q_ZERO
    for a, b in zip(u, v):
        acc = _q_add(acc, _q_mul(a, b, k))
    return acc


def _orthogonalize(vectors, k):
    """Gram-Schmidt without normalization (stays inside the field)."""
    out = []
    for v in vectors:
        w = list(v)
        for u in out:
            num = _q_dot(w, u, k)
            den = _q_dot(u, u, k)
            f = _q_mul(num, _q_inv(den, k), k)
            w = [_q_sub(a, _q_mul(f, b, k)) for a, b in zip(w, u)]
        out.append(w)
    return out


def _clear_vector(v):
    """Scale a field vector by a positive rational to get small entries."""
    dens = []
    for a, b in v:
        dens.append(a.denominator)
        dens.append(b.denominator)
    scale = Fraction(1)
    for d in dens:
        scale = scale * d // math.gcd(int(scale), d)
    v = [(a * scale, b * scale) for a, b in v]
    g = 0
    for a, b in v:
        g = math.gcd(g, abs(a.numerator))
        g = math.gcd(g, abs(b.numerator))
    if g > 1:
        v = [(a / g, b / g) for a, b in v]
    return v


def _recognized_eigenvalues(M, precision):
    """Distinct eigenvalues of a rational symmetric matrix as field pairs.

    Returns (values, k): values are (a, b) pairs in Q(sqrt(k)).  Raises
    ValueError when some eigenvalue is not recognizable in a single real
    quadratic field at the working precision.
    """
    from .spectra import sym_eig

    eig = sym_eig(M, precision)
    with mp.workprec(precision):
        scale = max([abs(v) for v in eig.values] + [mp.mpf(1)])
        tol = scale * mp.mpf(10) ** (-int(mp.mp.dps * 0.5))
        reps = [eig.values[0]]
        for v in eig.values[1:]:
            if abs(reps[-1] - v) >= tol:
                reps.append(v)
        recog = []
        ks = set()
        for v in reps:
            r = find_quadratic(v)
            if r is None:
                raise ValueError("eigenvalue not recognized in Q or Q(sqrt(k)), k <= 100")
            a, b, k = r
            if k != 1:
                ks.add(k)
            recog.append((a, b, k))
    if len(ks) > 1:
        raise ValueError("eigenvalues span more than one quadratic field: %s" % sorted(ks))
    k = ks.pop() if ks else 1
    values = []
    for a, b, kk in recog:
        if kk == 1:
            values.append((a + b, Fraction(0)) if k != 1 else (a + b, Fraction(0)))
        else:
            values.append((a, b))
    return values, k


def _eigenvalue_on(Amat, v, k):
    """The scalar mu with A v = mu v, verified exactly; None if v is no eigenvector."""
    n = len(v)
    Av = []
    for i in range(n):
        acc = _Q_ZERO
        for j in range(n):
            if Amat[i][j] != 0:
                acc = _q_add(acc, _q_mul((Fraction(Amat[i][j]), Fraction(0)), v[j], k))
        Av.append(acc)
    pivot = next((i for i in range(n) if not _q_is_zero(v[i])), None)
    if pivot is None:
        return None
    mu = _q_mul(Av[pivot], _q_inv(v[pivot], k), k)
    for i in range(n):
        if not _q_is_zero(_q_sub(Av[i], _q_mul(mu, v[i], k))):
            return None
    return mu


def _pair_poly_mul(p, q, k):
    """Product of two (P0, P1) pairs of MultiPoly, modulo sqrt(k)^2 = k."""
    return (p[0] * q[0] + (p[1] * q[1]) * Fraction(k), p[0] * q[1] + p[1] * q[0])


def implicitize_commuting(L, precision=256, budget=DEFAULT_BUDGET, seed=3):
    """Exact implicitization of a pairwise-commuting family.

    The family is simultaneously diagonalized by the exact eigenspaces of a
    generic member, computed over Q or Q(sqrt(k)); the integer relation
    lattice of the eigenvalue functions gives a lattice ideal in the
    diagonal coordinates, which is conjugated back by the exact linear
    substitution Q = V^T X V.  Every step is verified exactly, so the
    result is certified "exact".
    """
    t_start = time.time()
    if not is_commuting(L):
        raise ValueError("matrices do not commute pairwise; use implicitize()")
    n = L.n
    rng = random.Random(seed)

    mats = list(L.basis)
    V = None
    k = 1
    last_err = None
    for _attempt in range(12):
        c = [Fraction(rng.randint(-9, 9), rng.randint(1, 5)) for _ in range(L.d)]
        M = L.evaluate(c)
        try:
            values, k = _recognized_eigenvalues(M, precision)
        except ValueError as exc:
            last_err = exc
            continue
        columns = []
        ok = True
        for lam in values:
            B = [
                [
                    _q_sub((Fraction(M[i][j]), Fraction(0)), lam) if i == j else (Fraction(M[i][j]), Fraction(0))
                    for j in range(n)
                ]
                for i in range(n)
            ]
            kern = _field_kernel(B, k)
            if not kern:
                ok = False
                break
            kern = _orthogonalize(kern, k)
            columns.extend(_clear_vector(v) for v in kern)
        if not ok or len(columns) != n:
            last_err = ValueError("eigenspace dimensions inconsistent at sample point")
            continue
        # verify: columns are simultaneous eigenvectors of the whole family
        lam_vectors = []
        good = True
        for Amat in ([L.A0] if not L.is_linear else []) + mats:
            lv = []
            for v in columns:
                mu = _eigenvalue_on(Amat, v, k)
                if mu is None:
                    good = False
                    break
                lv.append(mu)
            if not good:
                break
            lam_vectors.append(lv)
        if good:
            V = columns
            break
        last_err = ValueError("generic member's eigenvectors do not diagonalize the family")
    if V is None:
        raise ValueError("could not diagonalize the family exactly: %s" % last_err)

    # orthogonality of the columns (needed so V^T X V is diagonal on the image)
    for i in range(n):
        for j in range(i + 1, n):
            if not _q_is_zero(_q_dot(V[i], V[j], k)):
                raise ValueError("eigenvector columns failed exact orthogonality")
    gram = [_q_dot(v, v, k) for v in V]

    # per-basis eigenvalue vectors; A0's vector (if any) is listed first
    has_a0 = not L.is_linear
    # integer relation lattice: b with <b, lam_t> = 0 for every t (both field parts)
    cols = []
    for lv in lam_vectors:
        for part in (0, 1):
            col = [lv[j][part] for j in range(n)]
            den = 1
            for f in col:
                den = den * f.denominator // math.gcd(den, f.denominator)
            cols.append([int(f * den) for f in col])
    mat = [[cols[c][j] for c in range(len(cols))] for j in range(n)]
    lattice = integer_kernel(mat) if cols else []

    # lattice ideal in the scaled diagonal coordinates w_i = exp(lambda_i)
    wring = VarRing(["w_%d" % (i + 1) for i in range(n)], "grevlex")
    wgens = []
    for b in lattice:
        pos = wring.one()
        neg = wring.one()
        for i, e in enumerate(b):
            if e > 0:
                pos = pos * wring.var("w_%d" % (i + 1)) ** e
            elif e < 0:
                neg = neg * wring.var("w_%d" % (i + 1)) ** (-e)
        wgens.append(pos - neg)
    if wgens:
        prod_w = wring.one()
        for i in range(n):
            prod_w = prod_w * wring.var("w_%d" % (i + 1))
        wideal = saturate(Ideal(wring, wgens), prod_w, budget=budget)
        wbasis = buchberger(wideal, budget=budget).basis
    else:
        wbasis = []

    # diagonal coordinates as linear forms in x: Q = V^T X V, entries in Q(sqrt(k))
    xr = x_ring(n)

    def q_entry(i, j):
        p0 = xr.zero()
        p1 = xr.zero()
        for a in range(n):
            for b in range(n):
                coeff = _q_mul(V[i][a], V[j][b], k)
                if _q_is_zero(coeff):
                    continue
                var = xr.var(x_name(a + 1, b + 1))
                p0 = p0 + var * coeff[0]
                p1 = p1 + var * coeff[1]
        return (p0, p1)

    gens = []
    for i in range(n):
        for j in range(i + 1, n):
            p0, p1 = q_entry(i, j)
            if not p0.is_zero():
                gens.append(p0)
            if not p1.is_zero():
                gens.append(p1)

    # substitute w_i = Q_ii / g_i into the lattice-ideal generators and clear
    # the (positive) g_i denominators; split into rational and sqrt(k) parts
    diag = [q_entry(i, i) for i in range(n)]
    for g in wbasis:
        degs = [g.degree_in("w_%d" % (i + 1)) for i in range(n)]
        acc = (xr.zero(), xr.zero())
        for exps, coeff in g.terms.items():
            term = (xr.const(coeff), xr.zero())
            for i, e in enumerate(exps):
                for _ in range(e):
                    term = _pair_poly_mul(term, diag[i], k)
                # clear with g_i^(maxdeg - e)
                fpow = _Q_ONE
                for _ in range(degs[i] - e):
                    fpow = _q_mul(fpow, gram[i], k)
                term = _pair_poly_mul(term, (xr.const(fpow[0]), xr.const(fpow[1])), k)
            acc = (acc[0] + term[0], acc[1] + term[1])
        for part in acc:
            if not part.is_zero():
                gens.append(part)

    try:
        gbJ = buchberger(Ideal(xr, gens), budget=budget)
    except BudgetExceededError as exc:
        raise RuntimeError(
            "reduction of the conjugated ideal exceeded the Groebner budget"
        ) from exc
    basis = list(gbJ.basis)
    ideal_J = Ideal(xr, basis)
    plane = [b for b in basis if b.total_degree() <= 1 and not b.is_zero()]
    diagnostics = {
        "field": "Q" if k == 1 else "Q(sqrt(%d))" % k,
        "lattice_rank": len(lattice),
        "lattice": [list(b) for b in lattice],
        "generators": len(basis),
        "timings": {"total": time.time() - t_start},
    }
    return ImplicitResult(ideal_J, plane, "exact", diagnostics)


# ---------------------------------------------------------------------------
# numeric dimension estimate of the closure of the exponential image
# ---------------------------------------------------------------------------


def _relation_plane_basis(m, lattice):
    """Rational basis of the subspace of R^m orthogonal to the lattice."""
    if not lattice:
        return [[1 if i == j else 0 for j in range(m)] for i in range(m)]
    mat = [[r[j] for r in lattice] for j in range(m)]
    return integer_kernel(mat)


def _float_matrix(M):
    return [[float(v) for v in row] for row in M]


def _param_point(L, y, z, m):
    """Float evaluation of X = sum_i z_i P_i(y) over the spectral clusters.

    P_i are the orthogonal projectors onto the i-th descending eigenvalue
    cluster of A(y); the entries x_i_j (i <= j) are returned flat, along
    with the smallest inter-cluster gap.  Returns (None, 0.0) when the
    point does not show the generic cluster pattern.
    """
    import numpy as np

    n = L.n
    A = np.array(_float_matrix(L.A0))
    for c, B in zip(y, L.basis):
        A = A + c * np.array(_float_matrix(B))
    w, V = np.linalg.eigh((A + A.T) / 2)
    order = np.argsort(w)[::-1]
    w = w[order]
    V = V[:, order]
    scale = max(1.0, float(np.max(np.abs(w))))
    labels = [0]
    for t in range(1, n):
        labels.append(labels[-1] + (1 if w[t - 1] - w[t] > 1e-7 * scale else 0))
    if labels[-1] + 1 != m:
        return None, 0.0
    gap = (
        min((w[t - 1] - w[t]) for t in range(1, n) if labels[t] != labels[t - 1])
        if m > 1
        else 1.0
    )
    X = (V * np.array([z[labels[t]] for t in range(n)])) @ V.T
    out = []
    for i in range(n):
        for j in range(i, n):
            out.append(X[i, j])
    return out, gap


def dimension_check(L, result=None, relset=None, trials=5, seed=0, tol=1e-8, step=1e-5):
    """Numeric dimension estimate of the variety versus the a-priori bound.

    The closure of the exponential image is parametrized by the space
    coordinates y (through the spectral projectors of A(y)) and by toric
    coordinates z = exp of a relation-plane point replacing the cluster
    exponentials.  The dimension is the largest Jacobian rank (central
    differences, singular values above tol * sigma_max) over several
    random base points.
    """
    import numpy as np

    cp = charpoly(L)
    m = cp.m
    if relset is None and result is not None:
        relset = result.diagnostics.get("relations")
    if relset is None:
        relset = detect_relations(L, cp, samples=4, precision=192, seed=seed + 1)
    lattice = relset.lattice if relset is not None else []
    plane = _relation_plane_basis(m, lattice)
    p = len(plane)
    rng = random.Random(seed)
    d = L.d

    def point_from(params):
        y = params[:d]
        b = params[d:]
        z = [math.exp(sum(b[t] * plane[t][i] for t in range(p))) for i in range(m)]
        out, _gap = _param_point(L, y, z, m)
        return out

    best = 0
    ranks = []
    for _ in range(trials):
        params = None
        for _retry in range(40):
            cand = [rng.uniform(-1.5, 1.5) for _ in range(d + p)]
            probe, gap = _param_point(
                L,
                cand[:d],
                [math.exp(sum(cand[d + t] * plane[t][i] for t in range(p))) for i in range(m)],
                m,
            )
            if probe is not None and gap > 100 * step:
                params = cand
                break
        if params is None:
            continue
        cols = []
        degenerate = False
        for v in range(len(params)):
            hi = list(params)
            lo = list(params)
            hi[v] += step
            lo[v] -= step
            fh = point_from(hi)
            fl = point_from(lo)
            if fh is None or fl is None:
                degenerate = True
                break
            cols.append([(x - y) / (2 * step) for x, y in zip(fh, fl)])
        if degenerate:
            continue
        Jm = np.array(cols).T
        sv = np.linalg.svd(Jm, compute_uv=False)
        smax = sv[0] if len(sv) else 0.0
        rank = int(np.sum(sv > tol * max(smax, 1e-300)))
        ranks.append(rank)
        best = max(best, rank)

    bound = L.n + L.d if not L.is_linear else L.n + L.d - 1
    relation_bound = d + m - len(lattice) - (1 if L.is_linear else 0)
    return {
        "dim_estimate": best,
        "ranks": ranks,
        "bound": bound,
        "bound_satisfied": best <= bound,
        "relation_bound": relation_bound,
        "m": m,
        "lattice_rank": len(lattice),
    }
