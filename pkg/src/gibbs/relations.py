"""Q-linear relations among eigenvalue functions of a matrix space.

Given an affine space of symmetric matrices with generic eigenvalue
functions l_1(y) >= ... >= l_m(y), this module detects the lattice of
integer relations sum_i r_i l_i(y) = 0 holding identically in y.  Detection
is numeric: eigenvalues are computed at a high-precision base point, labels
are carried to further sample points by continuation along straight
segments, candidate relations come from LLL lattice reduction, and every
candidate is re-verified at all samples.  Surviving relations are saturated
to a full lattice basis.  Each relation turns into a toric binomial
z^alpha - z^beta on the exponential variables.
"""

import random
from fractions import Fraction

import mpmath as mp

from .lattice import integer_kernel, lll_reduce, primitive, saturate_lattice
from .ratpoly import MultiPoly
from .spectra import sym_eig

__all__ = ["EigenRelationSet", "detect_relations", "toric_ideal", "relation_linear_forms"]


class EigenRelationSet:
    """Certified integer relations among the m generic eigenvalue functions.

    ``lattice`` holds primitive basis vectors r with sum_i r_i l_i = 0,
    where labels follow the descending eigenvalue order at the base point.
    ``affine`` lists relations with a nonzero constant shift (affine spaces
    only) as (vector, gamma) pairs with gamma a float; these never enter the
    toric ideal unless gamma is zero.  ``certification`` records samples
    used, binary precision, and the worst residual seen.  ``multiplicities``
    is the per-label eigenvalue multiplicity pattern observed at the base
    point (label i is the i-th descending cluster there).
    """

    __slots__ = ("m", "lattice", "affine", "certification", "multiplicities")

    def __init__(self, m, lattice, affine, certification, multiplicities=None):
        self.m = m
        self.lattice = [list(v) for v in lattice]
        self.affine = list(affine)
        self.certification = dict(certification)
        self.multiplicities = None if multiplicities is None else tuple(multiplicities)

    def __repr__(self):
        return "EigenRelationSet(m=%d, lattice=%r, affine=%r)" % (
            self.m,
            self.lattice,
            self.affine,
        )


class _DegeneratePoint(Exception):
    pass


def _cluster_values(values, m):
    """Group a descending eigenvalue list into m clusters of near-equal values."""
    scale = max([abs(v) for v in values] + [mp.mpf(1)])
    tol = scale * mp.mpf(10) ** (-int(mp.mp.dps * 0.5))
    clusters = [[values[0]]]
    for v in values[1:]:
        if abs(clusters[-1][-1] - v) < tol:
            clusters[-1].append(v)
        else:
            clusters.append([v])
    if len(clusters) != m:
        raise _DegeneratePoint()
    reps = [sum(c) / len(c) for c in clusters]
    sizes = [len(c) for c in clusters]
    return reps, sizes


def _random_point(rng, d):
    return [Fraction(rng.randint(-9, 9), rng.randint(1, 7)) for _ in range(d)]


def _match(prev, cur):
    """Nearest-neighbor matching of two equally long value lists.

    Returns cur reordered to follow prev's labels; brute-force minimum-cost
    assignment (m is tiny).
    """
    import itertools

    m = len(prev)
    if m > 7:
        # greedy fallback for larger spaces
        used = set()
        out = [None] * m
        for i, p in enumerate(prev):
            best, bestd = None, None
            for j, c in enumerate(cur):
                if j in used:
                    continue
                dd = abs(p - c)
                if bestd is None or dd < bestd:
                    best, bestd = j, dd
            used.add(best)
            out[i] = cur[best]
        return out
    best_perm, best_cost = None, None
    for perm in itertools.permutations(range(m)):
        cost = sum(abs(prev[i] - cur[perm[i]]) for i in range(m))
        if best_cost is None or cost < best_cost:
            best_perm, best_cost = perm, cost
    return [cur[best_perm[i]] for i in range(m)]


def _eigs_at(L, y, m, precision):
    eig = sym_eig(L.evaluate(y), precision)
    return _cluster_values(eig.values, m)


def _continue_to(L, m, y0, lam0, y1, precision, max_depth=14):
    """Track the labeled eigenvalues from y0 to y1 along a straight segment.

    Steps are bisected adaptively: a step is only accepted when every
    eigenvalue moves by less than a third of the smallest pairwise gap, so
    the nearest-neighbor matching is unambiguous.  A genuine collision on
    the segment (gaps shrinking to zero) exhausts the bisection depth and
    raises _DegeneratePoint; the caller then picks a different endpoint.
    """
    prev_t = Fraction(0)
    prev = list(lam0)
    target = Fraction(1)
    depth = 0
    while prev_t < target:
        step = (target - prev_t) / (2**depth)
        t = prev_t + step
        y = [a + t * (b - a) for a, b in zip(y0, y1)]
        try:
            reps, _sizes = _eigs_at(L, y, m, precision)
        except _DegeneratePoint:
            depth += 1
            if depth > max_depth:
                raise
            continue
        cur = _match(prev, reps)
        if m > 1:
            gap_min = min(
                abs(prev[i] - prev[j]) for i in range(m) for j in range(i + 1, m)
            )
            move_max = max(abs(a - b) for a, b in zip(prev, cur))
            if move_max > gap_min / 3:
                depth += 1
                if depth > max_depth:
                    raise _DegeneratePoint()
                continue
        prev_t = t
        prev = cur
        depth = max(depth - 1, 0)
    return prev


def detect_relations(L, cp, samples=10, precision=256, seed=1):
    """Detect the lattice of integer relations among eigenvalue functions.

    Eigenvalues are sampled at ``samples`` random rational points at the
    given binary precision; candidate relations come from LLL on the scaled
    base-point spectrum and must re-verify at every sample with residual
    below 10^(-precision/4) relative to the spectral scale.
    """
    last_err = None
    for shift in range(6):
        try:
            return _detect_relations_once(L, cp, samples, precision, seed + 1000 * shift)
        except RuntimeError as err:
            last_err = err
    raise last_err


def _detect_relations_once(L, cp, samples, precision, seed):
    m = cp.m
    rng = random.Random(seed)
    with mp.workprec(precision):
        # base point with the generic number of distinct eigenvalues
        y0 = lam0 = sizes0 = None
        for _ in range(40):
            cand = _random_point(rng, L.d)
            try:
                reps, sizes = _eigs_at(L, cand, m, precision)
            except _DegeneratePoint:
                continue
            y0, lam0, sizes0 = cand, reps, sizes
            break
        if y0 is None:
            raise RuntimeError("could not find a sample point with generic spectrum")

        spectra = [lam0]
        for _ in range(samples - 1):
            for _attempt in range(25):
                y1 = _random_point(rng, L.d)
                try:
                    lam1 = _continue_to(L, m, y0, lam0, y1, precision)
                except _DegeneratePoint:
                    continue
                spectra.append(lam1)
                break
            else:
                raise RuntimeError("eigenvalue continuation kept hitting collisions")

        mu = []
        if not L.is_linear:
            base_eig = sym_eig(L.A0, precision)
            # distinct eigenvalues of the constant part
            vals = base_eig.values
            mu = [vals[0]]
            scale0 = max([abs(v) for v in vals] + [mp.mpf(1)])
            tol0 = scale0 * mp.mpf(10) ** (-int(mp.mp.dps * 0.5))
            for v in vals[1:]:
                if abs(mu[-1] - v) >= tol0:
                    mu.append(v)

        k = max(12, int(precision * 0.30103 / 2))
        scale_pow = mp.mpf(10) ** k
        # several residual columns: a relation must annihilate the spectrum
        # at multiple sample points simultaneously, which kills accidental
        # integer relations among the numbers at any single point
        ncol = min(len(spectra), 4)
        rows = []
        for i in range(m):
            row = [int(mp.nint(spectra[t][i] * scale_pow)) for t in range(ncol)]
            row += [1 if j == i else 0 for j in range(m)]
            row += [0] * len(mu)
            rows.append(row)
        for j in range(len(mu)):
            row = [int(mp.nint(mu[j] * scale_pow))] * ncol
            row += [0] * m
            row += [1 if t == j else 0 for t in range(len(mu))]
            rows.append(row)

        reduced = lll_reduce(rows)
        lam_scale = max([abs(v) for v in lam0] + [mp.mpf(1)])
        screen_tol = mp.mpf(10) ** (-(k // 2)) * lam_scale
        verify_tol = mp.mpf(10) ** (-(precision // 4))

        pure, affine = [], []
        verified_mixed = []
        worst = mp.mpf(0)
        for row in reduced:
            r_lam = row[ncol : ncol + m]
            r_mu = row[ncol + m :]
            if all(v == 0 for v in r_lam):
                continue
            if max(abs(v) for v in row[ncol:]) > 10**6:
                continue
            base_res = abs(sum(c * v for c, v in zip(r_lam, lam0)) + sum(c * v for c, v in zip(r_mu, mu)))
            if base_res > screen_tol:
                continue
            ok = True
            cand_worst = mp.mpf(0)
            for lam in spectra:
                sc = max([abs(v) for v in lam] + [mp.mpf(1)])
                res = abs(sum(c * v for c, v in zip(r_lam, lam)) + sum(c * v for c, v in zip(r_mu, mu)))
                cand_worst = max(cand_worst, res / sc)
                if res > verify_tol * sc:
                    ok = False
                    break
            if not ok:
                continue
            worst = max(worst, cand_worst)
            if any(v != 0 for v in r_mu):
                gamma = -sum(c * v for c, v in zip(r_mu, mu))
                gamma_scale = max([abs(v) for v in mu] + [mp.mpf(1)])
                if abs(gamma) <= verify_tol * gamma_scale:
                    # the constant parts cancel: a pure relation in disguise
                    pure.append(primitive(r_lam))
                else:
                    verified_mixed.append((list(r_lam), list(r_mu)))
                    affine.append((primitive(list(r_lam) + list(r_mu))[: m + len(r_mu)], float(gamma)))
            else:
                pure.append(primitive(r_lam))

        # integer combinations of mixed relations whose constant block
        # cancels coefficient-wise are pure relations as well
        if verified_mixed:
            mu_mat = [r_mu for _r_lam, r_mu in verified_mixed]
            for x in integer_kernel(mu_mat):
                combo = [
                    sum(x[i] * verified_mixed[i][0][j] for i in range(len(verified_mixed)))
                    for j in range(m)
                ]
                if any(combo):
                    pure.append(primitive(combo))

        lattice = saturate_lattice(pure) if pure else []
        certification = {
            "samples": samples,
            "precision": precision,
            "max_residual": float(worst),
            "base_point": [str(v) for v in y0],
        }
        return EigenRelationSet(m, lattice, affine, certification, multiplicities=sizes0)


def toric_ideal(relset, ring, z_names=None):
    """Binomials z^alpha - z^beta, one per relation-lattice basis vector."""
    if z_names is None:
        z_names = ["z_%d" % (i + 1) for i in range(relset.m)]
    out = []
    for r in relset.lattice:
        pos = [max(v, 0) for v in r]
        neg = [max(-v, 0) for v in r]
        mono_pos = ring.one()
        mono_neg = ring.one()
        for nm, e in zip(z_names, pos):
            if e:
                mono_pos = mono_pos * ring.var(nm) ** e
        for nm, e in zip(z_names, neg):
            if e:
                mono_neg = mono_neg * ring.var(nm) ** e
        out.append(mono_pos - mono_neg)
    return out


def relation_linear_forms(relset, ring, l_names=None):
    """The linear forms sum_i r_i l_i, for adjoining to the symmetric system."""
    if l_names is None:
        l_names = ["l_%d" % (i + 1) for i in range(relset.m)]
    out = []
    for r in relset.lattice:
        p = ring.zero()
        for nm, c in zip(l_names, r):
            if c:
                p = p + ring.const(Fraction(c)) * ring.var(nm)
        out.append(p)
    return out
