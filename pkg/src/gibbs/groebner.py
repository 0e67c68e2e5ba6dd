"""Buchberger Groebner-basis engine with elimination and saturation.

The engine packs exponent vectors into single integers (16-bit fields with
a guard bit, so divisibility is one masked subtraction) and realizes every
monomial order as a single additive integer key built from nonnegative
weight rows (total-degree and prefix-sum rows for grevlex, unit rows for
lex, concatenated for block orders).  Polynomials are monic descending
term lists; reduction accumulates into a dictionary driven by a lazy
max-heap, so each generated term is touched once.

Pair selection follows the normal strategy (smallest lcm first) with
Gebauer--Moeller pruning.  A hard budget on pair reductions turns runaway
computations into a structured :class:`BudgetExceededError` instead of
silent truncation.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

from .ratpoly import MultiPoly, RingMismatchError, VarRing

DEFAULT_BUDGET = 200_000

_W = 16
_FIELD = (1 << _W) - 1
_GBIT = 1 << (_W - 1)


class BudgetExceededError(RuntimeError):
    """Raised when a basis computation exceeds its pair-reduction budget."""

    def __init__(self, budget, pairs_done, basis_size):
        super().__init__(
            f"Groebner budget exceeded: {pairs_done} pair reductions "
            f"(budget {budget}), basis size {basis_size}; "
            "consider the numerical pipeline or a larger --budget"
        )
        self.budget = budget
        self.pairs_done = pairs_done
        self.basis_size = basis_size


@dataclass
class Ideal:
    """A finite generating set in a named variable ring."""

    ring: VarRing
    generators: list

    def __post_init__(self):
        gens = []
        for g in self.generators:
            if g.ring != self.ring:
                raise RingMismatchError("generator not in the ideal's ring")
            if not g.is_zero():
                gens.append(g)
        self.generators = gens


@dataclass
class GroebnerBasis:
    """A reduced Groebner basis (monic, autoreduced) for an ideal."""

    ideal: Ideal
    basis: list
    order: object
    pairs_reduced: int = 0

    @property
    def ring(self):
        return self.basis[0].ring if self.basis else self.ideal.ring


# ---------------------------------------------------------------------
# packed-monomial engine


class _Engine:
    """Packing, order keys, and divisibility for one ring + order."""

    __slots__ = ("ring", "v", "guard", "kc", "shifts")

    def __init__(self, ring: VarRing):
        self.ring = ring
        v = ring.nvars
        self.v = v
        self.shifts = [_W * i for i in range(v)]
        self.guard = sum(_GBIT << s for s in self.shifts)
        # weight rows, top row first; all entries nonnegative
        rows = []
        for idx, sub in ring._blocks:
            if sub == "grevlex":
                # total degree, then prefix sums dropping the last variables
                for k in range(len(idx), 0, -1):
                    row = [0] * v
                    for i in idx[:k]:
                        row[i] = 1
                    rows.append(row)
            else:  # lex
                for i in idx:
                    row = [0] * v
                    row[i] = 1
                    rows.append(row)
        # key(e) = sum_r (row_r . e) * B^(R-1-r); additive in e
        R = len(rows)
        self.kc = [0] * v
        for r, row in enumerate(rows):
            w = 1 << (_W * (R - 1 - r))
            for i in range(v):
                if row[i]:
                    self.kc[i] += w
        # guard against per-row overflow is not needed: row sums are bounded
        # by the total degree, which stays far below 2^15 in practice

    def pack(self, exp):
        M = 0
        K = 0
        for e, s, k in zip(exp, self.shifts, self.kc):
            if e:
                M += e << s
                K += e * k
        return K, M

    def unpack(self, M):
        return tuple((M >> s) & _FIELD for s in self.shifts)

    def key_of(self, M):
        K = 0
        for s, k in zip(self.shifts, self.kc):
            e = (M >> s) & _FIELD
            if e:
                K += e * k
        return K

    def divides(self, a, b):
        return ((b | self.guard) - a) & self.guard == self.guard

    def lcm(self, a, b):
        out = 0
        for s in self.shifts:
            ea = (a >> s) & _FIELD
            eb = (b >> s) & _FIELD
            out += (ea if ea >= eb else eb) << s
        return out


def _to_internal(p: MultiPoly, eng: _Engine):
    """Monic descending (Ks, Ms, Cs) lists for the engine's order."""
    if not p.terms:
        return None
    terms = sorted((eng.pack(e) + (c,) for e, c in p.terms.items()), reverse=True)
    lead = terms[0][2]
    Ks = [t[0] for t in terms]
    Ms = [t[1] for t in terms]
    Cs = [t[2] / lead for t in terms]
    return (Ks, Ms, Cs)


def _to_multipoly(poly, eng: _Engine) -> MultiPoly:
    Ks, Ms, Cs = poly
    return MultiPoly(eng.ring, {eng.unpack(M): c for M, c in zip(Ms, Cs)})


def _find_reducer(M, leads, divides):
    for Ml, idx in leads:
        if divides(Ml, M):
            return idx
    return -1


def _reduce_full(coeffs, monos, heap, basis, leads, eng, monic=True):
    """Drain a term accumulator into its normal form against ``basis``.

    ``coeffs``/``monos`` map keys to Fraction coefficients and packed
    monomials; ``heap`` holds negated keys (lazy deletions).  Returns a
    monic (Ks, Ms, Cs) triple or None.
    """
    divides = eng.divides
    pop = heapq.heappop
    push = heapq.heappush
    outK = []
    outM = []
    outC = []
    last = None
    while heap:
        K = -pop(heap)
        if K == last:
            continue
        last = K
        c = coeffs.get(K)
        if not c:
            continue
        M = monos[K]
        idx = _find_reducer(M, leads, divides)
        if idx < 0:
            outK.append(K)
            outM.append(M)
            outC.append(c)
            del coeffs[K]
            continue
        gK, gM, gC = basis[idx]
        dK = K - gK[0]
        dM = M - gM[0]
        del coeffs[K]
        for t in range(1, len(gK)):
            K2 = gK[t] + dK
            prev = coeffs.get(K2)
            if prev is None:
                coeffs[K2] = -c * gC[t]
                monos[K2] = gM[t] + dM
                push(heap, -K2)
            else:
                coeffs[K2] = prev - c * gC[t]
    if not outK:
        return None
    lead = outC[0]
    if monic and lead != 1:
        outC = [c / lead for c in outC]
    return (outK, outM, outC)


def _accumulator_from(poly, scale=1):
    Ks, Ms, Cs = poly
    coeffs = {}
    monos = {}
    heap = []
    for K, M, c in zip(Ks, Ms, Cs):
        coeffs[K] = c * scale
        monos[K] = M
        heap.append(-K)
    heapq.heapify(heap)
    return coeffs, monos, heap


def _normal_form_internal(poly, basis, leads, eng):
    coeffs, monos, heap = _accumulator_from(poly)
    return _reduce_full(coeffs, monos, heap, basis, leads, eng)


def _spoly_reduce(f, g, Mlcm, Klcm, basis, leads, eng):
    """Normal form of the S-polynomial of monic f and g."""
    fK, fM, fC = f
    gK, gM, gC = g
    dKf = Klcm - fK[0]
    dMf = Mlcm - fM[0]
    dKg = Klcm - gK[0]
    dMg = Mlcm - gM[0]
    coeffs = {}
    monos = {}
    heap = []
    for t in range(1, len(fK)):
        K2 = fK[t] + dKf
        coeffs[K2] = fC[t]
        monos[K2] = fM[t] + dMf
        heap.append(-K2)
    for t in range(1, len(gK)):
        K2 = gK[t] + dKg
        prev = coeffs.get(K2)
        if prev is None:
            coeffs[K2] = -gC[t]
            monos[K2] = gM[t] + dMg
            heap.append(-K2)
        else:
            coeffs[K2] = prev - gC[t]
    heapq.heapify(heap)
    return _reduce_full(coeffs, monos, heap, basis, leads, eng)


# ---------------------------------------------------------------------
# Buchberger with Gebauer-Moeller pair pruning


def buchberger(ideal: Ideal, order=None, budget: int = DEFAULT_BUDGET) -> GroebnerBasis:
    """Reduced Groebner basis of the ideal under the given order.

    ``order`` defaults to the ideal's ring order.  Raises
    :class:`BudgetExceededError` once more than ``budget`` S-pairs have
    been reduced.
    """
    ring = ideal.ring if order is None else ideal.ring.with_order(order)
    eng = _Engine(ring)
    gens = [g.convert(ring) if g.ring != ring else g for g in ideal.generators]

    basis = []       # internal (Ks, Ms, Cs) triples, monic
    leads = []       # (packed lead monomial, index), reducers only
    alive = {}       # (i, j) -> packed lcm of queued pairs
    pending = []     # heap of (Klcm, i, j)
    redundant = set()
    pairs_done = 0

    def lead_of(i):
        return basis[i][1][0]

    def add_element(poly):
        nonlocal leads
        t = len(basis)
        basis.append(poly)
        Lt = poly[1][0]
        # Gebauer-Moeller update of the pair queue
        taus = {}
        for i in range(t):
            if i in redundant:
                continue
            taus[i] = eng.lcm(lead_of(i), Lt)
        # M criterion: drop (i,t) when another tau strictly divides tau_i
        items = list(taus.items())
        keep = {}
        for i, tau in items:
            ok = True
            for j, tau2 in items:
                if tau2 != tau and eng.divides(tau2, tau):
                    ok = False
                    break
            if ok:
                keep.setdefault(tau, []).append(i)
        # F + coprime criteria: one pair per lcm, none if some mate is coprime
        for tau, members in keep.items():
            coprime = False
            for i in members:
                if eng.lcm(lead_of(i), Lt) == lead_of(i) + Lt:
                    coprime = True
                    break
            if coprime:
                continue
            i = members[0]
            alive[(i, t)] = tau
            heapq.heappush(pending, (eng.key_of(tau), i, t))
        # old-pair criterion: drop (i,j) when Lt divides lcm(i,j) strictly
        for (i, j), tau in list(alive.items()):
            if j == t:
                continue
            if eng.divides(Lt, tau) and taus.get(i) != tau and taus.get(j) != tau:
                del alive[(i, j)]
        # redundancy: retire reducers whose lead the new lead divides
        newleads = []
        for Ml, idx in leads:
            if eng.divides(Lt, Ml):
                redundant.add(idx)
            else:
                newleads.append((Ml, idx))
        newleads.append((Lt, t))
        leads = newleads

    for g in gens:
        poly = _to_internal(g, eng)
        if poly is None:
            continue
        poly = _normal_form_internal(poly, basis, leads, eng)
        if poly is not None:
            add_element(poly)

    while pending:
        _, i, j = heapq.heappop(pending)
        tau = alive.pop((i, j), None)
        if tau is None:
            continue
        pairs_done += 1
        if pairs_done > budget:
            raise BudgetExceededError(budget, pairs_done, len(basis))
        r = _spoly_reduce(basis[i], basis[j], tau, eng.key_of(tau), basis, leads, eng)
        if r is not None:
            add_element(r)

    # final interreduction: minimal leads, then tail-reduce
    final = [i for i in range(len(basis)) if i not in redundant]
    # drop duplicates of equal leads
    minimal = []
    for i in final:
        Li = lead_of(i)
        if any(eng.divides(lead_of(j), Li) and j != i for j in minimal):
            continue
        minimal = [j for j in minimal if not (eng.divides(Li, lead_of(j)) and j != i)]
        minimal.append(i)
    reduced = []
    for pos, i in enumerate(minimal):
        others = [basis[j] for j in minimal if j != i]
        oleads = [(p[1][0], t) for t, p in enumerate(others)]
        r = _normal_form_internal(basis[i], others, oleads, eng)
        if r is not None:
            reduced.append(r)
    reduced.sort(key=lambda p: p[0][0])
    out = [_to_multipoly(p, eng) for p in reduced]
    gb_ideal = Ideal(ring, list(out))
    return GroebnerBasis(gb_ideal, out, ring.order, pairs_done)


def normal_form(p: MultiPoly, G: GroebnerBasis) -> MultiPoly:
    """Canonical remainder of p modulo the reduced basis G."""
    if not G.basis:
        return p
    ring = G.basis[0].ring
    eng = _Engine(ring)
    q = p.convert(ring) if p.ring != ring else p
    pi = _to_internal(q, eng)
    if pi is None:
        return p.ring.zero()
    # preserve the true leading coefficient (internal form is monic)
    lead = max(q.terms.items(), key=lambda t: ring.exp_key(t[0]))[1]
    internal = [_to_internal(b, eng) for b in G.basis]
    leads = [(t[1][0], i) for i, t in enumerate(internal)]
    coeffs, monos, heap = _accumulator_from(pi, scale=lead)
    r = _reduce_full(coeffs, monos, heap, internal, leads, eng, monic=False)
    if r is None:
        return p.ring.zero()
    _Ks, Ms, Cs = r
    out = MultiPoly(ring, {eng.unpack(M): c for M, c in zip(Ms, Cs)})
    return out.convert(p.ring) if out.ring != p.ring else out


def contains(ideal_or_gb, p: MultiPoly, budget: int = DEFAULT_BUDGET) -> bool:
    """Ideal membership via normal form against a Groebner basis."""
    gb = (
        ideal_or_gb
        if isinstance(ideal_or_gb, GroebnerBasis)
        else buchberger(ideal_or_gb, budget=budget)
    )
    return normal_form(p, gb).is_zero()


def elimination_order(ring: VarRing, drop_names):
    """Block order with the dropped variables leading (grevlex in blocks)."""
    drop = [nm for nm in ring.names if nm in set(drop_names)]
    keep = [nm for nm in ring.names if nm not in set(drop_names)]
    blocks = []
    if drop:
        blocks.append((tuple(drop), "grevlex"))
    if keep:
        blocks.append((tuple(keep), "grevlex"))
    return ("block", blocks)


def eliminate(ideal: Ideal, drop_vars, budget: int = DEFAULT_BUDGET) -> Ideal:
    """Generators of the elimination ideal I ∩ Q[remaining variables]."""
    drop = set(drop_vars)
    unknown = drop - set(ideal.ring.names)
    if unknown:
        raise KeyError(f"variables {sorted(unknown)} not in ring")
    if not drop:
        gb = buchberger(ideal, budget=budget)
        return Ideal(ideal.ring, [b.convert(ideal.ring) for b in gb.basis])
    order = elimination_order(ideal.ring, drop)
    gb = buchberger(ideal, order=order, budget=budget)
    keep = [nm for nm in ideal.ring.names if nm not in drop]
    subring = VarRing(keep, "grevlex" if keep else "lex")
    survivors = []
    for b in gb.basis:
        if b.variables() & drop:
            continue
        survivors.append(b.convert(subring))
    return Ideal(subring, survivors)


def saturate(ideal: Ideal, divisor: MultiPoly, budget: int = DEFAULT_BUDGET) -> Ideal:
    """The saturation I : divisor^inf via a fresh Rabinowitsch variable."""
    if divisor.is_zero():
        raise ValueError("cannot saturate by the zero polynomial")
    base = ideal.ring
    tname = "t_sat"
    k = 0
    while tname in base.names:
        k += 1
        tname = f"t_sat{k}"
    ext = VarRing((tname,) + base.names, ("block", [((tname,), "lex"), (base.names, "grevlex")]))
    gens = [g.convert(ext) for g in ideal.generators]
    gens.append(ext.one() - ext.var(tname) * divisor.convert(ext))
    elim = eliminate(Ideal(ext, gens), {tname}, budget=budget)
    return Ideal(base, [g.convert(base) for g in elim.generators])


def reduced_basis_strings(gb: GroebnerBasis):
    """Canonical string list for regression fixtures."""
    return [str(b) for b in gb.basis]
