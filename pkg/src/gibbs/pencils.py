"""Canonical pencils of quadrics classified by Segre symbols.

A Segre symbol is a multiset of partitions summing to n.  Each partition
carries one eigenvalue parameter alpha; its parts give anti-banded blocks of
the canonical two-dimensional matrix space.  This module builds the
canonical pencil, the linear relations and rank-1 quadrics of the banded
family (the single-partition symbol [n] with alpha = 0), and the
block-determinant constraints that link trace-matched blocks.
"""

import ast
from fractions import Fraction

from .ratpoly import MultiPoly, VarRing
from .spectra import MatrixSpace, x_name

__all__ = [
    "SegreSymbol",
    "parse_segre",
    "canonical_pencil",
    "banded_space",
    "banded_relations",
    "dx_minors",
    "block_det_constraints",
    "x_ring",
]


class SegreSymbol:
    """A multiset of partitions with one eigenvalue parameter per partition.

    ``groups`` is a list of weakly decreasing tuples of positive integers;
    ``alphas`` assigns one rational alpha to each group.  Grouped
    eigenvalues (bracketed partitions like [(3,1)]) are simply groups with
    several parts; distinct groups must have distinct alphas.
    """

    __slots__ = ("groups", "alphas", "n")

    def __init__(self, groups, alphas=None):
        groups = [tuple(int(p) for p in g) for g in groups]
        for g in groups:
            if not g or any(p <= 0 for p in g) or list(g) != sorted(g, reverse=True):
                raise ValueError("each partition must be weakly decreasing and positive")
        if alphas is None:
            alphas = [Fraction(i) for i in range(len(groups))]
        alphas = [Fraction(a) for a in alphas]
        if len(alphas) != len(groups):
            raise ValueError("need exactly one alpha per partition")
        if len(set(alphas)) != len(alphas):
            raise ValueError("distinct partitions need distinct alphas")
        self.groups = groups
        self.alphas = alphas
        self.n = sum(sum(g) for g in groups)

    def block_sizes(self):
        """Flat list of (size, alpha) in canonical block order."""
        out = []
        for g, a in zip(self.groups, self.alphas):
            for p in g:
                out.append((p, a))
        return out

    def __repr__(self):
        parts = []
        for g in self.groups:
            parts.append(str(g[0]) if len(g) == 1 else "(" + ",".join(map(str, g)) + ")")
        return "[" + ",".join(parts) + "]"


def parse_segre(text, alphas=None):
    """Parse a Segre symbol like "[3,1]" or "[(2,2)]" or "[(3,1),2]"."""
    value = ast.literal_eval(text)
    if not isinstance(value, (list, tuple)):
        raise ValueError("expected a bracketed list of partitions")
    groups = []
    for item in value:
        if isinstance(item, int):
            groups.append((item,))
        elif isinstance(item, (list, tuple)):
            groups.append(tuple(int(v) for v in item))
        else:
            raise ValueError("partition entries must be integers or tuples")
    return SegreSymbol(groups, alphas)


def _block_pair(size, alpha):
    """The y1 and y2 blocks of one canonical anti-banded block."""
    b1 = [[Fraction(0)] * size for _ in range(size)]
    b2 = [[Fraction(0)] * size for _ in range(size)]
    for i in range(1, size + 1):
        for j in range(1, size + 1):
            if i + j == size + 1:
                b1[i - 1][j - 1] = alpha
                b2[i - 1][j - 1] = Fraction(1)
            elif i + j == size + 2:
                b1[i - 1][j - 1] = Fraction(1)
    return b1, b2


def canonical_pencil(symbol):
    """The canonical pencil (d = 2 MatrixSpace) of a Segre symbol."""
    n = symbol.n
    A1 = [[Fraction(0)] * n for _ in range(n)]
    A2 = [[Fraction(0)] * n for _ in range(n)]
    offset = 0
    for size, alpha in symbol.block_sizes():
        b1, b2 = _block_pair(size, alpha)
        for i in range(size):
            for j in range(size):
                A1[offset + i][offset + j] = b1[i][j]
                A2[offset + i][offset + j] = b2[i][j]
        offset += size
    zero = [[Fraction(0)] * n for _ in range(n)]
    return MatrixSpace(zero, [A1, A2])


def banded_space(n):
    """The canonical banded LSSM: the single-partition symbol [n], alpha = 0."""
    return canonical_pencil(SegreSymbol([(n,)], [Fraction(0)]))


def x_ring(n, order="grevlex"):
    """Ring of the symmetric-matrix coordinates x_i_j, i <= j, 1-based."""
    names = [x_name(i, j) for i in range(1, n + 1) for j in range(i, n + 1)]
    return VarRing(names, order)


def _xv(ring, i, j, n):
    """x_{ij} symmetrized; zero polynomial for out-of-range indices."""
    if i < 1 or j < 1 or i > n or j > n:
        return ring.zero()
    return ring.var(x_name(i, j))


def banded_relations(n, ring=None):
    """The linear forms x_{i-1,j} + x_{i+1,j} - x_{i,j-1} - x_{i,j+1}.

    Indexed by 2 <= i < j <= n with out-of-range terms dropped; these vanish
    on the exponential image of the banded family.
    """
    if n < 3:
        raise ValueError("need n >= 3")
    if ring is None:
        ring = x_ring(n)
    out = []
    for i in range(2, n + 1):
        for j in range(i + 1, n + 1):
            form = (
                _xv(ring, i - 1, j, n)
                + _xv(ring, i + 1, j, n)
                - _xv(ring, i, j - 1, n)
                - _xv(ring, i, j + 1, n)
            )
            if not form.is_zero():
                out.append(form)
    return out


def _minuend_entry(ring, k, n):
    # sequence x11, x12, x22, x23, x33, ...
    i = (k + 1) // 2
    j = (k + 2) // 2
    return _xv(ring, i, j, n)


def _subtrahend_entry(ring, k, n):
    # sequence x_nn, x_{n-1,n}, x_{n-1,n-1}, ...; index 0 means the leading 0
    if k == 0:
        return ring.zero()
    i = n + 1 - (k + 2) // 2
    j = n + 1 - (k + 1) // 2
    return _xv(ring, i, j, n)


def dx_minors(n, ring=None):
    """2x2 minors of the 2 x (n-1) difference matrix of the banded family."""
    if n < 3:
        raise ValueError("need n >= 3")
    if ring is None:
        ring = x_ring(n)
    row1 = [_minuend_entry(ring, k, n) - _subtrahend_entry(ring, k, n) for k in range(1, n)]
    row2 = [_minuend_entry(ring, k + 1, n) - _subtrahend_entry(ring, k - 1, n) for k in range(1, n)]
    out = []
    for a in range(n - 1):
        for b in range(a + 1, n - 1):
            out.append(row1[a] * row2[b] - row1[b] * row2[a])
    return out


def _block_trace_poly(size, alpha, yring):
    """Symbolic trace of one canonical block as a polynomial in y_1, y_2."""
    b1, b2 = _block_pair(size, alpha)
    t1 = sum((b1[i][i] for i in range(size)), Fraction(0))
    t2 = sum((b2[i][i] for i in range(size)), Fraction(0))
    return yring.const(t1) * yring.var("y_1") + yring.const(t2) * yring.var("y_2")


def _block_det(ring, n, offset, size):
    """det of the (offset+1 .. offset+size) principal block in x variables."""
    idx = list(range(offset + 1, offset + size + 1))

    def det(rows, cols):
        if len(rows) == 1:
            return _xv(ring, rows[0], cols[0], n)
        acc = ring.zero()
        sign = 1
        for t, c in enumerate(cols):
            entry = _xv(ring, rows[0], c, n)
            if not entry.is_zero():
                sub = det(rows[1:], cols[:t] + cols[t + 1 :])
                term = entry * sub
                acc = acc + (term if sign > 0 else -term)
            sign = -sign
        return acc

    return det(idx, idx)


def block_det_constraints(symbol, ring=None):
    """Off-block vanishing plus det equalities for trace-matched block pairs.

    The exponential of a block-diagonal space is block-diagonal, so all
    coordinates outside the blocks vanish; blocks whose symbolic traces
    agree exponentiate to matrices of equal determinant.
    """
    n = symbol.n
    if ring is None:
        ring = x_ring(n)
    blocks = symbol.block_sizes()
    offsets = []
    off = 0
    for size, _a in blocks:
        offsets.append(off)
        off += size

    out = []
    # linear forms: entries outside the diagonal blocks
    spans = [(offsets[t] + 1, offsets[t] + blocks[t][0]) for t in range(len(blocks))]

    def block_of(i):
        for t, (lo, hi) in enumerate(spans):
            if lo <= i <= hi:
                return t
        raise AssertionError

    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            if block_of(i) != block_of(j):
                out.append(_xv(ring, i, j, n))

    yring = VarRing(["y_1", "y_2"], "grevlex")
    traces = [_block_trace_poly(size, a, yring) for size, a in blocks]
    for s in range(len(blocks)):
        for t in range(s + 1, len(blocks)):
            if traces[s] == traces[t]:
                ds = _block_det(ring, n, offsets[s], blocks[s][0])
                dt = _block_det(ring, n, offsets[t], blocks[t][0])
                out.append(ds - dt)
    return out
