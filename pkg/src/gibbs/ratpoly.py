"""Exact rational scalars and sparse multivariate polynomial arithmetic.

All symbolic computation in this package runs over the rationals, using
``fractions.Fraction`` for scalars (arbitrary precision, always reduced,
positive denominator) and :class:`MultiPoly` for polynomials.  A polynomial
is a map from dense exponent vectors to nonzero rational coefficients,
attached to a :class:`VarRing` that fixes the variable names and the
monomial order.
"""

from __future__ import annotations

import re
from fractions import Fraction


class RingMismatchError(ValueError):
    """Raised when combining polynomials over different rings."""


def rat(value) -> Fraction:
    """Coerce ints, strings like ``"3/7"`` and Fractions to Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    raise TypeError(f"cannot interpret {value!r} as a rational number")


def format_rat(value: Fraction) -> str:
    """Canonical text form: ``p`` for integers, ``p/q`` otherwise."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def _normalize_order(names, order):
    """Return the order descriptor in normal form.

    Accepted descriptors: ``"lex"``, ``"grevlex"``, or
    ``("block", [(name_tuple, suborder), ...])`` where the name tuples
    partition the ring variables.
    """
    if order in ("lex", "grevlex"):
        return order
    kind, blocks = order
    if kind != "block":
        raise ValueError(f"unknown monomial order {order!r}")
    seen = []
    norm = []
    for block_names, sub in blocks:
        if sub not in ("lex", "grevlex"):
            raise ValueError(f"unknown block sub-order {sub!r}")
        block_names = tuple(block_names)
        seen.extend(block_names)
        norm.append((block_names, sub))
    if sorted(seen) != sorted(names) or len(seen) != len(set(seen)):
        raise ValueError("block order must partition the ring variables")
    return ("block", norm)


class VarRing:
    """An ordered list of variable names plus a monomial order.

    The order is materialized as an additive integer key: for exponent
    vectors a, b we have key(a + b) = key(a) + key(b) componentwise, and
    monomial comparison is lexicographic comparison of keys.  grevlex
    contributes (total degree, reversed negated exponents), lex contributes
    the exponents themselves; a block order concatenates the keys of its
    blocks.
    """

    __slots__ = ("names", "order", "_index", "_blocks")

    def __init__(self, names, order="grevlex"):
        self.names = tuple(names)
        if len(set(self.names)) != len(self.names):
            raise ValueError("ring variable names must be distinct")
        self.order = _normalize_order(self.names, order)
        self._index = {name: i for i, name in enumerate(self.names)}
        if self.order in ("lex", "grevlex"):
            blocks = [(self.names, self.order)]
        else:
            blocks = self.order[1]
        self._blocks = tuple(
            (tuple(self._index[nm] for nm in block_names), sub)
            for block_names, sub in blocks
        )

    @property
    def nvars(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise KeyError(f"variable {name!r} not in ring {self.names}") from None

    def exp_key(self, exp):
        """Additive integer key realizing the monomial order."""
        key = []
        for idx, sub in self._blocks:
            if sub == "grevlex":
                key.append(sum(exp[i] for i in idx))
                for i in reversed(idx):
                    key.append(-exp[i])
            else:
                for i in idx:
                    key.append(exp[i])
        return tuple(key)

    def with_order(self, order) -> "VarRing":
        return VarRing(self.names, order)

    def var(self, name: str) -> "MultiPoly":
        exp = [0] * self.nvars
        exp[self.index(name)] = 1
        return MultiPoly(self, {tuple(exp): Fraction(1)})

    def gens(self):
        return [self.var(nm) for nm in self.names]

    def zero(self) -> "MultiPoly":
        return MultiPoly(self, {})

    def one(self) -> "MultiPoly":
        return self.const(1)

    def const(self, value) -> "MultiPoly":
        value = rat(value)
        if value == 0:
            return MultiPoly(self, {})
        return MultiPoly(self, {(0,) * self.nvars: value})

    def __eq__(self, other):
        return (
            isinstance(other, VarRing)
            and self.names == other.names
            and self.order == other.order
        )

    def __hash__(self):
        return hash((self.names, _hashable(self.order)))

    def __repr__(self):
        return f"VarRing({list(self.names)}, order={self.order!r})"


def _hashable(order):
    if isinstance(order, str):
        return order
    return ("block", tuple((tuple(ns), sub) for ns, sub in order[1]))


class MultiPoly:
    """Sparse multivariate polynomial over Q.

    ``terms`` maps dense exponent tuples (length = ring.nvars) to nonzero
    Fraction coefficients.  Instances are treated as immutable.
    """

    __slots__ = ("ring", "terms")

    def __init__(self, ring: VarRing, terms: dict):
        self.ring = ring
        self.terms = {e: c for e, c in terms.items() if c != 0}

    # -- construction helpers ------------------------------------------

    @staticmethod
    def zero(ring):
        return MultiPoly(ring, {})

    def _coerce(self, other):
        if isinstance(other, MultiPoly):
            if other.ring != self.ring:
                raise RingMismatchError(
                    f"ring mismatch: {self.ring!r} vs {other.ring!r}"
                )
            return other
        return self.ring.const(other)

    # -- queries -------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(sum(e) == 0 for e in self.terms)

    def constant_term(self) -> Fraction:
        return self.terms.get((0,) * self.ring.nvars, Fraction(0))

    def total_degree(self) -> int:
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def degree_in(self, name: str) -> int:
        if not self.terms:
            return -1
        i = self.ring.index(name)
        return max(e[i] for e in self.terms)

    def variables(self):
        """Names of variables that actually occur."""
        used = set()
        for e in self.terms:
            for i, p in enumerate(e):
                if p:
                    used.add(self.ring.names[i])
        return used

    def sorted_terms(self):
        """Terms as (exp, coeff), descending in the ring's order."""
        key = self.ring.exp_key
        return sorted(self.terms.items(), key=lambda t: key(t[0]), reverse=True)

    def leading_term(self):
        """(exp, coeff) of the leading monomial; raises on zero."""
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        key = self.ring.exp_key
        exp = max(self.terms, key=key)
        return exp, self.terms[exp]

    # -- arithmetic ----------------------------------------------------

    def __add__(self, other):
        other = self._coerce(other)
        terms = dict(self.terms)
        for e, c in other.terms.items():
            s = terms.get(e, 0) + c
            if s:
                terms[e] = s
            else:
                terms.pop(e, None)
        return MultiPoly(self.ring, terms)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly(self.ring, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, MultiPoly):
            c = rat(other)
            if c == 0:
                return MultiPoly(self.ring, {})
            return MultiPoly(self.ring, {e: c * v for e, v in self.terms.items()})
        other = self._coerce(other)
        if len(self.terms) > len(other.terms):
            big, small = self.terms, other.terms
        else:
            big, small = other.terms, self.terms
        out = {}
        for e1, c1 in small.items():
            for e2, c2 in big.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                s = out.get(e, 0) + c1 * c2
                if s:
                    out[e] = s
                else:
                    del out[e]
        return MultiPoly(self.ring, out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative polynomial power")
        result = self.ring.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    def __truediv__(self, scalar):
        c = rat(scalar)
        if c == 0:
            raise ZeroDivisionError("division of polynomial by zero scalar")
        return self * (1 / c)

    def __eq__(self, other):
        if isinstance(other, MultiPoly):
            return self.ring == other.ring and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self.terms == self.ring.const(other).terms
        return NotImplemented

    def __hash__(self):
        return hash((self.ring, frozenset(self.terms.items())))

    def monic(self):
        """Divide by the leading coefficient."""
        _, lc = self.leading_term()
        return self / lc

    def content(self) -> Fraction:
        """Positive rational c such that self/c has coprime integer coeffs."""
        if not self.terms:
            return Fraction(1)
        from math import gcd

        num = 0
        den = 1
        for c in self.terms.values():
            num = gcd(num, abs(c.numerator))
            den = den * c.denominator // gcd(den, c.denominator)
        return Fraction(num, den)

    def primitive(self):
        """Integer-coefficient scalar multiple with content 1, positive lead."""
        if not self.terms:
            return self
        p = self / self.content()
        if p.leading_term()[1] < 0:
            p = -p
        return p

    # -- calculus and evaluation ---------------------------------------

    def derivative(self, name: str) -> "MultiPoly":
        i = self.ring.index(name)
        out = {}
        for e, c in self.terms.items():
            if e[i] == 0:
                continue
            d = list(e)
            d[i] -= 1
            out[tuple(d)] = c * e[i]
        return MultiPoly(self.ring, out)

    def evaluate(self, assignment: dict) -> Fraction:
        """Exact value at a rational point; every used variable must be set."""
        values = {}
        for name, v in assignment.items():
            values[self.ring.index(name)] = rat(v)
        total = Fraction(0)
        for e, c in self.terms.items():
            term = c
            for i, p in enumerate(e):
                if p:
                    if i not in values:
                        raise KeyError(
                            f"unassigned variable {self.ring.names[i]!r}"
                        )
                    term *= values[i] ** p
            total += term
        return total

    def evaluate_float(self, assignment: dict):
        """Numeric value; accepts float/mpf values, no exactness guarantee."""
        idx = {self.ring.index(k): v for k, v in assignment.items()}
        total = 0
        for e, c in self.terms.items():
            term = c.numerator / c.denominator if isinstance(c, Fraction) else c
            for i, p in enumerate(e):
                if p:
                    term = term * idx[i] ** p
            total += term
        return total

    def substitute(self, target_ring: VarRing, mapping: dict) -> "MultiPoly":
        """Ring map: variables in ``mapping`` go to the given polynomials,
        all others to their namesakes in ``target_ring``."""
        images = {}
        for i, name in enumerate(self.ring.names):
            if name in mapping:
                img = mapping[name]
                if not isinstance(img, MultiPoly):
                    img = target_ring.const(img)
                elif img.ring != target_ring:
                    raise RingMismatchError("substitution image in wrong ring")
                images[i] = img
            else:
                images[i] = target_ring.var(name)
        out = target_ring.zero()
        powers = {i: {0: target_ring.one()} for i in images}
        for e, c in self.terms.items():
            term = target_ring.const(c)
            for i, p in enumerate(e):
                if p:
                    cache = powers[i]
                    if p not in cache:
                        cache[p] = images[i] ** p
                    term = term * cache[p]
            out = out + term
        return out

    def convert(self, target_ring: VarRing) -> "MultiPoly":
        """Re-express in a ring containing all used variables (by name)."""
        out = {}
        pos = []
        for name in self.ring.names:
            pos.append(target_ring._index.get(name, -1))
        for e, c in self.terms.items():
            new = [0] * target_ring.nvars
            for i, p in enumerate(e):
                if p:
                    if pos[i] < 0:
                        raise RingMismatchError(
                            f"variable {self.ring.names[i]!r} missing from target ring"
                        )
                    new[pos[i]] = p
            out[tuple(new)] = c
        return MultiPoly(target_ring, out)

    # -- text form -----------------------------------------------------

    def __str__(self):
        if not self.terms:
            return "0"
        chunks = []
        for exp, coeff in self.sorted_terms():
            factors = []
            for i, p in enumerate(exp):
                if p == 1:
                    factors.append(self.ring.names[i])
                elif p > 1:
                    factors.append(f"{self.ring.names[i]}^{p}")
            mag = abs(coeff)
            if not factors:
                body = format_rat(mag)
            elif mag == 1:
                body = "*".join(factors)
            else:
                body = "*".join([format_rat(mag)] + factors)
            if not chunks:
                chunks.append(body if coeff > 0 else f"-{body}")
            else:
                chunks.append(f"+ {body}" if coeff > 0 else f"- {body}")
        return " ".join(chunks)

    def __repr__(self):
        return f"MultiPoly({self})"


def elementary_symmetric(ring: VarRing, t: int, names) -> MultiPoly:
    """The elementary symmetric polynomial sigma_t in the given variables."""
    names = list(names)
    if not 0 <= t <= len(names):
        raise ValueError(f"sigma index {t} out of range 0..{len(names)}")
    # Recurrence over prefixes: e[j] after k vars = e[j] + x_k * e[j-1].
    sigma = [ring.one()] + [ring.zero()] * t
    for name in names:
        x = ring.var(name)
        for j in range(min(t, len(names)), 0, -1):
            sigma[j] = sigma[j] + x * sigma[j - 1]
    return sigma[t]


# -- parsing ------------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<int>\d+)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*/^()]))"
)


def _tokenize(text: str):
    pos = 0
    tokens = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            if text[pos:].strip():
                raise ValueError(f"cannot tokenize {text[pos:]!r}")
            break
        pos = m.end()
        if m.group("int") is not None:
            tokens.append(("int", int(m.group("int"))))
        elif m.group("name") is not None:
            tokens.append(("name", m.group("name")))
        else:
            tokens.append(("op", m.group("op")))
    tokens.append(("end", None))
    return tokens


class _Parser:
    """Recursive descent for the canonical polynomial text form.

    Accepts sums/differences of products of powers, rational literals
    ``p/q``, and parenthesized subexpressions.
    """

    def __init__(self, ring, tokens):
        self.ring = ring
        self.tokens = tokens
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def take(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expr(self):
        kind, val = self.peek()
        negate = False
        if kind == "op" and val in "+-":
            self.take()
            negate = val == "-"
        p = self.term()
        if negate:
            p = -p
        while True:
            kind, val = self.peek()
            if kind == "op" and val in "+-":
                self.take()
                q = self.term()
                p = p - q if val == "-" else p + q
            else:
                return p

    def term(self):
        p = self.factor()
        while True:
            kind, val = self.peek()
            if kind == "op" and val == "*":
                self.take()
                p = p * self.factor()
            elif kind in ("name",) or (kind == "op" and val == "("):
                # implicit multiplication, e.g. "3x" or ")(x+y)"
                p = p * self.factor()
            else:
                return p

    def factor(self):
        base = self.base()
        kind, val = self.peek()
        if kind == "op" and val == "^":
            self.take()
            kind, val = self.take()
            if kind != "int":
                raise ValueError("expected integer exponent after '^'")
            return base**val
        return base

    def base(self):
        kind, val = self.take()
        if kind == "int":
            nxt_kind, nxt = self.peek()
            if nxt_kind == "op" and nxt == "/":
                self.take()
                dk, dv = self.take()
                if dk != "int":
                    raise ValueError("expected integer denominator")
                return self.ring.const(Fraction(val, dv))
            return self.ring.const(val)
        if kind == "name":
            return self.ring.var(val)
        if kind == "op" and val == "(":
            p = self.expr()
            kind, val = self.take()
            if (kind, val) != ("op", ")"):
                raise ValueError("unbalanced parentheses")
            return p
        if kind == "op" and val == "-":
            return -self.factor()
        raise ValueError(f"unexpected token {val!r}")


def parse_poly(ring: VarRing, text: str) -> MultiPoly:
    """Parse the canonical text form (and mild generalizations) over ring."""
    parser = _Parser(ring, _tokenize(text))
    p = parser.expr()
    if parser.peek()[0] != "end":
        raise ValueError(f"trailing input in polynomial {text!r}")
    return p
