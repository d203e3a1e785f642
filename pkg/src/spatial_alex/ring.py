"""Laurent polynomials with half-integer exponents and formal fractions of them.

Monomials are tuples of doubled exponents (see :mod:`spatial_alex.lattice`);
coefficients are Python ints. All values are immutable.
"""

from __future__ import annotations

from functools import reduce
from math import gcd
from typing import Iterable, Mapping, Sequence

from .errors import DivisionByZero, Indivisible, LatticeMismatch
from .lattice import HalfMonomial, render_monomial


class LaurentPoly:
    """Element of Z[H] where H is the half-exponent extension of a free abelian group."""

    __slots__ = ("nvars", "terms", "_hash")

    def __init__(self, nvars: int, terms: Mapping[tuple, int] | None = None):
        self.nvars = nvars
        clean = {}
        if terms:
            for m, c in terms.items():
                if c:
                    if len(m) != nvars:
                        raise LatticeMismatch(f"monomial {m} has wrong rank for {nvars} variables")
                    clean[tuple(m)] = c
        self.terms = clean
        self._hash = None

    # construction -------------------------------------------------------
    @classmethod
    def zero(cls, nvars: int) -> "LaurentPoly":
        return cls(nvars)

    @classmethod
    def one(cls, nvars: int) -> "LaurentPoly":
        return cls(nvars, {(0,) * nvars: 1})

    @classmethod
    def constant(cls, nvars: int, c: int) -> "LaurentPoly":
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def monomial(cls, m: HalfMonomial | Sequence[int], coeff: int = 1) -> "LaurentPoly":
        halves = m.halves if isinstance(m, HalfMonomial) else tuple(m)
        return cls(len(halves), {halves: coeff})

    @classmethod
    def _raw(cls, nvars, terms):
        obj = cls.__new__(cls)
        obj.nvars = nvars
        obj.terms = terms
        obj._hash = None
        return obj

    # predicates ---------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def __len__(self):
        return len(self.terms)

    def _check(self, other: "LaurentPoly"):
        if self.nvars != other.nvars:
            raise LatticeMismatch(f"{self.nvars} vs {other.nvars} variables")

    def _coerce(self, other):
        if isinstance(other, LaurentPoly):
            self._check(other)
            return other
        if isinstance(other, HalfMonomial):
            return LaurentPoly.monomial(other)
        if isinstance(other, int):
            return LaurentPoly.constant(self.nvars, other)
        return NotImplemented

    # arithmetic ---------------------------------------------------------
    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self.terms)
        for m, c in other.terms.items():
            v = out.get(m, 0) + c
            if v:
                out[m] = v
            else:
                out.pop(m, None)
        return LaurentPoly._raw(self.nvars, out)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly._raw(self.nvars, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out: dict = {}
        get = out.get
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                out[m] = get(m, 0) + c1 * c2
        return LaurentPoly._raw(self.nvars, {m: c for m, c in out.items() if c})

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            if not self.is_monomial():
                raise Indivisible("negative power of a non-unit")
            (m, c), = self.terms.items()
            if abs(c) != 1:
                raise Indivisible("negative power of a non-unit")
            return LaurentPoly._raw(self.nvars, {tuple(-a * -n for a in m): c ** (-n)})
        result = LaurentPoly.one(self.nvars)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def shift(self, m: HalfMonomial | Sequence[int]) -> "LaurentPoly":
        """Multiply by a monomial."""
        h = m.halves if isinstance(m, HalfMonomial) else tuple(m)
        if len(h) != self.nvars:
            raise LatticeMismatch("shift of wrong rank")
        return LaurentPoly._raw(self.nvars, {tuple(a + b for a, b in zip(k, h)): c
                                             for k, c in self.terms.items()})

    def scale(self, c: int) -> "LaurentPoly":
        if c == 0:
            return LaurentPoly.zero(self.nvars)
        return LaurentPoly._raw(self.nvars, {m: c * v for m, v in self.terms.items()})

    # ordering / inspection --------------------------------------------
    def leading(self) -> tuple[tuple, int]:
        m = max(self.terms)
        return m, self.terms[m]

    def trailing(self) -> tuple[tuple, int]:
        m = min(self.terms)
        return m, self.terms[m]

    def content(self) -> int:
        return reduce(gcd, self.terms.values(), 0)

    def degree_box(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        ms = list(self.terms)
        lo = tuple(min(m[i] for m in ms) for i in range(self.nvars))
        hi = tuple(max(m[i] for m in ms) for i in range(self.nvars))
        return lo, hi

    def __eq__(self, other):
        if isinstance(other, int):
            other = LaurentPoly.constant(self.nvars, other)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self.nvars == other.nvars and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self.terms.items())))
        return self._hash

    def map_monomials(self, fn, nvars: int) -> "LaurentPoly":
        """Apply a monoid homomorphism on monomials (e.g. a specialization)."""
        out: dict = {}
        for m, c in self.terms.items():
            k = tuple(fn(m))
            out[k] = out.get(k, 0) + c
        return LaurentPoly(nvars, out)

    def render(self, names: Sequence[str]) -> str:
        if not self.terms:
            return "0"
        pieces = []
        for m in sorted(self.terms, reverse=True):
            c = self.terms[m]
            mono = render_monomial(m, names)
            if mono == "1":
                body = str(abs(c))
            elif abs(c) == 1:
                body = mono
            else:
                body = f"{abs(c)}*{mono}"
            sign = "-" if c < 0 else "+"
            if not pieces:
                pieces.append(body if c > 0 else "-" + body)
            else:
                pieces.append(sign + body)
        return "".join(pieces)

    def to_json(self, names: Sequence[str]) -> list:
        return [{"coeff": self.terms[m], "exponents": {n: _fmt_half(h) for n, h in zip(names, m) if h}}
                for m in sorted(self.terms, reverse=True)]

    def __repr__(self):
        names = [f"x{i}" for i in range(self.nvars)]
        return f"LaurentPoly({self.render(names)})"


def _fmt_half(h: int) -> str:
    return str(h // 2) if h % 2 == 0 else f"{h}/2"


def exact_div(p: LaurentPoly, d: LaurentPoly) -> LaurentPoly:
    """Return q with q*d == p, or raise Indivisible.

    Lex-leading-term reduction; quotient terms are confined to the degree box
    forced by per-variable degrees, which guarantees termination.
    """
    p._check(d)
    if d.is_zero():
        raise DivisionByZero("division by the zero polynomial")
    if p.is_zero():
        return LaurentPoly.zero(p.nvars)
    if d.is_monomial():
        (dm, dc), = d.terms.items()
        if any(c % dc for c in p.terms.values()):
            raise Indivisible("coefficients not divisible")
        return LaurentPoly._raw(p.nvars, {tuple(a - b for a, b in zip(m, dm)): c // dc
                                          for m, c in p.terms.items()})
    plo, phi = p.degree_box()
    dlo, dhi = d.degree_box()
    qlo = tuple(a - b for a, b in zip(plo, dlo))
    qhi = tuple(a - b for a, b in zip(phi, dhi))
    if any(a > b for a, b in zip(qlo, qhi)):
        raise Indivisible("degree box is empty")
    dm, dc = d.leading()
    dterms = list(d.terms.items())
    rem = dict(p.terms)
    quot: dict = {}
    while rem:
        rm = max(rem)
        rc = rem[rm]
        if rc % dc:
            raise Indivisible("leading coefficient not divisible")
        qm = tuple(a - b for a, b in zip(rm, dm))
        if any(x < lo or x > hi for x, lo, hi in zip(qm, qlo, qhi)):
            raise Indivisible("quotient term outside degree box")
        qc = rc // dc
        quot[qm] = qc
        for m, c in dterms:
            k = tuple(a + b for a, b in zip(qm, m))
            v = rem.get(k, 0) - qc * c
            if v:
                rem[k] = v
            else:
                rem.pop(k, None)
    return LaurentPoly._raw(p.nvars, quot)


def divides(d: LaurentPoly, p: LaurentPoly) -> bool:
    try:
        exact_div(p, d)
    except Indivisible:
        return False
    return True


def symmetric_binomial(m: HalfMonomial) -> LaurentPoly:
    """{1/2}_u = u^(1/2) - u^(-1/2) for a monomial u."""
    half = tuple(h // 2 for h in m.halves) if m.is_integral else None
    if half is None:
        raise ValueError("symmetric binomial needs an integral monomial")
    return LaurentPoly.monomial(half) - LaurentPoly.monomial(tuple(-h for h in half))


class RingFraction:
    """Formal quotient num/den. Equality is decided by cross-multiplication."""

    __slots__ = ("num", "den")

    def __init__(self, num: LaurentPoly, den: LaurentPoly | None = None):
        if den is None:
            den = LaurentPoly.one(num.nvars)
        num._check(den)
        if den.is_zero():
            raise DivisionByZero("zero denominator")
        self.num = num
        self.den = den

    @property
    def nvars(self):
        return self.num.nvars

    @classmethod
    def zero(cls, nvars):
        return cls(LaurentPoly.zero(nvars))

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def _coerce(self, other):
        if isinstance(other, RingFraction):
            self.num._check(other.num)
            return other
        if isinstance(other, (LaurentPoly, HalfMonomial, int)):
            return RingFraction(self.num._coerce(other))
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self.den == other.den:
            return RingFraction(self.num + other.num, self.den)
        return RingFraction(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RingFraction(-self.num, self.den)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return RingFraction(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return RingFraction(self.num * other.den, self.den * other.num)

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return fraction_eq(self, other)

    __hash__ = None

    def map_monomials(self, fn, nvars):
        return RingFraction(self.num.map_monomials(fn, nvars), self.den.map_monomials(fn, nvars))

    def as_poly(self) -> LaurentPoly | None:
        """The polynomial value if the denominator divides the numerator."""
        try:
            return exact_div(self.num, self.den)
        except Indivisible:
            return None

    def render(self, names: Sequence[str]) -> str:
        c = canonicalize(self)
        num = c.num.render(names)
        if c.den == 1:
            return num
        den = c.den.render(names)
        if len(c.num) > 1:
            num = f"({num})"
        if len(c.den) > 1 or c.den.leading()[1] != 1:
            den = f"({den})"
        return f"{num}/{den}"

    def to_json(self, names):
        c = canonicalize(self)
        return {"num": c.num.to_json(names), "den": c.den.to_json(names)}

    def __repr__(self):
        names = [f"x{i}" for i in range(self.nvars)]
        return f"RingFraction({self.render(names)})"


def fraction_eq(x: RingFraction, y: RingFraction) -> bool:
    x.num._check(y.num)
    return x.num * y.den == y.num * x.den


def canonicalize(x: RingFraction) -> RingFraction:
    """Canonical representative of a fraction.

    If the denominator divides the numerator the result is ``q/1``. Otherwise
    integer content is removed, the pair is shifted by a common monomial so the
    denominator's per-variable exponent range is centred on zero (floor for odd
    spans), and signs are fixed so the denominator's lex-leading coefficient is
    positive.
    """
    num, den = x.num, x.den
    if num.is_zero():
        return RingFraction(num, LaurentPoly.one(num.nvars))
    q = x.as_poly()
    if q is not None:
        return RingFraction(q, LaurentPoly.one(num.nvars))
    g = gcd(num.content(), den.content())
    if g > 1:
        num = exact_div(num, LaurentPoly.constant(num.nvars, g))
        den = exact_div(den, LaurentPoly.constant(num.nvars, g))
    lo, hi = den.degree_box()
    centre = tuple(-((a + b) // 2) for a, b in zip(lo, hi))
    num, den = num.shift(centre), den.shift(centre)
    if den.leading()[1] < 0:
        num, den = -num, -den
    return RingFraction(num, den)
