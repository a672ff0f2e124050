"""Exact polynomials in z_1..z_n and their conjugates.

The conjugate variables zb_j are independent formal symbols.  Evaluation
substitutes the arithmetic conjugate of the z_j value into zb_j, so every
operation stays algebraic and exact over the Gaussian rationals.
"""

from __future__ import annotations

import math
import re as _re
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Sequence, Union

Rational = Union[int, Fraction]


class GaussianRational:
    """Number re + i*im with rational parts."""

    __slots__ = ("re", "im")

    def __init__(self, re: Rational | str = 0, im: Rational | str = 0):
        self.re = re if type(re) is Fraction else Fraction(re)
        self.im = im if type(im) is Fraction else Fraction(im)

    @classmethod
    def coerce(cls, value) -> "GaussianRational":
        if isinstance(value, GaussianRational):
            return value
        if isinstance(value, (int, Fraction)):
            return cls(value, 0)
        if isinstance(value, complex):
            raise TypeError("floating point values are not exact; pass rationals")
        if isinstance(value, str):
            return parse_number(value)
        if isinstance(value, tuple) and len(value) == 2:
            return cls(value[0], value[1])
        raise TypeError(f"cannot convert {value!r} to a Gaussian rational")

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def norm2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def is_real(self) -> bool:
        return self.im == 0

    def __add__(self, other):
        o = _as_gr(other)
        if o is None:
            return NotImplemented
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = _as_gr(other)
        if o is None:
            return NotImplemented
        return GaussianRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = _as_gr(other)
        if o is None:
            return NotImplemented
        return o - self

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __mul__(self, other):
        o = _as_gr(other)
        if o is None:
            return NotImplemented
        a, b, c, d = self.re, self.im, o.re, o.im
        if b == 0 and d == 0:
            return GaussianRational(a * c, 0)
        return GaussianRational(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = _as_gr(other)
        if o is None:
            return NotImplemented
        n = o.norm2()
        if n == 0:
            raise ZeroDivisionError("division by zero Gaussian rational")
        q = self * o.conjugate()
        return GaussianRational(q.re / n, q.im / n)

    def __rtruediv__(self, other):
        o = _as_gr(other)
        if o is None:
            return NotImplemented
        return o / self

    def __pow__(self, k: int):
        if k < 0:
            return (GaussianRational(1) / self) ** (-k)
        out = GaussianRational(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        o = _as_gr(other)
        if o is None:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __repr__(self):
        return f"GaussianRational({self})"

    def __str__(self):
        return format_number(self)


def _as_gr(value) -> GaussianRational | None:
    if isinstance(value, GaussianRational):
        return value
    if isinstance(value, (int, Fraction)):
        return GaussianRational(value, 0)
    return None


ZERO = GaussianRational(0)
ONE = GaussianRational(1)
I_UNIT = GaussianRational(0, 1)


def format_number(c: GaussianRational) -> str:
    """Text form accepted back by :func:`parse_number`."""
    if c.im == 0:
        return str(c.re)
    if c.re == 0:
        if c.im == 1:
            return "i"
        if c.im == -1:
            return "-i"
        return f"{c.im}*i"
    sign = "+" if c.im > 0 else "-"
    mag = abs(c.im)
    imag = "i" if mag == 1 else f"{mag}*i"
    return f"({c.re}{sign}{imag})"


class CMonomial(tuple):
    """Pair (alpha, beta) of exponent tuples for z and zb."""

    __slots__ = ()

    def __new__(cls, alpha: Sequence[int], beta: Sequence[int]):
        alpha, beta = tuple(alpha), tuple(beta)
        if len(alpha) != len(beta):
            raise ValueError("exponent vectors must have equal length")
        if any(a < 0 for a in alpha + beta):
            raise ValueError("exponents must be nonnegative")
        return tuple.__new__(cls, (alpha, beta))

    @property
    def alpha(self) -> tuple[int, ...]:
        return self[0]

    @property
    def beta(self) -> tuple[int, ...]:
        return self[1]

    @property
    def degree(self) -> int:
        return sum(self[0]) + sum(self[1])


def _key_order(key):
    alpha, beta = key
    return (sum(alpha) + sum(beta), tuple(-a for a in alpha), tuple(-b for b in beta))


class HPoly:
    """Polynomial in z and zb with Gaussian-rational coefficients.

    ``terms`` maps ``(alpha, beta)`` exponent pairs to nonzero coefficients.
    Instances are immutable and hashable.
    """

    __slots__ = ("n", "_terms", "_hash")

    def __init__(self, n: int, terms: Mapping | Iterable = ()):
        if n < 1:
            raise ValueError("dimension must be positive")
        self.n = n
        items = terms.items() if isinstance(terms, Mapping) else terms
        clean: dict = {}
        for key, c in items:
            alpha, beta = tuple(key[0]), tuple(key[1])
            if len(alpha) != n or len(beta) != n:
                raise ValueError(f"monomial {key!r} does not have length {n}")
            c = GaussianRational.coerce(c)
            k = (alpha, beta)
            if k in clean:
                c = clean[k] + c
            if c:
                clean[k] = c
            else:
                clean.pop(k, None)
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, n: int, terms: dict) -> "HPoly":
        obj = cls.__new__(cls)
        obj.n = n
        obj._terms = terms
        obj._hash = None
        return obj

    # constructors
    @classmethod
    def zero(cls, n: int) -> "HPoly":
        return cls._raw(n, {})

    @classmethod
    def const(cls, n: int, c) -> "HPoly":
        c = GaussianRational.coerce(c)
        z = (0,) * n
        return cls._raw(n, {(z, z): c} if c else {})

    @classmethod
    def var(cls, n: int, j: int, conjugated: bool = False) -> "HPoly":
        """The coordinate z_{j+1} (0-based ``j``), or its conjugate."""
        if not 0 <= j < n:
            raise IndexError(f"variable index {j} out of range for n={n}")
        e = tuple(1 if k == j else 0 for k in range(n))
        z = (0,) * n
        key = (z, e) if conjugated else (e, z)
        return cls._raw(n, {key: ONE})

    @classmethod
    def re_var(cls, n: int, j: int) -> "HPoly":
        return (cls.var(n, j) + cls.var(n, j, True)) * Fraction(1, 2)

    @classmethod
    def im_var(cls, n: int, j: int) -> "HPoly":
        return (cls.var(n, j) - cls.var(n, j, True)) * GaussianRational(0, Fraction(-1, 2))

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def __len__(self):
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    __bool__ = lambda self: bool(self._terms)

    def is_constant(self) -> bool:
        z = (0,) * self.n
        return all(k == (z, z) for k in self._terms)

    def constant_term(self) -> GaussianRational:
        z = (0,) * self.n
        return self._terms.get((z, z), ZERO)

    def degree(self) -> int:
        if not self._terms:
            return -1
        return max(sum(a) + sum(b) for a, b in self._terms)

    def min_degree(self) -> float:
        if not self._terms:
            return math.inf
        return min(sum(a) + sum(b) for a, b in self._terms)

    def is_real_valued(self) -> bool:
        for (a, b), c in self._terms.items():
            d = self._terms.get((b, a))
            if d is None or d != c.conjugate():
                return False
        return True

    # arithmetic
    def _check(self, other: "HPoly"):
        if other.n != self.n:
            raise ValueError(f"dimension mismatch: {self.n} vs {other.n}")

    def _lift(self, other):
        if isinstance(other, HPoly):
            self._check(other)
            return other
        g = _as_gr(other)
        if g is None:
            return None
        return HPoly.const(self.n, g)

    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        out = dict(self._terms)
        for k, c in o._terms.items():
            v = out.get(k)
            if v is None:
                out[k] = c
            else:
                v = v + c
                if v:
                    out[k] = v
                else:
                    del out[k]
        return HPoly._raw(self.n, out)

    __radd__ = __add__

    def __neg__(self):
        return HPoly._raw(self.n, {k: -c for k, c in self._terms.items()})

    def __sub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        if not isinstance(other, HPoly):
            g = _as_gr(other)
            if g is None:
                return NotImplemented
            if not g:
                return HPoly.zero(self.n)
            return HPoly._raw(self.n, {k: c * g for k, c in self._terms.items()})
        self._check(other)
        out: dict = {}
        for (a1, b1), c1 in self._terms.items():
            for (a2, b2), c2 in other._terms.items():
                k = (tuple(x + y for x, y in zip(a1, a2)), tuple(x + y for x, y in zip(b1, b2)))
                v = out.get(k)
                out[k] = c1 * c2 if v is None else v + c1 * c2
        return HPoly._raw(self.n, {k: v for k, v in out.items() if v})

    __rmul__ = __mul__

    def __truediv__(self, other):
        g = _as_gr(other)
        if g is None:
            if isinstance(other, HPoly) and other.is_constant() and other:
                g = other.constant_term()
            else:
                return NotImplemented
        inv = ONE / g
        return self * inv

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative powers are not polynomials")
        out = HPoly.const(self.n, 1)
        base = self
        while k:
            if k & 1:
                out = out * base
            k >>= 1
            if k:
                base = base * base
        return out

    def __eq__(self, other):
        if isinstance(other, HPoly):
            return self.n == other.n and self._terms == other._terms
        g = _as_gr(other)
        if g is None:
            return NotImplemented
        return self._terms == HPoly.const(self.n, g)._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.n, frozenset(self._terms.items())))
        return self._hash

    def __repr__(self):
        return f"HPoly({self.n}, {format_poly(self)!r})"

    def __str__(self):
        return format_poly(self)

    def sorted_items(self):
        return sorted(self._terms.items(), key=lambda kv: _key_order(kv[0]))


# ---------------------------------------------------------------- operations


def _check_index(f: HPoly, var: int):
    if not 0 <= var < f.n:
        raise IndexError(f"variable index {var} out of range for n={f.n}")


def diff(f: HPoly, var: int, conjugated: bool = False) -> HPoly:
    """Partial derivative in z_{var+1} (or zb_{var+1} when ``conjugated``)."""
    _check_index(f, var)
    out = {}
    slot = 1 if conjugated else 0
    for key, c in f._terms.items():
        e = key[slot]
        p = e[var]
        if p == 0:
            continue
        ne = e[:var] + (p - 1,) + e[var + 1:]
        nk = (key[0], ne) if conjugated else (ne, key[1])
        out[nk] = c * p
    return HPoly._raw(f.n, out)


def conj(f: HPoly) -> HPoly:
    return HPoly._raw(f.n, {(b, a): c.conjugate() for (a, b), c in f._terms.items()})


def real_part(f: HPoly) -> HPoly:
    return (f + conj(f)) * Fraction(1, 2)


def imag_part(f: HPoly) -> HPoly:
    return (f - conj(f)) * GaussianRational(0, Fraction(-1, 2))


class CPoint(tuple):
    """Point of C^n with Gaussian-rational coordinates."""

    __slots__ = ()

    def __new__(cls, coords):
        if isinstance(coords, str):
            coords = [s for s in coords.split(",")]
        return tuple.__new__(cls, tuple(GaussianRational.coerce(c) for c in coords))

    @property
    def n(self) -> int:
        return len(self)

    @classmethod
    def origin(cls, n: int) -> "CPoint":
        return cls([0] * n)

    def __str__(self):
        return "(" + ", ".join(format_number(c) for c in self) + ")"

    def to_json(self) -> list[str]:
        return [format_number(c) for c in self]


def as_point(x, n: int | None = None) -> CPoint:
    p = x if isinstance(x, CPoint) else CPoint(x)
    if n is not None and p.n != n:
        raise ValueError(f"point has {p.n} coordinates, expected {n}")
    return p


def _powers(base: GaussianRational, top: int) -> list:
    out = [ONE]
    for _ in range(top):
        out.append(out[-1] * base)
    return out


def evaluate(f: HPoly, x) -> GaussianRational:
    """Exact value of ``f`` at ``x`` with zb_j <- conj(x_j)."""
    x = as_point(x, f.n)
    if not f._terms:
        return ZERO
    top = max(max(max(a), max(b)) for a, b in f._terms)
    zp = [_powers(c, top) for c in x]
    zbp = [_powers(c.conjugate(), top) for c in x]
    total = ZERO
    for (a, b), c in f._terms.items():
        v = c
        for j in range(f.n):
            if a[j]:
                v = v * zp[j][a[j]]
            if b[j]:
                v = v * zbp[j][b[j]]
        total = total + v
    return total


def recenter(f: HPoly, x) -> HPoly:
    """The polynomial h -> f(x + h), expanded in h and hb."""
    x = as_point(x, f.n)
    if all(not c for c in x):
        return f
    n = f.n
    cache: dict = {}

    def shifted_power(j: int, conjugated: bool, k: int) -> HPoly:
        key = (j, conjugated, k)
        if key not in cache:
            base = HPoly.var(n, j, conjugated) + (x[j].conjugate() if conjugated else x[j])
            cache[key] = base ** k
        return cache[key]

    out = HPoly.zero(n)
    for (a, b), c in f._terms.items():
        term = HPoly.const(n, c)
        for j in range(n):
            if a[j]:
                term = term * shifted_power(j, False, a[j])
            if b[j]:
                term = term * shifted_power(j, True, b[j])
        out = out + term
    return out


def vanishing_order(f: HPoly, x=None) -> float:
    """Least total order of a nonzero derivative of ``f`` at ``x``; inf for f = 0."""
    if x is not None:
        f = recenter(f, x)
    return f.min_degree()


def truncate(f: HPoly, d: int) -> HPoly:
    """Drop monomials of total degree above ``d``."""
    return HPoly._raw(f.n, {k: c for k, c in f._terms.items() if sum(k[0]) + sum(k[1]) <= d})


def weighted_membership(f: HPoly, t, lam: Sequence) -> bool:
    """True iff every monomial has weighted degree sum (alpha_i+beta_i)/lam_i >= t."""
    lam = [Fraction(v) if not isinstance(v, float) else v for v in lam]
    if len(lam) != f.n:
        raise ValueError("weight length must equal the dimension")
    for v in lam:
        if isinstance(v, float) or v < 1:
            raise ValueError("weight entries must be finite rationals >= 1")
    t = Fraction(t)
    for a, b in f._terms:
        w = sum(Fraction(a[i] + b[i]) / lam[i] for i in range(f.n))
        if w < t:
            return False
    return True


# ---------------------------------------------------------------- text syntax


_TOKEN = _re.compile(r"\s*(?:(\d+)|(zb|z)(\d+)|(Re|Im|conj)\b|(i)\b|([-+*/^()]))")


class PolySyntaxError(ValueError):
    def __init__(self, message: str, text: str, pos: int):
        super().__init__(f"{message} at column {pos + 1} in {text!r}")
        self.column = pos + 1


def _tokenize(text: str):
    pos = 0
    toks = []
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise PolySyntaxError("unexpected character", text, pos)
        start = m.start() + (len(m.group(0)) - len(m.group(0).lstrip()))
        if m.group(1):
            toks.append(("num", int(m.group(1)), start))
        elif m.group(2):
            idx = int(m.group(3))
            if idx < 1:
                raise PolySyntaxError("variables are numbered from 1", text, start)
            toks.append(("var", (m.group(2) == "zb", idx - 1), start))
        elif m.group(4):
            toks.append(("fn", m.group(4), start))
        elif m.group(5):
            toks.append(("i", None, start))
        else:
            toks.append(("op", m.group(6), start))
        pos = m.end()
    toks.append(("end", None, len(text)))
    return toks


class _Parser:
    # expr := term (('+'|'-') term)* ; term := unary (('*'|'/') unary)*
    # unary := ('-'|'+') unary | power ; power := atom ('^' int)?
    def __init__(self, text: str, n: int):
        self.text = text
        self.n = n
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, op):
        t = self.take()
        if t[0] != "op" or t[1] != op:
            raise PolySyntaxError(f"expected {op!r}", self.text, t[2])

    def parse(self) -> HPoly:
        if self.peek()[0] == "end":
            raise PolySyntaxError("empty expression", self.text, 0)
        v = self.expr()
        t = self.peek()
        if t[0] != "end":
            raise PolySyntaxError("unexpected token", self.text, t[2])
        return v

    def expr(self):
        v = self.term()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.take()[1]
            w = self.term()
            v = v + w if op == "+" else v - w
        return v

    def term(self):
        v = self.unary()
        while self.peek()[0] == "op" and self.peek()[1] in "*/":
            tok = self.take()
            w = self.unary()
            if tok[1] == "*":
                v = v * w
            else:
                if not w.is_constant() or not w:
                    raise PolySyntaxError("division only by nonzero constants", self.text, tok[2])
                v = v / w.constant_term()
        return v

    def unary(self):
        t = self.peek()
        if t[0] == "op" and t[1] in "+-":
            self.take()
            v = self.unary()
            return -v if t[1] == "-" else v
        return self.power()

    def power(self):
        v = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            t = self.take()
            if t[0] != "num":
                raise PolySyntaxError("exponent must be a nonnegative integer", self.text, t[2])
            v = v ** t[1]
        return v

    def atom(self):
        t = self.take()
        kind, val, pos = t
        if kind == "num":
            return HPoly.const(self.n, val)
        if kind == "i":
            return HPoly.const(self.n, I_UNIT)
        if kind == "var":
            conjugated, j = val
            if j >= self.n:
                raise PolySyntaxError(f"variable index exceeds n={self.n}", self.text, pos)
            return HPoly.var(self.n, j, conjugated)
        if kind == "fn":
            self.expect("(")
            v = self.expr()
            self.expect(")")
            if val == "Re":
                return real_part(v)
            if val == "Im":
                return imag_part(v)
            return conj(v)
        if kind == "op" and val == "(":
            v = self.expr()
            self.expect(")")
            return v
        raise PolySyntaxError("unexpected token", self.text, pos)


def infer_dimension(text: str) -> int:
    idx = [int(m) for m in _re.findall(r"zb?(\d+)", text)]
    return max(idx) if idx else 1


def parse_poly(text: str, n: int | None = None) -> HPoly:
    """Parse ``3/2*z1^2*zb1^2 + Re(z2)``-style text into an :class:`HPoly`."""
    if n is None:
        n = infer_dimension(text)
    return _Parser(text, n).parse()


def parse_number(text: str) -> GaussianRational:
    p = parse_poly(text, 1)
    if not p.is_constant():
        raise ValueError(f"{text!r} is not a constant")
    return p.constant_term()


def _format_monomial(alpha, beta) -> str:
    parts = []
    for j, a in enumerate(alpha):
        if a:
            parts.append(f"z{j + 1}" if a == 1 else f"z{j + 1}^{a}")
    for j, b in enumerate(beta):
        if b:
            parts.append(f"zb{j + 1}" if b == 1 else f"zb{j + 1}^{b}")
    return "*".join(parts)


def format_poly(f: HPoly) -> str:
    """Deterministic text form; ``parse_poly(format_poly(f), f.n) == f``."""
    if not f._terms:
        return "0"
    out = []
    for (a, b), c in f.sorted_items():
        mono = _format_monomial(a, b)
        neg = False
        if c.im == 0 and c.re < 0:
            neg, c = True, -c
        elif c.re == 0 and c.im < 0:
            neg, c = True, -c
        if mono:
            if c == ONE:
                body = mono
            else:
                body = f"{format_number(c)}*{mono}"
        else:
            body = format_number(c)
        if not out:
            out.append(("-" if neg else "") + body)
        else:
            out.append((" - " if neg else " + ") + body)
    return "".join(out)


# ---------------------------------------------------------------- real coordinates


@lru_cache(maxsize=None)
def _binomial_row(k: int) -> tuple[int, ...]:
    return tuple(math.comb(k, i) for i in range(k + 1))


def to_real(f: HPoly) -> dict:
    """Expand in real coordinates z_j = x_j + i y_j.

    Keys are exponent tuples (x_1, y_1, ..., x_n, y_n); values are Gaussian
    rationals (real when ``f`` is real-valued).
    """
    n = f.n
    out: dict = {}
    ipow = [ONE, I_UNIT, -ONE, -I_UNIT]
    for (a, b), c in f._terms.items():
        partial = {(): c}
        for j in range(n):
            # (x + i y)^a (x - i y)^b expanded in x^p y^q
            local: dict = {}
            for s, cs in enumerate(_binomial_row(a[j])):
                for u, cu in enumerate(_binomial_row(b[j])):
                    ydeg = s + u
                    coef = ipow[s % 4] * ipow[(3 * u) % 4] * (cs * cu)
                    key = (a[j] + b[j] - ydeg, ydeg)
                    local[key] = local.get(key, ZERO) + coef
            nxt: dict = {}
            for pk, pc in partial.items():
                for lk, lc in local.items():
                    if not lc:
                        continue
                    k = pk + lk
                    nxt[k] = nxt.get(k, ZERO) + pc * lc
            partial = nxt
        for k, v in partial.items():
            out[k] = out.get(k, ZERO) + v
    return {k: v for k, v in out.items() if v}


def real_monomial(n: int, exps: Sequence[int]) -> HPoly:
    """prod x_j^{exps[2j]} y_j^{exps[2j+1]} as an HPoly."""
    out = HPoly.const(n, 1)
    for j in range(n):
        if exps[2 * j]:
            out = out * HPoly.re_var(n, j) ** exps[2 * j]
        if exps[2 * j + 1]:
            out = out * HPoly.im_var(n, j) ** exps[2 * j + 1]
    return out
