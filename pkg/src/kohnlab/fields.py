"""Polynomial vector fields acting on functions of z and zb."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .poly import HPoly, conj, diff


class SameTypeBracketError(ValueError):
    """Raised when a bracket of two fields of the same type is requested."""


@dataclass(frozen=True)
class VectorField10:
    """The (1,0) field sum_j coeffs[j] * d/dz_j.

    ``index`` records the position L_index in a boundary system, if any.
    """

    coeffs: tuple
    tag: str = "L"
    index: int | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(self.coeffs))
        if not self.coeffs:
            raise ValueError("a vector field needs at least one coefficient")
        n = self.coeffs[0].n
        if any(c.n != n for c in self.coeffs) or len(self.coeffs) != n:
            raise ValueError("coefficient dimensions do not match")
        if all(c.is_zero() for c in self.coeffs):
            raise ValueError("the zero field is not a valid frame field")

    @property
    def n(self) -> int:
        return len(self.coeffs)

    @classmethod
    def coordinate(cls, n: int, j: int, tag: str | None = None) -> "VectorField10":
        cs = [HPoly.const(n, 1 if k == j else 0) for k in range(n)]
        return cls(tuple(cs), tag or f"d{j + 1}")

    def as_mixed(self, conjugated: bool = False) -> "MixedField":
        n = self.n
        zero = tuple(HPoly.zero(n) for _ in range(n))
        if conjugated:
            return MixedField(zero, tuple(conj(c) for c in self.coeffs))
        return MixedField(self.coeffs, zero)

    def scaled(self, g: HPoly, tag: str | None = None) -> "VectorField10":
        return VectorField10(tuple(g * c for c in self.coeffs), tag or self.tag, self.index)

    def combine(self, a: HPoly, other: "VectorField10", b: HPoly, tag: str | None = None):
        """The field a*self + b*other."""
        cs = tuple(a * c + b * d for c, d in zip(self.coeffs, other.coeffs))
        return VectorField10(cs, tag or self.tag, self.index)

    def with_tag(self, tag: str, index: int | None = None) -> "VectorField10":
        return VectorField10(self.coeffs, tag, index)

    def at(self, x) -> tuple:
        from .poly import evaluate

        return tuple(evaluate(c, x) for c in self.coeffs)

    def to_json(self) -> dict:
        return {"tag": self.tag, "coeffs": [str(c) for c in self.coeffs]}


@dataclass(frozen=True)
class MixedField:
    """sum_j a_j d/dz_j + sum_j b_j d/dzb_j with polynomial coefficients."""

    zpart: tuple
    zbpart: tuple

    @property
    def n(self) -> int:
        return len(self.zpart)

    def kind(self) -> str:
        hz = any(not c.is_zero() for c in self.zpart)
        hzb = any(not c.is_zero() for c in self.zbpart)
        if hz and hzb:
            return "mixed"
        if hz:
            return "10"
        if hzb:
            return "01"
        return "zero"

    def __call__(self, f: HPoly) -> HPoly:
        out = HPoly.zero(f.n)
        for j, c in enumerate(self.zpart):
            if c:
                out = out + c * diff(f, j)
        for j, c in enumerate(self.zbpart):
            if c:
                out = out + c * diff(f, j, True)
        return out

    def __neg__(self):
        return MixedField(tuple(-c for c in self.zpart), tuple(-c for c in self.zbpart))

    def is_zero(self) -> bool:
        return self.kind() == "zero"


def apply(X: VectorField10, f: HPoly, conjugated: bool = False) -> HPoly:
    """X f, or conj(X) f when ``conjugated``."""
    if X.n != f.n:
        raise ValueError(f"dimension mismatch: field n={X.n}, polynomial n={f.n}")
    out = HPoly.zero(f.n)
    for j, c in enumerate(X.coeffs):
        if c:
            if conjugated:
                out = out + conj(c) * diff(f, j, True)
            else:
                out = out + c * diff(f, j)
    return out


def _to_mixed(X) -> MixedField:
    if isinstance(X, MixedField):
        return X
    if isinstance(X, VectorField10):
        return X.as_mixed(False)
    if isinstance(X, tuple) and len(X) == 2 and isinstance(X[0], VectorField10):
        return X[0].as_mixed(bool(X[1]))
    raise TypeError(f"not a vector field: {X!r}")


def bracket(X, Y) -> MixedField:
    """Commutator XY - YX for arbitrary mixed fields."""
    X, Y = _to_mixed(X), _to_mixed(Y)
    zp = tuple(X(b) - Y(a) for a, b in zip(X.zpart, Y.zpart))
    zbp = tuple(X(b) - Y(a) for a, b in zip(X.zbpart, Y.zbpart))
    return MixedField(zp, zbp)


def lie_bracket(X, Y) -> MixedField:
    """Bracket of one (1,0) and one (0,1) field.

    Fields are a :class:`VectorField10`, a pair ``(field, conjugated)`` or a
    :class:`MixedField` of pure type.
    """
    mx, my = _to_mixed(X), _to_mixed(Y)
    kx, ky = mx.kind(), my.kind()
    if kx == ky and kx in ("10", "01"):
        raise SameTypeBracketError(f"both fields have type ({kx[0]},{kx[1]})")
    return bracket(mx, my)


def pair_del(r: HPoly, V: MixedField) -> HPoly:
    """The pairing of the (1,0)-form dr-part with V: sum_j r_{z_j} V^j."""
    out = HPoly.zero(r.n)
    for j, c in enumerate(V.zpart):
        if c:
            out = out + diff(r, j) * c
    return out


def tangential_frame(r: HPoly, pivot: int) -> list[VectorField10]:
    """Unnormalized frame r_{z_pivot} d_j - r_{z_j} d_pivot for j != pivot."""
    n = r.n
    rp = diff(r, pivot)
    frame = []
    for j in range(n):
        if j == pivot:
            continue
        cs = [HPoly.zero(n) for _ in range(n)]
        cs[j] = rp
        cs[pivot] = -diff(r, j)
        frame.append(VectorField10(tuple(cs), f"F{j + 1}"))
    return frame


def is_tangential(X: VectorField10, r: HPoly) -> bool:
    return apply(X, r).is_zero()


def evaluate_components(X: VectorField10, x) -> tuple:
    return X.at(x)


def fields_independent_at(fields: Sequence[VectorField10], x) -> bool:
    from ._linalg import rank

    rows = [list(f.at(x)) for f in fields]
    return rank(rows) == len(rows)
