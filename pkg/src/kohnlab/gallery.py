"""Named model domains with exact surface-point samplers."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .multitype import Weight, is_weight
from .poly import CPoint, GaussianRational, HPoly, evaluate, parse_poly


@dataclass(frozen=True)
class Model:
    name: str
    text: str
    n: int
    base_point: tuple
    types: dict  # q -> D'Angelo q-type at the base point
    multitype: tuple  # commutator multitype at the base point, nu = n
    pseudoconvex: bool = True
    pure: bool = False
    strata: tuple = ()  # multitypes expected on a neighbourhood (nu = n)
    sampler: Callable | None = field(default=None, compare=False)

    @property
    def r(self) -> HPoly:
        return parse_poly(self.text, self.n)

    @property
    def x0(self) -> CPoint:
        return CPoint(tuple(GaussianRational.coerce(c) for c in self.base_point))

    def t(self, q: int = 1) -> Fraction:
        return Fraction(self.types[q])

    def samples(self, count: int, seed: int = 0) -> list[CPoint]:
        if self.sampler is None:
            raise ValueError(f"model {self.name} has no surface sampler")
        return self.sampler(count, seed)

    def expected_strata(self) -> list[Weight]:
        return [is_weight(s) for s in self.strata]


def _rand_gr(rng: random.Random, den: int = 8, span: int = 6) -> GaussianRational:
    return GaussianRational(Fraction(rng.randint(-span, span), den), Fraction(rng.randint(-span, span), den))


def graph_sampler(text: str, n: int, axis_share: float = 0.25):
    """Points on 2 Re z_n + g(z') = 0: pick z', then z_n = -g(z')/2 + i s.

    A share of points puts individual coordinates of z' to zero so that the
    degenerate strata are hit, and the first point is the origin.
    """
    r = parse_poly(text, n)
    g = r - parse_poly(f"2*Re(z{n})", n)

    def sample(count: int, seed: int = 0) -> list[CPoint]:
        rng = random.Random(seed)
        out = [CPoint((GaussianRational(0),) * n)]
        while len(out) < count:
            zs = [_rand_gr(rng) for _ in range(n - 1)]
            for j in range(n - 1):
                if rng.random() < axis_share:
                    zs[j] = GaussianRational(0)
            v = evaluate(g, zs + [GaussianRational(0)])
            zn = GaussianRational(-v.re / 2, Fraction(rng.randint(-6, 6), 8))
            p = CPoint(tuple(zs + [zn]))
            assert not evaluate(r, p)
            out.append(p)
        return out

    return sample


def sphere_sampler(n: int):
    """Rational points of the unit sphere by inverse stereographic projection."""

    def sample(count: int, seed: int = 0) -> list[CPoint]:
        rng = random.Random(seed)
        out = [CPoint((GaussianRational(1),) + (GaussianRational(0),) * (n - 1))]
        while len(out) < count:
            u = [Fraction(rng.randint(-9, 9), rng.randint(1, 6)) for _ in range(2 * n - 1)]
            s = sum(c * c for c in u)
            coords = [2 * c / (s + 1) for c in u] + [(s - 1) / (s + 1)]
            p = CPoint(tuple(GaussianRational(coords[2 * j], coords[2 * j + 1]) for j in range(n)))
            out.append(p)
        return out

    return sample


def _pure(m: int) -> Model:
    text = f"2*Re(z2) + z1^{m}*zb1^{m}"
    return Model(f"pure{m}", text, 2, (0, 0), {1: 2 * m}, (1, 2 * m), pure=True,
                 strata=((1, 2), (1, 2 * m)), sampler=graph_sampler(text, 2))


_DEC3 = "2*Re(z3) + z1^2*zb1^2 + z2^3*zb2^3"

GALLERY: dict[str, Model] = {
    "sphere2": Model("sphere2", "z1*zb1 + z2*zb2 - 1", 2, (1, 0), {1: 2}, (1, 2),
                     strata=((1, 2),), sampler=sphere_sampler(2)),
    "sphere3": Model("sphere3", "z1*zb1 + z2*zb2 + z3*zb3 - 1", 3, (1, 0, 0), {1: 2, 2: 2}, (1, 2, 2),
                     strata=((1, 2, 2),), sampler=sphere_sampler(3)),
    "pure2": _pure(2),
    "pure3": _pure(3),
    "pure4": _pure(4),
    "decoupled3": Model("decoupled3", _DEC3, 3, (0, 0, 0), {1: 6, 2: 4}, (1, 4, 6),
                        strata=((1, 2, 2), (1, 2, 4), (1, 2, 6), (1, 4, 6)),
                        sampler=graph_sampler(_DEC3, 3)),
    "mixed3": Model("mixed3", "2*Re(z3) + z1*zb1 + z2^2*zb2^2", 3, (0, 0, 0), {1: 4, 2: 2}, (1, 2, 4),
                    strata=((1, 2, 2), (1, 2, 4)),
                    sampler=graph_sampler("2*Re(z3) + z1*zb1 + z2^2*zb2^2", 3)),
}


def get_model(name: str) -> Model:
    try:
        return GALLERY[name]
    except KeyError:
        raise KeyError(f"unknown gallery model {name!r}; known: {', '.join(sorted(GALLERY))}") from None


def two_dim_models() -> list[Model]:
    return [m for m in GALLERY.values() if m.n == 2]
