"""Order of contact of holomorphic curves with a real hypersurface."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product
from typing import Sequence

from .forms import default_pivot, levi_minors, levi_signature_definite
from .multitype import INF, Unbounded, entry_json, vanishing_order_bound
from .poly import (
    ONE,
    ZERO,
    GaussianRational,
    HPoly,
    as_point,
    evaluate,
    format_number,
    recenter,
)

DEFAULT_POOL = (ONE, -ONE, GaussianRational(0, 1), GaussianRational(0, -1))


@dataclass(frozen=True)
class HoloCurve:
    """tau -> x0 + phi(tau); each component is a tuple of (exponent, coefficient)."""

    components: tuple

    def __post_init__(self):
        comps = []
        for comp in self.components:
            terms = {}
            for k, c in comp:
                if k < 1:
                    raise ValueError("curve components must vanish at tau = 0")
                c = GaussianRational.coerce(c)
                terms[k] = terms.get(k, ZERO) + c
            comps.append(tuple(sorted((k, c) for k, c in terms.items() if c)))
        if all(not c for c in comps):
            raise ValueError("the constant curve is not allowed")
        object.__setattr__(self, "components", tuple(comps))

    @classmethod
    def monomial(cls, exps: Sequence[int], coeffs: Sequence) -> "HoloCurve":
        return cls(tuple(((k, c),) if c else () for k, c in zip(exps, coeffs)))

    @classmethod
    def line(cls, direction: Sequence) -> "HoloCurve":
        return cls(tuple(((1, c),) if GaussianRational.coerce(c) else () for c in direction))

    @property
    def n(self) -> int:
        return len(self.components)

    @property
    def order(self) -> int:
        return min(comp[0][0] for comp in self.components if comp)

    def reparametrized(self, s: int) -> "HoloCurve":
        return HoloCurve(tuple(tuple((k * s, c) for k, c in comp) for comp in self.components))

    def encoding(self) -> tuple:
        return tuple(tuple((k, c.re, c.im) for k, c in comp) for comp in self.components)

    def __str__(self):
        parts = []
        for comp in self.components:
            if not comp:
                parts.append("0")
                continue
            terms = []
            for k, c in comp:
                mono = "tau" if k == 1 else f"tau^{k}"
                terms.append(mono if c == ONE else f"{format_number(c)}*{mono}")
            parts.append(" + ".join(terms))
        return "(" + ", ".join(parts) + ")"


def _component_powers(comp, top: int, conjugated: bool) -> list[dict]:
    """Powers 0..top of a univariate polynomial as {exponent: coeff}."""
    base = {k: (c.conjugate() if conjugated else c) for k, c in comp}
    out = [{0: ONE}]
    for _ in range(top):
        prev, nxt = out[-1], {}
        for a, ca in prev.items():
            for b, cb in base.items():
                nxt[a + b] = nxt.get(a + b, ZERO) + ca * cb
        out.append({k: v for k, v in nxt.items() if v})
    return out


def pullback(r: HPoly, phi: HoloCurve, x=None, recentered: bool = False) -> dict:
    """r(x0 + phi(tau)) as {(a, b): coeff} in tau and taubar."""
    if phi.n != r.n:
        raise ValueError(f"dimension mismatch: curve n={phi.n}, polynomial n={r.n}")
    f = r if recentered or x is None else recenter(r, as_point(x, r.n))
    n = r.n
    top_a = [max((a[j] for (a, _) in f.terms), default=0) for j in range(n)]
    top_b = [max((b[j] for (_, b) in f.terms), default=0) for j in range(n)]
    pa = [_component_powers(phi.components[j], top_a[j], False) for j in range(n)]
    pb = [_component_powers(phi.components[j], top_b[j], True) for j in range(n)]
    out: dict = {}
    for (alpha, beta), c in f.terms.items():
        holo = {0: c}
        for j in range(n):
            if alpha[j]:
                holo = _mul_uni(holo, pa[j][alpha[j]])
                if not holo:
                    break
        if not holo:
            continue
        anti = {0: ONE}
        for j in range(n):
            if beta[j]:
                anti = _mul_uni(anti, pb[j][beta[j]])
                if not anti:
                    break
        for a, ca in holo.items():
            for b, cb in anti.items():
                out[(a, b)] = out.get((a, b), ZERO) + ca * cb
    return {k: v for k, v in out.items() if v}


def _mul_uni(p: dict, q: dict) -> dict:
    out: dict = {}
    for a, ca in p.items():
        for b, cb in q.items():
            out[a + b] = out.get(a + b, ZERO) + ca * cb
    return {k: v for k, v in out.items() if v}


def pullback_order(r: HPoly, phi: HoloCurve, x=None, recentered: bool = False):
    """ord_0 of r composed with the curve, or INF when it vanishes identically."""
    pb = pullback(r, phi, x, recentered)
    if not pb:
        return INF
    return min(a + b for a, b in pb)


def _monomial_order(f: HPoly, exps, coeffs) -> float:
    """Fast pullback order for a one-term-per-component curve."""
    acc: dict = {}
    for (alpha, beta), c in f.terms.items():
        a = b = 0
        v = c
        for j in range(f.n):
            if alpha[j] or beta[j]:
                cj = coeffs[j]
                if not cj:
                    break
                a += exps[j] * alpha[j]
                b += exps[j] * beta[j]
                if alpha[j]:
                    v = v * cj ** alpha[j]
                if beta[j]:
                    v = v * cj.conjugate() ** beta[j]
        else:
            acc[(a, b)] = acc.get((a, b), ZERO) + v
    orders = [a + b for (a, b), v in acc.items() if v]
    return min(orders) if orders else math.inf


@dataclass(frozen=True)
class TypeEstimate:
    lower: object
    upper: object  # None when unknown
    exact: bool
    witness: HoloCurve | None = None
    embedding: tuple | None = None
    method: str = "search"

    def __post_init__(self):
        if self.upper is not None and self.lower > self.upper:
            raise ValueError("lower bound exceeds upper bound")

    @property
    def value(self):
        return self.lower if self.exact else None

    def to_json(self) -> dict:
        return {
            "lower": entry_json(self.lower),
            "upper": None if self.upper is None else entry_json(self.upper),
            "exact": self.exact,
            "witness": None if self.witness is None else str(self.witness),
            "embedding": None if self.embedding is None else [j + 1 for j in self.embedding],
            "method": self.method,
        }


def decoupled_profile(r: HPoly, x=None):
    """Exponents for r(x + h) = Re(a h_k) + sum_j c_j |h_j|^(2 m_j), else None.

    Returns (k, {j: 2 m_j}) with 0-based indices; absent directions are
    omitted (infinite order along them).
    """
    f = recenter(r, x) if x is not None else r
    n = f.n
    linear = {}
    powers: dict = {}
    for (alpha, beta), c in f.terms.items():
        deg = sum(alpha) + sum(beta)
        if deg == 0:
            return None
        if deg == 1:
            j = next(i for i in range(n) if alpha[i] or beta[i])
            linear.setdefault(j, []).append(((alpha, beta), c))
            continue
        support = [i for i in range(n) if alpha[i] or beta[i]]
        if len(support) != 1:
            return None
        j = support[0]
        if alpha[j] != beta[j] or not c.is_real() or c.re <= 0 or j in powers:
            return None
        powers[j] = 2 * alpha[j]
    if len(linear) != 1:
        return None
    (k,) = linear
    if k in powers:
        return None
    return k, powers


def _search_curves(f: HPoly, degree_cap: int, pool: Sequence, target=None) -> tuple:
    """Best ratio over normalized monomial curves plus one-term perturbations.

    Degrees grow one at a time; the search stops early once ``target`` (a
    proven upper bound) is reached.
    """
    n = f.n
    ranked = []
    for d in range(1, degree_cap + 1):
        choices = [(0, ZERO)] + [(k, c) for k in range(1, d + 1) for c in pool]
        for combo in product(choices, repeat=n):
            exps = [k for k, _ in combo]
            if max(exps) != d:
                continue
            coeffs = [c for _, c in combo]
            nz = [j for j in range(n) if coeffs[j]]
            if coeffs[nz[0]] != ONE or math.gcd(*[exps[j] for j in nz]) != 1:
                continue
            po = _monomial_order(f, exps, coeffs)
            ratio = INF if po == math.inf else Fraction(po, min(exps[j] for j in nz))
            ranked.append((ratio, HoloCurve.monomial(exps, coeffs)))
        ranked.sort(key=lambda rc: (_neg_key(rc[0]), rc[1].encoding()))
        if isinstance(ranked[0][0], Unbounded) or (target is not None and ranked[0][0] == target):
            return ranked[0]
    best_ratio, best_curve = ranked[0]
    for ratio, curve in ranked[:8]:
        for j in range(n):
            for k in range(1, degree_cap + 1):
                if any(k == e for e, _ in curve.components[j]):
                    continue
                for c in pool:
                    comps = list(curve.components)
                    comps[j] = comps[j] + ((k, c),)
                    cand = HoloCurve(tuple(comps))
                    po = pullback_order(f, cand, recentered=True)
                    rt = po if isinstance(po, Unbounded) else Fraction(po, cand.order)
                    key = (_neg_key(rt), cand.encoding())
                    if key < (_neg_key(best_ratio), best_curve.encoding()):
                        best_ratio, best_curve = rt, cand
    return best_ratio, best_curve


def _neg_key(v):
    return (0, 0) if isinstance(v, Unbounded) else (1, -v)


def _restrict(f: HPoly, support: Sequence[int]) -> HPoly:
    """f restricted to the coordinate subspace spanned by ``support``."""
    keep = set(support)
    terms = {}
    for (alpha, beta), c in f.terms.items():
        if any((alpha[j] or beta[j]) for j in range(f.n) if j not in keep):
            continue
        a = tuple(alpha[j] for j in support)
        b = tuple(beta[j] for j in support)
        terms[(a, b)] = c
    return HPoly(len(support), terms)


def _embed_curve(curve: HoloCurve, support: Sequence[int], n: int) -> HoloCurve:
    comps = [()] * n
    for j, comp in zip(support, curve.components):
        comps[j] = comp
    return HoloCurve(tuple(comps))


def _profile_type(profile, n: int, q: int):
    k, powers = profile
    vals = sorted(Fraction(v) for v in powers.values()) + [INF] * (n - 1 - len(powers))
    return vals[n - q - 1], k, powers


def dangelo_type(r: HPoly, x, q: int = 1, degree_cap: int = 4, coeff_pool: Sequence = DEFAULT_POOL) -> TypeEstimate:
    """Bounds for the q-type at ``x`` from a finite curve and embedding search."""
    x = as_point(x, r.n)
    n = r.n
    if not 1 <= q < n:
        raise ValueError(f"q must satisfy 1 <= q < n (got q={q}, n={n})")
    v = evaluate(r, x)
    if v:
        raise ValueError(f"point {x} is off the surface: r = {v}")
    pool = tuple(GaussianRational.coerce(c) for c in coeff_pool)
    f = recenter(r, x)
    profile = decoupled_profile(f)
    definite = levi_signature_definite(r, x)
    if q == 1:
        upper, method = None, "search"
        if profile is not None:
            upper, _, _ = _profile_type(profile, n, 1)
            method = "decoupled normal form"
        elif definite:
            upper, method = Fraction(2), "definite Levi form"
        ratio, curve = _search_curves(f, degree_cap, pool, upper)
        if isinstance(ratio, Unbounded):
            return TypeEstimate(INF, INF, True, curve, None, "curve in surface")
        exact = upper is not None and ratio == upper
        if upper is not None and ratio > upper:
            raise AssertionError("curve search exceeded a proven upper bound")
        return TypeEstimate(ratio, upper, exact, curve, None, method)
    # q > 1: infimum over (n-q+1)-dimensional coordinate subspaces
    d = n - q + 1
    best = None
    for support in combinations(range(n), d):
        g = _restrict(f, support)
        if g.is_zero():
            sub_upper, curve = INF, HoloCurve.line([1] + [0] * (d - 1))
        else:
            prof = decoupled_profile(g)
            target = None if prof is None else _profile_type(prof, d, 1)[0]
            sub_ratio, curve = _search_curves(g, degree_cap, pool, target)
            if isinstance(sub_ratio, Unbounded):
                sub_upper = INF
            elif prof is not None:
                sub_upper = target
            else:
                continue
        if best is None or _type_lt(sub_upper, best[0]):
            best = (sub_upper, support, curve)
    if profile is not None:
        value, _, _ = _profile_type(profile, n, q)
        lower, method = value, "decoupled normal form"
    elif definite:
        lower, method = Fraction(2), "definite Levi form"
    else:
        lower, method = Fraction(2), "subspace search"
    if definite and profile is None:
        # every tangent line has contact exactly 2
        sup = next(s for s in combinations(range(n), d) if _restrict(f, s).terms)
        _, curve = _search_curves(_restrict(f, sup), 1, pool)
        return TypeEstimate(lower, lower, True, _embed_curve(curve, sup, n), sup, method)
    if best is None:
        return TypeEstimate(lower, None, False, None, None, method)
    upper, support, curve = best
    exact = upper == lower
    return TypeEstimate(lower, upper, exact, _embed_curve(curve, support, n), support, method)


def _type_lt(a, b) -> bool:
    if isinstance(a, Unbounded):
        return False
    if isinstance(b, Unbounded):
        return True
    return a < b


# ---------------------------------------------------------------- effective checks


class LeviBoundViolation(AssertionError):
    def __init__(self, report: "VanishingReport"):
        super().__init__(f"Levi minors vanish to order {report.min_order} > {report.bound}")
        self.report = report


@dataclass(frozen=True)
class VanishingReport:
    min_order: object
    bound: int
    orders: tuple

    @property
    def holds(self) -> bool:
        return not isinstance(self.min_order, Unbounded) and self.min_order <= self.bound

    @property
    def equality(self) -> bool:
        return self.holds and self.min_order == self.bound

    def to_json(self) -> dict:
        return {"min_order": entry_json(self.min_order), "bound": self.bound, "holds": self.holds,
                "equality": self.equality}


def levi_vanishing_bound_check(r: HPoly, x, q: int, t, strict: bool = True) -> VanishingReport:
    """Least vanishing order of the Levi minors at x against (ceil t - 2)^(n-q)."""
    x = as_point(x, r.n)
    minors = levi_minors(r, q, default_pivot(r, x))
    orders = []
    for m in minors:
        o = recenter(m, x).min_degree()
        orders.append(INF if o == math.inf else int(o))
    finite = [o for o in orders if not isinstance(o, Unbounded)]
    best = min(finite) if finite else INF
    report = VanishingReport(best, vanishing_order_bound(t, r.n, q), tuple(orders))
    if strict and not report.holds:
        raise LeviBoundViolation(report)
    return report


@dataclass(frozen=True)
class DerivativeWitness:
    alpha: tuple
    beta: tuple
    value: GaussianRational
    minor_index: int

    @property
    def order(self) -> int:
        return sum(self.alpha) + sum(self.beta)

    def to_json(self) -> dict:
        return {"alpha": list(self.alpha), "beta": list(self.beta), "value": format_number(self.value),
                "minor": self.minor_index, "order": self.order}


def derivative_witness(r: HPoly, x, q: int, k: int, order_cap: int) -> DerivativeWitness | None:
    """Lowest-order nonzero derivative D^alpha Dbar^beta of a Levi minor at x.

    ``k`` is 0-based; the multi-index must differentiate in z_k or zb_k, except
    that a minor already nonzero at x yields the zero multi-index.
    """
    x = as_point(x, r.n)
    if not 0 <= k < r.n:
        raise ValueError(f"direction index {k} out of range")
    minors = levi_minors(r, q, default_pivot(r, x))
    best = None
    for idx, m in enumerate(minors):
        f = recenter(m, x)
        for (alpha, beta), c in f.terms.items():
            deg = sum(alpha) + sum(beta)
            if deg > order_cap:
                continue
            if deg and not (alpha[k] or beta[k]):
                continue
            key = (deg, alpha, beta, idx)
            if best is None or key < best[0]:
                weight = 1
                for a in alpha + beta:
                    weight *= math.factorial(a)
                best = (key, DerivativeWitness(alpha, beta, c * weight, idx))
    return None if best is None else best[1]
