"""Weights, effective bounds, commutator multitype and sampled stratification."""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import total_ordering
from typing import Iterable, Sequence

from .poly import CPoint, HPoly, as_point, evaluate

# ---------------------------------------------------------------- entries


@total_ordering
class Unbounded:
    """An entry above every rational: infinity, or "beyond the search cap"."""

    __slots__ = ("cap",)

    def __init__(self, cap: int | None = None):
        self.cap = cap

    def __eq__(self, other):
        return isinstance(other, Unbounded)

    def __lt__(self, other):
        return False

    def __gt__(self, other):
        return not isinstance(other, Unbounded)

    def __hash__(self):
        return hash("unbounded")

    def __str__(self):
        return "inf" if self.cap is None else f">{self.cap}"

    __repr__ = __str__


INF = Unbounded()


def entry_lt(a, b) -> bool:
    if isinstance(a, Unbounded):
        return False
    if isinstance(b, Unbounded):
        return True
    return a < b


def parse_entry(v):
    if isinstance(v, Unbounded):
        return v
    if isinstance(v, float):
        if math.isinf(v):
            return INF
        raise TypeError("floating point weight entries are not exact")
    if isinstance(v, str):
        s = v.strip()
        if s in ("inf", "oo", "∞"):
            return INF
        if s.startswith(">"):
            return Unbounded(int(s[1:]))
        return Fraction(s)
    return Fraction(v)


def format_entry(v) -> str:
    return str(v)


def entry_json(v):
    if isinstance(v, Unbounded):
        return str(v)
    if v.denominator == 1:
        return v.numerator
    return str(v)


# ---------------------------------------------------------------- weights


class WeightRejected(ValueError):
    def __init__(self, index: int, reason: str):
        super().__init__(f"not a weight: entry {index} {reason}")
        self.index = index


@dataclass(frozen=True)
class Weight:
    """A tuple in the weight lattice with one certificate per finite entry.

    ``certificates[k]`` is the coefficient vector (a_1..a_{k+1}) with
    sum a_j / lambda_j = 1, or None for an unbounded entry.
    """

    entries: tuple
    certificates: tuple = field(compare=False)

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, k):
        return self.entries[k]

    def __str__(self):
        return "[" + ", ".join(format_entry(v) for v in self.entries) + "]"

    def to_json(self) -> list:
        return [entry_json(v) for v in self.entries]

    def is_finite(self) -> bool:
        return not any(isinstance(v, Unbounded) for v in self.entries)

    def verify(self) -> bool:
        for lam_k, cert in zip(range(len(self.entries)), self.certificates):
            if cert is None:
                if not isinstance(self.entries[lam_k], Unbounded):
                    return False
                continue
            if cert[-1] <= 0 or any(a < 0 for a in cert):
                return False
            if sum(Fraction(a) / self.entries[j] for j, a in enumerate(cert)) != 1:
                return False
        return True


def _certificate(prefix: Sequence[Fraction], lam: Fraction):
    """Lex-least (a_1..a_{k-1}) with a_k = lam (1 - s) a positive integer."""
    k = len(prefix)

    def dfs(j, s, acc):
        if j == k:
            ak = lam * (1 - s)
            if ak > 0 and ak.denominator == 1:
                return acc + [int(ak)]
            return None
        top = math.floor(prefix[j] * (1 - s)) if not isinstance(prefix[j], Unbounded) else 0
        for a in range(0, top + 1):
            s2 = s + (Fraction(a) / prefix[j] if a else 0)
            if s2 >= 1:
                break
            got = dfs(j + 1, s2, acc + [a])
            if got is not None:
                return got
        return None

    return dfs(0, Fraction(0), [])


def is_weight(entries: Iterable) -> Weight:
    """Validate a weight and return it with certificates; raise WeightRejected."""
    vals = [parse_entry(v) for v in entries]
    if not vals:
        raise WeightRejected(1, "empty tuple")
    certs = []
    for k, lam in enumerate(vals):
        if not isinstance(lam, Unbounded) and lam < 1:
            raise WeightRejected(k + 1, "is below 1")
        if k and entry_lt(lam, vals[k - 1]):
            raise WeightRejected(k + 1, "breaks weak monotonicity")
        if isinstance(lam, Unbounded):
            certs.append(None)
            continue
        cert = _certificate(vals[:k], lam)
        if cert is None:
            raise WeightRejected(k + 1, "admits no integer certificate")
        certs.append(tuple(cert))
    return Weight(tuple(vals), tuple(certs))


def try_weight(entries) -> Weight | None:
    try:
        return is_weight(entries)
    except WeightRejected:
        return None


def lex_compare(w1, w2) -> str:
    """'<', '=' or '>' in the lexicographic order (unbounded entries on top)."""
    a = w1.entries if isinstance(w1, Weight) else tuple(parse_entry(v) for v in w1)
    b = w2.entries if isinstance(w2, Weight) else tuple(parse_entry(v) for v in w2)
    if len(a) != len(b):
        raise ValueError(f"length mismatch: {len(a)} vs {len(b)}")
    for x, y in zip(a, b):
        if entry_lt(x, y):
            return "<"
        if entry_lt(y, x):
            return ">"
    return "="


def lex_key(w):
    return tuple((1, 0) if isinstance(v, Unbounded) else (0, v) for v in w.entries)


def _reachable_sums(prefix: Sequence[Fraction]) -> set[Fraction]:
    sums = {Fraction(0)}
    for lam in prefix:
        nxt = set()
        for s in sums:
            a = 0
            while True:
                s2 = s + Fraction(a) / lam
                if s2 >= 1:
                    break
                nxt.add(s2)
                a += 1
        sums = nxt
    return sums


def enumerate_weights(nu: int, bound, min_second: Fraction | int = 1) -> list[Weight]:
    """All weights of length ``nu`` with lambda_1 = 1 and entries <= bound.

    ``min_second`` restricts lambda_2 from below (2 gives the tuples that can
    occur as multitypes past the first entry).
    """
    bound = Fraction(bound)
    if bound < 1:
        raise ValueError("bound must be at least 1")
    if nu < 1:
        return []
    out: list[tuple] = []

    def extend(prefix):
        if len(prefix) == nu:
            out.append(tuple(prefix))
            return
        lo = prefix[-1]
        if len(prefix) == 1:
            lo = max(lo, Fraction(min_second))
        cands = set()
        for s in _reachable_sums(prefix):
            gap = 1 - s
            a = 1
            while True:
                lam = Fraction(a) / gap
                if lam > bound:
                    break
                if lam >= lo:
                    cands.add(lam)
                a += 1
        for lam in sorted(cands):
            extend(prefix + [lam])

    extend([Fraction(1)])
    return [is_weight(e) for e in sorted(out)]


def gamma_tail(prefix: Sequence, n: int) -> Weight:
    """Weight of length n whose entries from len(prefix) on repeat the last one."""
    vals = [parse_entry(v) for v in prefix]
    if not vals or len(vals) > n:
        raise ValueError("prefix must be nonempty and no longer than n")
    return is_weight(vals + [vals[-1]] * (n - len(vals)))


# ---------------------------------------------------------------- bounds


def _check_tnq(t, n, q):
    t = Fraction(t)
    if t < 1:
        raise ValueError("t must be at least 1")
    if not 1 <= q < n:
        raise ValueError("need 1 <= q < n")
    return t


def type_jump_bound(t, n: int, q: int) -> Fraction:
    """2 t^(n-q)."""
    t = _check_tnq(t, n, q)
    return 2 * t ** (n - q)


def n_bound(t, n: int, q: int) -> int:
    """(ceil(2t^(n-q)) - 1) * ceil(2t^(n-q))^((n-q)(n-q+1)/2 - 1)."""
    c = math.ceil(type_jump_bound(t, n, q))
    k = n - q
    return (c - 1) * c ** (k * (k + 1) // 2 - 1)


def vanishing_order_bound(t, n: int, q: int) -> int:
    """(ceil t - 2)^(n-q), the bound on the order of the Levi minors."""
    t = _check_tnq(t, n, q)
    return (math.ceil(t) - 2) ** (n - q)


def counting_bound(bound, nu: int) -> int:
    """Number of candidate equations for entries 2..nu when entries lie in [2, bound]."""
    if nu < 2:
        raise ValueError("counting bound needs nu >= 2")
    c = math.ceil(Fraction(bound))
    return (c - 1) * c ** (nu * (nu - 1) // 2 - 1)


@dataclass(frozen=True)
class Interval:
    lower: Fraction
    upper: Fraction
    lower_exact: bool = True
    upper_exact: bool = True

    def to_json(self):
        return {
            "lower": entry_json(self.lower),
            "upper": entry_json(self.upper),
            "lower_exact": self.lower_exact,
            "upper_exact": self.upper_exact,
        }


def _rational_root(v: Fraction, k: int):
    """(exact root or None, rational lower approximation) of v^(1/k)."""
    if k == 1:
        return v, v
    num = round(v.numerator ** (1 / k))
    den = round(v.denominator ** (1 / k))
    for a in (num - 1, num, num + 1):
        for b in (den - 1, den, den + 1):
            if a > 0 and b > 0 and Fraction(a, b) ** k == v:
                return Fraction(a, b), Fraction(a, b)
    lo, hi = Fraction(1), max(Fraction(1), v)
    for _ in range(60):
        mid = (lo + hi) / 2
        if mid ** k <= v:
            lo = mid
        else:
            hi = mid
    return None, lo.limit_denominator(10 ** 9) if lo.limit_denominator(10 ** 9) ** k <= v else lo


def catlin_dangelo_bounds(value, direction: str, n: int, q: int) -> Interval:
    """Interval implied by D_q <= Delta_q <= 2 (D_q / 2)^(n-q)."""
    v = Fraction(value)
    if v < 1:
        raise ValueError("type values are at least 1")
    k = n - q
    if k < 1:
        raise ValueError("need 1 <= q < n")
    if direction in ("from_Dq", "from_D"):
        return Interval(v, 2 * (v / 2) ** k)
    if direction in ("from_Δq", "from_Delta", "from_Deltaq"):
        exact, approx = _rational_root(v / 2, k)
        if exact is not None:
            return Interval(2 * exact, v)
        return Interval(2 * approx, v, lower_exact=False)
    raise ValueError(f"unknown direction {direction!r}")


# ---------------------------------------------------------------- multitype


def commutator_multitype(r: HPoly, x, nu: int, len_cap: int) -> Weight:
    """Commutator multitype entries c_1..c_nu at x from the list search.

    Entries not found within ``len_cap`` are reported as ``>len_cap``.
    """
    from .boundary import construct_system

    system = construct_system(r, x, nu, len_cap)
    return system.multitype


@dataclass(frozen=True)
class StratumSample:
    point: CPoint
    multitype: Weight
    levi_rank: int

    def to_json(self) -> dict:
        return {"point": self.point.to_json(), "multitype": self.multitype.to_json(), "levi_rank": self.levi_rank}


@dataclass(frozen=True)
class StratificationReport:
    samples: tuple
    strata: tuple
    n_observed: int
    violations: tuple  # indices of samples whose multitype exceeds the base multitype
    base_multitype: Weight

    def to_json(self) -> dict:
        return {
            "samples": [s.to_json() for s in self.samples],
            "strata": [w.to_json() for w in self.strata],
            "n_observed": self.n_observed,
            "semicontinuity_violations": [self.samples[i].point.to_json() for i in self.violations],
            "base_multitype": self.base_multitype.to_json(),
        }


class OffSurfaceError(ValueError):
    pass


def _threads(n_jobs: int | None) -> int:
    if n_jobs is not None:
        return max(1, n_jobs)
    try:
        return max(1, int(os.environ.get("KOHNLAB_THREADS", "1")))
    except ValueError:
        return 1


def _sample(r: HPoly, p: CPoint, nu: int, cap: int) -> StratumSample:
    from .forms import levi_rank_at

    v = evaluate(r, p)
    if v:
        raise OffSurfaceError(f"point {p} is off the surface: r = {v}")
    rank = levi_rank_at(r, p)
    return StratumSample(p, commutator_multitype(r, p, nu, cap), rank)


def stratify_samples(r: HPoly, points: Sequence, q: int, cap: int, base_point=None,
                     n_jobs: int | None = None) -> StratificationReport:
    """Multitype at each sample, distinct strata and semicontinuity flags.

    The base point defaults to the first sample.
    """
    pts = [as_point(p, r.n) for p in points]
    if not pts:
        raise ValueError("no sample points")
    nu = r.n + 1 - q
    workers = _threads(n_jobs)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            samples = list(pool.map(lambda p: _sample(r, p, nu, cap), pts))
    else:
        samples = [_sample(r, p, nu, cap) for p in pts]
    if base_point is None:
        base = samples[0]
    else:
        bp = as_point(base_point, r.n)
        base = next((s for s in samples if s.point == bp), None) or _sample(r, bp, nu, cap)
    uniq = {}
    for s in samples:
        uniq.setdefault(s.multitype.entries, s.multitype)
    strata = tuple(sorted(uniq.values(), key=lex_key))
    violations = tuple(i for i, s in enumerate(samples) if lex_compare(s.multitype, base.multitype) == ">")
    return StratificationReport(tuple(samples), strata, len(strata), violations, base.multitype)


__all__ = [
    "Unbounded",
    "INF",
    "Weight",
    "WeightRejected",
    "is_weight",
    "try_weight",
    "lex_compare",
    "lex_key",
    "enumerate_weights",
    "gamma_tail",
    "type_jump_bound",
    "n_bound",
    "vanishing_order_bound",
    "counting_bound",
    "Interval",
    "catlin_dangelo_bounds",
    "commutator_multitype",
    "StratumSample",
    "StratificationReport",
    "OffSurfaceError",
    "stratify_samples",
]
