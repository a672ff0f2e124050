"""The Kohn multiplier-ideal algorithm on polynomial model domains, with gain bookkeeping."""

from __future__ import annotations

import math
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence

from .forms import del_, levi_wedge, wedge_coefficients
from .multitype import _threads
from .poly import (
    CPoint,
    GaussianRational,
    HPoly,
    as_point,
    conj,
    evaluate,
    format_number,
    real_monomial,
    recenter,
    to_real,
)

RULES = ("defining", "levi_entry", "dominate_same", "root", "gradient", "determinant", "aggregate")


# ---------------------------------------------------------------- gain rules


def gain_of(rule: str, inputs: Sequence = (), m: int | None = None):
    """Subelliptic gain produced by one closure rule.

    ``root`` takes ``m`` as a keyword or as the second input.  ``aggregate``
    returns None (unknown) unless all parent gains agree.
    """
    inputs = list(inputs)
    if rule == "defining":
        return Fraction(1)
    if rule == "levi_entry":
        return Fraction(1, 2)
    if rule == "dominate_same":
        return Fraction(inputs[0])
    if rule == "root":
        if m is None:
            inputs, m = inputs[:1], inputs[1]
        if int(m) != m or m < 1:
            raise ValueError(f"root exponent must be a positive integer (got {m})")
        return Fraction(inputs[0]) / int(m)
    if rule == "gradient":
        return Fraction(inputs[0]) / 2
    if rule == "determinant":
        if not inputs:
            raise ValueError("determinant rule needs at least one input")
        return min(Fraction(v) for v in inputs)
    if rule == "aggregate":
        if not inputs or any(v is None for v in inputs):
            return None
        first = Fraction(inputs[0])
        return first if all(Fraction(v) == first for v in inputs) else None
    raise ValueError(f"unknown gain rule {rule!r}")


# ---------------------------------------------------------------- multipliers


@dataclass(frozen=True)
class Certificate:
    """C * F - |g|^M equals the listed nonnegative terms.

    F is |f| when ``squared`` is false (f itself is a positive diagonal form)
    and |f|^2 otherwise.  ``squares`` holds (w, b) for w |b|^2; ``polydisc``
    holds (w, gamma, delta) for w (|h^gamma|^2 - |h^delta|^2), which is
    nonnegative on the unit polydisc around the base point when delta >= gamma.
    Polynomials are in local coordinates h = z - x.
    """

    kind: str  # "sos", "polydisc", "real-sos", "unit"
    constant: Fraction
    exponent_M: int
    squared: bool
    squares: tuple = ()
    polydisc: tuple = ()
    radius: Fraction = Fraction(1)

    @property
    def m(self) -> int:
        """Exponent in |g|^m <= C' |f|."""
        return self.exponent_M // 2 if self.squared else self.exponent_M

    def rhs(self, n: int) -> HPoly:
        out = HPoly.zero(n)
        for w, b in self.squares:
            out = out + (b * conj(b)) * w
        for w, gamma, delta in self.polydisc:
            out = out + (_abs2_monomial(n, gamma) - _abs2_monomial(n, delta)) * w
        return out

    def identity_holds(self, f_local: HPoly, g_local: HPoly) -> bool:
        n = f_local.n
        F = f_local * conj(f_local) if self.squared else f_local
        lhs = F * self.constant - (g_local * conj(g_local)) ** (self.exponent_M // 2)
        if self.kind == "unit":
            return True
        return lhs == self.rhs(n)

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "C": str(self.constant),
            "M": self.exponent_M,
            "m": self.m,
            "squared": self.squared,
            "squares": [[str(w), str(b)] for w, b in self.squares],
            "polydisc": [[str(w), list(g), list(d)] for w, g, d in self.polydisc],
            "radius": str(self.radius),
        }


def _abs2_monomial(n: int, gamma: Sequence[int]) -> HPoly:
    g = tuple(gamma)
    return HPoly(n, {(g, g): 1})


@dataclass(frozen=True, eq=False)
class Multiplier:
    """A function (or, when ``poly`` is None, a (1,0)-form) with a gain and its derivation."""

    poly: HPoly | None
    gain: Fraction | None
    rule: str
    parents: tuple = ()
    exponent: int | None = None
    certificate: Certificate | None = None
    label: str = ""
    note: str = ""

    def __post_init__(self):
        if self.rule not in RULES:
            raise ValueError(f"unknown rule {self.rule!r}")
        if self.gain is not None and not (0 < self.gain <= 1):
            raise ValueError(f"gain must lie in (0, 1] (got {self.gain})")

    @property
    def is_form(self) -> bool:
        return self.poly is None

    def provenance_json(self, inline_generators: bool = False) -> dict:
        return {
            "rule": self.rule,
            "gain": None if self.gain is None else str(self.gain),
            "exponent": self.exponent,
            "note": self.note,
            "parents": [_parent_json(p) for p in self.parents],
        }

    def to_json(self) -> dict:
        out = {
            "label": self.label,
            "poly": str(self.poly),
            "gain": None if self.gain is None else str(self.gain),
            "rule": self.rule,
            "parents": [_parent_json(p) for p in self.parents],
        }
        if self.exponent is not None:
            out["exponent"] = self.exponent
        if self.certificate is not None:
            out["certificate"] = self.certificate.to_json()
        return out


def _parent_json(p: Multiplier):
    if p.poly is not None and p.label:
        return p.label
    return p.provenance_json()


def fold_gain(node: Multiplier, _memo: dict | None = None):
    """Recompute a gain from the leaves by folding the closure rules."""
    memo = {} if _memo is None else _memo
    key = id(node)
    if key in memo:
        return memo[key]
    vals = [fold_gain(p, memo) for p in node.parents]
    if node.rule in ("defining", "levi_entry"):
        out = gain_of(node.rule)
    elif node.rule == "root":
        out = gain_of("root", vals, m=node.exponent)
    else:
        out = gain_of(node.rule, vals)
    memo[key] = out
    return out


def provenance_leaves(node: Multiplier) -> set:
    if not node.parents:
        return {node.rule}
    out: set = set()
    for p in node.parents:
        out |= provenance_leaves(p)
    return out


def gains_decrease(node: Multiplier) -> bool:
    """Gains never increase from parent to child along the derivation."""
    for p in node.parents:
        if node.gain is not None and p.gain is not None and node.gain > p.gain:
            return False
        if not gains_decrease(p):
            return False
    return True


LEVI_ENTRY = Multiplier(None, Fraction(1, 2), "levi_entry", note="ddbar r")


@dataclass(frozen=True)
class MultiplierIdeal:
    step: int
    generators: tuple
    base_point: CPoint
    q: int

    def __post_init__(self):
        if self.step < 1:
            raise ValueError("step must be at least 1")
        if not self.generators:
            raise ValueError("an ideal needs at least one generator")
        polys = [g.poly for g in self.generators]
        if len(set(polys)) != len(polys):
            raise ValueError("generator polynomials must be pairwise distinct")

    def polys(self) -> list[HPoly]:
        return [g.poly for g in self.generators]

    def by_poly(self) -> dict:
        return {g.poly: g for g in self.generators}

    def to_json(self) -> dict:
        term, wit = is_terminated(self)
        return {
            "step": self.step,
            "generators": [g.to_json() for g in self.generators],
            "terminated": term,
            "witness": None if wit is None else wit.label,
        }


def is_terminated(I: MultiplierIdeal):
    """(True, best unit) if some generator is nonzero at the base point."""
    best = None
    for g in I.generators:
        if evaluate(g.poly, I.base_point):
            if best is None or (g.gain is not None and (best.gain is None or g.gain > best.gain)):
                best = g
    return best is not None, best


# ---------------------------------------------------------------- radical capture


class _Labeler:
    def __init__(self, start: int = 0):
        self.count = start

    def __call__(self) -> str:
        self.count += 1
        return f"g{self.count}"


def _diag_positive(F: HPoly) -> bool:
    return bool(F.terms) and all(a == b and c.is_real() and c.re > 0 for (a, b), c in F.terms.items())


def _re_h(n: int, j: int) -> HPoly:
    return HPoly.re_var(n, j)


def _im_h(n: int, j: int) -> HPoly:
    return HPoly.im_var(n, j)


def _binomial_sos(u: HPoly, v: HPoly, e: int):
    """(u^2 + v^2)^e - u^(2e) as sum_k binom(e,k) (u^k v^(e-k))^2."""
    return [(Fraction(math.comb(e, k)), u ** k * v ** (e - k)) for k in range(e)]


def _to_global(g_local: HPoly, x: CPoint) -> HPoly:
    return recenter(g_local, CPoint(tuple(-c for c in x)))


@dataclass(frozen=True)
class Capture:
    g_local: HPoly
    certificate: Certificate
    note: str


def _captures_for(f_local: HPoly) -> list[Capture]:
    """Certified |g|^m <= C |f| statements for one vanishing generator."""
    n = f_local.n
    out: list[Capture] = []
    squared = False
    F = f_local
    if not _diag_positive(F):
        F = f_local * conj(f_local)
        squared = True
    if _diag_positive(F):
        terms = {a: c.re for (a, _), c in F.terms.items()}
        # pure powers |h_j|^(2e)
        pure: dict = {}
        for gamma in terms:
            supp = [j for j in range(n) if gamma[j]]
            if len(supp) == 1:
                j = supp[0]
                if j not in pure or gamma[j] < pure[j][j]:
                    pure[j] = gamma
        for j, gamma in sorted(pure.items()):
            e, c = gamma[j], terms[gamma]
            if squared and (2 * e) % 2:
                continue
            others = [(Fraction(cc) / c, _monomial(n, gg)) for gg, cc in sorted(terms.items()) if gg != gamma]
            for name, u, v in (("Re", _re_h(n, j), _im_h(n, j)), ("Im", _im_h(n, j), _re_h(n, j))):
                cert = Certificate("sos", 1 / Fraction(c), 2 * e, squared, tuple(_binomial_sos(u, v, e) + others))
                out.append(Capture(u, cert, f"{name} h{j + 1}"))
        # holomorphic radical monomials for mixed supports
        mixed: dict = {}
        for gamma in terms:
            supp = tuple(j for j in range(n) if gamma[j])
            if len(supp) > 1:
                top = max(gamma)
                if supp not in mixed or top < max(mixed[supp]):
                    mixed[supp] = gamma
        for supp, gamma in sorted(mixed.items()):
            top, c = max(gamma), terms[gamma]
            delta = tuple(top if j in supp else 0 for j in range(n))
            others = tuple((Fraction(cc) / c, _monomial(n, gg)) for gg, cc in sorted(terms.items()) if gg != gamma)
            poly_terms = ((Fraction(1), gamma, delta),) if gamma != delta else ()
            squares = others if gamma != delta else others + ((Fraction(1), HPoly.zero(n)),)
            cert = Certificate("polydisc" if poly_terms else "sos", 1 / Fraction(c), 2 * top, squared,
                               tuple(squares), poly_terms)
            mono = _monomial(n, tuple(1 if j in supp else 0 for j in range(n)))
            out.append(Capture(mono, cert, "prod h" + "".join(str(j + 1) for j in supp)))
    # real-coordinate search: F even with positive coefficients in x_j, y_j
    real = to_real(F)
    if real and all(c.is_real() and c.re > 0 and all(e % 2 == 0 for e in k) for k, c in real.items()):
        best: dict = {}
        for k in real:
            supp = [i for i in range(2 * n) if k[i]]
            if len(supp) == 1:
                i = supp[0]
                if i not in best or k[i] < best[i][i]:
                    best[i] = k
        for i, k in sorted(best.items()):
            c = real[k].re
            sq = tuple((Fraction(cc.re) / c, real_monomial(n, [e // 2 for e in kk]))
                       for kk, cc in sorted(real.items()) if kk != k)
            cert = Certificate("real-sos", 1 / Fraction(c), k[i], squared, sq)
            u = _re_h(n, i // 2) if i % 2 == 0 else _im_h(n, i // 2)
            out.append(Capture(u, cert, ("Re" if i % 2 == 0 else "Im") + f" h{i // 2 + 1}"))
    return [c for c in out if not squared or c.certificate.exponent_M % 2 == 0]


def _monomial(n: int, gamma: Sequence[int]) -> HPoly:
    return HPoly(n, {(tuple(gamma), (0,) * n): 1})


def _unit_radius(f_local: HPoly, value: GaussianRational) -> Fraction:
    """A radius on which |f| stays above |f(x)| / 2."""
    lb = max(abs(value.re), abs(value.im))
    rho = Fraction(1, 2)
    while True:
        bound = sum((abs(c.re) + abs(c.im)) * rho ** (sum(a) + sum(b))
                    for (a, b), c in f_local.terms.items() if sum(a) + sum(b) > 0)
        if bound <= lb / 2:
            return rho
        rho /= 2


def radical_capture(gens: Iterable[Multiplier], x, labeler=None, exclude: Iterable = (),
                    m_cap: int | None = None) -> list[Multiplier]:
    """New multipliers g with certified |g|^m <= C |f| for generators f.

    Polynomials in ``exclude`` (typically the current generators) are skipped,
    as are captures whose exponent m exceeds ``m_cap``.
    """
    labeler = labeler or _Labeler()
    out: list[Multiplier] = []
    seen: set = set(exclude)
    for f in gens:
        if f.poly is None or f.gain is None:
            continue
        x = as_point(x, f.poly.n)
        v = evaluate(f.poly, x)
        f_local = recenter(f.poly, x)
        if v:
            one = HPoly.const(f.poly.n, 1)
            if one not in seen:
                seen.add(one)
                cert = Certificate("unit", Fraction(4) / v.norm2(), 2, True, radius=_unit_radius(f_local, v))
                out.append(Multiplier(one, gain_of("dominate_same", [f.gain]), "dominate_same", (f,),
                                      certificate=cert, label=labeler(), note="unit at base point"))
            continue
        for cap in _captures_for(f_local):
            g = _to_global(cap.g_local, x)
            m = cap.certificate.m
            if g in seen or g == f.poly or (m_cap is not None and m > m_cap):
                continue
            seen.add(g)
            out.append(Multiplier(g, gain_of("root", [f.gain], m=m), "root", (f,), m, cap.certificate,
                                  labeler(), cap.note))
    return out


def verify_capture(g: Multiplier, x, samples: int = 1000, seed: int = 0) -> bool:
    """Exact identity check plus random spot checks of C F - |g|^M >= 0 near x."""
    (f,) = g.parents
    cert = g.certificate
    if cert is None:
        return False
    x = as_point(x, g.poly.n)
    f_local = recenter(f.poly, x)
    g_local = recenter(g.poly, x)
    if cert.kind == "unit":
        if not evaluate(f.poly, x):
            return False
    elif not cert.identity_holds(f_local, g_local):
        return False
    rng = random.Random(seed)
    rho = cert.radius
    scale = rho * Fraction(45, 64)
    n = g.poly.n
    half = cert.exponent_M // 2
    for _ in range(samples):
        h = [GaussianRational(Fraction(rng.randint(-64, 64), 64) * scale, Fraction(rng.randint(-64, 64), 64) * scale)
             for _ in range(n)]
        fv = evaluate(f_local, h)
        F = fv.norm2() if cert.squared else fv.re
        gv = evaluate(g_local, h).norm2() ** half
        if cert.constant * F - gv < 0:
            return False
    return True


# ---------------------------------------------------------------- steps


def _gradient(f: Multiplier) -> Multiplier:
    return Multiplier(None, gain_of("gradient", [f.gain]), "gradient", (f,), note=f"d({f.label})")


def _add_all(base: Sequence[Multiplier], new: Iterable[Multiplier]) -> list[Multiplier]:
    """Union by polynomial, keeping the larger gain (the earlier one on ties)."""
    order = list(base)
    index = {g.poly: k for k, g in enumerate(order)}
    for g in new:
        k = index.get(g.poly)
        if k is None:
            index[g.poly] = len(order)
            order.append(g)
        elif g.gain is not None and (order[k].gain is None or g.gain > order[k].gain):
            order[k] = g
    return order


def step1(r: HPoly, x, q: int, labeler=None, m_cap: int | None = None) -> MultiplierIdeal:
    """r with gain 1, the coefficients of dr ^ dbar r ^ (ddbar r)^(n-q), and their captures."""
    x = as_point(x, r.n)
    v = evaluate(r, x)
    if v:
        raise ValueError(f"base point off surface: r = {format_number(v)}")
    if all(not evaluate(c, x) for c in del_(r).coefficients()):
        raise ValueError("dr vanishes at the base point")
    labeler = labeler or _Labeler()
    rm = Multiplier(r, gain_of("defining"), "defining", label=labeler(), note="defining function")
    dr = _gradient(rm)
    minors = []
    for c in wedge_coefficients(r, q):
        minors.append(Multiplier(c, gain_of("determinant", [dr.gain, LEVI_ENTRY.gain]), "determinant",
                                 (dr, LEVI_ENTRY), label=labeler(), note="Levi minor"))
    gens = _add_all([rm], minors)
    caught = radical_capture(gens[1:], x, labeler, exclude=[g.poly for g in gens], m_cap=m_cap)
    gens = _add_all(gens, caught)
    return MultiplierIdeal(1, tuple(gens), x, q)


@dataclass(frozen=True)
class StepStats:
    subsets_examined: int
    subsets_skipped: int
    truncated: bool


def _wedge_task(args):
    r, q, subset, forms = args
    w = forms[0]
    for f in forms[1:]:
        w = w.wedge(f)
        if w.is_zero():
            return subset, []
    if w.is_zero():
        return subset, []
    return subset, w.wedge(levi_wedge(r, q, len(forms))).coefficients()


def step(I: MultiplierIdeal, r: HPoly, labeler=None, max_subsets: int = 4000,
         n_jobs: int | None = None, m_cap: int | None = None) -> tuple[MultiplierIdeal, StepStats]:
    """One enlargement: Jacobian wedges of current generators, then captures."""
    if is_terminated(I)[0]:
        return replace(I, step=I.step + 1), StepStats(0, 0, False)
    labeler = labeler or _Labeler(len(I.generators))
    x, q, n = I.base_point, I.q, r.n
    cands = []
    for g in I.generators:
        if g.poly == r or g.poly.is_constant():
            continue
        d = del_(g.poly)
        if d.is_zero():
            continue
        cands.append((g, d))
    tasks, skipped = [], 0
    for j in range(1, n - q + 1):
        for combo in combinations(range(len(cands)), j):
            if len(tasks) >= max_subsets:
                skipped += 1
                continue
            tasks.append((r, q, combo, [cands[k][1] for k in combo]))
    workers = _threads(n_jobs)
    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            results = list(ex.map(_wedge_task, tasks))
    else:
        results = [_wedge_task(t) for t in tasks]
    existing = set(I.polys())
    new: list[Multiplier] = []
    made: set = set()
    dr = _gradient(I.generators[0])
    for combo, coeffs in results:
        if not coeffs:
            continue
        parents = tuple(_gradient(cands[k][0]) for k in combo) + (dr,)
        if len(combo) < n - q:
            parents = parents + (LEVI_ENTRY,)
        gain = gain_of("determinant", [p.gain for p in parents])
        for c in coeffs:
            if c in existing or c in made:
                # keep the best gain for repeated coefficients
                for k, m in enumerate(new):
                    if m.poly == c and gain > m.gain:
                        new[k] = Multiplier(c, gain, "determinant", parents, label=m.label, note="Jacobian wedge")
                continue
            made.add(c)
            new.append(Multiplier(c, gain, "determinant", parents, label=labeler(), note="Jacobian wedge"))
    gens = _add_all(I.generators, new)
    fresh = [g for g in gens if g.poly not in existing]
    caught = radical_capture(fresh, x, labeler, exclude=[g.poly for g in gens], m_cap=m_cap)
    gens = _add_all(gens, caught)
    return MultiplierIdeal(I.step + 1, tuple(gens), x, q), StepStats(len(tasks), skipped, skipped > 0)


# ---------------------------------------------------------------- driver


@dataclass(frozen=True)
class Trace:
    steps: tuple  # MultiplierIdeal per step
    stats: tuple
    termination_step: int | None
    final_gain: Fraction | None
    witness: Multiplier | None
    max_steps: int
    n: int
    q: int
    n_observed: int | None = None
    bounds: dict = field(default_factory=dict)

    @property
    def terminated(self) -> bool:
        return self.termination_step is not None

    @property
    def bound_violation(self) -> bool:
        if self.termination_step is None or self.n_observed is None:
            return False
        return self.termination_step > min(2 * self.n, self.n_observed)

    def step_sizes(self) -> list[int]:
        return [len(I.generators) for I in self.steps]

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "q": self.q,
            "base_point": self.steps[0].base_point.to_json(),
            "max_steps": self.max_steps,
            "steps": [dict(I.to_json(), subsets=s.subsets_examined, subsets_truncated=s.truncated)
                      for I, s in zip(self.steps, self.stats)],
            "terminated": self.terminated,
            "termination_step": self.termination_step,
            "final_gain": None if self.final_gain is None else str(self.final_gain),
            "witness": None if self.witness is None else self.witness.label,
            "bounds": {"2n": 2 * self.n, "n_observed": self.n_observed, **self.bounds},
            "bound_violation": self.bound_violation,
        }

    def transcript(self) -> str:
        lines = []
        for I, s in zip(self.steps, self.stats):
            term, wit = is_terminated(I)
            lines.append(f"Step {I.step}: {len(I.generators)} generators"
                         + (f" ({s.subsets_examined} wedge subsets)" if I.step > 1 else ""))
            for g in I.generators:
                gain = "unknown" if g.gain is None else str(g.gain)
                par = ", ".join(p.label if p.label else p.note or p.rule for p in g.parents)
                extra = f" m={g.exponent}" if g.exponent else ""
                lines.append(f"  {g.label}: {g.poly}   eps = {gain}   [{g.rule}{extra}"
                             + (f" <- {par}" if par else "") + "]")
            if term:
                lines.append(f"  unit captured: {wit.label} = {wit.poly}, eps = {wit.gain}")
        if self.terminated:
            lines.append(f"terminated step {self.termination_step}, eps = {self.final_gain}")
        else:
            lines.append(f"no unit within {self.max_steps} steps")
        return "\n".join(lines)


def run(r: HPoly, x, q: int = 1, max_steps: int | None = None, n_observed: int | None = None,
        max_subsets: int = 4000, n_jobs: int | None = None, m_cap: int | None = None) -> Trace:
    """Iterate until a unit is captured or ``max_steps`` is reached."""
    x = as_point(x, r.n)
    if not 1 <= q < r.n:
        raise ValueError(f"q must satisfy 1 <= q < n (got q={q}, n={r.n})")
    max_steps = 2 * r.n if max_steps is None else max_steps
    labeler = _Labeler()
    I = step1(r, x, q, labeler, m_cap)
    steps, stats = [I], [StepStats(0, 0, False)]
    while not is_terminated(I)[0] and I.step < max_steps:
        I, st = step(I, r, labeler, max_subsets=max_subsets, n_jobs=n_jobs, m_cap=m_cap)
        steps.append(I)
        stats.append(st)
    term, wit = is_terminated(I)
    return Trace(tuple(steps), tuple(stats), I.step if term else None, wit.gain if term else None,
                 wit, max_steps, r.n, q, n_observed)


def aggregate(gens: Sequence[Multiplier], label: str = "") -> Multiplier:
    """sum_i |g_i|^2; its gain is known only when all parents share one."""
    if not gens:
        raise ValueError("nothing to aggregate")
    total = HPoly.zero(gens[0].poly.n)
    for g in gens:
        total = total + g.poly * conj(g.poly)
    return Multiplier(total, gain_of("aggregate", [g.gain for g in gens]), "aggregate", tuple(gens),
                      label=label, note="sum of squared moduli")
