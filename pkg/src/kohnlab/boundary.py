"""Iterated bracket lists and boundary systems on polynomial model domains."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Sequence

from . import _linalg
from .fields import (
    MixedField,
    SameTypeBracketError,
    VectorField10,
    apply,
    bracket,
    lie_bracket,
    pair_del,
    tangential_frame,
)
from .forms import (
    default_pivot,
    del_,
    delbar,
    deldelbar,
    diagonalize_frame,
    evaluate_on,
    matrix_on_frame,
    power,
)
from .multitype import OffSurfaceError, Unbounded, Weight, is_weight, try_weight
from .poly import CPoint, HPoly, as_point, diff, evaluate, imag_part, real_part

__all__ = [
    "VectorField10",
    "MixedField",
    "FieldList",
    "BoundarySystem",
    "BoundarySearchExhausted",
    "InvariantViolation",
    "SameTypeBracketError",
    "apply",
    "lie_bracket",
    "list_eval",
    "is_ordered",
    "is_admissible",
    "build_boundary_system",
    "construct_system",
    "point3_check",
    "ordered_lists_below_threshold",
]


class BoundarySearchExhausted(RuntimeError):
    def __init__(self, level: int, cap: int):
        super().__init__(f"no nonvanishing admissible list of length <= {cap} at level {level}")
        self.level = level
        self.cap = cap


class InvariantViolation(RuntimeError):
    pass


@dataclass(frozen=True)
class FieldList:
    """A word L^1 ... L^l in fields and conjugates; ``order`` lists blocks newest first."""

    items: tuple
    order: tuple | None = None

    def __post_init__(self):
        object.__setattr__(self, "items", tuple((f, bool(c)) for f, c in self.items))

    def __len__(self):
        return len(self.items)

    def tags(self) -> list[str]:
        return [f.tag for f, _ in self.items]

    def multiplicities(self) -> dict:
        out: dict = {}
        for f, _ in self.items:
            out[f.tag] = out.get(f.tag, 0) + 1
        return out

    def index_multiplicities(self) -> dict:
        out: dict = {}
        for f, _ in self.items:
            if f.index is None:
                raise ValueError(f"field {f.tag} carries no boundary-system index")
            out[f.index] = out.get(f.index, 0) + 1
        return out

    def encoding(self) -> tuple:
        return tuple((f.tag, c) for f, c in self.items)

    def to_json(self) -> list:
        return [{"field": f.tag, "conj": c} for f, c in self.items]

    def __str__(self):
        return "{" + ", ".join(f"{f.tag}bar" if c else f.tag for f, c in self.items) + "}"


# ---------------------------------------------------------------- list evaluation


def _item_field(item) -> MixedField:
    f, c = item
    return f.as_mixed(c)


def bracket_pairing(r: HPoly, a, b) -> HPoly:
    """dr([A, B]) for two list items."""
    if a == b:
        return HPoly.zero(r.n)
    return pair_del(r, bracket(_item_field(a), _item_field(b)))


def list_poly(items: Sequence, r: HPoly, cache: dict | None = None) -> HPoly:
    """L^1 ... L^(l-2) dr([L^(l-1), L^l]) as a polynomial."""
    items = tuple(items)
    if len(items) < 2:
        raise ValueError("a bracket list needs at least two entries")
    if cache is not None:
        key = tuple((f.coeffs, c) for f, c in items)
        hit = cache.get(key)
        if hit is not None:
            return hit
    if len(items) == 2:
        out = bracket_pairing(r, items[0], items[1])
    else:
        inner = list_poly(items[1:], r, cache)
        f, c = items[0]
        out = apply(f, inner, c) if inner else inner
    if cache is not None:
        cache[key] = out
    return out


def list_eval(Ls: FieldList, r: HPoly, x) -> object:
    """Exact value of the iterated bracket pairing at ``x``."""
    if not isinstance(Ls, FieldList):
        Ls = FieldList(tuple(Ls))
    if len(Ls) < 2:
        raise ValueError("malformed list: fewer than two entries")
    if any(f.n != r.n for f, _ in Ls.items):
        raise ValueError("malformed list: field dimension does not match r")
    return evaluate(list_poly(Ls.items, r), as_point(x, r.n))


def _runs(tags: Sequence[str]) -> list[str]:
    runs: list[str] = []
    for t in tags:
        if not runs or runs[-1] != t:
            runs.append(t)
    return runs


def is_ordered(Ls: FieldList, order: Sequence[str] | None = None) -> bool:
    """Each field occupies one contiguous block, blocks in ``order`` (newest first)."""
    runs = _runs(Ls.tags())
    if len(set(runs)) != len(runs):
        return False
    order = order if order is not None else Ls.order
    if order is None:
        return True
    pos = {t: i for i, t in enumerate(order)}
    if any(t not in pos for t in runs):
        return False
    idx = [pos[t] for t in runs]
    return idx == sorted(idx)


def _levi_rank_of_weight(c: Weight) -> int:
    p = 0
    for v in c.entries[1:]:
        if v == 2:
            p += 1
        else:
            break
    return p


def is_admissible(Ls: FieldList, c: Weight, j: int) -> bool:
    """l_j > 0 and sum_{i=p+2}^{j-1} l_i / c_i < 1."""
    mult = Ls.index_multiplicities()
    if mult.get(j, 0) == 0:
        return False
    p = _levi_rank_of_weight(c)
    s = Fraction(0)
    for i, li in mult.items():
        if p + 2 <= i < j:
            ci = c.entries[i - 1]
            if not isinstance(ci, Unbounded):
                s += Fraction(li) / ci
    return s < 1


# ---------------------------------------------------------------- systems


@dataclass(frozen=True)
class BoundarySystem:
    r1: HPoly
    rs: tuple
    fields: tuple  # L_2 .. L_nu
    lists: tuple  # FieldList per special level p+2..nu
    rank: int
    multitype: Weight
    base_point: CPoint
    pivot: int
    complete: bool = True
    exhausted_level: int | None = None

    @property
    def nu(self) -> int:
        return len(self.multitype)

    def special_fields(self) -> tuple:
        return self.fields[self.rank:]

    def levi_fields(self) -> tuple:
        return self.fields[: self.rank]

    def functions(self) -> dict:
        """Index -> r_index for r_1 and the derived functions."""
        out = {1: self.r1}
        for k, rk in enumerate(self.rs):
            out[self.rank + 2 + k] = rk
        return out

    def field_by_index(self) -> dict:
        return {f.index: f for f in self.fields}

    def to_json(self) -> dict:
        return {
            "base_point": self.base_point.to_json(),
            "rank": self.rank,
            "multitype": self.multitype.to_json(),
            "r1": str(self.r1),
            "rs": [str(g) for g in self.rs],
            "fields": [f.to_json() for f in self.fields],
            "lists": [l.to_json() for l in self.lists],
            "complete": self.complete,
        }


def _on_surface(r: HPoly, x: CPoint):
    v = evaluate(r, x)
    if v:
        raise OffSurfaceError(f"point {x} is off the surface: r = {v}")


def _adapted_frame(r: HPoly, x: CPoint):
    """Frame ordered so the Levi-nondegenerate block comes first, then diagonalized."""
    pivot = default_pivot(r, x)
    frame = tangential_frame(r, pivot)
    m = matrix_on_frame(r, frame)
    vals = m.at(x)
    p = _linalg.rank(vals)
    if p:
        sel = _linalg.nonsingular_principal_subset(vals, p)
        perm = list(sel) + [i for i in range(len(frame)) if i not in sel]
        frame = [frame[i] for i in perm]
        m = matrix_on_frame(r, frame)
        m = diagonalize_frame(m, p, x).matrix
    fields = []
    for k, f in enumerate(m.frame):
        if k < p:
            fields.append(f.with_tag(f"L{k + 2}", k + 2))
        else:
            fields.append(f)
    return pivot, p, fields[:p], fields[p:], m


def _multiplicity_vectors(nblocks: int, cap: int, cvals: Sequence[Fraction]):
    """(w, length, vector) for vectors (l_new, l_prev_1, ...) with admissible sums.

    ``cvals`` are the entries c_i of the older blocks, newest first.
    """
    out = []

    def rec(k, acc, total, s):
        if k == nblocks:
            if total >= 2 and acc[0] >= 1:
                w = Fraction(acc[0]) / (1 - s)
                out.append((w, total, tuple(acc)))
            return
        start = 1 if k == 0 else 0
        for l in range(start, cap - total + 1):
            s2 = s + (Fraction(l) / cvals[k - 1] if k and l else 0)
            if s2 >= 1:
                break
            rec(k + 1, acc + [l], total + l, s2)

    rec(0, [], 0, Fraction(0))
    out.sort()
    return out


def _words(blocks: Sequence[VectorField10], vec: Sequence[int]):
    """All item sequences with the given block multiplicities and a mixed-type tail."""
    slots = []
    for f, l in zip(blocks, vec):
        slots.extend([f] * l)
    for pattern in product((False, True), repeat=len(slots)):
        items = tuple(zip(slots, pattern))
        a, b = items[-2], items[-1]
        if a[1] == b[1]:
            continue
        yield items


def _search_level(r, x, blocks, cvals, cap, cache):
    """Minimal-weight nonvanishing ordered list for the newest block."""
    vecs = _multiplicity_vectors(len(blocks), cap, cvals)
    i = 0
    while i < len(vecs):
        w = vecs[i][0]
        group = []
        while i < len(vecs) and vecs[i][0] == w:
            group.append(vecs[i])
            i += 1
        best = None
        for _, length, vec in group:
            for items in _words(blocks, vec):
                val = evaluate(list_poly(items, r, cache), x)
                if val:
                    key = (length, tuple((blocks.index(f), c) for f, c in items))
                    if best is None or key < best[0]:
                        best = (key, items, vec, val)
        if best is not None:
            return w, best[1], best[2]
    return None


def _eliminate(F: VectorField10, specials: Sequence[tuple]) -> VectorField10:
    """Make F annihilate the earlier r_k via (L_k r_k) F - (F r_k) L_k."""
    G = F
    for Lk, rk in specials:
        Frk = apply(G, rk)
        if Frk:
            G = G.combine(apply(Lk, rk), Lk, -Frk)
    return G


def construct_system(r: HPoly, x, nu: int, cap: int) -> BoundarySystem:
    """Level-by-level construction; unresolved levels are marked ``>cap``."""
    x = as_point(x, r.n)
    if not 1 <= nu <= r.n:
        raise ValueError(f"nu must lie in 1..n (got {nu})")
    _on_surface(r, x)
    if all(not evaluate(diff(r, j), x) for j in range(r.n)):
        raise ValueError("dr vanishes at the point")
    pivot, p, levi_fields, degenerate, _ = _adapted_frame(r, x)
    entries: list = [Fraction(1)] + [Fraction(2)] * p
    if nu <= p + 1:
        w = is_weight(entries[:nu])
        return BoundarySystem(r, (), tuple(levi_fields[: nu - 1]), (), min(p, nu - 1), w, x, pivot)
    specials: list[tuple] = []  # (L_k, r_k)
    lists: list[FieldList] = []
    pool = list(degenerate)
    exhausted = None
    for j in range(p + 2, nu + 1):
        cvals = [entries[k - 1] for k in range(j - 1, p + 1, -1)]
        older = [L for L, _ in reversed(specials)]
        best = None
        for pi, F in enumerate(pool):
            G = _eliminate(F, specials)
            if all(not v for v in G.at(x)):
                continue
            if not _linalg.rank([list(f.at(x)) for f in levi_fields + [L for L, _ in specials] + [G]]) == p + len(specials) + 1:
                continue
            G = G.with_tag(f"L{j}", j)
            cache: dict = {}
            found = _search_level(r, x, [G] + older, cvals, cap, cache)
            if found is None:
                continue
            w, items, vec = found
            if best is None or w < best[0]:
                best = (w, pi, G, items, cache)
        if best is None:
            exhausted = j
            break
        w, pi, G, items, cache = best
        pool.pop(pi)
        h = list_poly(items[1:], r, cache)
        re_h, im_h = real_part(h), imag_part(h)
        rj = re_h if evaluate(apply(G, re_h), x) else im_h
        blocks_order = tuple(f.tag for f in [G] + older)
        lists.append(FieldList(items, blocks_order))
        specials.append((G, rj))
        entries.append(w)
    complete = exhausted is None
    if not complete:
        entries += [Unbounded(cap)] * (nu - len(entries))
    w = try_weight(entries)
    if w is None:
        # the pool did not produce a lattice point; keep the raw entries
        w = Weight(tuple(entries), tuple(None for _ in entries))
    fields = tuple(levi_fields) + tuple(L for L, _ in specials)
    return BoundarySystem(r, tuple(rk for _, rk in specials), fields, tuple(lists), p, w, x, pivot,
                          complete, exhausted)


def build_boundary_system(r: HPoly, x, nu: int, cap: int) -> BoundarySystem:
    """Boundary system up to level ``nu``; raises if the search is exhausted."""
    B = construct_system(r, x, nu, cap)
    if not B.complete:
        raise BoundarySearchExhausted(B.exhausted_level, cap)
    return B


# ---------------------------------------------------------------- checks


def triangularity_failures(B: BoundarySystem) -> list[tuple]:
    """Pairs (j, k), k < j, with L_j r_k not identically zero."""
    funcs = B.functions()
    bad = []
    for L in B.fields:
        for k, rk in funcs.items():
            if k < L.index and not apply(L, rk).is_zero():
                bad.append((L.index, k))
    return bad


def gradients_independent(B: BoundarySystem) -> bool:
    x = B.base_point
    rows = [[evaluate(diff(g, j), x) for j in range(B.r1.n)] for g in [B.r1, *B.rs]]
    return _linalg.rank(rows) == len(rows)


def list_weight_sums(B: BoundarySystem) -> list[Fraction]:
    out = []
    for L in B.lists:
        s = Fraction(0)
        for i, li in L.index_multiplicities().items():
            s += Fraction(li) / B.multitype.entries[i - 1]
        out.append(s)
    return out


def ordered_lists_below_threshold(B: BoundarySystem, cap: int):
    """Yield every ordered list of special fields with sum l_i / c_i < 1."""
    specials = list(reversed(B.special_fields()))  # newest first
    cvals = [B.multitype.entries[f.index - 1] for f in specials]
    m = len(specials)

    def rec(k, acc, total, s):
        if k == m:
            if total >= 2:
                yield tuple(acc)
            return
        for l in range(0, cap - total + 1):
            s2 = s + Fraction(l) / cvals[k]
            if s2 >= 1:
                break
            yield from rec(k + 1, acc + [l], total + l, s2)

    for vec in rec(0, [], 0, Fraction(0)):
        yield from _words(specials, vec)


def threshold_violations(B: BoundarySystem, cap: int) -> list:
    cache: dict = {}
    bad = []
    for items in ordered_lists_below_threshold(B, cap):
        if evaluate(list_poly(items, B.r1, cache), B.base_point):
            bad.append(FieldList(items))
    return bad


@dataclass(frozen=True)
class Point3Certificate:
    coefficient: object  # first nonzero coefficient of the wedge at x
    slot: tuple
    frame_value: object  # wedge on the adapted frame, normalized
    triangular: object  # det A_p * prod L_k r_k (x)
    levi_block_det: object
    diagonal: tuple

    @property
    def matches(self) -> bool:
        return self.frame_value == self.triangular

    def to_json(self) -> dict:
        from .poly import format_number

        return {
            "coefficient": format_number(self.coefficient),
            "frame_value": format_number(self.frame_value),
            "triangular": format_number(self.triangular),
            "levi_block_det": format_number(self.levi_block_det),
            "diagonal": [format_number(v) for v in self.diagonal],
            "matches": self.matches,
        }


def point3_check(B: BoundarySystem, q: int) -> Point3Certificate:
    """Nonvanishing of dr ^ dbar r ^ (ddbar r)^p ^ dr_{p+2} ^ ... ^ dr_nu at x."""
    from .forms import hessian, levi_pairing

    r, x, p = B.r1, B.base_point, B.rank
    n = r.n
    if B.nu != n + 1 - q:
        raise ValueError(f"system has nu={B.nu}; q={q} needs nu={n + 1 - q}")
    W = del_(r).wedge(delbar(r)).wedge(power(deldelbar(r), p))
    for g in B.rs:
        W = W.wedge(del_(g))
    vals = W.at(x)
    nonzero = sorted(k for k, v in vals.items() if v)
    if not nonzero:
        raise InvariantViolation("the point-3 wedge vanishes at the base point")
    slot = nonzero[0]
    # frame evaluation on N = d/dz_pivot and L_2..L_nu
    N = tuple(1 if j == B.pivot else 0 for j in range(n))
    v10 = [N] + [f.at(x) for f in B.fields]
    v01 = [N] + [tuple(c.conjugate() for c in f.at(x)) for f in B.levi_fields()]
    raw = evaluate_on(W, x, v10, v01)
    rN = evaluate(diff(r, B.pivot), x)
    m = len(B.rs)
    sign = (-1) ** ((p * (p - 1) // 2 + p + m * (p + 1)) % 2)
    frame_value = raw / (rN * rN.conjugate() * math.factorial(p) * sign)
    H = hessian(r)
    A = [[evaluate(levi_pairing(H, Li, Lk), x) for Lk in B.levi_fields()] for Li in B.levi_fields()]
    detA = _linalg.det(A) if A else 1
    diag = tuple(evaluate(apply(L, g), x) for L, g in zip(B.special_fields(), B.rs))
    tri = detA
    for d in diag:
        tri = tri * d
    from .poly import GaussianRational

    return Point3Certificate(vals[slot], slot, frame_value, GaussianRational.coerce(tri),
                             GaussianRational.coerce(detA), diag)
