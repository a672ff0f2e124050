"""Exterior algebra with polynomial coefficients, Levi forms and minors.

Basis 1-forms are indexed by slots: slot 2j is dz_{j+1} and slot 2j+1 is
dzb_{j+1}.  A basis element is a strictly increasing slot tuple, so the
canonical top-degree order is dz1 ^ dzb1 ^ dz2 ^ dzb2 ^ ...  All reported
coefficients are relative to this order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import Iterable, Sequence

from . import _linalg
from .fields import VectorField10, tangential_frame
from .poly import HPoly, as_point, conj, diff, evaluate


def _merge_sign(a: tuple, b: tuple):
    """Sign and sorted union for wedging basis ``a`` with basis ``b``."""
    sa = set(a)
    if any(s in sa for s in b):
        return 0, None
    inversions = 0
    for s in b:
        inversions += sum(1 for t in a if t > s)
    return (-1 if inversions % 2 else 1), tuple(sorted(a + b))


class PForm:
    """Differential form sum_S coeff_S dslot_S with HPoly coefficients."""

    __slots__ = ("n", "_terms")

    def __init__(self, n: int, terms: dict | Iterable = ()):
        self.n = n
        items = terms.items() if isinstance(terms, dict) else terms
        clean: dict = {}
        for slots, c in items:
            slots = tuple(slots)
            if list(slots) != sorted(set(slots)) or any(not 0 <= s < 2 * n for s in slots):
                raise ValueError(f"invalid basis slots {slots!r}")
            if c.n != n:
                raise ValueError("coefficient dimension mismatch")
            c = clean.get(slots, HPoly.zero(n)) + c
            if c:
                clean[slots] = c
            else:
                clean.pop(slots, None)
        self._terms = clean

    @classmethod
    def _raw(cls, n, terms):
        obj = cls.__new__(cls)
        obj.n = n
        obj._terms = terms
        return obj

    @classmethod
    def basis(cls, n: int, dz: Sequence[int] = (), dzb: Sequence[int] = ()) -> "PForm":
        """dz_I ^ dzb_J with 0-based index lists, as written (I before J)."""
        out = cls._raw(n, {(): HPoly.const(n, 1)})
        for j in dz:
            out = out.wedge(cls._raw(n, {(2 * j,): HPoly.const(n, 1)}))
        for j in dzb:
            out = out.wedge(cls._raw(n, {(2 * j + 1,): HPoly.const(n, 1)}))
        return out

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def is_zero(self) -> bool:
        return not self._terms

    def bidegree(self) -> tuple[int, int]:
        degs = {(sum(1 for s in k if s % 2 == 0), sum(1 for s in k if s % 2)) for k in self._terms}
        if not degs:
            return (0, 0)
        if len(degs) > 1:
            raise ValueError("form is not homogeneous")
        return degs.pop()

    def degree(self) -> int:
        p, q = self.bidegree()
        return p + q

    def __add__(self, other: "PForm") -> "PForm":
        if other.n != self.n:
            raise ValueError("dimension mismatch")
        out = dict(self._terms)
        for k, c in other._terms.items():
            v = out.get(k)
            v = c if v is None else v + c
            if v:
                out[k] = v
            else:
                out.pop(k, None)
        return PForm._raw(self.n, out)

    def __neg__(self):
        return PForm._raw(self.n, {k: -c for k, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, g) -> "PForm":
        out = {}
        for k, c in self._terms.items():
            v = c * g
            if v:
                out[k] = v
        return PForm._raw(self.n, out)

    def wedge(self, other: "PForm") -> "PForm":
        if other.n != self.n:
            raise ValueError(f"dimension mismatch: {self.n} vs {other.n}")
        out: dict = {}
        for ka, ca in self._terms.items():
            for kb, cb in other._terms.items():
                sign, k = _merge_sign(ka, kb)
                if not sign:
                    continue
                v = ca * cb
                if sign < 0:
                    v = -v
                w = out.get(k)
                out[k] = v if w is None else w + v
        return PForm._raw(self.n, {k: v for k, v in out.items() if v})

    __xor__ = wedge

    def __eq__(self, other):
        return isinstance(other, PForm) and self.n == other.n and self._terms == other._terms

    def __hash__(self):
        return hash((self.n, frozenset(self._terms.items())))

    def coefficient(self, slots: Sequence[int]) -> HPoly:
        return self._terms.get(tuple(slots), HPoly.zero(self.n))

    def coefficients(self) -> list[HPoly]:
        """Nonzero coefficients in canonical basis order."""
        return [self._terms[k] for k in sorted(self._terms)]

    def at(self, x) -> dict:
        x = as_point(x, self.n)
        return {k: evaluate(c, x) for k, c in self._terms.items()}

    def __str__(self):
        return format_form(self)

    def __repr__(self):
        return f"PForm({self.n}, {format_form(self)!r})"


def _split_layout(slots: tuple):
    """Index lists (I, J) and the sign relating dslots to dz_I ^ dzb_J."""
    dz = [s // 2 for s in slots if s % 2 == 0]
    dzb = [s // 2 for s in slots if s % 2 == 1]
    target = tuple(2 * j for j in dz) + tuple(2 * j + 1 for j in dzb)
    # sign of the permutation sorting ``target`` into ``slots``
    inv = sum(1 for a in range(len(target)) for b in range(a + 1, len(target)) if target[a] > target[b])
    return dz, dzb, (-1 if inv % 2 else 1)


def format_form(w: PForm) -> str:
    """Text form ``(f) * dz{1,2} ^ dzb{1}`` summed over basis elements."""
    if not w._terms:
        return "0"
    parts = []
    for slots in sorted(w._terms):
        dz, dzb, sign = _split_layout(slots)
        c = w._terms[slots] if sign > 0 else -w._terms[slots]
        basis = []
        if dz:
            basis.append("dz{" + ",".join(str(j + 1) for j in dz) + "}")
        if dzb:
            basis.append("dzb{" + ",".join(str(j + 1) for j in dzb) + "}")
        label = " ^ ".join(basis) if basis else "1"
        parts.append(f"({c}) * {label}")
    return " + ".join(parts)


# ---------------------------------------------------------------- operators


def _as_form(f) -> PForm:
    if isinstance(f, PForm):
        return f
    return PForm._raw(f.n, {(): f} if f else {})


def _apply_d(w: PForm, conjugated: bool) -> PForm:
    n = w.n
    out = PForm._raw(n, {})
    for slots, c in w._terms.items():
        for j in range(n):
            dc = diff(c, j, conjugated)
            if not dc:
                continue
            one = PForm._raw(n, {(2 * j + (1 if conjugated else 0),): dc})
            out = out + one.wedge(PForm._raw(n, {slots: HPoly.const(n, 1)}))
    return out


def del_(f) -> PForm:
    """The holomorphic differential of a function or form."""
    return _apply_d(_as_form(f), False)


def delbar(f) -> PForm:
    return _apply_d(_as_form(f), True)


def deldelbar(f) -> PForm:
    """del(delbar f) = sum_{i,j} f_{z_i zb_j} dz_i ^ dzb_j."""
    return del_(delbar(f))


def wedge(*forms: PForm) -> PForm:
    out = forms[0]
    for w in forms[1:]:
        out = out.wedge(w)
    return out


def power(w: PForm, k: int) -> PForm:
    out = PForm._raw(w.n, {(): HPoly.const(w.n, 1)})
    for _ in range(k):
        out = out.wedge(w)
    return out


# ---------------------------------------------------------------- Levi data


def _check_q(r: HPoly, q: int):
    if not 1 <= q < r.n:
        raise ValueError(f"q must satisfy 1 <= q < n (got q={q}, n={r.n})")


@lru_cache(maxsize=256)
def levi_wedge(r: HPoly, q: int, j: int = 0) -> PForm:
    """dr ^ dbar r ^ (ddbar r)^(n-q-j) (the Levi factor of the Kohn wedges)."""
    base = del_(r).wedge(delbar(r))
    return base.wedge(power(deldelbar(r), r.n - q - j))


def wedge_coefficients(r: HPoly, q: int) -> list[HPoly]:
    """All nonzero coefficients of dr ^ dbar r ^ (ddbar r)^(n-q)."""
    _check_q(r, q)
    return levi_wedge(r, q).coefficients()


def default_pivot(r: HPoly, x=None) -> int:
    """Pivot coordinate for the tangential frame.

    With a point, the last index with r_{z_j}(x) != 0.  Without one, the last
    index where r_{z_j} is a nonzero constant, else the last one not
    identically zero.
    """
    n = r.n
    grads = [diff(r, j) for j in range(n)]
    if x is not None:
        x = as_point(x, n)
        for j in reversed(range(n)):
            if evaluate(grads[j], x):
                return j
        raise ValueError("dr vanishes at the point; no tangential frame")
    for j in reversed(range(n)):
        if grads[j].is_constant() and grads[j]:
            return j
    for j in reversed(range(n)):
        if grads[j]:
            return j
    raise ValueError("r has no holomorphic gradient")


def _paired_sign(n: int, pivot: int, I: Sequence[int], J: Sequence[int]):
    """Slots and sign of dz_p ^ dzb_p ^ dz_i1 ^ dzb_j1 ^ ... in canonical order."""
    w = PForm.basis(n, [pivot], [pivot])
    for i, j in zip(I, J):
        w = w.wedge(PForm.basis(n, [i], [j]))
    ((slots, c),) = w._terms.items()
    return slots, c.constant_term().re


def levi_minors(r: HPoly, q: int, pivot: int | None = None) -> list[HPoly]:
    """Levi minors read off dr ^ dbar r ^ (ddbar r)^(n-q).

    Returns the C(n-1, n-q)^2 coefficients on the basis elements that contain
    dz_pivot ^ dzb_pivot, each sign-normalized to the paired order.  Each
    entry equals (n-q)! |r_pivot|^(2-2(n-q)) times the matching (n-q)-minor
    of the frame Levi matrix, so for q = 1 this is a single polynomial.
    """
    _check_q(r, q)
    n = r.n
    k = n - q
    if pivot is None:
        pivot = default_pivot(r)
    W = levi_wedge(r, q)
    others = [j for j in range(n) if j != pivot]
    out = []
    for I in combinations(others, k):
        for J in combinations(others, k):
            slots, sign = _paired_sign(n, pivot, I, J)
            c = W.coefficient(slots)
            out.append(c if sign > 0 else -c)
    return out


def jacobian_wedge(r: HPoly, fs: Sequence[HPoly], q: int) -> list[HPoly]:
    """Nonzero coefficients of df_1 ^ ... ^ df_j ^ dr ^ dbar r ^ (ddbar r)^(n-q-j)."""
    _check_q(r, q)
    j = len(fs)
    if j > r.n - q:
        raise ValueError(f"at most n-q = {r.n - q} functions may be wedged (got {j})")
    if j == 0:
        return levi_wedge(r, q).coefficients()
    w = del_(fs[0])
    for f in fs[1:]:
        w = w.wedge(del_(f))
        if w.is_zero():
            return []
    return w.wedge(levi_wedge(r, q, j)).coefficients()


def hessian(r: HPoly) -> list[list[HPoly]]:
    """Complex Hessian entries r_{z_i zb_j}."""
    n = r.n
    return [[diff(diff(r, i), j, True) for j in range(n)] for i in range(n)]


def levi_pairing(H: Sequence[Sequence[HPoly]], X: VectorField10, Y: VectorField10) -> HPoly:
    """ddbar r (X, conj Y) = sum_{a,b} X^a r_{a bbar} conj(Y^b)."""
    n = X.n
    out = HPoly.zero(n)
    ybar = [conj(c) for c in Y.coeffs]
    for a in range(n):
        if not X.coeffs[a]:
            continue
        for b in range(n):
            if H[a][b] and ybar[b]:
                out = out + X.coeffs[a] * H[a][b] * ybar[b]
    return out


@dataclass(frozen=True)
class LeviMatrix:
    """Levi form entries a_ij = ddbar r(L_i, conj L_j) on a tangential frame."""

    entries: tuple
    frame: tuple

    @property
    def size(self) -> int:
        return len(self.frame)

    def at(self, x) -> list[list]:
        return [[evaluate(e, x) for e in row] for row in self.entries]

    def is_hermitian(self) -> bool:
        m = self.size
        return all(self.entries[i][j] == conj(self.entries[j][i]) for i in range(m) for j in range(m))

    def to_json(self) -> dict:
        return {
            "entries": [[str(e) for e in row] for row in self.entries],
            "frame": [f.to_json() for f in self.frame],
        }


def matrix_on_frame(r: HPoly, frame: Sequence[VectorField10]) -> LeviMatrix:
    H = hessian(r)
    entries = tuple(tuple(levi_pairing(H, X, Y) for Y in frame) for X in frame)
    return LeviMatrix(entries, tuple(frame))


def levi_matrix(r: HPoly, x=None, pivot: int | None = None) -> LeviMatrix:
    """Levi matrix on the frame r_{z_p} d_j - r_{z_j} d_p (j != p)."""
    if pivot is None:
        pivot = default_pivot(r, x)
    return matrix_on_frame(r, tangential_frame(r, pivot))


def _check_smooth(r: HPoly, x):
    if all(not evaluate(diff(r, j), x) for j in range(r.n)):
        raise ValueError("dr vanishes at the point; not a smooth boundary point")


def levi_rank_at(r: HPoly, x) -> int:
    """Rank of the Levi form restricted to ker dr at ``x`` (exact elimination)."""
    x = as_point(x, r.n)
    _check_smooth(r, x)
    L = levi_matrix(r, x)
    return _linalg.rank(L.at(x))


def levi_signature_definite(r: HPoly, x) -> bool:
    """True iff the Levi form on ker dr at x is positive or negative definite."""
    x = as_point(x, r.n)
    _check_smooth(r, x)
    m = levi_matrix(r, x).at(x)
    size = len(m)
    minors = [_linalg.det([row[:k] for row in m[:k]]).re for k in range(1, size + 1)]
    if all(v > 0 for v in minors):
        return True
    return all((v < 0) if k % 2 == 0 else (v > 0) for k, v in enumerate(minors))


@dataclass(frozen=True)
class DiagonalizedFrame:
    matrix: LeviMatrix
    numerators: tuple  # per cleared field: Cramer numerators c_l (before division)
    denominator: HPoly  # det of the leading block
    certificate: bool  # off-block entries vanish identically


def _transform(L: LeviMatrix, T: Sequence[Sequence[HPoly]], frame) -> LeviMatrix:
    """Entries of the frame sum_s T[i][s] L_s from the old entries (sesquilinear)."""
    m = L.size
    n = frame[0].n
    Tbar = [[conj(v) for v in row] for row in T]
    entries = []
    for i in range(m):
        row = []
        for j in range(m):
            acc = HPoly.zero(n)
            for s in range(m):
                if not T[i][s]:
                    continue
                for t in range(m):
                    if Tbar[j][t] and L.entries[s][t]:
                        acc = acc + T[i][s] * L.entries[s][t] * Tbar[j][t]
            row.append(acc)
        entries.append(tuple(row))
    return LeviMatrix(tuple(entries), tuple(frame))


def diagonalize_frame(L: LeviMatrix, p: int, x) -> DiagonalizedFrame:
    """Clear the entries (i, k), i < p <= k, by Cramer's rule.

    The column system A c = -a_k (A the leading p x p block) is solved over
    the fraction field; denominators are cleared by scaling with det A.  The
    new field k is conj(det A) L_k + sum_l conj(N_l) L_l where c_l = N_l/det A.
    """
    m = L.size
    n = L.frame[0].n if L.frame else 1
    if p == 0 or p >= m:
        return DiagonalizedFrame(L, (), HPoly.const(n, 1), True)
    A = [[L.entries[i][j] for j in range(p)] for i in range(p)]
    detA = _linalg.poly_det(A, n)
    if not evaluate(detA, x):
        raise ValueError("leading Levi block is singular at the point")
    frame = list(L.frame[:p])
    T = [[HPoly.const(n, 1 if i == j else 0) for j in range(m)] for i in range(p)]
    numerators = []
    for k in range(p, m):
        rhs = [-L.entries[i][k] for i in range(p)]
        nums = []
        for col in range(p):
            Ak = [[rhs[i] if j == col else A[i][j] for j in range(p)] for i in range(p)]
            nums.append(_linalg.poly_det(Ak, n))
        numerators.append(tuple(nums))
        row = [HPoly.zero(n) for _ in range(m)]
        row[k] = conj(detA)
        for col in range(p):
            row[col] = conj(nums[col])
        T.append(row)
        cs = [conj(detA) * c for c in L.frame[k].coeffs]
        for col in range(p):
            cs = [a + conj(nums[col]) * b for a, b in zip(cs, L.frame[col].coeffs)]
        frame.append(VectorField10(tuple(cs), L.frame[k].tag, L.frame[k].index))
    newL = _transform(L, T, frame)
    ok = all(newL.entries[i][k].is_zero() and newL.entries[k][i].is_zero() for i in range(p) for k in range(p, m))
    return DiagonalizedFrame(newL, tuple(numerators), detA, ok)


# ---------------------------------------------------------------- evaluation


def evaluate_on(w: PForm, x, vectors10: Sequence[Sequence], vectors01: Sequence[Sequence]):
    """Value of the (a, b)-form ``w`` at ``x`` on (1,0) vectors then (0,1) vectors.

    Vectors are coordinate tuples (for a (0,1) vector: its d/dzb components).
    Uses the determinant convention (dz_I ^ dzb_J)(V, W) = det(V_I) det(W_J).
    """
    x = as_point(x, w.n)
    a, b = len(vectors10), len(vectors01)
    total = 0
    for slots, c in w._terms.items():
        dz, dzb, sign = _split_layout(slots)
        if len(dz) != a or len(dzb) != b:
            continue
        d1 = _linalg.det([[v[i] for i in dz] for v in vectors10]) if a else 1
        if not d1:
            continue
        d2 = _linalg.det([[v[j] for j in dzb] for v in vectors01]) if b else 1
        total = evaluate(c, x) * d1 * d2 * sign + total
    return total


def factorial(k: int) -> int:
    return math.factorial(k)


__all__ = [
    "PForm",
    "LeviMatrix",
    "DiagonalizedFrame",
    "del_",
    "delbar",
    "deldelbar",
    "wedge",
    "power",
    "levi_wedge",
    "wedge_coefficients",
    "levi_minors",
    "jacobian_wedge",
    "levi_rank_at",
    "levi_matrix",
    "matrix_on_frame",
    "diagonalize_frame",
    "default_pivot",
    "evaluate_on",
    "format_form",
    "hessian",
    "levi_pairing",
    "levi_signature_definite",
]
