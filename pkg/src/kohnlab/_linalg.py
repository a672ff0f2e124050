"""Small exact linear algebra over Gaussian rationals and polynomial rings."""

from __future__ import annotations

from itertools import permutations
from typing import Sequence

from .poly import ONE, ZERO, GaussianRational, HPoly


def rank(rows: Sequence[Sequence[GaussianRational]]) -> int:
    m = [list(r) for r in rows]
    if not m:
        return 0
    ncols = len(m[0])
    rk = 0
    for col in range(ncols):
        piv = next((i for i in range(rk, len(m)) if m[i][col]), None)
        if piv is None:
            continue
        m[rk], m[piv] = m[piv], m[rk]
        inv = ONE / m[rk][col]
        for i in range(len(m)):
            if i != rk and m[i][col]:
                factor = m[i][col] * inv
                m[i] = [a - factor * b for a, b in zip(m[i], m[rk])]
        rk += 1
        if rk == len(m):
            break
    return rk


def det(rows: Sequence[Sequence[GaussianRational]]) -> GaussianRational:
    m = [list(r) for r in rows]
    size = len(m)
    out = ONE
    for col in range(size):
        piv = next((i for i in range(col, size) if m[i][col]), None)
        if piv is None:
            return ZERO
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            out = -out
        out = out * m[col][col]
        inv = ONE / m[col][col]
        for i in range(col + 1, size):
            if m[i][col]:
                factor = m[i][col] * inv
                m[i] = [a - factor * b for a, b in zip(m[i], m[col])]
    return out


def _perm_sign(p: Sequence[int]) -> int:
    sign = 1
    seen = [False] * len(p)
    for i in range(len(p)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = p[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def poly_det(rows: Sequence[Sequence[HPoly]], n: int) -> HPoly:
    """Determinant of a small square matrix of polynomials (Leibniz expansion)."""
    size = len(rows)
    if size == 0:
        return HPoly.const(n, 1)
    total = HPoly.zero(n)
    for p in permutations(range(size)):
        term = HPoly.const(n, _perm_sign(p))
        for i, j in enumerate(p):
            term = term * rows[i][j]
            if not term:
                break
        total = total + term
    return total


def nonsingular_principal_subset(m: Sequence[Sequence[GaussianRational]], p: int):
    """Lexicographically first index set S of size p with det m[S,S] != 0."""
    from itertools import combinations

    for s in combinations(range(len(m)), p):
        if det([[m[i][j] for j in s] for i in s]):
            return s
    return None
