"""Sparse exact linear algebra over any field whose elements support
``+ - * /`` and ``is_zero`` (RatFunc) or are Fractions.

Rows are dicts {column: value}.  Pivots are always chosen at the lowest
available column and, within a column, at the first remaining row, so every
result is deterministic.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .coeffs import RatFunc, random_point, specialize


def _nz(x) -> bool:
    return not x.is_zero() if isinstance(x, RatFunc) else x != 0


def _clean(row: dict) -> dict:
    return {c: v for c, v in row.items() if _nz(v)}


def rref(rows: Sequence[dict]) -> tuple[list[dict], list[int]]:
    """Reduced row echelon form; returns (nonzero rows, pivot columns)."""
    work = [_clean(r) for r in rows]
    work = [r for r in work if r]
    pivots: list[int] = []
    done: list[dict] = []
    while work:
        col = min(min(r) for r in work)
        idx = next(i for i, r in enumerate(work) if col in r)
        prow = work.pop(idx)
        inv = 1 / prow[col] if isinstance(prow[col], RatFunc) else Fraction(1) / prow[col]
        prow = {c: v * inv for c, v in prow.items()}
        prow[col] = type(inv)(1) if not isinstance(inv, RatFunc) else RatFunc(1)
        nxt = []
        for r in work:
            if col in r:
                f = r[col]
                r = dict(r)
                for c, v in prow.items():
                    r[c] = r[c] - f * v if c in r else -(f * v)
                r = _clean(r)
            if r:
                nxt.append(r)
        work = nxt
        for i, r in enumerate(done):
            if col in r:
                f = r[col]
                r = dict(r)
                for c, v in prow.items():
                    r[c] = r[c] - f * v if c in r else -(f * v)
                done[i] = _clean(r)
        done.append(prow)
        pivots.append(col)
    order = sorted(range(len(pivots)), key=lambda i: pivots[i])
    return [done[i] for i in order], [pivots[i] for i in order]


def rank(rows: Sequence[dict]) -> int:
    return len(rref(rows)[1])


def nullspace(rows: Sequence[dict], ncols: int) -> list[dict]:
    """Basis of {x : rows . x = 0}, itself in reduced echelon form."""
    red, piv = rref(rows)
    pset = set(piv)
    one = RatFunc(1)
    basis = []
    for f in range(ncols):
        if f in pset:
            continue
        vec = {f: one}
        for r, p in zip(red, piv):
            if f in r:
                vec[p] = -r[f]
        basis.append(vec)
    if not basis:
        return []
    # re-echelonize so each vector starts with 1 at its lowest index
    return rref(basis)[0]


def solve(rows: Sequence[dict], rhs: Sequence, ncols: int) -> dict:
    """One solution x of rows . x = rhs; raises ValueError if inconsistent."""
    aug = []
    for r, b in zip(rows, rhs):
        r = dict(r)
        if _nz(RatFunc.coerce(b)):
            r[ncols] = RatFunc.coerce(b)
        aug.append(r)
    red, piv = rref(aug)
    if ncols in piv:
        raise ValueError("inconsistent linear system")
    return {p: r.get(ncols, RatFunc(0)) for r, p in zip(red, piv) if _nz(r.get(ncols, RatFunc(0)))}


def apply(rows: Sequence[dict], vec: dict) -> list:
    out = []
    for r in rows:
        acc = RatFunc(0)
        for c, v in r.items():
            if c in vec:
                acc = acc + v * vec[c]
        out.append(acc)
    return out


def det(matrix: Sequence[Sequence[RatFunc]]) -> RatFunc:
    """Determinant by elimination (dense input)."""
    n = len(matrix)
    a = [[RatFunc.coerce(x) for x in row] for row in matrix]
    out = RatFunc(1)
    for i in range(n):
        p = next((r for r in range(i, n) if not a[r][i].is_zero()), None)
        if p is None:
            return RatFunc(0)
        if p != i:
            a[i], a[p] = a[p], a[i]
            out = -out
        out = out * a[i][i]
        inv = a[i][i].inverse()
        for r in range(i + 1, n):
            if a[r][i].is_zero():
                continue
            f = a[r][i] * inv
            a[r] = [a[r][c] - f * a[i][c] for c in range(n)]
    return out


def inverse(matrix: Sequence[Sequence[RatFunc]]) -> list[list[RatFunc]]:
    n = len(matrix)
    rows = []
    for i, row in enumerate(matrix):
        r = {j: RatFunc.coerce(x) for j, x in enumerate(row)}
        r[n + i] = RatFunc(1)
        rows.append(r)
    red, piv = rref(rows)
    if piv[:n] != list(range(n)) or len(piv) != n:
        raise ZeroDivisionError("singular matrix")
    return [[r.get(n + j, RatFunc(0)) for j in range(n)] for r in red]


def matmul(a, b):
    return [[sum((a[i][k] * b[k][j] for k in range(len(b))), RatFunc(0))
             for j in range(len(b[0]))] for i in range(len(a))]


def specialized_rank(rows: Sequence[dict], seed: int = 0,
                     point: dict | None = None) -> int:
    """Rank after mapping every variable to a random rational.

    This is a lower bound for the exact rank and equals it away from a
    proper algebraic subset of points.
    """
    variables = set()
    for r in rows:
        for v in r.values():
            variables.update(RatFunc.coerce(v).variables)
    point = point or random_point(variables, seed)
    frows = [{c: specialize(RatFunc.coerce(v), point) for c, v in r.items()} for r in rows]
    return rank(frows)


def compute_rank(rows: Sequence[dict], mode: str = "exact", seed: int = 0) -> int:
    if mode == "exact":
        return rank(rows)
    if mode == "random":
        return specialized_rank(rows, seed)
    raise ValueError(f"unknown rank mode {mode!r}")
