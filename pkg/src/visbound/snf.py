"""Smith normal form over the integers and ranks over prime fields.

Matrices are lists of lists of Python ints, so arithmetic is exact no matter
how large entries grow.  Elimination pivots on the entry of least absolute
value, which keeps intermediate growth small on boundary matrices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np


@dataclass(frozen=True)
class SnfResult:
    diagonal: tuple
    rank: int
    U: Optional[list] = None
    V: Optional[list] = None

    @property
    def torsion(self) -> tuple:
        return tuple(d for d in self.diagonal if d > 1)


def _copy(m) -> list:
    return [[int(v) for v in row] for row in m]


def identity(n: int) -> list:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def matmul(A, B) -> list:
    if not A:
        return []
    cols = list(zip(*B)) if B else []
    return [[sum(a * b for a, b in zip(row, col)) for col in cols] for row in A]


def diag_matrix(diagonal, shape) -> list:
    m, n = shape
    out = [[0] * n for _ in range(m)]
    for i, d in enumerate(diagonal):
        out[i][i] = d
    return out


def snf(matrix: Sequence[Sequence[int]], transforms: bool = False) -> SnfResult:
    """Smith normal form ``U A V = diag(d_1, ..., d_r, 0, ...)`` with d_i | d_(i+1).

    With ``transforms=True`` the unimodular U and V are returned as well.
    """
    A = _copy(matrix)
    m = len(A)
    n = len(A[0]) if m else 0
    U = identity(m) if transforms else None
    V = identity(n) if transforms else None

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        if U is not None:
            U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in A:
            row[i], row[j] = row[j], row[i]
        if V is not None:
            for row in V:
                row[i], row[j] = row[j], row[i]

    def add_row(dst, src, q):  # row dst -= q * row src
        rs, rd = A[src], A[dst]
        for k in range(n):
            if rs[k]:
                rd[k] -= q * rs[k]
        if U is not None:
            us, ud = U[src], U[dst]
            for k in range(m):
                if us[k]:
                    ud[k] -= q * us[k]

    def add_col(dst, src, q):  # col dst -= q * col src
        for row in A:
            if row[src]:
                row[dst] -= q * row[src]
        if V is not None:
            for row in V:
                if row[src]:
                    row[dst] -= q * row[src]

    diagonal = []
    t = 0
    while t < min(m, n):
        # pivot: least nonzero |entry| in the trailing block
        best = None
        for i in range(t, m):
            row = A[i]
            for j in range(t, n):
                v = row[j]
                if v and (best is None or abs(v) < best[0]):
                    best = (abs(v), i, j)
                    if best[0] == 1:
                        break
            if best is not None and best[0] == 1:
                break
        if best is None:
            break
        _, i, j = best
        swap_rows(t, i)
        swap_cols(t, j)

        while True:
            p = A[t][t]
            dirty = False
            for i in range(t + 1, m):
                if A[i][t]:
                    add_row(i, t, A[i][t] // p)
                    dirty = dirty or A[i][t] != 0
            for j in range(t + 1, n):
                if A[t][j]:
                    add_col(j, t, A[t][j] // p)
                    dirty = dirty or A[t][j] != 0
            if dirty:
                # remainders smaller than the pivot remain: move the smallest in
                cand = [(abs(A[i][t]), i, t) for i in range(t + 1, m) if A[i][t]]
                cand += [(abs(A[t][j]), t, j) for j in range(t + 1, n) if A[t][j]]
                _, i, j = min(cand)
                swap_rows(t, i)
                swap_cols(t, j)
                continue
            # divisibility repair
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                        if A[i][j] % p), None)
            if bad is None:
                break
            add_row(t, bad[0], -1)
        if A[t][t] < 0:
            A[t] = [-v for v in A[t]]
            if U is not None:
                U[t] = [-v for v in U[t]]
        diagonal.append(A[t][t])
        t += 1

    rank = len(diagonal)
    diagonal += [0] * (min(m, n) - rank)
    return SnfResult(tuple(diagonal), rank, U, V)


def is_smith_chain(diagonal) -> bool:
    """Nonnegative, zeros trailing, each nonzero entry dividing the next."""
    d = list(diagonal)
    if any(v < 0 for v in d):
        return False
    k = next((i for i, v in enumerate(d) if v == 0), len(d))
    if any(d[k:]):
        return False
    return all(b % a == 0 for a, b in zip(d[:k], d[1:k]))


def rank_mod_p(matrix, p: int) -> int:
    """Rank over the prime field F_p by Gaussian elimination."""
    M = np.array(matrix, dtype=np.int64).reshape(len(matrix), -1) if len(matrix) else np.zeros((0, 0), np.int64)
    M %= p
    rows, cols = M.shape
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(M[r:, c])[0]
        if nz.size == 0:
            continue
        piv = r + nz[0]
        if piv != r:
            M[[r, piv]] = M[[piv, r]]
        M[r] = (M[r] * pow(int(M[r, c]), -1, p)) % p
        below = np.nonzero(M[r + 1:, c])[0] + r + 1
        if below.size:
            M[below] = (M[below] - np.outer(M[below, c], M[r])) % p
        r += 1
    return r


def _eliminate(columns, nrows: int, p: Optional[int] = None):
    """Sparse elimination on unit pivots.

    ``columns`` holds one {row: value} dict per column.  Over the integers
    (``p`` None) only entries +-1 are used as pivots, so each pivot splits off
    a 1 from the Smith form and leaves the Schur complement with the same
    remaining invariant factors.  Over F_p every nonzero entry is a unit.
    Returns the pivot count and the leftover columns.
    """
    cols = {}
    for j, col in enumerate(columns):
        c = {i: (v % p if p else int(v)) for i, v in col.items()}
        c = {i: v for i, v in c.items() if v}
        if c:
            cols[j] = c
    rows = [set() for _ in range(nrows)]
    for j, c in cols.items():
        for i in c:
            rows[i].add(j)

    def is_unit(v):
        return v != 0 if p else abs(v) == 1

    pivots = 0
    progress = True
    while progress:
        progress = False
        # sparse columns first to limit fill-in
        for c in sorted(cols, key=lambda j: len(cols[j])):
            col = cols.get(c)
            if col is None:
                continue
            units = [i for i, v in col.items() if is_unit(v)]
            if not units:
                continue
            r = min(units, key=lambda i: len(rows[i]))
            inv = pow(col[r], -1, p) if p else col[r]
            del cols[c]
            for i in col:
                rows[i].discard(c)
            for j in list(rows[r]):
                target = cols[j]
                f = target[r] * inv
                for i, v in col.items():
                    nv = target.get(i, 0) - f * v
                    if p:
                        nv %= p
                    if nv:
                        target[i] = nv
                        rows[i].add(j)
                    else:
                        target.pop(i, None)
                        rows[i].discard(j)
                if not target:
                    del cols[j]
            rows[r].clear()
            pivots += 1
            progress = True
    return pivots, list(cols.values())


def _dense(columns) -> list:
    used = sorted({i for c in columns for i in c})
    index = {i: k for k, i in enumerate(used)}
    M = [[0] * len(columns) for _ in used]
    for j, c in enumerate(columns):
        for i, v in c.items():
            M[index[i]][j] = v
    return M


def snf_sparse(columns, nrows: int) -> tuple:
    """Smith diagonal of a sparse matrix given as column dicts; length min(rows, cols)."""
    ones, rest = _eliminate(columns, nrows)
    core = snf(_dense(rest)).diagonal if rest else ()
    nonzero = [1] * ones + [d for d in core if d]
    return tuple(nonzero + [0] * (min(nrows, len(columns)) - len(nonzero)))


def rank_mod_p_sparse(columns, nrows: int, p: int) -> int:
    pivots, rest = _eliminate(columns, nrows, p)
    assert not rest
    return pivots


def log_torsion(diagonal) -> float:
    return sum(math.log(d) for d in diagonal if d > 1)
