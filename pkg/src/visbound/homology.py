"""Simplicial homology with integer, rational and F_p coefficients."""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Optional

import mpmath

from .constants import ConstantsLedger
from .snf import log_torsion, matmul, rank_mod_p_sparse, snf_sparse


class ComplexError(ValueError):
    pass


class SimplicialComplex:
    """Finite abstract simplicial complex, closed under taking faces.

    Simplices are strictly increasing vertex tuples; the boundary orientation
    is the one induced by that order.
    """

    def __init__(self, simplices: Iterable[Iterable[int]] = ()):
        faces: set = set()
        for s in simplices:
            s = tuple(sorted(int(v) for v in s))
            if len(set(s)) != len(s):
                raise ComplexError(f"repeated vertex in simplex {s}")
            if not s or s in faces:
                continue
            for k in range(1, len(s) + 1):
                faces.update(itertools.combinations(s, k))
        by_dim: dict = {}
        for f in faces:
            by_dim.setdefault(len(f) - 1, []).append(f)
        self._simplices = {k: sorted(v) for k, v in by_dim.items()}
        self._index = {k: {s: i for i, s in enumerate(v)} for k, v in self._simplices.items()}

    @classmethod
    def from_json(cls, text: str) -> "SimplicialComplex":
        data = json.loads(text)
        if not isinstance(data, dict) or "simplices" not in data:
            raise ComplexError('complex JSON needs a "simplices" field')
        simplices = data["simplices"]
        if not isinstance(simplices, list) or not all(isinstance(s, list) for s in simplices):
            raise ComplexError('"simplices" must be a list of vertex lists')
        return cls(simplices)

    def to_json(self) -> dict:
        return {"simplices": [list(s) for s in self.maximal_simplices()]}

    @property
    def dim(self) -> int:
        return max(self._simplices, default=-1)

    def simplices(self, k: int) -> list:
        return self._simplices.get(k, [])

    def count(self, k: int) -> int:
        return len(self._simplices.get(k, ()))

    def f_vector(self) -> list:
        return [self.count(k) for k in range(self.dim + 1)]

    @property
    def vertices(self) -> list:
        return [s[0] for s in self.simplices(0)]

    def __contains__(self, s) -> bool:
        s = tuple(sorted(s))
        return s in self._index.get(len(s) - 1, {})

    def __len__(self) -> int:
        return sum(len(v) for v in self._simplices.values())

    def maximal_simplices(self) -> list:
        covered = set()
        for k in range(1, self.dim + 1):
            for t in self._simplices.get(k, ()):
                covered.update(itertools.combinations(t, k))
        return [s for k in sorted(self._simplices) for s in self._simplices[k]
                if s not in covered]

    def neighbors(self) -> dict:
        nb = {v: set() for v in self.vertices}
        for a, b in self.simplices(1):
            nb[a].add(b)
            nb[b].add(a)
        return nb

    def max_degree(self) -> int:
        return max((len(v) for v in self.neighbors().values()), default=0)

    def induced(self, vertices: Iterable[int]) -> "SimplicialComplex":
        keep = set(vertices)
        return SimplicialComplex(s for k in self._simplices for s in self._simplices[k]
                                 if keep.issuperset(s))

    def euler_characteristic(self) -> int:
        return sum((-1) ** k * self.count(k) for k in range(self.dim + 1))


def boundary_matrix(c: SimplicialComplex, k: int) -> list:
    """Integer matrix of d_k: C_k -> C_(k-1); rows (k-1)-simplices, columns k-simplices."""
    if not 1 <= k <= c.dim:
        raise ComplexError(f"boundary degree {k} out of range for a {c.dim}-complex")
    rows = c.simplices(k - 1)
    index = {s: i for i, s in enumerate(rows)}
    cols = c.simplices(k)
    M = [[0] * len(cols) for _ in rows]
    for j, s in enumerate(cols):
        for i in range(len(s)):
            M[index[s[:i] + s[i + 1:]]][j] = -1 if i % 2 else 1
    return M


def boundary_columns(c: SimplicialComplex, k: int) -> list:
    """d_k as sparse columns {row index: coefficient}, one per k-simplex."""
    if not 1 <= k <= c.dim:
        raise ComplexError(f"boundary degree {k} out of range for a {c.dim}-complex")
    index = {s: i for i, s in enumerate(c.simplices(k - 1))}
    return [{index[s[:i] + s[i + 1:]]: -1 if i % 2 else 1 for i in range(len(s))}
            for s in c.simplices(k)]


def check_chain_complex(c: SimplicialComplex) -> bool:
    for k in range(2, c.dim + 1):
        prod = matmul(boundary_matrix(c, k - 1), boundary_matrix(c, k))
        if any(any(row) for row in prod):
            return False
    return True


@dataclass(frozen=True)
class DegreeHomology:
    k: int
    betti_Q: int
    betti_mod_p: dict
    torsion: tuple
    log_torsion: float


@dataclass(frozen=True)
class HomologySummary:
    degrees: tuple = ()

    def __getitem__(self, k: int) -> DegreeHomology:
        return self.degrees[k]

    def betti(self) -> list:
        return [d.betti_Q for d in self.degrees]

    def to_json(self) -> dict:
        return {"degrees": [
            {"k": d.k, "betti_Q": d.betti_Q,
             "betti_mod_p": {str(p): b for p, b in sorted(d.betti_mod_p.items())},
             "torsion": list(d.torsion), "log_torsion": d.log_torsion}
            for d in self.degrees]}


def homology(c: SimplicialComplex, primes: Iterable[int] = (2,)) -> HomologySummary:
    primes = tuple(primes)
    top = c.dim
    if top < 0:
        return HomologySummary(())
    # d_k for k = 1..top; d_0 and d_(top+1) are zero maps
    bd = {k: boundary_columns(c, k) for k in range(1, top + 1)}
    diag = {k: snf_sparse(bd[k], c.count(k - 1)) for k in bd}
    rank = {k: sum(1 for d in diag[k] if d) for k in diag}
    rank_p = {p: {k: rank_mod_p_sparse(bd[k], c.count(k - 1), p) for k in bd} for p in primes}
    out = []
    for k in range(top + 1):
        nk = c.count(k)
        torsion = tuple(d for d in diag.get(k + 1, ()) if d > 1)
        out.append(DegreeHomology(
            k=k,
            betti_Q=nk - rank.get(k, 0) - rank.get(k + 1, 0),
            betti_mod_p={p: nk - rank_p[p].get(k, 0) - rank_p[p].get(k + 1, 0) for p in primes},
            torsion=torsion,
            log_torsion=log_torsion(torsion),
        ))
    return HomologySummary(tuple(out))


@dataclass
class CountReport:
    passed: bool
    first_violation: Optional[int]
    rows: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {"passed": self.passed, "first_violation": self.first_violation, "rows": self.rows}


def simplex_count_check(c: SimplicialComplex, A: float, B: float) -> CountReport:
    """Check #k-simplices <= A^k B in every degree."""
    rows, first = [], None
    for k in range(c.dim + 1):
        bound = mpmath.mpf(A) ** k * mpmath.mpf(B)
        ok = bool(c.count(k) <= bound)
        rows.append({"k": k, "count": c.count(k), "bound": mpmath.nstr(bound, 12), "ok": ok})
        if not ok and first is None:
            first = k
    return CountReport(first is None, first, rows)


@dataclass
class BoundsReport:
    passed: bool
    rows: list = field(default_factory=list)

    def failures(self) -> list:
        return [r for r in self.rows if r["betti_ok"] is False or r["torsion_ok"] is False]

    def to_json(self) -> dict:
        return {"passed": self.passed, "rows": self.rows}


def bounds_report(summary: HomologySummary, ledger: ConstantsLedger, vol: float) -> BoundsReport:
    """Compare Betti numbers with E(k, n) vol and log torsion with F vol.

    The Betti number compared is the largest over all computed coefficient
    fields.  For n = 3 the degree-1 torsion bound does not hold in general,
    so that row is marked excluded and never counted as a pass or fail.
    """
    if vol <= 0:
        raise ValueError("volume must be positive")
    rows, passed = [], True
    F_vol = ledger.F_torsion * vol
    for d in summary.degrees:
        b = max([d.betti_Q, *d.betti_mod_p.values()])
        E_vol = ledger.E_of_k(d.k) * vol
        betti_ok = bool(b <= E_vol)
        excluded = ledger.n == 3 and d.k == 1
        torsion_ok = None if excluded else bool(mpmath.mpf(d.log_torsion) <= F_vol)
        rows.append({
            "k": d.k, "betti": b, "E_vol": mpmath.nstr(E_vol, 12),
            "betti_ok": betti_ok, "log_torsion": d.log_torsion,
            "F_vol": mpmath.nstr(F_vol, 12), "torsion_ok": torsion_ok,
            "note": "excluded for n = 3, k = 1" if excluded else "",
        })
        passed = passed and betti_ok and torsion_ok is not False
    return BoundsReport(passed, rows)


def hadamard_torsion_bound(c: SimplicialComplex, k: int) -> float:
    """(#(k+1)-simplices) ln sqrt(k+2): bound on log |tors H_k| from column norms."""
    return c.count(k + 1) * math.log(math.sqrt(k + 2))
