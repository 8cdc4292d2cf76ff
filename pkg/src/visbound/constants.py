"""Dimension-dependent constants and the ball-volume formulas behind them.

Most budgets are astronomically large even for n = 2 (nu has hundreds of
decimal digits), so integers are kept exact and the real-valued constants
C, E(k, n) and F are ``mpmath.mpf``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Optional

import mpmath
from scipy import integrate

mpmath.mp.dps = 40

DEFAULT_MARGULIS_EPS = {2: 0.32}
DEFAULT_MARGULIS_INDEX = {2: 100}


class LedgerError(ValueError):
    pass


def euclidean_ball_volume(rho: float, n: int) -> float:
    return math.pi ** (n / 2) / math.gamma(n / 2 + 1) * rho ** n


def sphere_area(n: int) -> float:
    """Area of the unit (n-1)-sphere in R^n."""
    return 2 * math.pi ** (n / 2) / math.gamma(n / 2)


def hyperbolic_ball_volume(rho: float, n: int) -> float:
    """Volume of a rho-ball in the constant curvature -1 space of dimension n."""
    if rho < 0:
        raise LedgerError("radius must be nonnegative")
    if n == 2:
        return 4 * math.pi * math.sinh(rho / 2) ** 2
    val, _ = integrate.quad(lambda s: math.sinh(s) ** (n - 1), 0.0, rho,
                            epsabs=0.0, epsrel=1e-13)
    return sphere_area(n) * val


def N_packing(n: int, a: float, b: float) -> int:
    """Upper bound on the size of an a-discrete subset of a b-ball.

    Disjoint (a/2)-balls around the points fit in the (b + a/2)-ball, and
    balls in curvature -1 are the largest among curvatures in [-1, 0].
    """
    if a <= 0 or b <= 0:
        raise LedgerError("packing parameters must be positive")
    if a > 2 * b:
        raise LedgerError("packing bound requires a <= 2b")
    ratio = hyperbolic_ball_volume(b + a / 2, n) / hyperbolic_ball_volume(a / 2, n)
    return math.ceil(ratio - 1e-12 * ratio)


def refinement_budget(n: int, kappa: int, lam: int) -> tuple[int, int]:
    """(nu0, nu) = (3^n (4 kappa + 1)^(n kappa), lam 2^lam nu0)."""
    nu0 = 3 ** n * (4 * kappa + 1) ** (n * kappa)
    return nu0, lam * 2 ** lam * nu0


@dataclass(frozen=True)
class ConstantsLedger:
    n: int
    margulis_eps: float
    margulis_index: int
    eps: float
    delta: float
    r: float
    rho: float
    kappa: int
    lam: int
    nu0: int
    nu: int
    C_cover: mpmath.mpf
    D_degree: int
    F_torsion: mpmath.mpf
    component_C: float = field(default=0.0)

    def E_of_k(self, k: int) -> mpmath.mpf:
        """Betti-number constant E(k, n) = (D^(k-1) + D^k + 1) C."""
        D = mpmath.mpf(self.D_degree)
        return (D ** (k - 1) + D ** k + 1) * self.C_cover

    def to_json(self) -> dict:
        out = {}
        for k, v in asdict(self).items():
            out[k] = mpmath.nstr(v, 15) if isinstance(v, mpmath.mpf) else v
        out["E_of_k"] = {str(k): mpmath.nstr(self.E_of_k(k), 15) for k in range(self.n + 1)}
        out["F_torsion_note"] = "method-derived: Hadamard bound, no explicit source constant"
        return out

    @classmethod
    def from_json(cls, data: dict) -> "ConstantsLedger":
        """Rebuild from a dump, checking that the stored values match the rebuild."""
        if not isinstance(data, dict):
            raise LedgerError("ledger JSON must be an object")
        for key in ("n", "margulis_eps", "margulis_index", "kappa", "lam"):
            if key not in data:
                raise LedgerError(f"ledger JSON is missing field {key!r}")
        try:
            ledger = build_ledger(int(data["n"]), float(data["margulis_eps"]),
                                  int(data["margulis_index"]),
                                  kappa=int(data["kappa"]), lam=int(data["lam"]))
        except (TypeError, ValueError) as exc:
            raise LedgerError(f"ledger JSON has a malformed field: {exc}") from None
        for key in ("nu0", "nu", "D_degree"):
            if key in data and int(data[key]) != getattr(ledger, key):
                raise LedgerError(f"ledger field {key!r} does not match its rebuild")
        return ledger


def torsion_constant(n: int, C: mpmath.mpf, D: int) -> mpmath.mpf:
    """max_k D^(k+1) C ln sqrt(k+2) over degrees k = 0..n (Hadamard bound)."""
    return max(mpmath.mpf(D) ** (k + 1) * C * mpmath.log(mpmath.sqrt(k + 2))
               for k in range(n + 1))


def build_ledger(n: int = 2, margulis_eps: Optional[float] = None,
                 margulis_index: Optional[int] = None, *,
                 kappa: Optional[int] = None, lam: Optional[int] = None) -> ConstantsLedger:
    """Derive every constant from the Margulis constant of dimension n.

    ``kappa`` and ``lam`` default to the packing bounds N(n, eps, eps(n)) and
    N(n, r/2, 2r); passing them overrides the derived values.
    """
    if margulis_eps is None:
        margulis_eps = DEFAULT_MARGULIS_EPS.get(n)
        if margulis_eps is None:
            raise LedgerError(f"no default Margulis constant for n = {n}")
    if margulis_index is None:
        margulis_index = DEFAULT_MARGULIS_INDEX.get(n, 1)
    if n < 2 or not margulis_eps > 0 or margulis_index < 1:
        raise LedgerError("need n >= 2, margulis_eps > 0, margulis_index >= 1")
    eps = margulis_eps / 4
    delta = margulis_eps / 8
    r = delta / 4
    rho = min(eps / 2, delta / 4)
    if kappa is None:
        kappa = N_packing(n, eps, margulis_eps)
    if lam is None:
        lam = N_packing(n, r / 2, 2 * r)
    if kappa < 1 or lam < 1:
        raise LedgerError("kappa and lambda must be positive integers")
    nu0, nu = refinement_budget(n, kappa, lam)
    C = mpmath.mpf(nu) / mpmath.mpf(euclidean_ball_volume(r / 4, n))
    D = nu * N_packing(n, r / 2, 2 * r)
    return ConstantsLedger(
        n=n, margulis_eps=margulis_eps, margulis_index=margulis_index,
        eps=eps, delta=delta, r=r, rho=rho, kappa=int(kappa), lam=int(lam),
        nu0=nu0, nu=nu, C_cover=C, D_degree=D, F_torsion=torsion_constant(n, C, D),
        component_C=1.0 / euclidean_ball_volume(rho, n),
    )


def complexity_constants(ledger: ConstantsLedger) -> tuple[mpmath.mpf, int]:
    """(C, D) with C = nu / Vol(B_{r/4}) in R^n and D = nu N(n, r/2, 2r)."""
    C = mpmath.mpf(ledger.nu) / mpmath.mpf(euclidean_ball_volume(ledger.r / 4, ledger.n))
    return C, ledger.nu * N_packing(ledger.n, ledger.r / 2, 2 * ledger.r)
