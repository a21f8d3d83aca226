"""External attractive potentials V >= 0 and numerical checks of (V1)-(V4).

The hypotheses are asymptotic statements; the checks below replace them
with finite-sample proxies on a given grid:

* (V1) continuity on R^3 minus the origin: catalogue metadata, plus
  finiteness of the sampled values;
* (V2) V in L^{3/2} of the unit ball: log-grid quadrature plus a power-law
  extrapolation of the piece next to the origin, finite iff that piece
  decays;
* (V3) V -> 0 at infinity: sup of V on the outer 10% of nodes is below
  ``tol_v3 * V(1)``, or shrinks by ``growth_factor`` when r_max is doubled;
* (V4) r^2 V(r) -> infinity: the minimum of r^2 V over the outer 10% of
  nodes grows by at least ``growth_factor`` when r_max is doubled.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from .grid import RadialGrid, _rule

__all__ = [
    "Potential",
    "HypothesisReport",
    "coulomb",
    "power_law",
    "yukawa",
    "zero_potential",
    "tabulated",
    "check_hypotheses",
    "make_potential",
]

TOL_V3 = 1e-3
GROWTH_FACTOR = 1.5


@dataclass(frozen=True)
class Potential:
    eval: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    label: str
    singular_exponent: float
    decay_class: str
    params: dict = field(default_factory=dict)
    continuous: bool = True

    def __call__(self, r):
        return self.eval(np.asarray(r, dtype=float))

    def on(self, grid: RadialGrid) -> np.ndarray:
        v = self.eval(grid.nodes)
        return np.broadcast_to(np.asarray(v, dtype=float), grid.nodes.shape).copy()

    def scaled(self, factor: float) -> "Potential":
        f = self.eval
        return Potential(lambda r: factor * f(r), f"{factor:g}*{self.label}",
                         self.singular_exponent, self.decay_class,
                         {**self.params, "factor": factor}, self.continuous)


def coulomb(Z: float = 1.0) -> Potential:
    """V(r) = Z / r."""
    if not Z > 0:
        raise ValueError("Coulomb charge Z must be positive")
    Z = float(Z)
    return Potential(lambda r: Z / r, f"coulomb(Z={Z:g})", 1.0, "coulomb_like", {"Z": Z})


def power_law(Z: float = 1.0, alpha: float = 1.0) -> Potential:
    """V(r) = Z r^{-alpha} with 0 < alpha < 2."""
    if not Z > 0:
        raise ValueError("power-law strength Z must be positive")
    if not 0 < alpha < 2:
        raise ValueError("power-law exponent must lie in (0, 2)")
    Z, alpha = float(Z), float(alpha)
    return Potential(lambda r: Z * r ** (-alpha), f"power_law(Z={Z:g},alpha={alpha:g})",
                     alpha, "coulomb_like" if alpha == 1 else "other",
                     {"Z": Z, "alpha": alpha})


def yukawa(Z: float = 1.0, mu: float = 1.0) -> Potential:
    """Screened Coulomb V(r) = Z exp(-mu r) / r; violates (V4)."""
    if not (Z > 0 and mu > 0):
        raise ValueError("Yukawa parameters must be positive")
    Z, mu = float(Z), float(mu)
    return Potential(lambda r: Z * np.exp(-mu * r) / r, f"yukawa(Z={Z:g},mu={mu:g})",
                     1.0, "faster_than_r2", {"Z": Z, "mu": mu})


def zero_potential() -> Potential:
    return Potential(lambda r: np.zeros_like(r), "zero", 0.0, "compact_support")


def tabulated(r_tab, v_tab, label: str = "tabulated") -> Potential:
    """Piecewise-linear potential from samples; zero beyond the table."""
    r_tab = np.asarray(r_tab, dtype=float)
    v_tab = np.asarray(v_tab, dtype=float)
    if np.any(v_tab < 0):
        raise ValueError("potential must be non-negative")
    return Potential(lambda r: np.interp(r, r_tab, v_tab, right=0.0), label, 0.0, "other",
                     continuous=bool(np.all(np.isfinite(v_tab))))


def make_potential(name: str, **params) -> Potential:
    name = name.lower()
    if name == "coulomb":
        return coulomb(params.get("Z", 1.0))
    if name in ("power_law", "power"):
        return power_law(params.get("Z", 1.0), params.get("alpha", 1.0))
    if name == "yukawa":
        return yukawa(params.get("Z", 1.0), params.get("mu", 1.0))
    if name in ("zero", "none"):
        return zero_potential()
    raise ValueError(f"unknown potential {name!r}")


@dataclass
class HypothesisReport:
    potential: str
    v1_continuous_away_from_0: bool
    v2_l32_unit_ball: float
    v2_finite: bool
    v3_vanishes_at_infinity: bool
    v3_tail_sup: float
    v4_r2V_diverges: bool
    v4_tail_min: float
    v4_tail_min_doubled: float

    @property
    def all_pass(self) -> bool:
        return (self.v1_continuous_away_from_0 and self.v2_finite
                and self.v3_vanishes_at_infinity and self.v4_r2V_diverges)

    @property
    def failed(self) -> list[str]:
        flags = {
            "V1": self.v1_continuous_away_from_0,
            "V2": self.v2_finite,
            "V3": self.v3_vanishes_at_infinity,
            "V4": self.v4_r2V_diverges,
        }
        return [k for k, ok in flags.items() if not ok]

    def to_dict(self) -> dict:
        d = asdict(self)
        d["all_pass"] = self.all_pass
        d["failed"] = self.failed
        return d


def _l32_unit_ball(V: Potential, n: int = 2000, r_min: float = 1e-8) -> tuple[float, float]:
    """L^{3/2} norm on the unit ball and the local decay rate at the origin.

    Quadrature in s = log r of F(s) = 4 pi r^3 |V|^{3/2}; the piece below
    r_min is extrapolated as F(s_min) / kappa with kappa = dlog F / ds.
    kappa <= 0 means the integral diverges at the origin.
    """
    s = np.linspace(np.log(r_min), 0.0, n)
    delta = s[1] - s[0]
    r = np.exp(s)
    f = 4.0 * np.pi * r**3 * np.abs(V(r)) ** 1.5
    body = delta * float(np.dot(_rule(n), f))
    if f[0] == 0.0:
        return body ** (2.0 / 3.0), np.inf
    if not np.all(np.isfinite(f)) or f[1] <= 0.0:
        return np.inf, -np.inf
    kappa = (np.log(f[1]) - np.log(f[0])) / delta
    if kappa <= 1e-2:
        return np.inf, kappa
    return (body + f[0] / kappa) ** (2.0 / 3.0), kappa


def _outer(grid: RadialGrid) -> np.ndarray:
    k = max(1, grid.n // 10)
    return grid.nodes[-k:]


def check_hypotheses(V: Potential, grid: RadialGrid, tol_v3: float = TOL_V3,
                     growth_factor: float = GROWTH_FACTOR) -> HypothesisReport:
    """Evaluate finite-sample proxies for (V1)-(V4) on ``grid``."""
    vals = V.on(grid)
    v1 = bool(V.continuous and np.all(np.isfinite(vals)))

    # (V2): a divergent integral shows up as a non-positive decay rate at 0
    l32, _ = _l32_unit_ball(V)
    v2 = bool(np.isfinite(l32))

    # the same relative tail window on a grid twice as long
    tail = _outer(grid)
    doubled = 2.0 * tail

    tail_sup = float(np.max(np.abs(V(tail))))
    sup_doubled = float(np.max(np.abs(V(doubled))))
    v_one = float(V(np.array([1.0]))[0])
    v3 = bool(tail_sup == 0.0 or tail_sup < tol_v3 * v_one
              or sup_doubled * growth_factor <= tail_sup)

    m1 = float(np.min(tail**2 * V(tail)))
    m2 = float(np.min(doubled**2 * V(doubled)))
    v4 = bool(m1 > 0 and m2 >= growth_factor * m1)

    return HypothesisReport(V.label, v1, l32, v2, v3, tail_sup, v4, m1, m2)
