"""The coupled functional F_omega and its reduction J_omega.

    J(u) = 1/4 int |grad u|^2 + pi int |grad psi|^2 - 1/2 int V u^2 - omega/2 int u^2,
    psi  = Laplacian^{-1}(u^2).

Everything is evaluated on the discrete level with the staggered kinetic
form and the Poisson module's Green operator, and ``j_gradient`` is the
exact weighted-L^2 gradient of that discrete J.  Its strong form is the
Euler-Lagrange residual

    g = -1/2 Laplacian(u) - 4 pi psi u - V u - omega u.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .grid import (RadialFunction, RadialGrid, banded_matvec, kinetic_form,
                   stiffness_matrix)
from .poisson import FOUR_PI, dirichlet_form, green_apply
from .potentials import Potential

__all__ = [
    "EnergyBreakdown",
    "RayDecomposition",
    "Functional",
    "j_energy",
    "f_energy",
    "j_gradient",
    "ray_decomposition",
    "h1_norm",
]


@dataclass(frozen=True)
class EnergyBreakdown:
    kinetic: float
    self_interaction: float
    potential: float
    mass: float
    total: float

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class RayDecomposition:
    """J(lam * u) = a lam^2 + b lam^4 - c lam^2 + d lam^2 for a unit-H^1 direction u."""

    a: float
    b: float
    c: float
    d: float
    omega: float

    def energy(self, lam):
        lam = np.asarray(lam, dtype=float)
        return (self.a - self.c + self.d) * lam**2 + self.b * lam**4

    def ranges_hold(self) -> bool:
        return (0.0 <= self.a <= 0.25 and self.b >= 0.0 and self.c >= 0.0
                and 0.0 <= self.d <= -self.omega / 2.0)


class Functional:
    """J_omega on a fixed grid, working on raw node arrays.

    Grid- and potential-dependent arrays are computed once so that the
    solvers can evaluate J, its gradient and Hessian products cheaply.
    """

    def __init__(self, grid: RadialGrid, omega: float, V: Potential,
                 coupling: bool = True):
        self.grid = grid
        self.omega = float(omega)
        self.V = V
        self.coupling = bool(coupling)
        self.w = grid.weights
        self.v = V.on(grid)
        self.stiff = stiffness_matrix(grid)

    # pieces ---------------------------------------------------------------
    def psi(self, x: np.ndarray) -> np.ndarray:
        return green_apply(self.grid, x * x)

    def breakdown(self, x: np.ndarray, psi: np.ndarray | None = None) -> EnergyBreakdown:
        w = self.w
        x2 = x * x
        kin = 0.25 * float(np.dot(x, banded_matvec(self.stiff, x)))
        if self.coupling:
            if psi is None:
                psi = self.psi(x)
            selfint = -np.pi * float(np.dot(w, psi * x2))
        else:
            selfint = 0.0
        pot = -0.5 * float(np.dot(w, self.v * x2))
        mass = -0.5 * self.omega * float(np.dot(w, x2))
        return EnergyBreakdown(kin, selfint, pot, mass, kin + selfint + pot + mass)

    def value(self, x: np.ndarray) -> float:
        return self.breakdown(x).total

    def gradient(self, x: np.ndarray, psi: np.ndarray | None = None) -> np.ndarray:
        """Weighted-L^2 gradient: <g, v>_W equals the directional derivative."""
        g = 0.5 * banded_matvec(self.stiff, x) / self.w - (self.v + self.omega) * x
        if self.coupling:
            if psi is None:
                psi = self.psi(x)
            g -= FOUR_PI * psi * x
        return g

    def value_and_gradient(self, x: np.ndarray):
        psi = self.psi(x) if self.coupling else None
        return self.breakdown(x, psi).total, self.gradient(x, psi)

    def hessp(self, x: np.ndarray, p: np.ndarray, psi: np.ndarray | None = None) -> np.ndarray:
        """Second derivative of J at x applied to p, in the same L^2 representation."""
        h = 0.5 * banded_matvec(self.stiff, p) / self.w - (self.v + self.omega) * p
        if self.coupling:
            if psi is None:
                psi = self.psi(x)
            h -= FOUR_PI * psi * p
            h -= 2.0 * FOUR_PI * x * green_apply(self.grid, x * p)
        return h

    def l2(self, x: np.ndarray) -> float:
        return float(np.sqrt(np.dot(self.w, x * x)))


def _check_grid(*fs: RadialFunction):
    g0 = fs[0].grid
    for f in fs[1:]:
        if not g0.same_as(f.grid):
            raise ValueError("all radial functions must share one grid")


def j_energy(u: RadialFunction, omega: float, V: Potential,
             coupling: bool = True) -> EnergyBreakdown:
    """The four terms of J_omega(u) and their sum."""
    return Functional(u.grid, omega, V, coupling).breakdown(u.values)


def f_energy(u: RadialFunction, phi: RadialFunction, omega: float, V: Potential) -> float:
    """F_omega(u, phi) for an arbitrary potential phi on u's grid.

    Not bounded in either direction: it decreases without bound as phi
    grows, which is why the solvers work with J instead.
    """
    _check_grid(u, phi)
    w = u.grid.weights
    u2 = u.values * u.values
    return (0.25 * kinetic_form(u)
            - 0.5 * float(np.dot(w, phi.values * u2))
            - dirichlet_form(phi) / (16.0 * np.pi)
            - 0.5 * float(np.dot(w, V.on(u.grid) * u2))
            - 0.5 * omega * float(np.dot(w, u2)))


def j_gradient(u: RadialFunction, omega: float, V: Potential,
               coupling: bool = True) -> RadialFunction:
    """Euler-Lagrange residual; its L^2 pairing with v is dJ(u)[v]."""
    f = Functional(u.grid, omega, V, coupling)
    return RadialFunction(u.grid, f.gradient(u.values))


def h1_norm(u: RadialFunction) -> float:
    return float(np.sqrt(kinetic_form(u) + np.dot(u.grid.weights, u.values**2)))


def ray_decomposition(u: RadialFunction, omega: float, V: Potential) -> RayDecomposition:
    """Coefficients of lam -> J(lam u~) along the ray through u, u~ = u / ||u||_{H^1}."""
    norm = h1_norm(u)
    if norm == 0.0:
        raise ValueError("direction must be non-zero")
    x = u.values / norm
    parts = Functional(u.grid, omega, V).breakdown(x)
    return RayDecomposition(a=parts.kinetic, b=parts.self_interaction, c=-parts.potential,
                            d=parts.mass, omega=float(omega))
