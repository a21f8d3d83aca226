"""Radial discretization of H^1_r(R^3).

A radial function u(x) = u(|x|) is stored by its samples on a set of nodes
0 < r_0 < ... < r_{n-1} = r_max.  Quadrature weights carry the 4*pi*r^2
Jacobian, so ``integrate`` approximates integrals over all of R^3.

Weights come from the composite trapezoid rule in the grid's index
coordinate (r for uniform grids, log r for logarithmic ones) with
Gregory-type end corrections, which keeps the rule exact for polynomials
of degree < 8 in that coordinate while every weight stays positive.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property, lru_cache

import numpy as np
from scipy.special import bernoulli

__all__ = [
    "RadialGrid",
    "RadialFunction",
    "make_grid",
    "integrate",
    "inner",
    "lp_norm",
    "derivative",
    "dirichlet_energy",
    "kinetic_form",
    "stiffness_matrix",
    "scale_function",
    "annulus_bump",
]


@lru_cache(maxsize=None)
def _end_corrections(order: int) -> tuple[float, ...]:
    """Additive corrections to unit trapezoid weights at one end of a rule.

    Chosen so the corrected sum reproduces the left-end Euler-Maclaurin
    terms for monomials of degree < ``order``.
    """
    if order == 1:
        return (-0.5,)
    b = bernoulli(order + 1)
    target = np.zeros(order)
    target[0] = -0.5
    for m in range(1, order, 2):
        target[m] = b[m + 1] / (m + 1)
    vander = np.array([[float(j) ** m for j in range(order)] for m in range(order)])
    return tuple(np.linalg.solve(vander, target))


def _rule(npts: int) -> np.ndarray:
    """Unit-spacing corrected trapezoid weights on ``npts`` equispaced points."""
    order = next(p for p in (8, 6, 4, 1) if 2 * p <= npts)
    g = np.ones(npts)
    a = np.asarray(_end_corrections(order))
    g[:order] += a
    g[npts - order:] += a[::-1]
    return g


@dataclass(frozen=True, eq=False)
class RadialGrid:
    """Nodes and 3-D quadrature weights for radial functions."""

    nodes: np.ndarray
    weights: np.ndarray
    kind: str
    r_max: float
    r_min: float
    # dr/dj at each node: the local spacing in the index coordinate
    step: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return self.nodes.size

    def __len__(self) -> int:
        return self.nodes.size

    def __repr__(self) -> str:
        return (f"RadialGrid(kind={self.kind!r}, n={self.n}, "
                f"r_min={self.r_min:g}, r_max={self.r_max:g})")

    def config(self) -> dict:
        return {"kind": self.kind, "n": self.n, "r_max": self.r_max, "r_min": self.r_min}

    def same_as(self, other: "RadialGrid") -> bool:
        return self is other or (
            self.kind == other.kind and self.n == other.n
            and np.array_equal(self.nodes, other.nodes)
        )

    @cached_property
    def bond_coefficients(self) -> np.ndarray:
        """r_i r_{i+1} / (r_{i+1} - r_i) for each pair of neighbouring nodes.

        Exact flux coefficient for harmonic radial profiles a + b/r.
        """
        r = self.nodes
        return r[:-1] * r[1:] / np.diff(r)

    def function(self, values) -> "RadialFunction":
        return RadialFunction(self, np.asarray(values, dtype=float))

    def sample(self, f) -> "RadialFunction":
        return RadialFunction(self, np.asarray(f(self.nodes), dtype=float))

    def zeros(self) -> "RadialFunction":
        return RadialFunction(self, np.zeros(self.n))


@dataclass(frozen=True, eq=False)
class RadialFunction:
    """Samples u(r_i) of a radial profile; zero beyond ``grid.r_max``."""

    grid: RadialGrid
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != self.grid.nodes.shape:
            raise ValueError(f"expected {self.grid.n} values, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("radial function has non-finite values")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def _other(self, other):
        if isinstance(other, RadialFunction):
            if not self.grid.same_as(other.grid):
                raise ValueError("radial functions live on different grids")
            return other.values
        return other

    def __add__(self, other):
        return RadialFunction(self.grid, self.values + self._other(other))

    __radd__ = __add__

    def __sub__(self, other):
        return RadialFunction(self.grid, self.values - self._other(other))

    def __rsub__(self, other):
        return RadialFunction(self.grid, self._other(other) - self.values)

    def __mul__(self, other):
        return RadialFunction(self.grid, self.values * self._other(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return RadialFunction(self.grid, self.values / self._other(other))

    def __neg__(self):
        return RadialFunction(self.grid, -self.values)

    def __pow__(self, p):
        return RadialFunction(self.grid, self.values ** p)

    def __len__(self):
        return self.values.size

    def copy_values(self) -> np.ndarray:
        return np.array(self.values)


def make_grid(kind: str = "log", n: int = 4000, r_max: float = 60.0,
              r_min: float = 1e-6) -> RadialGrid:
    """Build a uniform or logarithmic radial grid.

    Uniform nodes are r_i = i * r_max / n for i = 1..n (the origin is a
    virtual node whose integrand vanishes).  Logarithmic nodes are
    geometrically spaced from ``r_min`` to ``r_max``; the ball of radius
    ``r_min`` is added to the first weight.
    """
    if kind not in ("uniform", "log", "logarithmic"):
        raise ValueError(f"unknown grid kind {kind!r}")
    n = int(n)
    if n < 2:
        raise ValueError("a radial grid needs at least 2 nodes")
    if not r_max > 0:
        raise ValueError("r_max must be positive")
    if kind == "uniform":
        h = r_max / n
        r = h * np.arange(1, n + 1, dtype=float)
        r[-1] = r_max
        g = _rule(n + 1)[1:]
        w = 4.0 * np.pi * r**2 * h * g
        step = np.full(n, h)
        return RadialGrid(r, w, "uniform", float(r_max), float(h), step)
    if not 0 < r_min < r_max:
        raise ValueError("logarithmic grid needs 0 < r_min < r_max")
    s = np.linspace(np.log(r_min), np.log(r_max), n)
    delta = s[1] - s[0]
    r = np.exp(s)
    r[0], r[-1] = r_min, r_max
    g = _rule(n)
    w = 4.0 * np.pi * r**3 * delta * g
    w[0] += 4.0 * np.pi * r_min**3 / 3.0
    return RadialGrid(r, w, "log", float(r_max), float(r_min), delta * r)


def integrate(f: RadialFunction) -> float:
    """Approximate the integral of f over R^3."""
    return float(np.dot(f.grid.weights, f.values))


def inner(u: RadialFunction, v: RadialFunction) -> float:
    """L^2(R^3) inner product."""
    if not u.grid.same_as(v.grid):
        raise ValueError("radial functions live on different grids")
    return float(np.dot(u.grid.weights, u.values * v.values))


def lp_norm(u: RadialFunction, p: float = 2.0) -> float:
    """L^p(R^3) norm; ``p = inf`` gives the max norm."""
    if p == np.inf:
        return float(np.max(np.abs(u.values))) if u.values.size else 0.0
    if p < 1:
        raise ValueError("L^p norm needs p >= 1")
    s = float(np.dot(u.grid.weights, np.abs(u.values) ** p))
    return s ** (1.0 / p)


def derivative(u: RadialFunction) -> RadialFunction:
    """du/dr by second-order finite differences (one-sided at both ends).

    Differences are taken in the grid's index coordinate, where nodes are
    equispaced, and divided by dr/dj.
    """
    if u.grid.n < 3:
        raise ValueError("derivative needs at least 3 nodes")
    du = np.gradient(u.values, edge_order=2) / u.grid.step
    return RadialFunction(u.grid, du)


def dirichlet_energy(u: RadialFunction) -> float:
    """Integral of |grad u|^2 = u'(r)^2 over R^3, from ``derivative``."""
    d = derivative(u)
    return integrate(d * d)


def kinetic_form(u: RadialFunction) -> float:
    """Staggered Dirichlet form 4*pi * sum_i b_i (u_{i+1} - u_i)^2.

    Second-order approximation of the integral of |grad u|^2 with a
    homogeneous Neumann condition at r_max.  This is the form whose
    gradient is ``stiffness_matrix`` and is what the energy uses.
    """
    du = np.diff(u.values)
    return float(4.0 * np.pi * np.dot(u.grid.bond_coefficients, du * du))


def stiffness_matrix(grid: RadialGrid) -> np.ndarray:
    """Banded (3, n) storage of the symmetric matrix A with kinetic_form = u.A.u.

    Row 0 holds the superdiagonal, row 1 the diagonal and row 2 the
    subdiagonal, as expected by ``scipy.linalg.solve_banded``.
    """
    b = 4.0 * np.pi * grid.bond_coefficients
    ab = np.zeros((3, grid.n))
    ab[1, :-1] += b
    ab[1, 1:] += b
    ab[0, 1:] = -b
    ab[2, :-1] = -b
    return ab


def banded_matvec(ab: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Product of a (3, n) banded tridiagonal matrix with x."""
    y = ab[1] * x
    y[:-1] += ab[0, 1:] * x[1:]
    y[1:] += ab[2, :-1] * x[:-1]
    return y


def scale_function(u: RadialFunction, lam: float) -> RadialFunction:
    """r -> lam^{3/2} u(lam r), resampled on u's grid by linear interpolation.

    Preserves the L^2 norm and multiplies the Dirichlet energy by lam^2.
    """
    if not lam > 0:
        raise ValueError("scale factor must be positive")
    r = u.grid.nodes
    x = lam * r
    # zero extension beyond r_max; constant extension toward the origin
    vals = np.interp(x, r, u.values, left=u.values[0], right=0.0)
    vals[x > r[-1]] = 0.0
    return RadialFunction(u.grid, lam**1.5 * vals)


def _bump_profile(r: np.ndarray, a: float, b: float) -> np.ndarray:
    inside = (r > a) & (r < b)
    out = np.zeros_like(r)
    out[inside] = np.sin(np.pi * (r[inside] - a) / (b - a)) ** 2
    return out


def annulus_bump(i: float, grid: RadialGrid) -> RadialFunction:
    """Squared-sine bump supported in i <= r <= 2i with unit L^2 norm."""
    if not i > 0:
        raise ValueError("annulus index must be positive")
    if 2 * i > grid.r_max:
        raise ValueError(f"annulus [{i}, {2 * i}] exceeds grid r_max={grid.r_max}")
    vals = _bump_profile(grid.nodes, float(i), 2.0 * i)
    norm = np.sqrt(np.dot(grid.weights, vals * vals))
    if norm == 0.0:
        raise ValueError(f"grid too coarse to resolve annulus [{i}, {2 * i}]")
    return RadialFunction(grid, vals / norm)
