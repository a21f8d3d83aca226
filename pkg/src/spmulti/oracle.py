"""Independent reference solutions used to validate the solvers.

* closed-form hydrogen s-states;
* a direct eigensolver for -1/2 Laplacian - V built on w = r u, with its
  own finite-difference stencil (unrelated to the staggered energy form);
* a brute-force Newton-potential integrator, one pair of quadratures per
  output node, independent of the cumulative-sum Poisson route.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal
from scipy.sparse import diags
from scipy.sparse.linalg import eigsh
from scipy.special import genlaguerre

from .grid import RadialFunction, RadialGrid, _rule, make_grid
from .potentials import Potential

__all__ = [
    "LinearSpectrum",
    "hydrogen_eigen",
    "linear_eigensolve",
    "brute_force_phi",
    "brute_force_potential",
]


@dataclass
class LinearSpectrum:
    eigenvalues: np.ndarray
    eigenfunctions: list

    def __len__(self):
        return len(self.eigenvalues)


def _normalize(grid: RadialGrid, vals: np.ndarray) -> RadialFunction:
    vals = vals / np.sqrt(np.dot(grid.weights, vals * vals))
    big = np.flatnonzero(np.abs(vals) > 1e-8 * np.max(np.abs(vals)))
    if big.size and vals[big[0]] < 0:
        vals = -vals
    return RadialFunction(grid, vals)


def hydrogen_eigen(n: int, Z: float, grid: RadialGrid) -> tuple[float, RadialFunction]:
    """Energy -Z^2 / (2 n^2) and the normalized n-th s-state on ``grid``.

    u(r) = exp(-Z r / n) L_{n-1}^{(1)}(2 Z r / n), positive at the origin.
    """
    if n < 1:
        raise ValueError("principal quantum number must be >= 1")
    if not Z > 0:
        raise ValueError("Z must be positive")
    r = grid.nodes
    x = 2.0 * Z * r / n
    vals = np.exp(-Z * r / n) * genlaguerre(n - 1, 1)(x)
    return -Z**2 / (2.0 * n**2), _normalize(grid, vals)


def _uniform_spectrum(V: Potential, grid: RadialGrid, count: int):
    """w = r u on equispaced nodes, Dirichlet at 0 and one step past r_max."""
    h = grid.step[0]
    d = 1.0 / h**2 - V.on(grid)
    e = np.full(grid.n - 1, -0.5 / h**2)
    vals, vecs = eigh_tridiagonal(d, e, select="i", select_range=(0, count - 1))
    return vals, vecs / grid.nodes[:, None]


def _log_matrices(V: Potential, grid: RadialGrid):
    """Generalized pencil (A, B) for chi = r^{-1/2} w in s = log r.

    -1/2 (chi'' - chi / 4) - r^2 V chi = E r^2 chi.  The origin sits at
    s = -inf, so w(0) = 0 becomes the regular behaviour chi ~ r^{1/2} for
    the ghost node below r_min; the outer end is Dirichlet.
    """
    r = grid.nodes
    delta = np.log(r[1] / r[0])
    d = 1.0 / delta**2 + 0.125 - r**2 * V.on(grid)
    d[0] -= 0.5 * np.exp(-0.5 * delta) / delta**2
    e = np.full(grid.n - 1, -0.5 / delta**2)
    a = diags([e, d, e], [-1, 0, 1], format="csc")
    b = diags(r**2, 0, format="csc")
    return a, b


def _lower_bound_guess(V: Potential, grid: RadialGrid) -> float:
    coarse = make_grid("uniform", min(grid.n, 4000), grid.r_max)
    e0 = float(_uniform_spectrum(V, coarse, 1)[0][0])
    return e0 - 0.2 * abs(e0) - 1e-3


def _log_spectrum(V: Potential, grid: RadialGrid, count: int):
    # the pencil is badly graded (r^2 spans many decades), so a dense
    # solve loses the small eigenvalues; shift-invert keeps them accurate
    a, b = _log_matrices(V, grid)
    sigma = _lower_bound_guess(V, grid)
    # fixed start vector: ARPACK otherwise draws a random one
    v0 = np.full(grid.n, 1.0)
    for _ in range(20):
        vals, chi = eigsh(a, k=count, M=b, sigma=sigma, which="LM", v0=v0)
        if np.all(vals > sigma):
            break
        sigma = float(np.min(vals)) - 0.2 * abs(float(np.min(vals))) - 1e-3
    order = np.argsort(vals)
    vals, chi = vals[order], chi[:, order]
    return vals, chi / np.sqrt(grid.nodes)[:, None]


def linear_eigensolve(V: Potential, grid: RadialGrid, count: int = 3) -> LinearSpectrum:
    """Lowest ``count`` s-wave eigenpairs of -1/2 Laplacian - V on ``grid``."""
    if count < 1:
        raise ValueError("count must be >= 1")
    if count >= grid.n - 1:
        raise ValueError(f"cannot compute {count} eigenpairs on {grid.n} nodes")
    if grid.kind == "uniform":
        vals, u = _uniform_spectrum(V, grid, count)
    else:
        vals, u = _log_spectrum(V, grid, count)
    funcs = [_normalize(grid, u[:, j]) for j in range(count)]
    return LinearSpectrum(np.asarray(vals, dtype=float), funcs)


def _slice_integral(f: np.ndarray, h: float) -> float:
    """Integral of equispaced samples: trapezoid with Gregory end corrections."""
    if f.size < 2:
        return 0.0
    return h * float(np.dot(_rule(f.size), f))


def brute_force_potential(rho: RadialFunction) -> RadialFunction:
    """phi(r_i) = -(1/r_i) int_0^{r_i} rho s^2 ds - int_{r_i}^inf rho s ds.

    Each node gets its own pair of quadratures in the grid's index
    coordinate, split exactly at r_i where the kernel has its kink, so no
    cumulative sums or kink corrections are involved.
    """
    grid = rho.grid
    r = grid.nodes
    v = np.asarray(rho.values, dtype=float)
    if grid.kind == "log":
        h = float(np.log(r[1] / r[0]))
        # ds = s d(log s)
        f_in, f_out = v * r**3, v * r**2
        head = v[0] * grid.r_min**3 / 3.0
        shift = 0
    else:
        h = float(grid.step[0])
        # prepend the origin, where both integrands vanish
        f_in = np.concatenate([[0.0], v * r**2])
        f_out = np.concatenate([[0.0], v * r])
        head = 0.0
        shift = 1
    phi = np.empty(grid.n)
    for i in range(grid.n):
        j = i + shift
        inner = head + _slice_integral(f_in[:j + 1], h)
        outer = _slice_integral(f_out[j:], h)
        phi[i] = -inner / r[i] - outer
    return RadialFunction(grid, phi)


def brute_force_phi(u: RadialFunction) -> RadialFunction:
    """Self-consistent potential for u: the Newton potential of rho = 4 pi u^2."""
    return brute_force_potential(4.0 * np.pi * u * u)
