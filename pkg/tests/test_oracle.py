import numpy as np
import pytest

from spmulti.energy import j_gradient
from spmulti.grid import annulus_bump, inner, make_grid
from spmulti.oracle import (brute_force_phi, brute_force_potential, hydrogen_eigen,
                            linear_eigensolve)
from spmulti.poisson import self_consistent_phi, solve_poisson
from spmulti.potentials import coulomb, zero_potential
from spmulti.sampling import random_radial_function


@pytest.mark.parametrize("n,Z,expected", [(1, 1.0, -0.5), (2, 1.0, -0.125), (1, 2.0, -2.0),
                                          (3, 1.0, -1 / 18)])
def test_hydrogen_eigen(log_grid, n, Z, expected):
    e, u = hydrogen_eigen(n, Z, log_grid)
    assert e == pytest.approx(expected, rel=1e-15)
    assert np.sqrt(inner(u, u)) == pytest.approx(1.0, rel=1e-12)
    assert u.values[0] > 0


def test_hydrogen_eigen_errors(log_grid):
    with pytest.raises(ValueError):
        hydrogen_eigen(0, 1.0, log_grid)
    with pytest.raises(ValueError):
        hydrogen_eigen(1, -1.0, log_grid)


def test_coulomb_spectrum_log_grid(log_grid):
    spec = linear_eigensolve(coulomb(1), log_grid, 3)
    exact = np.array([-0.5, -0.125, -1 / 18])
    rel = np.abs(spec.eigenvalues - exact) / np.abs(exact)
    assert rel[0] < 1e-4 and np.all(rel < 1e-3)
    assert np.all(np.diff(spec.eigenvalues) > 0)
    for j in range(3):
        _, ref = hydrogen_eigen(j + 1, 1.0, log_grid)
        d = spec.eigenfunctions[j] - ref
        assert np.sqrt(inner(d, d)) < 1e-3


def test_eigenfunctions_orthonormal(log_grid):
    fs = linear_eigensolve(coulomb(1), log_grid, 3).eigenfunctions
    gram = np.array([[inner(a, b) for b in fs] for a in fs])
    assert np.max(np.abs(gram - np.eye(3))) < 1e-8


def test_free_spectrum_nonnegative(uniform_grid, small_grid):
    for g in (uniform_grid, small_grid):
        assert np.all(linear_eigensolve(zero_potential(), g, 3).eigenvalues >= 0)


def test_uniform_grid_second_order():
    errs = []
    for n in (1000, 2000, 4000):
        g = make_grid("uniform", n, 40.0)
        errs.append(abs(linear_eigensolve(coulomb(1), g, 1).eigenvalues[0] + 0.5))
    assert 3.5 < errs[0] / errs[1] < 4.5
    assert 3.5 < errs[1] / errs[2] < 4.5


def test_eigenfunction_linear_residual_second_order():
    errs = []
    for n in (1000, 2000, 4000):
        g = make_grid("log", n, 60.0, 1e-6)
        spec = linear_eigensolve(coulomb(1), g, 1)
        res = j_gradient(spec.eigenfunctions[0], spec.eigenvalues[0], coulomb(1),
                         coupling=False).values
        bulk = g.nodes >= 1e-4
        errs.append(np.sqrt(np.dot(g.weights[bulk], res[bulk] ** 2)))
    assert errs[0] / errs[2] > 10


def test_count_errors(small_grid):
    with pytest.raises(ValueError):
        linear_eigensolve(coulomb(1), small_grid, 0)
    with pytest.raises(ValueError):
        linear_eigensolve(coulomb(1), small_grid, small_grid.n)


def test_brute_force_zero(log_grid):
    assert np.all(brute_force_phi(log_grid.zeros()).values == 0)


@pytest.mark.parametrize("make_u", [
    lambda g: annulus_bump(1, g),
    lambda g: g.function(np.exp(-g.nodes) / np.sqrt(np.pi)),
])
def test_brute_force_matches_poisson(log_grid, make_u):
    u = make_u(log_grid)
    diff = brute_force_phi(u).values - self_consistent_phi(u).phi.values
    assert np.max(np.abs(diff)) < 1e-6


def test_brute_force_random_suite(log_grid, rng):
    for _ in range(5):
        rho = random_radial_function(log_grid, rng)
        diff = brute_force_potential(rho).values - solve_poisson(rho).phi.values
        assert np.max(np.abs(diff)) < 1e-6


def test_brute_force_ball_closed_form():
    g = make_grid("uniform", 4000, 2.0)
    r = g.nodes
    rho = np.where(r < 1, 1.0, 0.0)
    rho[np.isclose(r, 1.0)] = 0.5
    phi = brute_force_potential(g.function(rho)).values
    exact = np.where(r < 1, (r**2 - 3) / 6, -1 / (3 * r))
    # the per-slice end corrections assume smoothness, so the jump costs accuracy
    err = np.abs(phi - exact)
    assert np.max(err) < 1e-4
    assert np.max(err[np.abs(r - 1) > 0.05]) < 1e-6
