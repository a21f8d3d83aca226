import numpy as np
import pytest

from spmulti.energy import Functional, j_energy, j_gradient
from spmulti.grid import annulus_bump, inner, make_grid
from spmulti.poisson import self_consistent_phi
from spmulti.potentials import coulomb, yukawa
from spmulti.solver import (SolveOptions, SubspaceError, build_lemma10_subspace,
                            estimate_minimax_level, fit_ray_upper_bound, minimize,
                            multiplicity_pipeline, sampled_energies, sampled_rayleigh_sup)

OMEGA = -0.1


@pytest.fixture(scope="module")
def families(log_grid, V):
    return {k: build_lemma10_subspace(k, V, log_grid, OMEGA) for k in (1, 2, 3, 5)}


@pytest.fixture(scope="module")
def pipeline3(log_grid, V):
    return multiplicity_pipeline(3, OMEGA, V, grid=log_grid)


def raw_residual(rep, V):
    g = j_gradient(rep.u, rep.omega, V)
    return np.sqrt(inner(g, g))


def test_options_validation():
    SolveOptions()
    for bad in (dict(grad_tol=0), dict(max_iters=0), dict(step_rule="wolfe"),
                dict(precondition="jacobi"), dict(deflation_strength=-1), dict(polish="bfgs")):
        with pytest.raises(ValueError):
            SolveOptions(**bad)


def test_zero_seed_is_critical(log_grid, V):
    rep = minimize(log_grid.zeros(), OMEGA, V)
    assert rep.converged and rep.residual == 0 and np.all(rep.u.values == 0)
    assert rep.trivial


def test_linear_hydrogen(log_grid, V):
    opts = SolveOptions(coupling_enabled=False, grad_tol=1e-6)
    rep = minimize(annulus_bump(1, log_grid), -0.5, V, opts)
    assert rep.converged and rep.residual < 1e-6
    f = Functional(log_grid, 0.0, V, coupling=False)
    x = rep.u.values
    rq = 2 * f.value(x) / np.dot(log_grid.weights, x * x)
    assert rq == pytest.approx(-0.5, abs=1e-3)


def test_coupled_solution_below_threshold(log_grid, V, families):
    seed = annulus_bump(1, log_grid) * np.sqrt(families[1].lambda_bar)
    rep = minimize(seed, OMEGA, V)
    assert rep.converged and rep.below_threshold and not rep.trivial
    assert rep.energy.total < -OMEGA / 2
    assert raw_residual(rep, V) < SolveOptions().grad_tol
    assert np.array_equal(rep.phi.values, self_consistent_phi(rep.u).phi.values)
    assert rep.energy == j_energy(rep.u, OMEGA, V)


def test_descent_history_monotone(log_grid, V):
    for precondition in ("sobolev", "none"):
        opts = SolveOptions(precondition=precondition, max_iters=300, polish="none")
        rep = minimize(annulus_bump(2, log_grid) * 0.3, OMEGA, V, opts)
        assert np.all(np.diff(rep.history) <= 1e-15 * np.abs(rep.history[:-1]))


def test_sign_symmetry(log_grid, V):
    u0 = annulus_bump(1, log_grid) * 0.2 - annulus_bump(2, log_grid) * 0.1
    a = minimize(u0, OMEGA, V)
    b = minimize(-u0, OMEGA, V)
    assert np.max(np.abs(a.u.values + b.u.values)) < 1e-8
    assert a.history == b.history


def test_nonconvergence_is_reported(log_grid, V):
    opts = SolveOptions(max_iters=2, polish="none")
    rep = minimize(annulus_bump(1, log_grid) * 0.2, OMEGA, V, opts)
    assert not rep.converged and rep.iters <= 2 and rep.status != "converged"


def test_nonnegative_omega_flagged(log_grid, V):
    rep = minimize(annulus_bump(1, log_grid) * 0.1, 0.1, V, SolveOptions(max_iters=5))
    assert "omega_nonnegative" in rep.flags


def test_deflation_finds_a_different_point(log_grid, V, families):
    seed = annulus_bump(1, log_grid) * np.sqrt(families[1].lambda_bar)
    first = minimize(seed, OMEGA, V)
    second = minimize(seed, OMEGA, V, deflation_set=[first.u, log_grid.zeros()])
    assert second.converged and "deflated" in second.flags
    d = second.u - first.u
    assert np.sqrt(inner(d, d)) > 1e-3 and second.l2_norm > 1e-3
    assert raw_residual(second, V) < SolveOptions().grad_tol


@pytest.mark.parametrize("k", [1, 2, 3, 5])
def test_bump_subspace_family(families, V, k):
    fam = families[k]
    assert fam.k == k and len(fam.basis) == k and fam.nu > 0
    assert 0 < fam.lambda_bar < min(fam.lambdas)
    assert np.max(np.abs(fam.gram() - np.eye(k))) < 1e-8
    vals = np.array([b.values for b in fam.basis])
    for i in range(k):
        for j in range(i + 1, k):
            assert np.all(vals[i] * vals[j] == 0)
    # re-check negativity on random sphere points
    assert sampled_rayleigh_sup(fam, 3000 * k, seed=7) <= -fam.nu + 1e-12
    assert fam.grid.r_max >= 2 * fam.indices[-1] / fam.lambda_bar


def test_bump_subspace_requires_v4(log_grid):
    with pytest.raises(SubspaceError) as info:
        build_lemma10_subspace(1, yukawa(1, 1), log_grid, OMEGA)
    assert info.value.report.failed == ["V4"]
    lams, vals = zip(*info.value.sweep)
    assert min(vals) >= 0 and min(lams) < 1e-5


def test_bump_subspace_argument_errors(log_grid, V):
    with pytest.raises(ValueError):
        build_lemma10_subspace(0, V, log_grid, OMEGA)
    with pytest.raises(ValueError):
        build_lemma10_subspace(1, V, log_grid, OMEGA, safety_factor=1.5)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_minimax_levels(families, V, k):
    fam = families[k]
    est = estimate_minimax_level(fam, OMEGA, V, 300 * k)
    assert est.passes and est.c_k_upper < 0.05 and est.threshold == 0.05
    assert est.passes == (est.c_k_upper < est.threshold)
    doubled = estimate_minimax_level(fam, OMEGA, V, 600 * k, seed=1)
    assert doubled.c_k_upper == pytest.approx(est.c_k_upper, rel=0.05)


def test_minimax_argument_errors(families, V):
    with pytest.raises(ValueError):
        estimate_minimax_level(families[2], OMEGA, V, 150)
    with pytest.raises(ValueError):
        estimate_minimax_level(families[1], 0.1, V)


def test_lambda_one_matches_direct_energy(families, V):
    fam = families[3]
    energies, coeffs = sampled_energies(fam, OMEGA, V, 20, lam=1.0)
    b = np.array([f.values for f in fam.basis])
    for e, c in zip(energies, coeffs):
        u = fam.grid.function(c @ b)
        assert e == pytest.approx(j_energy(u, OMEGA, V).total, rel=1e-10, abs=1e-14)


@pytest.mark.parametrize("k", [1, 2, 3, 5])
def test_ray_upper_bound(families, V, k):
    fit = fit_ray_upper_bound(families[k], OMEGA, V, 300 * k)
    assert fit.holds


def test_pipeline_single_level(log_grid, V):
    res = multiplicity_pipeline(1, OMEGA, V, grid=log_grid)
    assert len(res) == 1
    assert res.solutions[0].below_threshold and not res.hypothesis_violated


def test_pipeline_three_levels(pipeline3, V):
    sols = pipeline3.solutions
    assert len(sols) == 3
    w = sols[0].u.grid.weights
    for i, a in enumerate(sols):
        assert a.converged and a.energy.total < -OMEGA / 2 and a.l2_norm > 1e-3
        assert raw_residual(a, V) < 1e-6
        for b in sols[i + 1:]:
            assert np.sqrt(np.dot(w, (a.u.values - b.u.values) ** 2)) > 1e-3
    assert [lvl["status"] for lvl in pipeline3.levels] == ["found"] * 3


def test_pipeline_yukawa_flagged(small_grid):
    res = multiplicity_pipeline(1, OMEGA, yukawa(1, 1), grid=small_grid)
    assert res.hypothesis_violated
    assert "subspace_error" in res.levels[0]
    assert res.attempts and all("hypothesis_violated" in a.flags for a in res.attempts)


def test_pipeline_needs_negative_omega(small_grid, V):
    with pytest.raises(ValueError):
        multiplicity_pipeline(1, 0.0, V, grid=small_grid)
