"""Critical points of J_omega: descent, deflation and the minimax machinery.

``minimize`` runs Sobolev-preconditioned gradient descent with Armijo
backtracking and then polishes with safeguarded Newton steps.  Given a
deflation set it instead runs damped Newton on the deflated residual
M(u) g(u), with M(u) = prod_j (1 + s / ||u - u_j||^2).  Convergence is
always certified on the raw residual ||g(u)||.

``build_lemma10_subspace`` and ``estimate_minimax_level`` reproduce the
construction behind the level bound c_k < -omega/2: dilated annulus bumps
with negative Rayleigh value span a k-dimensional space whose unit sphere,
scaled by lam^{1/2}, is a symmetric set of genus k.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.linalg import eigh, solve_banded
from scipy.sparse.linalg import LinearOperator, gmres, splu

from .energy import EnergyBreakdown, Functional
from .grid import RadialFunction, RadialGrid, _bump_profile, annulus_bump, make_grid
from .poisson import FOUR_PI, green_apply, self_consistent_phi
from .potentials import HypothesisReport, Potential, check_hypotheses

__all__ = [
    "SolveOptions",
    "SolveReport",
    "SubspaceFamily",
    "MinimaxEstimate",
    "RayBoundFit",
    "MultiplicityResult",
    "SubspaceError",
    "minimize",
    "build_lemma10_subspace",
    "estimate_minimax_level",
    "fit_ray_upper_bound",
    "sampled_rayleigh_sup",
    "multiplicity_pipeline",
]

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SolveOptions:
    max_iters: int = 2000
    grad_tol: float = 1e-7
    step_rule: str = "armijo_backtracking"
    precondition: str = "sobolev"
    coupling_enabled: bool = True
    deflation_strength: float = 1.0
    seed: int = 0
    # Newton polish once the descent residual drops below newton_switch
    polish: str = "newton"
    newton_switch: float = 1e-3
    max_newton: int = 60
    armijo_c: float = 1e-4
    # cap on the descent step length in the Sobolev metric
    max_step: float = 2.0
    # amplitude of the seeded random perturbation added to pipeline seeds
    perturbation: float = 0.0

    def __post_init__(self):
        if not self.grad_tol > 0:
            raise ValueError("grad_tol must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")
        if self.step_rule != "armijo_backtracking":
            raise ValueError(f"unsupported step rule {self.step_rule!r}")
        if self.precondition not in ("none", "sobolev"):
            raise ValueError(f"unknown preconditioner {self.precondition!r}")
        if self.polish not in ("none", "newton"):
            raise ValueError(f"unknown polish {self.polish!r}")
        if self.deflation_strength < 0:
            raise ValueError("deflation_strength must be non-negative")


@dataclass
class SolveReport:
    u: RadialFunction
    phi: RadialFunction
    omega: float
    energy: EnergyBreakdown
    residual: float
    iters: int
    converged: bool
    below_threshold: bool
    status: str = "converged"
    l2_norm: float = 0.0
    history: list = field(default_factory=list, repr=False)
    flags: list = field(default_factory=list)
    label: str = ""

    @property
    def trivial(self) -> bool:
        return self.l2_norm <= 1e-3

    def summary(self) -> dict:
        return {
            "label": self.label,
            "omega": self.omega,
            "energy": self.energy.to_dict(),
            "residual": self.residual,
            "iters": self.iters,
            "converged": self.converged,
            "below_threshold": self.below_threshold,
            "status": self.status,
            "l2_norm": self.l2_norm,
            "flags": list(self.flags),
        }


class SubspaceError(RuntimeError):
    """No dilation of an annulus bump reached a negative Rayleigh value."""

    def __init__(self, message: str, report: HypothesisReport | None = None,
                 sweep: list | None = None):
        super().__init__(message)
        self.report = report
        self.sweep = sweep or []


@dataclass
class SubspaceFamily:
    basis: list
    lambda_bar: float
    nu: float
    k: int
    grid: RadialGrid
    lambdas: list
    indices: list
    # R_ij = int (1/2) grad b_i . grad b_j - V b_i b_j
    rayleigh_matrix: np.ndarray = field(repr=False)

    def gram(self) -> np.ndarray:
        w = self.grid.weights
        b = np.array([f.values for f in self.basis])
        return (b * w) @ b.T


@dataclass(frozen=True)
class MinimaxEstimate:
    k: int
    c_k_upper: float
    threshold: float
    passes: bool
    lambda_used: float
    samples: int

    def to_dict(self) -> dict:
        return {"k": self.k, "c_k_upper": self.c_k_upper, "threshold": self.threshold,
                "passes": self.passes, "lambda_used": self.lambda_used,
                "samples": self.samples}


@dataclass(frozen=True)
class RayBoundFit:
    nu_prime: float
    c_prime: float
    max_violation: float

    @property
    def holds(self) -> bool:
        return self.nu_prime > 0 and self.c_prime > 0 and self.max_violation <= 1e-8


# --------------------------------------------------------------------------
# minimization

class _Problem:
    """Functional plus the linear algebra used by the descent and Newton steps."""

    def __init__(self, grid: RadialGrid, omega: float, V: Potential, opts: SolveOptions):
        self.f = Functional(grid, omega, V, opts.coupling_enabled)
        self.opts = opts
        self.w = grid.weights
        self.n = grid.n
        # Sobolev metric W + A (A = stiffness), banded
        self.sobolev = self.f.stiff.copy()
        self.sobolev[1] += self.w

    def precondition(self, g: np.ndarray) -> np.ndarray:
        if self.opts.precondition == "none":
            return g
        return solve_banded((1, 1), self.sobolev, self.w * g)

    def newton_direction(self, x, psi, g):
        """Solve Hess(x) d = -g with GMRES, preconditioned by the local part."""
        f, w = self.f, self.w
        diag = w * (-f.v - f.omega)
        if f.coupling:
            diag = diag - w * FOUR_PI * psi
        stiff = f.stiff
        local = sp.diags([0.5 * stiff[2, :-1], 0.5 * stiff[1] + diag, 0.5 * stiff[0, 1:]],
                         [-1, 0, 1], format="csc")
        try:
            lu = splu(local)
            prec = LinearOperator((self.n, self.n), matvec=lu.solve)
        except RuntimeError:
            prec = LinearOperator((self.n, self.n),
                                  matvec=lambda v: solve_banded((1, 1), self.sobolev, v))
        op = LinearOperator((self.n, self.n), matvec=lambda p: w * f.hessp(x, p, psi))
        d, info = gmres(op, -w * g, M=prec, rtol=1e-10, atol=0.0, restart=60, maxiter=20)
        return d, info

    def state(self, x):
        psi = self.f.psi(x) if self.f.coupling else None
        return self.f.breakdown(x, psi).total, self.f.gradient(x, psi), psi


def _deflation(x, roots, w, s):
    """Deflation factor M(x) and the L^2 gradient of log M."""
    m = 1.0
    dlog = np.zeros_like(x)
    for r in roots:
        e = x - r
        n2 = float(np.dot(w, e * e))
        if n2 == 0.0:
            return np.inf, dlog
        fac = 1.0 + s / n2
        m *= fac
        dlog += (-2.0 * s * e / n2**2) / fac
    return m, dlog


def _descent(prob: _Problem, x, history):
    """Preconditioned steepest descent with Armijo backtracking.

    Stops on convergence, on reaching the Newton switch residual, on
    line-search failure or after max_iters.  Energies of accepted steps are
    appended to ``history`` and are non-increasing.
    """
    opts, f = prob.opts, prob.f
    E, g, _ = prob.state(x)
    history.append(E)
    t = 1.0
    switch = opts.newton_switch if (opts.polish == "newton" and f.coupling) else 0.0
    for it in range(opts.max_iters):
        res = f.l2(g)
        if res < opts.grad_tol:
            return x, it, "converged"
        if res < switch:
            return x, it, "switch"
        d = -prob.precondition(g)
        slope = float(np.dot(prob.w, g * d))
        if slope >= 0:
            return x, it, "line_search_failure"
        t = min(2.0 * t, opts.max_step)
        while True:
            xn = x + t * d
            En = f.value(xn)
            if En <= E + opts.armijo_c * t * slope:
                break
            t *= 0.5
            if t < 1e-14:
                return x, it, "line_search_failure"
        x = xn
        E, g, _ = prob.state(x)
        history.append(E)
    return x, opts.max_iters, "max_iters"


def _newton_polish(prob: _Problem, x, history, budget):
    """Newton steps accepted only if they decrease J (Armijo) and the residual."""
    opts, f = prob.opts, prob.f
    E, g, psi = prob.state(x)
    for it in range(budget):
        res = f.l2(g)
        if res < opts.grad_tol:
            return x, it, "converged"
        d, info = prob.newton_direction(x, psi, g)
        slope = float(np.dot(prob.w, g * d))
        if info != 0 or slope >= 0:
            # not a descent direction: fall back to the preconditioned gradient
            d = -prob.precondition(g)
            slope = float(np.dot(prob.w, g * d))
        t = 1.0
        accepted = False
        while t > 1e-6:
            xn = x + t * d
            En, gn, psin = prob.state(xn)
            if En <= E + opts.armijo_c * t * slope and f.l2(gn) < res:
                accepted = True
                break
            t *= 0.5
        if not accepted:
            return x, it, "line_search_failure"
        x, E, g, psi = xn, En, gn, psin
        history.append(E)
    res = f.l2(g)
    return x, budget, "converged" if res < opts.grad_tol else "max_iters"


def _deflated_newton(prob: _Problem, x, roots, history, budget):
    """Damped Newton on the deflated residual M(x) g(x).

    The undeflated Newton step d is rescaled by 1 / (1 - <grad log M, d>),
    which is exactly the Newton step for M g, and then damped by
    backtracking on ||M g||.
    """
    opts, f, w = prob.opts, prob.f, prob.w
    s = opts.deflation_strength
    E, g, psi = prob.state(x)
    history.append(E)
    for it in range(budget):
        res = f.l2(g)
        if res < opts.grad_tol:
            return x, it, "converged"
        m, dlog = _deflation(x, roots, w, s)
        d, info = prob.newton_direction(x, psi, g)
        denom = 1.0 - float(np.dot(w, dlog * d))
        if abs(denom) > 1e-12:
            d = d / denom
        merit = m * res
        # backtrack on ||M g||; if nothing decreases it, keep the best trial
        # so the iteration can leave regions where the merit is not monotone
        best = None
        t = 1.0
        while t > 1e-4:
            xn = x + t * d
            En, gn, psin = prob.state(xn)
            mn, _ = _deflation(xn, roots, w, s)
            val = mn * f.l2(gn)
            if np.isfinite(val) and (best is None or val < best[0]):
                best = (val, xn, En, gn, psin)
            if val < (1.0 - 1e-4 * t) * merit:
                break
            t *= 0.5
        if best is None:
            return x, it, "line_search_failure"
        _, x, E, g, psi = best
        history.append(E)
    return x, budget, "converged" if f.l2(g) < opts.grad_tol else "max_iters"


def _report(prob: _Problem, x, iters, status, history, flags, label="") -> SolveReport:
    f = prob.f
    grid = f.grid
    u = RadialFunction(grid, x)
    parts = f.breakdown(x)
    res = f.l2(f.gradient(x))
    converged = bool(res < prob.opts.grad_tol)
    if converged:
        status = "converged"
    elif status == "converged":
        status = "max_iters"
    return SolveReport(
        u=u, phi=self_consistent_phi(u).phi, omega=f.omega, energy=parts, residual=res,
        iters=iters, converged=converged, below_threshold=bool(parts.total < -f.omega / 2.0),
        status=status, l2_norm=f.l2(x), history=history, flags=list(flags), label=label)


def minimize(u0: RadialFunction, omega: float, V: Potential, opts: SolveOptions | None = None,
             deflation_set=(), label: str = "") -> SolveReport:
    """Find a critical point of J_omega starting from ``u0``.

    With an empty deflation set this is a descent method: accepted energies
    never increase.  Otherwise it is deflated Newton, which can converge to
    saddle points and is kept away from the members of ``deflation_set``.
    Failure to converge is reported in the result, never raised.
    """
    opts = opts or SolveOptions()
    flags = []
    if not omega < 0:
        flags.append("omega_nonnegative")
    x = np.array(u0.values, dtype=float)
    prob = _Problem(u0.grid, omega, V, opts)
    history: list = []
    if not np.any(x):
        history.append(0.0)
        return _report(prob, x, 0, "converged", history, flags, label)

    roots = [np.asarray(r.values, dtype=float) for r in deflation_set]
    if roots:
        budget = min(opts.max_newton, opts.max_iters)
        x, iters, status = _deflated_newton(prob, x, roots, history, budget)
        flags.append("deflated")
        return _report(prob, x, iters, status, history, flags, label)

    x, iters, status = _descent(prob, x, history)
    if status == "switch":
        x, extra, status = _newton_polish(prob, x, history, opts.max_newton)
        iters += extra
    return _report(prob, x, iters, status, history, flags, label)


# --------------------------------------------------------------------------
# dilated-bump subspace and minimax levels

def _bump_index(m: int) -> float:
    # annuli [a, 2a] with a = 2^(m-1) tile (0, inf) without overlap
    return float(2 ** (m - 1))


def _rayleigh_of_dilation(a: float, V: Potential, lam: float, n: int = 2000) -> float:
    """Rayleigh value of r -> lam^{3/2} b(lam r) for the unit bump b on [a, 2a].

    After the change of variables only the potential sees the dilation:
    lam^2 int (1/2)|grad b|^2 - int V(r / lam) b^2.
    """
    g = make_grid("log", n, 2.5 * a, 1e-3 * a)
    b = annulus_bump(a, g)
    kin = float(np.dot(b.values, _stiff_matvec(g, b.values)))
    pot = float(np.dot(g.weights, V(g.nodes / lam) * b.values**2))
    return 0.5 * lam**2 * kin - pot


def _stiff_matvec(grid: RadialGrid, x: np.ndarray) -> np.ndarray:
    from .grid import banded_matvec, stiffness_matrix
    return banded_matvec(stiffness_matrix(grid), x)


def _family_grid(grid: RadialGrid, r_needed: float) -> RadialGrid:
    if r_needed <= grid.r_max:
        return grid
    r_min = grid.r_min if grid.kind == "log" else 1e-6
    return make_grid("log", max(grid.n, 4000), 1.1 * r_needed, r_min)


def _rayleigh_matrix(grid: RadialGrid, V: Potential, basis: list) -> np.ndarray:
    b = np.array([f.values for f in basis])
    kin = np.array([_stiff_matvec(grid, row) for row in b])
    wv = grid.weights * V.on(grid)
    return 0.5 * (b @ kin.T) - (b * wv) @ b.T


def build_lemma10_subspace(k: int, V: Potential, grid: RadialGrid, omega: float,
                           safety_factor: float = 0.5, lambda_min: float = 1e-6) -> SubspaceFamily:
    """k dilated annulus bumps with disjoint supports and negative Rayleigh values.

    Each bump on [2^(m-1), 2^m] is dilated by halving lam until its Rayleigh
    value is negative.  All bumps are then dilated by the common
    lam_bar = safety_factor * min lam_m, which keeps them negative and
    disjoint, and the family lives on a log grid extended to hold the
    outermost support.  nu is minus the largest eigenvalue of the Rayleigh
    form on the span, i.e. the exact maximum over its unit sphere.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    if not 0 < safety_factor < 1:
        raise ValueError("safety_factor must lie in (0, 1)")
    indices = [_bump_index(m) for m in range(1, k + 1)]
    lambdas = []
    for a in indices:
        lam = 1.0
        sweep = []
        while True:
            val = _rayleigh_of_dilation(a, V, lam)
            sweep.append((lam, val))
            if val < 0:
                break
            lam *= 0.5
            if lam < lambda_min:
                report = check_hypotheses(V, grid)
                raise SubspaceError(
                    f"Rayleigh value of the bump on [{a:g}, {2 * a:g}] stays non-negative "
                    f"down to lambda={lambda_min:g}; failed hypotheses: {report.failed}",
                    report, sweep)
        lambdas.append(lam)

    lam_bar = safety_factor * min(lambdas)
    fgrid = _family_grid(grid, 2.0 * indices[-1] / lam_bar)
    basis = []
    for a in indices:
        vals = _bump_profile(fgrid.nodes, a / lam_bar, 2.0 * a / lam_bar)
        vals = vals / np.sqrt(np.dot(fgrid.weights, vals * vals))
        basis.append(RadialFunction(fgrid, vals))
    rmat = _rayleigh_matrix(fgrid, V, basis)
    top = float(eigh(rmat, eigvals_only=True)[-1])
    if not top < 0:
        raise SubspaceError(f"span of the dilated bumps is not negative (max {top:g})",
                           check_hypotheses(V, grid))
    return SubspaceFamily(basis, lam_bar, -top, k, fgrid, lambdas, indices, rmat)


def _sphere_samples(k: int, samples: int, seed: int) -> np.ndarray:
    """Coefficient vectors on the unit sphere of R^k, one per antipodal pair.

    The coordinate vectors come first, the rest are uniform random points
    with their first non-zero coordinate made positive.
    """
    rng = np.random.default_rng(seed)
    extra = max(samples - k, 0)
    c = rng.standard_normal((extra, k))
    c /= np.linalg.norm(c, axis=1, keepdims=True)
    c *= np.where(c[:, :1] < 0, -1.0, 1.0)
    return np.vstack([np.eye(k), c])[:samples] if samples >= k else np.eye(k)


def _ray_coefficients(family: SubspaceFamily, omega: float, V: Potential, coeffs: np.ndarray):
    """Q, P with J(lam^{1/2} u) = lam Q + lam^2 P for each sampled u."""
    grid = family.grid
    b = np.array([f.values for f in family.basis])
    qmat = 0.5 * family.rayleigh_matrix - 0.5 * omega * family.gram()
    q = np.einsum("si,ij,sj->s", coeffs, qmat, coeffs)
    p = np.empty(coeffs.shape[0])
    chunk = 256
    for start in range(0, coeffs.shape[0], chunk):
        u = coeffs[start:start + chunk] @ b
        psi = green_apply(grid, u * u)
        p[start:start + chunk] = -np.pi * np.sum(grid.weights * psi * u * u, axis=1)
    return q, p


def _lambda_grid(num: int = 61) -> np.ndarray:
    return np.geomspace(1e-3, 1.0, num)


def estimate_minimax_level(family: SubspaceFamily, omega: float, V: Potential,
                           samples: int | None = None, seed: int = 0,
                           lambdas: np.ndarray | None = None) -> MinimaxEstimate:
    """Sampled upper bound for c_k = inf over genus-k sets of sup J.

    For each lam the set {lam^{1/2} u : u in the unit sphere of the span}
    has genus k, so min over lam of the sampled sup of J on it bounds c_k
    from above (up to sampling of the sup).
    """
    if family is None or not family.basis:
        raise ValueError("empty subspace family")
    if not omega < 0:
        raise ValueError("minimax levels need omega < 0")
    k = family.k
    samples = 300 * k if samples is None else int(samples)
    if samples < 100 * k:
        raise ValueError(f"need at least {100 * k} samples for k={k}")
    lam = _lambda_grid() if lambdas is None else np.asarray(lambdas, dtype=float)
    q, p = _ray_coefficients(family, omega, V, _sphere_samples(k, samples, seed))
    sup = np.max(lam[:, None] * q[None, :] + lam[:, None] ** 2 * p[None, :], axis=1)
    i = int(np.argmin(sup))
    c_upper = float(sup[i])
    threshold = -omega / 2.0
    return MinimaxEstimate(k, c_upper, threshold, bool(c_upper < threshold), float(lam[i]),
                           samples)


def sampled_energies(family: SubspaceFamily, omega: float, V: Potential, samples: int,
                     lam: float, seed: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """J(lam^{1/2} u) on sphere samples via the ray coefficients, with the samples."""
    coeffs = _sphere_samples(family.k, samples, seed)
    q, p = _ray_coefficients(family, omega, V, coeffs)
    return lam * q + lam**2 * p, coeffs


def fit_ray_upper_bound(family: SubspaceFamily, omega: float, V: Potential, samples: int,
                        seed: int = 0) -> RayBoundFit:
    """Fit J(lam^{1/2} u) <= -(lam/2) nu' + c' lam^2 - (omega/2) lam and verify it.

    nu' is the family's negativity margin and c' the largest quartic
    coefficient seen; domination is checked on the lam grid for every sample.
    """
    q, p = _ray_coefficients(family, omega, V, _sphere_samples(family.k, samples, seed))
    nu_p = family.nu
    c_p = float(np.max(p))
    lam = _lambda_grid()[:, None]
    lhs = lam * q[None, :] + lam**2 * p[None, :]
    rhs = -0.5 * lam * nu_p + c_p * lam**2 - 0.5 * omega * lam
    return RayBoundFit(nu_p, c_p, float(np.max(lhs - rhs)))


def sampled_rayleigh_sup(family: SubspaceFamily, samples: int, seed: int = 1) -> float:
    """Largest Rayleigh value over random points of the unit sphere of the span."""
    c = _sphere_samples(family.k, samples, seed)
    return float(np.max(np.einsum("si,ij,sj->s", c, family.rayleigh_matrix, c)))


# --------------------------------------------------------------------------
# multiplicity pipeline

@dataclass
class MultiplicityResult:
    solutions: list
    attempts: list
    levels: list
    hypotheses: HypothesisReport
    hypothesis_violated: bool

    def __len__(self):
        return len(self.solutions)

    def __iter__(self):
        return iter(self.solutions)


def _seeds(k: int, grid: RadialGrid, amplitude: float, opts: SolveOptions):
    """Sign-alternating sums of the undilated building blocks, then fallbacks."""
    blocks = []
    for m in range(1, k + 1):
        a = _bump_index(m)
        if 2 * a > grid.r_max:
            break
        blocks.append(annulus_bump(a, grid).values)
    rng = np.random.default_rng(opts.seed + k)
    out = []

    def add(label, v):
        v = v / np.sqrt(np.dot(grid.weights, v * v))
        if opts.perturbation > 0:
            noise = np.convolve(rng.standard_normal(grid.n), np.ones(25) / 25, mode="same")
            v = v + opts.perturbation * noise * (np.abs(v) > 0)
        out.append((label, RadialFunction(grid, amplitude * v)))

    for j in range(len(blocks), 0, -1):
        alt = sum((-1) ** m * blocks[m] for m in range(j))
        add(f"alternating_{j}", alt)
        add(f"-alternating_{j}", -alt)
    return out


def _distinct(x: np.ndarray, found: list, w: np.ndarray, tol: float) -> bool:
    return all(np.sqrt(np.dot(w, (x - y) ** 2)) > tol for y in found)


def multiplicity_pipeline(k_max: int, omega: float, V: Potential,
                          opts: SolveOptions | None = None, grid: RadialGrid | None = None,
                          dist_tol: float = 1e-3, safety_factor: float = 0.5) -> MultiplicityResult:
    """Look for k_max distinct non-trivial critical points, one per level.

    Level k seeds the solver with sign-alternating sums of the first k
    annulus bumps (amplitude lam_bar^{1/2} from the level-k family) and
    deflates against every solution found so far and against 0.
    """
    if not omega < 0:
        raise ValueError("the multiplicity pipeline needs omega < 0")
    opts = opts or SolveOptions()
    grid = grid or make_grid()
    hyp = check_hypotheses(V, grid)
    violated = not hyp.all_pass
    solutions, attempts, levels = [], [], []
    found: list[np.ndarray] = []
    w = grid.weights
    for k in range(1, k_max + 1):
        entry = {"k": k}
        try:
            fam = build_lemma10_subspace(k, V, grid, omega, safety_factor)
            amplitude = np.sqrt(fam.lambda_bar)
            entry.update(lambda_bar=fam.lambda_bar, nu=fam.nu)
        except SubspaceError as err:
            violated = True
            amplitude = 0.5
            entry["subspace_error"] = str(err)
        status = "no_new_solution"
        for label, seed in _seeds(k, grid, amplitude, opts):
            defl = [RadialFunction(grid, y) for y in found]
            if found:
                defl.append(grid.zeros())
            rep = minimize(seed, omega, V, opts, defl, label=f"k{k}:{label}")
            attempts.append(rep)
            if violated:
                rep.flags.append("hypothesis_violated")
            x = rep.u.values
            if rep.converged and rep.l2_norm > dist_tol and _distinct(x, found, w, dist_tol):
                if not rep.below_threshold:
                    rep.flags.append("above_threshold")
                found.append(x)
                solutions.append(rep)
                status = "found"
                break
        entry["status"] = status
        if status == "found":
            rep = solutions[-1]
            entry.update(energy=rep.energy.total, residual=rep.residual, seed=rep.label,
                         delta_energy=[rep.energy.total - s.energy.total for s in solutions[:-1]])
        levels.append(entry)
        log.info("level %d: %s", k, status)
    return MultiplicityResult(solutions, attempts, levels, hyp, violated)
