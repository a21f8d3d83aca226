"""Command-line entry point.

    spmulti --mode multiplicity --omega -0.1 --k-max 3 --out runs/mult
    spmulti --config run.cfg --grid-n 8000

A config file holds one ``key = value`` per line (``#`` starts a comment);
command-line flags override it.  A previous ``summary.json`` is accepted as
a config file too, in which case its config echo is re-used.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, fields
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .energy import f_energy, j_energy, j_gradient
from .grid import RadialGrid, annulus_bump, inner, make_grid
from .oracle import brute_force_phi, hydrogen_eigen, linear_eigensolve
from .poisson import self_consistent_phi
from .potentials import check_hypotheses, make_potential
from .sampling import random_radial_function
from .solver import (SolveOptions, SubspaceError, build_lemma10_subspace,
                     estimate_minimax_level, fit_ray_upper_bound, minimize,
                     multiplicity_pipeline)

log = logging.getLogger("spmulti")

SCHEMA_VERSION = 1
MODES = ("solve", "multiplicity", "minimax", "verify", "hydrogen")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_HYPOTHESIS = 3
EXIT_NONCONVERGED = 4


class ConfigError(ValueError):
    pass


class HypothesisError(ValueError):
    pass


def _to_bool(text) -> bool:
    if isinstance(text, bool):
        return text
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _to_formats(text) -> tuple:
    if isinstance(text, (list, tuple)):
        items = [str(t) for t in text]
    else:
        items = [t.strip() for t in str(text).split(",") if t.strip()]
    return tuple(items)


@dataclass
class RunConfig:
    mode: str = "solve"
    omega: float = -0.1
    potential: str = "coulomb"
    Z: float = 1.0
    alpha: float = 1.0
    mu: float = 1.0
    k_max: int = 3
    grid_kind: str = "log"
    grid_n: int = 4000
    r_max: float = 60.0
    r_min: float = 1e-6
    seed: int = 0
    out: str = "spmulti_out"
    formats: tuple = ("csv", "json")
    max_iters: int = 2000
    grad_tol: float = 1e-7
    precondition: str = "sobolev"
    coupling: bool = True
    deflation_strength: float = 1.0
    polish: str = "newton"
    samples: int = 0          # 0 means 300 * k sphere samples
    safety_factor: float = 0.5
    dist_tol: float = 1e-3
    count: int = 3            # eigenpairs in hydrogen mode
    workers: int = 1

    @classmethod
    def converters(cls) -> dict:
        conv = {}
        for f in fields(cls):
            if f.name == "formats":
                conv[f.name] = _to_formats
            elif f.type == "bool":
                conv[f.name] = _to_bool
            elif f.type == "int":
                conv[f.name] = lambda v: int(float(v)) if float(v).is_integer() else int(v)
            elif f.type == "float":
                conv[f.name] = float
            else:
                conv[f.name] = str
        return conv

    def update(self, values: dict) -> "RunConfig":
        conv = self.converters()
        for key, raw in values.items():
            key = key.replace("-", "_")
            if key not in conv:
                raise ConfigError(f"unknown config key {key!r}")
            try:
                setattr(self, key, conv[key](raw))
            except (TypeError, ValueError) as err:
                raise ConfigError(f"bad value for {key}: {raw!r} ({err})") from None
        return self

    def to_dict(self) -> dict:
        d = asdict(self)
        d["formats"] = list(self.formats)
        return d

    def grid(self) -> RadialGrid:
        return make_grid(self.grid_kind, self.grid_n, self.r_max, self.r_min)

    def potential_obj(self):
        params = {"Z": self.Z, "alpha": self.alpha, "mu": self.mu}
        return make_potential(self.potential, **params)

    def solve_options(self) -> SolveOptions:
        return SolveOptions(max_iters=self.max_iters, grad_tol=self.grad_tol,
                            precondition=self.precondition, coupling_enabled=self.coupling,
                            deflation_strength=self.deflation_strength, seed=self.seed,
                            polish=self.polish)

    def validate(self):
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.grid_n < 10:
            raise ConfigError("grid_n must be at least 10")
        if not math.isfinite(self.omega):
            raise ConfigError("omega must be finite")
        if self.k_max < 1:
            raise ConfigError("k_max must be at least 1")
        if self.count < 1:
            raise ConfigError("count must be at least 1")
        if self.workers < 1:
            raise ConfigError("workers must be at least 1")
        bad = set(self.formats) - {"csv", "json"}
        if bad or not self.formats:
            raise ConfigError(f"formats must be a non-empty subset of csv,json; got {self.formats}")
        try:
            self.grid()
            self.potential_obj()
            self.solve_options()
        except ValueError as err:
            raise ConfigError(str(err)) from None
        if self.mode == "hydrogen" and self.potential != "coulomb":
            raise ConfigError("hydrogen mode compares against the Coulomb closed form")
        if self.mode == "solve" and not self.omega < 0:
            raise ConfigError("solve mode needs omega < 0")
        if self.mode in ("multiplicity", "minimax") and not self.omega < 0:
            raise HypothesisError(f"{self.mode} mode needs omega < 0, got {self.omega}")


def read_config_file(path: str | Path) -> dict:
    text = Path(path).read_text()
    if text.lstrip().startswith("{"):
        data = json.loads(text)
        return dict(data.get("config", data))
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        key, value = line.split("=", 1)
        values[key.strip()] = value.strip()
    return values


# --------------------------------------------------------------------------
# output helpers

def _clean(obj):
    """JSON-safe copy: numpy scalars to Python, non-finite floats to strings."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_clean(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else str(x)
    return obj


def _write_json(path: Path, data):
    path.write_text(json.dumps(_clean(data), indent=2, sort_keys=True) + "\n")


def _write_csv(path: Path, r, u, phi):
    table = np.column_stack([r, u, phi])
    np.savetxt(path, table, fmt="%.17g", delimiter=",", header="r,u,phi", comments="")


# --------------------------------------------------------------------------
# modes

def _seed_amplitude(V, grid, omega) -> float:
    try:
        return float(np.sqrt(build_lemma10_subspace(1, V, grid, omega).lambda_bar))
    except SubspaceError:
        return 0.5


def run_solve(cfg: RunConfig, grid, V):
    amp = _seed_amplitude(V, grid, cfg.omega)
    rep = minimize(amp * annulus_bump(1.0, grid), cfg.omega, V, cfg.solve_options(),
                   label="annulus_bump_1")
    results = {"solutions": [rep.summary()], "seed_amplitude": amp}
    return results, [rep], EXIT_OK if rep.converged else EXIT_NONCONVERGED


def run_multiplicity(cfg: RunConfig, grid, V):
    res = multiplicity_pipeline(cfg.k_max, cfg.omega, V, cfg.solve_options(), grid,
                                dist_tol=cfg.dist_tol, safety_factor=cfg.safety_factor)
    sols = res.solutions
    w = grid.weights
    dist = [[float(np.sqrt(np.dot(w, (a.u.values - b.u.values) ** 2))) for b in sols]
            for a in sols]
    results = {
        "levels": res.levels,
        "solutions": [s.summary() for s in sols],
        "pairwise_l2_distance": dist,
        "hypothesis_violated": res.hypothesis_violated,
        "attempts": len(res.attempts),
        "threshold": -cfg.omega / 2.0,
    }
    ok = len(sols) >= cfg.k_max
    return results, sols, EXIT_OK if ok else EXIT_NONCONVERGED


def _minimax_level(cfg: RunConfig, grid, V, k: int) -> dict:
    try:
        fam = build_lemma10_subspace(k, V, grid, cfg.omega, cfg.safety_factor)
    except SubspaceError as err:
        return {"k": k, "error": str(err), "failed_hypotheses": err.report.failed}
    samples = cfg.samples or 300 * k
    est = estimate_minimax_level(fam, cfg.omega, V, samples, seed=cfg.seed)
    est2 = estimate_minimax_level(fam, cfg.omega, V, 2 * samples, seed=cfg.seed + 1)
    fit = fit_ray_upper_bound(fam, cfg.omega, V, samples, seed=cfg.seed)
    rec = est.to_dict()
    rec.update(lambda_bar=fam.lambda_bar, nu=fam.nu, family_r_max=fam.grid.r_max,
               c_k_upper_doubled=est2.c_k_upper,
               ray_upper_bound={"nu_prime": fit.nu_prime, "c_prime": fit.c_prime,
                            "max_violation": fit.max_violation, "holds": fit.holds})
    return rec


def run_minimax(cfg: RunConfig, grid, V):
    ks = list(range(1, cfg.k_max + 1))
    if cfg.workers > 1:
        with ThreadPoolExecutor(cfg.workers) as pool:
            records = list(pool.map(lambda k: _minimax_level(cfg, grid, V, k), ks))
    else:
        records = [_minimax_level(cfg, grid, V, k) for k in ks]
    if any("error" in r for r in records):
        code = EXIT_HYPOTHESIS
    else:
        code = EXIT_OK if all(r["passes"] for r in records) else EXIT_NONCONVERGED
    return {"estimates": records, "threshold": -cfg.omega / 2.0}, [], code


def _check(name, value, tol) -> dict:
    return {"name": name, "value": value, "tolerance": tol, "passed": bool(value < tol)}


def run_verify(cfg: RunConfig, grid, V):
    rng = np.random.default_rng(cfg.seed)
    omega = cfg.omega
    checks = []

    worst = 0.0
    for _ in range(10):
        u = random_radial_function(grid, rng)
        v = random_radial_function(grid, rng)
        dj = inner(j_gradient(u, omega, V), v)
        eps = 1e-5
        fd = (j_energy(u + eps * v, omega, V).total
              - j_energy(u - eps * v, omega, V).total) / (2 * eps)
        worst = max(worst, abs(dj - fd) / max(abs(fd), 1e-12))
    checks.append(_check("gradient_vs_central_difference", worst, 1e-5))

    worst = 0.0
    for _ in range(10):
        u = random_radial_function(grid, rng)
        J = j_energy(u, omega, V).total
        F = f_energy(u, self_consistent_phi(u).phi, omega, V)
        worst = max(worst, abs(F - J) / (1 + abs(J)))
    checks.append(_check("F_equals_J_on_self_consistent_phi", worst, 1e-9))

    worst = 0.0
    for _ in range(3):
        u = random_radial_function(grid, rng)
        diff = brute_force_phi(u).values - self_consistent_phi(u).phi.values
        worst = max(worst, float(np.max(np.abs(diff))))
    checks.append(_check("poisson_vs_brute_force_sup", worst, 1e-6))

    spec = linear_eigensolve(make_potential("coulomb", Z=1.0), grid, 1)
    checks.append(_check("hydrogen_ground_state_rel_error",
                         abs(spec.eigenvalues[0] + 0.5) / 0.5, 1e-4))
    ok = all(c["passed"] for c in checks)
    return {"checks": checks, "all_passed": ok}, [], EXIT_OK if ok else EXIT_NONCONVERGED


def run_hydrogen(cfg: RunConfig, grid, V):
    spec = linear_eigensolve(V, grid, cfg.count)
    rows = []
    for n in range(1, cfg.count + 1):
        exact, fn = hydrogen_eigen(n, cfg.Z, grid)
        num = float(spec.eigenvalues[n - 1])
        shape = spec.eigenfunctions[n - 1].values - fn.values
        rows.append({"n": n, "numeric": num, "analytic": exact, "abs_error": abs(num - exact),
                     "rel_error": abs(num - exact) / abs(exact),
                     "shape_l2_error": float(np.sqrt(np.dot(grid.weights, shape**2)))})
    return {"eigenvalues": [float(e) for e in spec.eigenvalues], "table": rows}, [], EXIT_OK


RUNNERS = {
    "solve": run_solve,
    "multiplicity": run_multiplicity,
    "minimax": run_minimax,
    "verify": run_verify,
    "hydrogen": run_hydrogen,
}


def run(cfg: RunConfig) -> int:
    """Execute one configured run and write its artifacts; returns the exit status."""
    try:
        cfg.validate()
    except ConfigError as err:
        log.error("config error: %s", err)
        return EXIT_CONFIG
    except HypothesisError as err:
        log.error("hypothesis error: %s", err)
        return EXIT_HYPOTHESIS

    grid = cfg.grid()
    V = cfg.potential_obj()
    hyp = check_hypotheses(V, grid)
    t0 = time.perf_counter()
    results, solutions, code = RUNNERS[cfg.mode](cfg, grid, V)
    elapsed = time.perf_counter() - t0

    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    summary = {
        "schema_version": SCHEMA_VERSION,
        "mode": cfg.mode,
        "config": cfg.to_dict(),
        "grid": grid.config(),
        "potential": V.label,
        "hypotheses": hyp.to_dict(),
        "results": results,
        "exit_status": code,
        "metadata": {"timestamp": datetime.now(timezone.utc).isoformat(),
                     "runtime_seconds": elapsed, "version": __version__},
    }
    if "json" in cfg.formats:
        _write_json(out / "summary.json", summary)
        _write_json(out / "hypotheses.json", hyp.to_dict())
    if "csv" in cfg.formats:
        for k, rep in enumerate(solutions, 1):
            _write_csv(out / f"solution_{k}.csv", grid.nodes, rep.u.values, rep.phi.values)
    log.info("%s finished in %.2fs with status %d; artifacts in %s", cfg.mode, elapsed, code, out)
    return code


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="spmulti",
                                description="Radial Schrodinger-Poisson solutions and levels.")
    p.add_argument("--config", help="key = value file (or a previous summary.json)")
    p.add_argument("--mode", choices=MODES)
    p.add_argument("--omega", type=float)
    p.add_argument("--potential", choices=("coulomb", "power_law", "yukawa", "zero"))
    p.add_argument("--Z", type=float)
    p.add_argument("--alpha", type=float)
    p.add_argument("--mu", type=float)
    p.add_argument("--k-max", dest="k_max", type=int)
    p.add_argument("--grid-n", dest="grid_n", type=int)
    p.add_argument("--r-max", dest="r_max", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                   help="override any other config key")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def parse_config(argv=None) -> tuple[RunConfig, bool]:
    args = build_parser().parse_args(argv)
    cfg = RunConfig()
    if args.config:
        try:
            cfg.update(read_config_file(args.config))
        except (OSError, json.JSONDecodeError) as err:
            raise ConfigError(f"cannot read config {args.config}: {err}") from None
    flags = {k: v for k, v in vars(args).items()
             if k not in ("config", "set", "verbose") and v is not None}
    cfg.update(flags)
    extra = {}
    for item in args.set:
        if "=" not in item:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        key, value = item.split("=", 1)
        extra[key.strip()] = value.strip()
    cfg.update(extra)
    return cfg, args.verbose


def main(argv=None) -> int:
    try:
        cfg, verbose = parse_config(argv)
    except ConfigError as err:
        logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
        log.error("config error: %s", err)
        return EXIT_CONFIG
    logging.basicConfig(level=logging.DEBUG if verbose else logging.INFO,
                        format="%(levelname)s %(message)s")
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
