"""Experiment harness: run the solver comparison and emit report files.

One invocation fits the same GPC problem with each configured solver
(direct Cholesky as the accuracy reference, plain CG, deflated CG with
recycling), then fits random-subset baselines for each requested fraction.
Reports go to three files in the output directory:

  table.csv    per Newton iteration and solver: log p(y|f), relative error
               delta against the Cholesky run of the same iteration, solver
               iterations, cumulative solve seconds
  subset.csv   per fraction and Newton iteration: cumulative solve seconds
               and relative log p(y|f) error against the final full-data
               Cholesky value
  summary.json config echo, per-solver totals, residual histories

Floats are written with 17 significant digits so parsing them back
recovers the exact binary values. Timing covers only the linear solves
(including basis refresh/extraction for deflated CG).
"""

from __future__ import annotations

import csv
import json
import os
from dataclasses import asdict, dataclass, fields, replace

from . import _kernels
from .data import gen_synthetic, load_mnist_idx
from .errors import ConfigError
from .gpc import (
    SOLVER_CG,
    SOLVER_CHOLESKY,
    SOLVER_DEFCG,
    KernelParams,
    laplace_newton,
    likelihood_derivs,
    median_lengthscale,
    rbf_kernel,
)
from .recycle import SELECT_LARGEST, SELECT_SMALLEST
from .solvers import SolverConfig
from .subset import assemble_full_latents, fit_subset

ALL_SOLVERS = (SOLVER_CHOLESKY, SOLVER_CG, SOLVER_DEFCG)


@dataclass
class ExperimentConfig:
    """Flat experiment description; JSON config files mirror these names."""

    dataset: str = "synthetic"
    # synthetic
    n: int = 2000
    d: int = 3
    separation: float = 3.0
    # mnist
    images_path: str | None = None
    labels_path: str | None = None
    digit_a: int = 3
    digit_b: int = 5
    max_n: int = 2000
    # kernel
    theta: float = 1.0
    lengthscale: float | None = None
    jitter: float | None = None
    # linear solver
    tol: float = 1e-5
    max_iters: int | None = None
    ell: int = 12
    recompute_residual_every: int = 50
    k: int = 8
    selection: str = SELECT_LARGEST
    solvers: tuple = ALL_SOLVERS
    # newton loop
    newton_tol: float = 1.0
    max_newton: int = 30
    # baselines and output
    subset_fractions: tuple = (0.05, 0.25)
    output_path: str = "results"
    seed: int = 0

    def validate(self):
        if self.dataset not in ("synthetic", "mnist"):
            raise ConfigError(f"unknown dataset {self.dataset!r}")
        if self.dataset == "synthetic":
            if self.n < 2 or self.d < 1:
                raise ConfigError("synthetic dataset needs n >= 2 and d >= 1")
        else:
            if not self.images_path or not self.labels_path:
                raise ConfigError("mnist dataset needs images_path and labels_path")
            for digit in (self.digit_a, self.digit_b):
                if not 0 <= digit <= 9:
                    raise ConfigError(f"digit out of range: {digit}")
            if self.digit_a == self.digit_b:
                raise ConfigError("digit_a and digit_b must be distinct")
            if self.max_n < 2:
                raise ConfigError("max_n must be at least 2")
        if self.theta <= 0.0:
            raise ConfigError("theta must be positive")
        if self.lengthscale is not None and self.lengthscale <= 0.0:
            raise ConfigError("lengthscale must be positive")
        if self.jitter is not None and self.jitter < 0.0:
            raise ConfigError("jitter must be non-negative")
        if self.tol <= 0.0:
            raise ConfigError("tol must be positive")
        if self.ell < 0 or self.k < 0:
            raise ConfigError("k and ell must be non-negative")
        if self.selection not in (SELECT_SMALLEST, SELECT_LARGEST):
            raise ConfigError(f"unknown selection {self.selection!r}")
        unknown = set(self.solvers) - set(ALL_SOLVERS)
        if unknown:
            raise ConfigError(f"unknown solvers: {sorted(unknown)}")
        if not self.solvers:
            raise ConfigError("at least one solver is required")
        if self.newton_tol <= 0.0 or self.max_newton < 1:
            raise ConfigError("newton_tol must be positive and max_newton >= 1")
        for frac in self.subset_fractions:
            if not 0.0 < frac <= 1.0:
                raise ConfigError(f"fractions must lie in (0, 1], got {frac}")
        return self


@dataclass
class RunRecord:
    """One emitted row of table.csv."""

    newton_iter: int
    solver: str
    logp_tracked: float
    loglik: float
    rel_error_delta: float | None
    solver_iterations: int | None
    cumulative_time_s: float


def config_from_dict(raw):
    known = {f.name for f in fields(ExperimentConfig)}
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    cfg = ExperimentConfig(**raw)
    if isinstance(cfg.solvers, list):
        cfg = replace(cfg, solvers=tuple(cfg.solvers))
    if isinstance(cfg.subset_fractions, list):
        cfg = replace(cfg, subset_fractions=tuple(cfg.subset_fractions))
    return cfg.validate()


def load_config(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON in {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"config root must be a JSON object, got {type(raw).__name__}")
    return config_from_dict(raw)


def rel_error_delta(value, reference):
    """delta = |value - reference| / |reference|."""
    return abs(value - reference) / abs(reference)


def build_dataset(cfg):
    if cfg.dataset == "synthetic":
        return gen_synthetic(cfg.n, cfg.d, cfg.seed, cfg.separation)
    return load_mnist_idx(cfg.images_path, cfg.labels_path, cfg.digit_a, cfg.digit_b, cfg.max_n)


def execute(cfg, records, summary):
    """Run the comparison, appending to ``records``/``summary`` as it goes.

    Progressive mutation means a failure part-way still leaves everything
    computed so far available for emission.
    """
    cfg.validate()
    x, y = build_dataset(cfg)
    lengthscale = cfg.lengthscale if cfg.lengthscale is not None else median_lengthscale(x)
    params = KernelParams(signal_sd=cfg.theta, lengthscale=lengthscale)
    solver_cfg = SolverConfig(
        tol=cfg.tol,
        max_iters=cfg.max_iters,
        ell=cfg.ell,
        recompute_residual_every=cfg.recompute_residual_every,
    )

    summary["config"] = asdict(cfg)
    summary["backend"] = _kernels.BACKEND
    summary["dataset_size"] = int(x.shape[0])
    summary["lengthscale_used"] = float(lengthscale)
    summary["solvers"] = {}
    summary["subset"] = {}

    kernel = rbf_kernel(x, params, cfg.jitter)

    solver_records = {}
    chol_logliks = None
    for solver in cfg.solvers:
        _, newton_records = laplace_newton(
            kernel,
            y,
            solver=solver,
            cfg=solver_cfg,
            newton_tol=cfg.newton_tol,
            max_newton=cfg.max_newton,
            k=cfg.k,
            selection=cfg.selection,
        )
        solver_records[solver] = newton_records
        if solver == SOLVER_CHOLESKY:
            chol_logliks = [r.loglik for r in newton_records]
        cumulative = 0.0
        for i, rec in enumerate(newton_records):
            cumulative += rec.solve_time_s
            delta = None
            if chol_logliks is not None and i < len(chol_logliks):
                delta = rel_error_delta(rec.loglik, chol_logliks[i])
            records.append(
                RunRecord(
                    newton_iter=rec.newton_iter,
                    solver=solver,
                    logp_tracked=rec.psi,
                    loglik=rec.loglik,
                    rel_error_delta=delta,
                    solver_iterations=rec.solver_iterations,
                    cumulative_time_s=cumulative,
                )
            )
        summary["solvers"][solver] = {
            "newton_iterations": len(newton_records),
            "final_psi": float(newton_records[-1].psi),
            "final_loglik": float(newton_records[-1].loglik),
            "solver_iterations": [r.solver_iterations for r in newton_records],
            "total_solver_iterations": sum(r.solver_iterations or 0 for r in newton_records),
            "total_solve_time_s": float(sum(r.solve_time_s for r in newton_records)),
            "residual_histories": [[float(v) for v in r.residual_history] for r in newton_records],
        }

    reference = None
    if chol_logliks is not None:
        reference = chol_logliks[-1]
        summary["reference_final_loglik"] = float(reference)
        for solver, newton_records in solver_records.items():
            summary["solvers"][solver]["rel_error_to_final"] = [
                rel_error_delta(r.loglik, reference) for r in newton_records
            ]

    for frac in cfg.subset_fractions:
        model, newton_records = fit_subset(
            x,
            y,
            frac,
            params,
            newton_tol=cfg.newton_tol,
            seed=cfg.seed,
            jitter=cfg.jitter,
            max_newton=cfg.max_newton,
        )
        cumulative = 0.0
        points = []
        for rec in newton_records:
            cumulative += rec.solve_time_s
            full_latents = assemble_full_latents(model, rec.f)
            loglik, _, _ = likelihood_derivs(full_latents, y)
            point = {
                "newton_iter": rec.newton_iter,
                "cpu_time": cumulative,
                "loglik": float(loglik),
            }
            if reference is not None:
                point["rel_logp_error"] = rel_error_delta(loglik, reference)
            points.append(point)
        summary["subset"][str(frac)] = {"m": model.m, "points": points}


def run_comparison(cfg):
    """Full comparison for one configuration; returns (records, summary)."""
    records = []
    summary = {}
    execute(cfg, records, summary)
    summary["complete"] = True
    return records, summary


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def emit_reports(records, summary, output_path):
    """Write table.csv, summary.json and subset.csv under ``output_path``."""
    os.makedirs(output_path, exist_ok=True)

    with open(os.path.join(output_path, "table.csv"), "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(
            ["newton_iter", "solver", "logp", "rel_error_delta", "solver_iterations", "cumulative_time_s"]
        )
        for rec in records:
            writer.writerow(
                [
                    rec.newton_iter,
                    rec.solver,
                    _fmt(rec.loglik),
                    _fmt(rec.rel_error_delta),
                    _fmt(rec.solver_iterations),
                    _fmt(rec.cumulative_time_s),
                ]
            )

    with open(os.path.join(output_path, "summary.json"), "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")

    with open(os.path.join(output_path, "subset.csv"), "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["fraction", "newton_iter", "cpu_time", "rel_logp_error"])
        for frac, info in summary.get("subset", {}).items():
            for point in info["points"]:
                writer.writerow(
                    [
                        frac,
                        point["newton_iter"],
                        _fmt(point["cpu_time"]),
                        _fmt(point.get("rel_logp_error")),
                    ]
                )
