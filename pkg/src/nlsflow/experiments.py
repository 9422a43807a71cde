"""Seeded Monte Carlo campaigns and their file outputs."""

from __future__ import annotations

import csv
import dataclasses
import json
import logging
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from nlsflow.fourier import (
    FourierState,
    besov_norm_array,
    sobolev_norm_sq_array,
    wavenumbers,
)
from nlsflow.measures import MeasureSpec, cutoff_mask, sample_coeffs, sample_mu_alpha
from nlsflow.solver import ModelParams, evolve_array, exact_single_mode, step_count
from nlsflow.transport import (
    change_of_variables_oracle,
    divergence_residual,
    flow_jacobian,
    form_convergence_study,
    log_weight,
    log_weight_array,
    linear_orthogonality_residual,
    nonresonant_form,
    resonance_removal_residual,
)
from nlsflow import kernels, solver

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

log = logging.getLogger(__name__)

EXPERIMENTS = ("pushforward", "moments", "tails", "convergence", "validate")
CHUNK = 512  # fixed so outputs do not depend on the worker count


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    experiment: str = "validate"
    alpha: float = 0.8
    beta: float = 0.5
    N: int = 8
    t: float = 0.5
    step: float = 5e-3
    R: float = 2.0
    n_samples: int = 2000
    p_moment: float = 2.0
    lambda_grid: list = field(default_factory=lambda: [round(0.2 * i, 10) for i in range(31)])
    seed: int = 20240601
    out_dir: str = "results"
    # 0 = automatic
    substeps: int = 0
    grid_size: int = 0
    law: str = "gaussian"
    tail_s: float = 0.2
    tail_p: float = 2.0
    tail_B: list = field(default_factory=lambda: [1.0, 1.5, 2.0])
    tail_min_hits: int = 30
    workers: int = 1

    def validate(self) -> "ExperimentConfig":
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"experiment must be one of {EXPERIMENTS}, got {self.experiment!r}")
        for name in ("alpha", "beta", "t", "step", "R", "p_moment", "tail_s", "tail_p"):
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise ConfigError(f"{name} must be a number, got {value!r}")
            if math.isnan(value) or (math.isinf(value) and name != "R"):
                raise ConfigError(f"{name} must be finite, got {value!r}")
        for name in ("N", "n_samples", "seed", "substeps", "grid_size", "tail_min_hits", "workers"):
            if not isinstance(getattr(self, name), int) or isinstance(getattr(self, name), bool):
                raise ConfigError(f"{name} must be an integer, got {getattr(self, name)!r}")
        if self.n_samples < 1:
            raise ConfigError("n_samples must be >= 1")
        if not self.alpha > 0.5:
            raise ConfigError(f"alpha must exceed 1/2, got {self.alpha}")
        if self.N < 0:
            raise ConfigError("N must be >= 0")
        if not self.R > 0:
            raise ConfigError("R must be positive")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        if self.step <= 0:
            raise ConfigError("step must be positive")
        if self.substeps < 0 or self.grid_size < 0 or self.workers < 1:
            raise ConfigError("substeps and grid_size must be >= 0, workers >= 1")
        if self.law not in ("gaussian", "single_mode"):
            raise ConfigError(f"law must be 'gaussian' or 'single_mode', got {self.law!r}")
        if self.experiment in ("pushforward", "moments", "validate", "convergence"):
            try:
                n = step_count(self.t, self.step)
            except ValueError as exc:
                raise ConfigError(str(exc)) from None
            if self.experiment != "convergence" and n % 2:
                raise ConfigError(f"t/step = {n} must be an even integer for Simpson quadrature")
        if self.experiment == "moments" and not self.p_moment > 1:
            raise ConfigError("p_moment must exceed 1")
        if self.experiment == "tails":
            grid = list(self.lambda_grid)
            if not grid:
                raise ConfigError("lambda_grid must be nonempty")
            if any(b <= a for a, b in zip(grid, grid[1:])):
                raise ConfigError("lambda_grid must be strictly ascending")
            if not grid or not list(self.tail_B):
                raise ConfigError("tail_B must be nonempty")
            if not self.alpha - 1 + 1 / self.tail_p > self.tail_s:
                raise ConfigError("tail study needs alpha - 1 + 1/p > s")
            if self.tail_p < 1:
                raise ConfigError("tail_p must be >= 1")
        return self

    def model_params(self, N: int | None = None) -> ModelParams:
        N = self.N if N is None else N
        try:
            return ModelParams(
                beta=self.beta,
                N=N,
                step=self.step,
                grid_size=(self.grid_size or None) if N == self.N else None,
                substeps=self.substeps or None,
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def measure(self, N: int | None = None) -> MeasureSpec:
        return MeasureSpec(self.alpha, self.N if N is None else N, self.R, self.seed)

    def to_dict(self) -> dict[str, Any]:
        return dataclasses.asdict(self)


def _coerce(name: str, value, template):
    kind = type(getattr(template, name))
    if kind is list:
        if isinstance(value, str):
            value = [float(v) for v in value.replace(",", " ").split()]
        return [float(v) for v in value]
    if kind is float and isinstance(value, (int, str)) and not isinstance(value, bool):
        return float(value)
    if kind is int and isinstance(value, str):
        return int(value)
    return value


def load_config(path: str | Path | None = None, **overrides) -> ExperimentConfig:
    """Read a flat TOML key = value file, then apply non-None overrides."""
    template = ExperimentConfig()
    names = {f.name for f in dataclasses.fields(ExperimentConfig)}
    values: dict[str, Any] = {}
    if path is not None:
        try:
            with open(path, "rb") as fh:
                raw = tomllib.load(fh)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from None
        for key, value in raw.items():
            if key not in names:
                raise ConfigError(f"{path}: unknown key {key!r}")
            if isinstance(value, dict):
                raise ConfigError(f"{path}: config must be flat, {key!r} is a table")
            values[key] = value
    values.update({k: v for k, v in overrides.items() if v is not None})
    try:
        coerced = {k: _coerce(k, v, template) for k, v in values.items()}
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad config value: {exc}") from None
    unknown = set(coerced) - names
    if unknown:
        raise ConfigError(f"unknown parameters: {sorted(unknown)}")
    return ExperimentConfig(**coerced).validate()


@dataclass
class ExperimentResult:
    name: str
    config: ExperimentConfig
    columns: list[str]
    rows: list[tuple]
    summary: dict[str, Any]
    ok: bool = True


# -- helpers -------------------------------------------------------------------


def _initial_data(config: ExperimentConfig, indices: np.ndarray, N: int) -> np.ndarray:
    c = sample_coeffs(config.measure(N), indices)
    if config.law == "single_mode":
        keep = np.zeros(2 * N + 1, dtype=bool)
        if N >= 1:
            keep[N + 1] = True
        else:
            keep[N] = True
        c = np.where(keep, c, 0.0)
    return c


def _chunks(n: int):
    return [np.arange(a, min(n, a + CHUNK)) for a in range(0, n, CHUNK)]


def _parallel_map(fn, tasks, workers: int):
    if workers <= 1 or len(tasks) <= 1:
        return [fn(task) for task in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, tasks))


def _mean_se(x: np.ndarray) -> tuple[float, float]:
    n = x.size
    mean = math.fsum(x.tolist()) / n
    if n < 2:
        return mean, 0.0
    var = math.fsum(((x - mean) ** 2).tolist()) / (n - 1)
    return mean, math.sqrt(var / n)


# -- test functionals ------------------------------------------------------------


def phi1(c: np.ndarray) -> np.ndarray:
    N = (c.shape[-1] - 1) // 2
    return np.cos(c[..., N].real)


def phi2(c: np.ndarray) -> np.ndarray:
    return np.exp(-sobolev_norm_sq_array(c, -1.0))


def phi3(c: np.ndarray) -> np.ndarray:
    N = (c.shape[-1] - 1) // 2
    if N < 1:
        return np.zeros(c.shape[:-1])
    return np.sin(c[..., N + 1].imag)


FUNCTIONALS = {"phi1": phi1, "phi2": phi2, "phi3": phi3}

PUSHFORWARD_COLUMNS = [
    "sample_index",
    "cutoff",
    "log_weight_quadrature",
    "log_weight_endpoint",
    "phi1_push",
    "phi1_weighted",
    "phi2_push",
    "phi2_weighted",
    "phi3_push",
    "phi3_weighted",
]


# -- pushforward -----------------------------------------------------------------


def _pushforward_chunk(args):
    config, indices = args
    params = config.model_params()
    c0 = _initial_data(config, indices, config.N)
    chi = cutoff_mask(c0, config.R)
    n = indices.size
    logq = np.full(n, -np.inf)
    loge = np.full(n, -np.inf)
    push = {name: np.zeros(n) for name in FUNCTIONALS}
    weighted = {name: np.zeros(n) for name in FUNCTIONALS}
    if chi.any():
        sel = c0[chi]
        if config.t == 0:
            q = np.zeros(sel.shape[0])
            e = np.zeros(sel.shape[0])
            forward = sel
        else:
            q, e, _ = log_weight_array(sel, config.t, config.alpha, params)
            forward = evolve_array(sel, config.t, params)
        logq[chi] = q
        loge[chi] = e
        for name, phi in FUNCTIONALS.items():
            push[name][chi] = phi(forward)
            weighted[name][chi] = phi(sel) * np.exp(q)
    return indices, chi, logq, loge, push, weighted


def run_pushforward(config: ExperimentConfig) -> ExperimentResult:
    """Paired Monte Carlo check of E[phi(u0) f(t,u0) chi] = E[phi(u(t,u0)) chi]."""
    config.validate()
    parts = _parallel_map(
        _pushforward_chunk, [(config, idx) for idx in _chunks(config.n_samples)], config.workers
    )
    idx = np.concatenate([p[0] for p in parts])
    chi = np.concatenate([p[1] for p in parts])
    logq = np.concatenate([p[2] for p in parts])
    loge = np.concatenate([p[3] for p in parts])
    push = {k: np.concatenate([p[4][k] for p in parts]) for k in FUNCTIONALS}
    weighted = {k: np.concatenate([p[5][k] for p in parts]) for k in FUNCTIONALS}

    if not np.all(np.isfinite(logq[chi])) or not np.all(np.isfinite(loge[chi])):
        raise FloatingPointError("non-finite log weight inside the cutoff")
    weights = np.where(chi, np.exp(np.where(chi, logq, 0.0)), 0.0)
    summary: dict[str, Any] = {
        "n_samples": int(idx.size),
        "cutoff_fraction": float(chi.mean()),
        "max_weight_discrepancy": float(np.max(np.abs(logq[chi] - loge[chi]))) if chi.any() else 0.0,
        "weights_positive_on_cutoff": bool(np.all(weights[chi] > 0)),
        "weights_zero_off_cutoff": bool(np.all(weights[~chi] == 0)),
        "functionals": {},
    }
    ok = summary["weights_positive_on_cutoff"] and summary["weights_zero_off_cutoff"]
    for name in FUNCTIONALS:
        diff = weighted[name] - push[name]
        d_mean, d_se = _mean_se(diff)
        w_mean, w_se = _mean_se(weighted[name])
        p_mean, p_se = _mean_se(push[name])
        z = 0.0 if d_se == 0 and d_mean == 0 else (d_mean / d_se if d_se > 0 else math.inf)
        passed = abs(d_mean) <= 3.0 * d_se
        ok = ok and passed
        summary["functionals"][name] = {
            "weighted_mean": w_mean,
            "weighted_se": w_se,
            "push_mean": p_mean,
            "push_se": p_se,
            "difference": d_mean,
            "paired_se": d_se,
            "z_score": z,
            "pass": bool(passed),
        }
    summary["pass"] = bool(ok)
    rows = []
    for i in range(idx.size):
        row = [int(idx[i]), int(chi[i]), float(logq[i]), float(loge[i])]
        for name in FUNCTIONALS:
            row += [float(push[name][i]), float(weighted[name][i])]
        rows.append(tuple(row))
    return ExperimentResult("pushforward", config, list(PUSHFORWARD_COLUMNS), rows, summary, bool(ok))


# -- weight moments ---------------------------------------------------------------


def _moment_chunk(args):
    config, indices, N = args
    params = config.model_params(N)
    c0 = _initial_data(config, indices, N)
    chi = cutoff_mask(c0, config.R)
    logq = np.full(indices.size, -np.inf)
    loge = np.full(indices.size, -np.inf)
    if chi.any() and config.t != 0:
        q, e, _ = log_weight_array(c0[chi], config.t, config.alpha, params)
        logq[chi], loge[chi] = q, e
    elif chi.any():
        logq[chi], loge[chi] = 0.0, 0.0
    return indices, chi, logq, loge


def run_moment_probe(config: ExperimentConfig) -> ExperimentResult:
    """Empirical ``E[f_N^p | chi = 1]`` for N, 2N, 4N (diagnostic only)."""
    config.validate()
    p = config.p_moment
    table = []
    rows = []
    for N in (config.N, 2 * config.N, 4 * config.N):
        parts = _parallel_map(
            _moment_chunk, [(config, idx, N) for idx in _chunks(config.n_samples)], config.workers
        )
        idx = np.concatenate([q[0] for q in parts])
        chi = np.concatenate([q[1] for q in parts])
        logq = np.concatenate([q[2] for q in parts])
        loge = np.concatenate([q[3] for q in parts])
        if not np.all(np.isfinite(logq[chi])):
            raise FloatingPointError(f"non-finite weight at N={N}")
        wp = np.where(chi, np.exp(p * np.where(chi, logq, 0.0)), 0.0)
        if chi.any():
            cond, cond_se = _mean_se(wp[chi])
        else:
            cond, cond_se = float("nan"), float("nan")
        raw, raw_se = _mean_se(wp)
        table.append(
            {
                "N": N,
                "moment": cond,
                "std_error": cond_se,
                "moment_unnormalized": raw,
                "std_error_unnormalized": raw_se,
                "cutoff_fraction": float(chi.mean()),
                "n_inside": int(chi.sum()),
                "max_log_weight": float(np.max(logq[chi])) if chi.any() else float("nan"),
            }
        )
        for i in range(idx.size):
            rows.append((N, int(idx[i]), int(chi[i]), float(logq[i]), float(loge[i]), float(wp[i])))
    summary = {"p": p, "table": table, "all_weights_finite": True}
    columns = ["N", "sample_index", "cutoff", "log_weight_quadrature", "log_weight_endpoint", "weight_pow_p"]
    return ExperimentResult("moments", config, columns, rows, summary, True)


# -- tail study ---------------------------------------------------------------------


def _tail_chunk(args):
    config, indices = args
    c = _initial_data(config, indices, config.N)
    l2 = np.sqrt(sobolev_norm_sq_array(c, 0.0))
    besov = besov_norm_array(c, config.tail_s, config.tail_p)
    return indices, l2, besov


def fit_tail_slope(lambdas, probs, hits, min_hits: int) -> float:
    """Least-squares slope of log P against lambda^2 over bins with enough hits."""
    lam = np.asarray(lambdas, float)
    probs = np.asarray(probs, float)
    use = np.asarray(hits) >= min_hits
    if use.sum() < 2:
        return float("nan")
    slope, _ = np.polyfit(lam[use] ** 2, np.log(probs[use]), 1)
    return float(slope)


def run_tail_study(config: ExperimentConfig) -> ExperimentResult:
    """Estimate ``P[||X||_{B^s_p} > lambda, ||X||_{L^2} < B]`` on a lambda grid."""
    config.validate()
    parts = _parallel_map(
        _tail_chunk, [(config, idx) for idx in _chunks(config.n_samples)], config.workers
    )
    idx = np.concatenate([q[0] for q in parts])
    l2 = np.concatenate([q[1] for q in parts])
    besov = np.concatenate([q[2] for q in parts])
    n = idx.size
    lambdas = [float(x) for x in config.lambda_grid]
    per_B = []
    any_hits = False
    for B in config.tail_B:
        inside = l2 < B
        hits = [int(np.sum(inside & (besov > lam))) for lam in lambdas]
        any_hits = any_hits or any(hits)
        probs = [h / n for h in hits]
        ses = [math.sqrt(p * (1 - p) / n) for p in probs]
        slope = fit_tail_slope(lambdas, probs, hits, config.tail_min_hits)
        per_B.append(
            {
                "B": float(B),
                "ball_probability": float(inside.mean()),
                "hits": hits,
                "probability": probs,
                "std_error": ses,
                "slope": slope,
                "bins_used": int(sum(h >= config.tail_min_hits for h in hits)),
            }
        )
    if not any_hits:
        raise ValueError("tail study produced zero hits for every (B, lambda)")
    order = sorted(range(len(per_B)), key=lambda i: per_B[i]["B"])
    monotone = all(
        all(a <= b for a, b in zip(per_B[i]["probability"], per_B[j]["probability"]))
        for i, j in zip(order, order[1:])
    )
    summary = {
        "lambda_grid": lambdas,
        "s": config.tail_s,
        "p": config.tail_p,
        "per_B": per_B,
        "monotone_in_B": bool(monotone),
    }
    rows = [(int(idx[i]), float(l2[i]), float(besov[i])) for i in range(n)]
    return ExperimentResult("tails", config, ["sample_index", "l2_norm", "besov_norm"], rows, summary, True)


# -- convergence ---------------------------------------------------------------------


def run_convergence(config: ExperimentConfig) -> ExperimentResult:
    """Step-halving, band-limit doubling and F(u_N) convergence for sample 0."""
    config.validate()
    params = config.model_params()
    Ns = [config.N, 2 * config.N, 4 * config.N]
    u0 = FourierState(4 * config.N, _initial_data(config, np.array([0]), 4 * config.N)[0])
    rep = solver.self_convergence_report(u0, config.t, params, s=0.0, N_values=Ns)
    table = form_convergence_study(u0, config.t, config.alpha, Ns, params)
    rows = []
    for i, r in enumerate(table):
        n_err = rep.N_errors[i - 1] if i > 0 else float("nan")
        rows.append((r.N, r.F, r.difference, n_err))
    summary = {
        "time_errors": rep.time_errors,
        "observed_order": rep.observed_order,
        "substeps": rep.substeps,
        "N_values": Ns,
        "N_errors_L2": rep.N_errors,
        "F": [r.F for r in table],
        "F_differences": [r.difference for r in table[1:]],
    }
    return ExperimentResult("convergence", config, ["N", "F", "F_difference", "solution_difference_L2"], rows, summary, True)


# -- validation ---------------------------------------------------------------------


@dataclass
class Check:
    name: str
    measured: float
    threshold: float
    passed: bool


def _check(name: str, measured: float, threshold: float) -> Check:
    measured = float(measured)
    return Check(name, measured, float(threshold), bool(measured <= threshold))


def run_validate(config: ExperimentConfig) -> ExperimentResult:
    """Bundle of invariant checks at config scale; ``ok`` is False on any failure."""
    config.validate()
    alpha, beta, t = config.alpha, config.beta, config.t
    params = config.model_params()
    N = config.N
    u0 = sample_mu_alpha(config.measure(), 0)
    checks: list[Check] = []

    # alias-free nonlinearity against the direct triple convolution
    small = min(N, 8)
    p_small = params if small == N else config.model_params(small)
    us = sample_mu_alpha(config.measure(small), 1)
    fft = solver.cubic_array(us.coeffs, p_small.grid_size)
    direct = kernels.direct_cubic(np.ascontiguousarray(us.coeffs), small)
    scale = max(np.max(np.abs(direct)), 1e-300)
    checks.append(_check("nonlinearity_fft_vs_direct", np.max(np.abs(fft - direct)) / scale, 1e-12))

    # L^2 conservation over [-t, t]
    n0 = math.sqrt(float(sobolev_norm_sq_array(u0.coeffs, 0.0)))
    drift = 0.0
    for sign in (1.0, -1.0):
        _, states = evolve_array(u0.coeffs, sign * t, params, record=True)
        norms = np.sqrt(sobolev_norm_sq_array(np.asarray(states), 0.0))
        drift = max(drift, float(np.max(np.abs(norms - n0))) / max(n0, 1e-300))
    checks.append(_check("l2_conservation", drift, 1e-8))

    hnorm = float(sobolev_norm_sq_array(u0.coeffs, alpha + 1.5))
    checks.append(
        _check(
            "linear_orthogonality",
            linear_orthogonality_residual(u0, alpha, beta),
            1e-12 * max(hnorm, 1e-300),
        )
    )
    h4 = float(sobolev_norm_sq_array(u0.coeffs, alpha)) ** 2
    checks.append(
        _check("resonance_removal", resonance_removal_residual(u0, alpha, params.grid_size), 1e-12 * max(h4, 1e-300))
    )

    w = log_weight(u0, t, alpha, params, config.R)
    checks.append(_check("weight_dual_formula", w.discrepancy, 1e-6))

    u2 = sample_mu_alpha(config.measure(2), 2)
    p2 = config.model_params(2)
    t_small = t
    jac = flow_jacobian(u2, t_small, p2, method="variational")
    checks.append(_check("jacobian_det", abs(jac.det - 1.0), 1e-6))
    l2 = float(np.sqrt(sobolev_norm_sq_array(u2.coeffs, 0.0)))
    checks.append(_check("divergence", divergence_residual(u2, p2), 1e-5 * (1 + l2**3)))
    cov = change_of_variables_oracle(u2, t_small, alpha, p2)
    checks.append(_check("change_of_variables", cov.max_gap, 1e-5))

    p8 = config.model_params(small)
    T = t / 2 if step_count(t / 2, config.step) % 2 == 0 else t
    Fd = nonresonant_form(us, T, alpha, p8, method="direct")
    Ff = nonresonant_form(us, T, alpha, p8, method="fft")
    checks.append(_check("nonresonant_form_dual_path", abs(Fd - Ff) / max(abs(Ff), 1e-300), 1e-10))

    ok = all(c.passed for c in checks)
    summary = {"pass": ok, "backend": kernels.BACKEND, "checks": [dataclasses.asdict(c) for c in checks]}
    rows = [(c.name, c.measured, c.threshold, int(c.passed)) for c in checks]
    return ExperimentResult("validate", config, ["check", "measured", "threshold", "passed"], rows, summary, ok)


RUNNERS = {
    "pushforward": run_pushforward,
    "moments": run_moment_probe,
    "tails": run_tail_study,
    "convergence": run_convergence,
    "validate": run_validate,
}


def run(config: ExperimentConfig) -> ExperimentResult:
    return RUNNERS[config.experiment](config)


# -- output ------------------------------------------------------------------------


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else repr(x)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    return obj


def output_paths(result: ExperimentResult, out_dir: str | Path) -> dict[str, Path]:
    stem = f"{result.name}_seed{result.config.seed}"
    out = Path(out_dir)
    return {
        "config": out / f"{stem}_config.json",
        "samples": out / f"{stem}_samples.csv",
        "summary": out / f"{stem}_summary.json",
    }


def emit_outputs(result: ExperimentResult, out_dir: str | Path | None = None) -> dict[str, Path]:
    """Write config echo, per-sample CSV and summary JSON; returns the paths."""
    out_dir = Path(out_dir if out_dir is not None else result.config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = output_paths(result, out_dir)
    config = result.config.to_dict()
    paths["config"].write_text(json.dumps(_jsonable(config), indent=2, sort_keys=True) + "\n")
    with open(paths["samples"], "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(result.columns)
        for row in result.rows:
            writer.writerow([_fmt(v) for v in row])
    summary = {"experiment": result.name, "ok": result.ok, "config": config, **result.summary}
    paths["summary"].write_text(json.dumps(_jsonable(summary), indent=2, sort_keys=True) + "\n")
    log.info("wrote %s", ", ".join(str(p) for p in paths.values()))
    return paths
