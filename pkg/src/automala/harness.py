"""CLI, run configuration, persistence, and experiment drivers.

A run is specified by a target, a sampler (the adaptive kernel or a
fixed-step baseline), a schedule, a preconditioner preset, and a seed; it
produces a delimited trace (one row per retained iteration) and a JSON
report whose trace-derived numbers can be recomputed exactly from the
persisted trace. Sweep subcommands fan a run over grids of scales,
dimensions, step sizes, or presets and emit one plot-ready CSV table,
tolerating and marking per-cell failures.

Artifacts are byte-reproducible: identical config and seed give identical
trace and report files, so wall-clock time is printed to stdout rather than
stored.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import os
import re
import sys
import time
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .adaptation import (
    PRECONDITIONER_PRESETS,
    RoundSchedule,
    TuningHistory,
    run_rounds,
)
from .diagnostics import ChainTrace, EssReport, ks_statistic, leapfrogs_per_kiloess, min_ess
from .kernels import mala_step, ula_step
from .phase import DiagonalMass, sample_momentum, sample_thresholds, AugmentedState
from .selector import select_step_size
from .targets import TargetDensity, make_target

OUTPUT_DIR_ENV = "AUTOMALA_OUT"
DEFAULT_OUTPUT_DIR = "automala-runs"

_CONFIG_FIELDS = {
    "target",
    "sampler",
    "rounds",
    "t_unadj",
    "iterations",
    "precond",
    "seed",
    "out_dir",
}

_SAMPLER_SPEC_RE = re.compile(r"^\s*([a-zA-Z_]+)\s*(?:\(([^)]*)\))?\s*$")


@dataclass(frozen=True)
class RunConfig:
    """Everything needed to reproduce one run.

    ``sampler`` is ``automala``, ``mala(eps)``, or ``ula(h)``. Round-based
    runs use ``rounds`` and ``t_unadj``; fixed-step runs use ``iterations``
    (defaulting to 2**rounds). ``out_dir`` locates artifacts and is excluded
    from the config fingerprint.
    """

    target: str
    sampler: str = "automala"
    rounds: int = 14
    t_unadj: int = 1
    iterations: Optional[int] = None
    precond: str = "mixture"
    seed: int = 1
    out_dir: str = ""

    def __post_init__(self):
        parse_sampler(self.sampler)
        make_target(self.target)
        if self.precond not in PRECONDITIONER_PRESETS:
            raise ValueError(
                f"unknown preconditioner preset {self.precond!r}; "
                f"available: {sorted(PRECONDITIONER_PRESETS)}"
            )
        if self.rounds < 1:
            raise ValueError(f"rounds must be >= 1, got {self.rounds}")
        if self.iterations is not None and self.iterations < 1:
            raise ValueError(f"iterations must be >= 1, got {self.iterations}")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        unknown = set(data) - _CONFIG_FIELDS
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    def fingerprint(self) -> str:
        payload = {k: v for k, v in self.to_dict().items() if k != "out_dir"}
        blob = json.dumps(payload, sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


def parse_sampler(spec: str) -> tuple[str, Optional[float]]:
    """Parse ``automala`` / ``mala(eps)`` / ``ula(h)`` into (kind, parameter)."""
    m = _SAMPLER_SPEC_RE.match(spec)
    if not m:
        raise ValueError(f"cannot parse sampler spec {spec!r}")
    kind = m.group(1).lower()
    arg = m.group(2)
    if kind == "automala":
        if arg not in (None, ""):
            raise ValueError("automala takes no parameter")
        return kind, None
    if kind in ("mala", "ula"):
        if arg is None or not arg.strip():
            raise ValueError(f"{kind} requires a step-size parameter, e.g. {kind}(0.1)")
        value = float(arg)
        if not (value > 0.0 and math.isfinite(value)):
            raise ValueError(f"{kind} step size must be positive and finite, got {value}")
        return kind, value
    raise ValueError(f"unknown sampler {kind!r}; available: automala, mala(eps), ula(h)")


def default_output_dir() -> str:
    return os.environ.get(OUTPUT_DIR_ENV, DEFAULT_OUTPUT_DIR)


def _fmt(value) -> str:
    """Serialize one CSV cell; floats carry 17 significant digits."""
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        if math.isnan(value):
            return "NA"
        return format(float(value), ".17g")
    if value is None:
        return "NA"
    return str(value)


def write_trace(path: Path, trace: ChainTrace) -> None:
    """Write one row per iteration with a cumulative leapfrog counter."""
    d = trace.positions.shape[1]
    cumulative = np.cumsum(trace.n_leapfrog)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["iter"]
            + [f"x{i}" for i in range(1, d + 1)]
            + ["eps_t", "accepted", "reversibility_ok", "n_leapfrog_cum", "alpha"]
        )
        for t in range(len(trace)):
            writer.writerow(
                [t + 1]
                + [_fmt(v) for v in trace.positions[t]]
                + [
                    _fmt(trace.eps_t[t]),
                    _fmt(trace.accepted[t]),
                    _fmt(trace.reversibility_ok[t]),
                    str(int(cumulative[t])),
                    _fmt(trace.alpha[t]),
                ]
            )


def read_trace(path) -> ChainTrace:
    """Read a trace file back into memory; exact float round trip."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = list(reader)
    d = sum(1 for name in header if re.fullmatch(r"x\d+", name))
    if d == 0 or header[: d + 1] != ["iter"] + [f"x{i}" for i in range(1, d + 1)]:
        raise ValueError(f"unrecognized trace header in {path}")
    positions = np.array([[float(v) for v in row[1 : d + 1]] for row in rows])
    eps_t = np.array([float(row[d + 1]) for row in rows])
    accepted = np.array([row[d + 2] == "1" for row in rows])
    reversibility = np.array([row[d + 3] == "1" for row in rows])
    cumulative = np.array([int(row[d + 4]) for row in rows], dtype=np.int64)
    alpha = np.array([float(row[d + 5]) for row in rows])
    n_leapfrog = np.diff(cumulative, prepend=0)
    return ChainTrace(positions, eps_t, accepted, reversibility, alpha, n_leapfrog)


def _jsonable(value):
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.bool_,)):
        return bool(value)
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, float) and math.isnan(value):
        return None
    return value


def _ess_section(report: EssReport) -> dict:
    return {
        "ess_batch": report.ess_batch,
        "ess_autocov": report.ess_autocov,
        "ess_known": report.ess_known,
        "min_ess": report.min_ess,
        "per_coordinate": report.per_coordinate,
        "degenerate": report.degenerate,
    }


def analyze_trace(
    target: TargetDensity, trace: ChainTrace, n_leapfrog_total: Optional[int] = None
) -> dict:
    """Recompute every trace-derived report number.

    ``n_leapfrog_total`` charges warmup-round leapfrogs (not present in the
    trace) against the retained samples; it defaults to the trace's own
    counter.
    """
    total = trace.n_leapfrog_total if n_leapfrog_total is None else int(n_leapfrog_total)
    ess_report = min_ess(trace.positions, target.known_margin)
    margin = None
    if target.known_margin is not None:
        km = target.known_margin
        values = trace.positions[:, km.index]
        margin = {
            "index": km.index,
            "mean": float(values.mean()),
            "variance": float(values.var(ddof=1)) if values.size > 1 else 0.0,
            "ks": ks_statistic(values, km.cdf),
        }
    return {
        "n_samples": len(trace),
        "dim": trace.positions.shape[1],
        "acceptance_rate": float(trace.accepted.mean()),
        "mean_alpha": float(trace.alpha.mean()),
        "reversibility_failure_rate": float(1.0 - trace.reversibility_ok.mean()),
        "n_leapfrog_trace": trace.n_leapfrog_total,
        "n_leapfrog_total": total,
        "ess": _ess_section(ess_report),
        "leapfrogs_per_kiloess": leapfrogs_per_kiloess(
            trace, ess_report, n_leapfrog_total=total
        ),
        "margin": margin,
    }


def _tuning_section(history: Optional[TuningHistory]) -> Optional[list]:
    if history is None:
        return None
    return [
        {
            "round": rec.round,
            "n_iterations": rec.n_iterations,
            "eps_init": rec.eps_init,
            "eps_init_next": rec.eps_init_next,
            "diag_std": rec.diag_std,
            "diag_std_next": rec.diag_std_next,
            "n_leapfrog": rec.n_leapfrog,
            "accept_rate": rec.accept_rate,
            "mean_alpha": rec.mean_alpha,
        }
        for rec in history.rounds
    ]


def run_chain(config: RunConfig) -> tuple[ChainTrace, Optional[TuningHistory]]:
    """Execute the configured sampler and return the retained trace."""
    target = make_target(config.target)
    kind, param = parse_sampler(config.sampler)
    rng = np.random.default_rng(config.seed)
    x0 = np.zeros(target.dim)
    if kind == "automala":
        schedule = RoundSchedule(config.rounds, config.t_unadj)
        trace, history = run_rounds(
            target, x0, schedule, rng, eta_dist=PRECONDITIONER_PRESETS[config.precond]
        )
        trace.fingerprint = config.fingerprint()
        return trace, history
    n_iter = config.iterations if config.iterations is not None else 2 ** config.rounds
    mass = DiagonalMass.identity(target.dim)
    d = target.dim
    positions = np.empty((n_iter, d))
    eps_t = np.empty(n_iter)
    accepted = np.empty(n_iter, dtype=bool)
    reversibility = np.ones(n_iter, dtype=bool)
    alpha = np.empty(n_iter)
    n_leapfrog = np.empty(n_iter, dtype=np.int64)
    x = x0
    for t in range(n_iter):
        if kind == "mala":
            result = mala_step(target, mass, x, param, rng)
            x = result.x_next
            accepted[t] = result.accepted
            alpha[t] = result.alpha
            eps_t[t] = result.eps_t
            n_leapfrog[t] = result.n_leapfrog
        else:
            x = ula_step(target, mass, x, param, rng)
            accepted[t] = True
            alpha[t] = 1.0
            eps_t[t] = param
            n_leapfrog[t] = 1
        positions[t] = x
    trace = ChainTrace(positions, eps_t, accepted, reversibility, alpha, n_leapfrog)
    trace.fingerprint = config.fingerprint()
    return trace, None


def cmd_run(config: RunConfig) -> tuple[Path, Path]:
    """Run one chain and persist ``trace.csv`` and ``report.json``."""
    out_dir = Path(config.out_dir or default_output_dir())
    out_dir.mkdir(parents=True, exist_ok=True)
    started = time.perf_counter()
    trace, history = run_chain(config)
    wall_time = time.perf_counter() - started
    target = make_target(config.target)
    total = history.n_leapfrog_total if history is not None else trace.n_leapfrog_total
    report = {
        "fingerprint": config.fingerprint(),
        "config": {k: v for k, v in config.to_dict().items() if k != "out_dir"},
        "analysis": analyze_trace(target, trace, n_leapfrog_total=total),
        "tuning": _tuning_section(history),
    }
    trace_path = out_dir / "trace.csv"
    report_path = out_dir / "report.json"
    write_trace(trace_path, trace)
    with open(report_path, "w") as fh:
        json.dump(_jsonable(report), fh, sort_keys=True, indent=2)
        fh.write("\n")
    # Wall time goes to stdout only: report files must be byte-identical
    # across repeated runs of the same config.
    print(f"run {config.fingerprint()}: {len(trace)} samples in {wall_time:.2f}s "
          f"-> {trace_path}, {report_path}")
    return trace_path, report_path


def read_report(path) -> dict:
    with open(path) as fh:
        return json.load(fh)


def write_table(path: Path, fieldnames: list[str], rows: list[dict]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(fieldnames)
        for row in rows:
            writer.writerow([_fmt(row.get(name)) for name in fieldnames])


def _automala_cell(
    target_spec: str, rounds: int, t_unadj: int, precond: str, seed: int
) -> dict:
    """Round-based run reduced to the metrics a sweep row reports."""
    target = make_target(target_spec)
    rng = np.random.default_rng(seed)
    schedule = RoundSchedule(rounds, t_unadj)
    trace, history = run_rounds(
        target, np.zeros(target.dim), schedule, rng,
        eta_dist=PRECONDITIONER_PRESETS[precond],
    )
    analysis = analyze_trace(target, trace, n_leapfrog_total=history.n_leapfrog_total)
    margin = analysis["margin"] or {}
    return {
        "min_ess": analysis["ess"]["min_ess"],
        "leapfrogs_per_kiloess": analysis["leapfrogs_per_kiloess"],
        "n_leapfrog_total": analysis["n_leapfrog_total"],
        "acceptance_rate": analysis["acceptance_rate"],
        "mean_alpha": analysis["mean_alpha"],
        "reversibility_failure_rate": analysis["reversibility_failure_rate"],
        "margin_mean": margin.get("mean"),
        "margin_var": margin.get("variance"),
        "margin_ks": margin.get("ks"),
        "eps_final": history.rounds[-1].eps_init_next,
        "status": "ok",
    }


SWEEP_FIELDS = [
    "min_ess",
    "leapfrogs_per_kiloess",
    "n_leapfrog_total",
    "acceptance_rate",
    "mean_alpha",
    "reversibility_failure_rate",
    "margin_mean",
    "margin_var",
    "margin_ks",
    "eps_final",
    "status",
]


def _failed_cell(err: Exception) -> dict:
    row = {name: None for name in SWEEP_FIELDS}
    row["status"] = f"error: {err}"
    return row


def default_scale_grid(family: str) -> list[float]:
    if family == "funnel":
        return [1.0 / (0.2 * k) for k in range(1, 21)]
    if family == "banana":
        return [2.0 ** e for e in range(13, -7, -1)]
    raise ValueError(f"no scale grid for family {family!r}")


def cmd_sweep_scale(
    family: str,
    scales: list[float],
    seeds: list[int],
    rounds: int,
    t_unadj: int = 1,
    precond: str = "mixture",
    out_path: Optional[Path] = None,
) -> list[dict]:
    """Metrics per (scale, seed) for the 2-d funnel or banana family."""
    if family not in ("funnel", "banana"):
        raise ValueError(f"scale sweep supports funnel or banana, got {family!r}")
    if not scales:
        raise ValueError("scale grid must be non-empty")
    rows = []
    for scale in scales:
        for seed in seeds:
            spec = f"{family}(2,{scale:.17g})"
            row = {"family": family, "scale": scale, "seed": seed, "target": spec}
            try:
                row.update(_automala_cell(spec, rounds, t_unadj, precond, seed))
            except Exception as err:
                row.update(_failed_cell(err))
            rows.append(row)
    if out_path is not None:
        write_table(out_path, ["family", "scale", "seed", "target"] + SWEEP_FIELDS, rows)
    return rows


def cmd_sweep_dimension(
    family: str,
    dims: list[int],
    seeds: list[int],
    rounds: int,
    t_unadj: int = 1,
    precond: str = "mixture",
    out_path: Optional[Path] = None,
) -> list[dict]:
    """Metrics per (dimension, seed) for a target family at its default scale."""
    spec_for = {
        "funnel": lambda d: f"funnel({d},2)",
        "banana": lambda d: f"banana({d},1)",
        "normal": lambda d: f"normal({d})",
    }
    if family not in spec_for:
        raise ValueError(f"dimension sweep supports funnel, banana, normal; got {family!r}")
    if not dims:
        raise ValueError("dimension grid must be non-empty")
    rows = []
    for d in dims:
        for seed in seeds:
            spec = spec_for[family](d)
            row = {"family": family, "dim": d, "seed": seed, "target": spec}
            try:
                row.update(_automala_cell(spec, rounds, t_unadj, precond, seed))
            except Exception as err:
                row.update(_failed_cell(err))
            rows.append(row)
    if out_path is not None:
        write_table(out_path, ["family", "dim", "seed", "target"] + SWEEP_FIELDS, rows)
    return rows


def cmd_mala_grid(
    target_spec: str,
    mode: str = "relative",
    exponents: Optional[list[int]] = None,
    seeds: list[int] = (1,),
    rounds: int = 14,
    t_unadj: int = 1,
    iterations: Optional[int] = None,
    out_path: Optional[Path] = None,
) -> list[dict]:
    """Acceptance of fixed-step MALA on a grid anchored at the adaptive run.

    In relative mode the adaptive sampler is run first (unpreconditioned,
    so its final step size transfers to unpreconditioned MALA) and the grid
    is eps_final * 2**k; in absolute mode the grid is 2**k directly.
    """
    if mode not in ("relative", "absolute"):
        raise ValueError(f"mode must be relative or absolute, got {mode!r}")
    if exponents is None:
        exponents = list(range(-6, 4)) if mode == "relative" else list(range(-10, 2))
    if not exponents:
        raise ValueError("exponent grid must be non-empty")
    n_iter = iterations if iterations is not None else 2 ** rounds
    target = make_target(target_spec)
    mass = DiagonalMass.identity(target.dim)
    rows = []
    for seed in seeds:
        anchor = None
        if mode == "relative":
            try:
                anchor = _automala_cell(target_spec, rounds, t_unadj, "identity", seed)
            except Exception as err:
                for k in exponents:
                    row = {"target": target_spec, "seed": seed, "mode": mode, "k": k,
                           "eps": None, "mala_mean_alpha": None, "mala_accept_rate": None,
                           "automala_eps_final": None, "automala_mean_alpha": None,
                           "status": f"error: {err}"}
                    rows.append(row)
                continue
        for k in exponents:
            eps = math.ldexp(anchor["eps_final"], k) if mode == "relative" else 2.0 ** k
            row = {
                "target": target_spec,
                "seed": seed,
                "mode": mode,
                "k": k,
                "eps": eps,
                "automala_eps_final": anchor["eps_final"] if anchor else None,
                "automala_mean_alpha": anchor["mean_alpha"] if anchor else None,
            }
            try:
                rng = np.random.default_rng(seed)
                x = np.zeros(target.dim)
                alphas = np.empty(n_iter)
                n_accept = 0
                for t in range(n_iter):
                    result = mala_step(target, mass, x, eps, rng)
                    x = result.x_next
                    alphas[t] = result.alpha
                    n_accept += result.accepted
                row["mala_mean_alpha"] = float(alphas.mean())
                row["mala_accept_rate"] = n_accept / n_iter
                row["status"] = "ok"
            except Exception as err:
                row["mala_mean_alpha"] = None
                row["mala_accept_rate"] = None
                row["status"] = f"error: {err}"
            rows.append(row)
    if out_path is not None:
        write_table(
            out_path,
            ["target", "seed", "mode", "k", "eps", "mala_mean_alpha", "mala_accept_rate",
             "automala_eps_final", "automala_mean_alpha", "status"],
            rows,
        )
    return rows


def estimate_step_size_objective(
    target: TargetDensity,
    eps_init: float,
    n_samples: int,
    rng: np.random.Generator,
) -> float:
    """Monte Carlo estimate of the expected averaged selected step size.

    Starts are exact target draws with identity-mass momenta; each sample
    runs the forward search, forms the proposal, re-runs the search there,
    and contributes (eps + eps') / 2. The tuning rounds seek the fixed point
    of this map in eps_init.
    """
    if target.exact_sampler is None:
        raise ValueError(f"target {target.name!r} has no exact sampler")
    mass = DiagonalMass.identity(target.dim)
    acc = 0.0
    for _ in range(n_samples):
        x = target.exact_sampler(rng)
        p = sample_momentum(mass, rng)
        a, b = sample_thresholds(rng)
        fwd = select_step_size(target, mass, AugmentedState(x, p, a, b), eps_init)
        rev = select_step_size(
            target, mass, AugmentedState(fwd.x_prop, fwd.p_prop, a, b), eps_init
        )
        acc += 0.5 * (fwd.eps + rev.eps)
    return acc / n_samples


def cmd_fixed_point(
    target_spec: str,
    exponents: Optional[list[int]] = None,
    n_samples: int = 2 ** 12,
    seed: int = 1,
    out_path: Optional[Path] = None,
) -> list[dict]:
    """Tabulate the step-size objective over a grid of initial step sizes."""
    if exponents is None:
        exponents = list(range(-7, 8))
    if not exponents:
        raise ValueError("exponent grid must be non-empty")
    target = make_target(target_spec)
    rng = np.random.default_rng(seed)
    rows = []
    for k in exponents:
        eps_init = 2.0 ** k
        row = {"target": target_spec, "k": k, "eps_init": eps_init, "n_samples": n_samples}
        try:
            g_hat = estimate_step_size_objective(target, eps_init, n_samples, rng)
            row["g_hat"] = g_hat
            row["g_minus_eps"] = g_hat - eps_init
            row["status"] = "ok"
        except Exception as err:
            row["g_hat"] = None
            row["g_minus_eps"] = None
            row["status"] = f"error: {err}"
        rows.append(row)
    if out_path is not None:
        write_table(
            out_path,
            ["target", "k", "eps_init", "n_samples", "g_hat", "g_minus_eps", "status"],
            rows,
        )
    return rows


def cmd_precond_ablation(
    target_spec: str,
    presets: list[str] = ("single", "smooth", "mixture"),
    seeds: list[int] = (1,),
    rounds: int = 14,
    t_unadj: int = 1,
    out_path: Optional[Path] = None,
) -> list[dict]:
    """Compare preconditioner presets on one target, one row per (preset, seed)."""
    for preset in presets:
        if preset not in PRECONDITIONER_PRESETS:
            raise ValueError(f"unknown preset {preset!r}")
    rows = []
    for preset in presets:
        for seed in seeds:
            row = {"target": target_spec, "preset": preset, "seed": seed}
            try:
                row.update(_automala_cell(target_spec, rounds, t_unadj, preset, seed))
            except Exception as err:
                row.update(_failed_cell(err))
            rows.append(row)
    if out_path is not None:
        write_table(out_path, ["target", "preset", "seed"] + SWEEP_FIELDS, rows)
    return rows


def _int_list(text: str) -> list[int]:
    return [int(v) for v in text.split(",") if v.strip()]


def _float_list(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="automala",
        description="Gradient-based MCMC with per-iteration automatic step-size selection.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one chain and write trace + report")
    run.add_argument("--target", required=True, help="e.g. funnel(2,2), normal(8), aniso(4)")
    run.add_argument("--sampler", default="automala", help="automala | mala(eps) | ula(h)")
    run.add_argument("--rounds", type=int, default=14)
    run.add_argument("--t-unadj", type=int, default=1)
    run.add_argument("--iterations", type=int, default=None,
                     help="flat iteration count for mala/ula (default 2**rounds)")
    run.add_argument("--precond", default="mixture",
                     choices=sorted(PRECONDITIONER_PRESETS))
    run.add_argument("--seed", type=int, default=1)
    run.add_argument("--out", default=None)

    scale = sub.add_parser("sweep-scale", help="scale-parameter sweep (2-d funnel/banana)")
    scale.add_argument("--family", required=True, choices=["funnel", "banana"])
    scale.add_argument("--scales", type=_float_list, default=None,
                       help="comma-separated scale values (default: built-in grid)")
    scale.add_argument("--seeds", type=_int_list, default=[1])
    scale.add_argument("--rounds", type=int, default=14)
    scale.add_argument("--t-unadj", type=int, default=1)
    scale.add_argument("--precond", default="mixture", choices=sorted(PRECONDITIONER_PRESETS))
    scale.add_argument("--out", default=None)

    dim = sub.add_parser("sweep-dim", help="dimension sweep for one target family")
    dim.add_argument("--family", required=True, choices=["funnel", "banana", "normal"])
    dim.add_argument("--dims", type=_int_list, default=[2, 4, 8, 16, 32, 64])
    dim.add_argument("--seeds", type=_int_list, default=[1])
    dim.add_argument("--rounds", type=int, default=14)
    dim.add_argument("--t-unadj", type=int, default=1)
    dim.add_argument("--precond", default="mixture", choices=sorted(PRECONDITIONER_PRESETS))
    dim.add_argument("--out", default=None)

    grid = sub.add_parser("mala-grid", help="fixed-step MALA acceptance over a step grid")
    grid.add_argument("--target", required=True)
    grid.add_argument("--mode", default="relative", choices=["relative", "absolute"])
    grid.add_argument("--ks", type=_int_list, default=None,
                      help="comma-separated grid exponents")
    grid.add_argument("--seeds", type=_int_list, default=[1])
    grid.add_argument("--rounds", type=int, default=14)
    grid.add_argument("--t-unadj", type=int, default=1)
    grid.add_argument("--iterations", type=int, default=None)
    grid.add_argument("--out", default=None)

    fixed = sub.add_parser("fixed-point", help="step-size objective over an eps_init grid")
    fixed.add_argument("--target", required=True)
    fixed.add_argument("--ks", type=_int_list, default=None)
    fixed.add_argument("--samples", type=int, default=2 ** 12)
    fixed.add_argument("--seed", type=int, default=1)
    fixed.add_argument("--out", default=None)

    precond = sub.add_parser("precond-ablation", help="compare preconditioner presets")
    precond.add_argument("--target", required=True)
    precond.add_argument("--presets", default="single,smooth,mixture",
                         help="comma-separated preset names")
    precond.add_argument("--seeds", type=_int_list, default=[1])
    precond.add_argument("--rounds", type=int, default=14)
    precond.add_argument("--t-unadj", type=int, default=1)
    precond.add_argument("--out", default=None)

    return parser


def _table_path(out: Optional[str], default_name: str) -> Path:
    base = Path(out) if out else Path(default_output_dir())
    if base.suffix == ".csv":
        return base
    return base / default_name


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "run":
        config = RunConfig(
            target=args.target,
            sampler=args.sampler,
            rounds=args.rounds,
            t_unadj=args.t_unadj,
            iterations=args.iterations,
            precond=args.precond,
            seed=args.seed,
            out_dir=args.out or default_output_dir(),
        )
        cmd_run(config)
        return 0
    if args.command == "sweep-scale":
        scales = args.scales if args.scales else default_scale_grid(args.family)
        path = _table_path(args.out, f"sweep_scale_{args.family}.csv")
        cmd_sweep_scale(args.family, scales, args.seeds, args.rounds,
                        args.t_unadj, args.precond, path)
        print(f"wrote {path}")
        return 0
    if args.command == "sweep-dim":
        path = _table_path(args.out, f"sweep_dim_{args.family}.csv")
        cmd_sweep_dimension(args.family, args.dims, args.seeds, args.rounds,
                            args.t_unadj, args.precond, path)
        print(f"wrote {path}")
        return 0
    if args.command == "mala-grid":
        path = _table_path(args.out, "mala_grid.csv")
        cmd_mala_grid(args.target, args.mode, args.ks, args.seeds, args.rounds,
                      args.t_unadj, args.iterations, path)
        print(f"wrote {path}")
        return 0
    if args.command == "fixed-point":
        path = _table_path(args.out, "fixed_point.csv")
        cmd_fixed_point(args.target, args.ks, args.samples, args.seed, path)
        print(f"wrote {path}")
        return 0
    if args.command == "precond-ablation":
        presets = [p.strip() for p in args.presets.split(",") if p.strip()]
        path = _table_path(args.out, "precond_ablation.csv")
        cmd_precond_ablation(args.target, presets, args.seeds, args.rounds,
                             args.t_unadj, path)
        print(f"wrote {path}")
        return 0
    return 2


if __name__ == "__main__":
    sys.exit(main())
