"""Experiment orchestration: the approximation-error study and the
selection-consistency study.

Every replicate's work is a pure function of (config, task key); the task
seed is derived from the master seed and the key, results are gathered by
key and written in sorted key order.  Output bytes therefore depend only
on (config, master_seed), not on worker count or completion order.
"""

from __future__ import annotations

import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import partial
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import rng
from .dataio import write_csv
from .errors import ContractViolation
from .evidence import laplace_error_max
from .modelspace import ModelPrior
from .priors import PriorSpec
from .scan import select_model
from .simgen import ScalingConfig, SimConfig, scaling_config_instantiate, simulate_dataset

LAPLACE_ERROR_HEADER = (
    "n", "p", "q", "replicate", "seed", "max_error", "models_scored", "separated_count",
)
CONSISTENCY_HEADER = (
    "n", "p", "q", "beta_min", "replicate", "seed", "recovered", "selected_model",
)
FIGURE_HEADER = ("n", "q", "mean_error", "se_error")


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str  # laplace_error | consistency
    n_values: tuple[int, ...]
    replicates: int
    B: int
    master_seed: int
    out_path: str
    gamma: float = 1.0
    q_values: tuple[int, ...] = ()
    scaling: Optional[ScalingConfig] = None
    workers: int = 1
    p_override: Optional[int] = None
    sigma: float = 1.0
    j0_size: int = 2
    method: str = "laplace"
    budget: int = 10**6
    svg: bool = False

    def __post_init__(self):
        if self.experiment not in ("laplace_error", "consistency"):
            raise ContractViolation(f"unknown experiment {self.experiment!r}")
        if self.experiment == "laplace_error" and not self.q_values:
            raise ContractViolation("laplace_error requires q_values")
        if self.experiment == "consistency" and self.scaling is None:
            raise ContractViolation("consistency requires a scaling config")
        if self.replicates < 1 or self.workers < 1 or self.B < 2:
            raise ContractViolation("replicates, workers and B must be positive")


def _laplace_error_task(cfg: ExperimentConfig, key: tuple[int, int, int]):
    n, q, rep = key
    seed = rng.mix64(cfg.master_seed, n, q, rep)
    p = cfg.p_override if cfg.p_override else n // 2
    sim = SimConfig(n=n, p=p, q_true=q, amplitude=2.0, family="logistic", seed=seed)
    ds, _, _ = simulate_dataset(sim)
    report = laplace_error_max(
        ds, q, PriorSpec(sigma=cfg.sigma), cfg.B, seed=rng.mix64(seed, 3), budget=cfg.budget
    )
    return (
        n, p, q, rep, seed,
        report.max_error, report.models_scored, report.separated_count,
    )


def _consistency_task(cfg: ExperimentConfig, key: tuple[int, int]):
    n, rep = key
    p, q_raw, beta_min = scaling_config_instantiate(cfg.scaling, n)
    # the scan bound must admit the true support; q = n^psi alone can sit
    # below the configured |J0| at desk-scale n
    q = max(q_raw, cfg.j0_size)
    seed = rng.mix64(cfg.master_seed, n, rep)
    sim = SimConfig(
        n=n, p=p, q_true=cfg.j0_size, amplitude=beta_min, family="logistic", seed=seed
    )
    ds, _, J0 = simulate_dataset(sim)
    mp = ModelPrior(gamma=cfg.gamma, q_max=q, p=p)
    result = select_model(
        ds, PriorSpec(sigma=cfg.sigma), mp,
        method=cfg.method, B=cfg.B, seed=rng.mix64(seed, 3), budget=cfg.budget,
    )
    recovered = int(result.best == J0)
    return (n, p, q, beta_min, rep, seed, recovered, result.best.label())


def _gather(cfg: ExperimentConfig, task_fn, keys):
    worker = partial(task_fn, cfg)
    if cfg.workers == 1:
        return [worker(key) for key in keys]
    with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
        return list(pool.map(worker, keys))


def run_laplace_error_experiment(cfg: ExperimentConfig):
    """Rows per (n, q, replicate) plus the (n, q) aggregate table; writes
    laplace_error.csv and figure1.csv under cfg.out_path."""
    keys = [
        (n, q, rep)
        for n in cfg.n_values
        for q in cfg.q_values
        for rep in range(cfg.replicates)
    ]
    rows = _gather(cfg, _laplace_error_task, keys)
    agg = aggregate_laplace_error(rows)
    out = Path(cfg.out_path)
    write_csv(out / "laplace_error.csv", LAPLACE_ERROR_HEADER, rows)
    emit_figure_data(agg, out / "figure1.csv", svg=cfg.svg)
    return rows, agg


def aggregate_laplace_error(rows: Sequence[tuple]) -> list[tuple]:
    """Mean and standard error of max_error per (n, q), sorted."""
    cells: dict[tuple[int, int], list[float]] = {}
    for row in rows:
        cells.setdefault((row[0], row[2]), []).append(row[5])
    agg = []
    for (n, q) in sorted(cells):
        vals = np.asarray(cells[(n, q)])
        se = float(vals.std(ddof=1) / np.sqrt(len(vals))) if len(vals) > 1 else 0.0
        agg.append((n, q, float(vals.mean()), se))
    return agg


def run_consistency_experiment(cfg: ExperimentConfig):
    """Rows per (n, replicate) plus recovery rates per n; writes
    consistency.csv and consistency_summary.csv under cfg.out_path."""
    keys = [(n, rep) for n in cfg.n_values for rep in range(cfg.replicates)]
    rows = _gather(cfg, _consistency_task, keys)
    agg = aggregate_consistency(rows)
    out = Path(cfg.out_path)
    write_csv(out / "consistency.csv", CONSISTENCY_HEADER, rows)
    write_csv(
        out / "consistency_summary.csv",
        ("n", "p", "q", "beta_min", "replicates", "recovery_rate"),
        agg,
    )
    return rows, agg


def aggregate_consistency(rows: Sequence[tuple]) -> list[tuple]:
    cells: dict[tuple, list[int]] = {}
    meta = {}
    for row in rows:
        n = row[0]
        cells.setdefault(n, []).append(row[6])
        meta[n] = (row[1], row[2], row[3])
    agg = []
    for n in sorted(cells):
        p, q, beta_min = meta[n]
        vals = cells[n]
        agg.append((n, p, q, beta_min, len(vals), float(np.mean(vals))))
    return agg


def emit_figure_data(agg_rows: Sequence[tuple], out_path, svg: bool = False) -> None:
    """Plot-ready aggregate: one row per (n, q).  The CSV is the contract;
    the optional SVG is decorative."""
    out_path = Path(out_path)
    if not agg_rows:
        warnings.warn(f"no aggregate rows; writing header-only {out_path}", stacklevel=2)
    write_csv(out_path, FIGURE_HEADER, agg_rows)
    if svg and agg_rows:
        _write_figure_svg(agg_rows, out_path.with_suffix(".svg"))


def _write_figure_svg(agg_rows: Sequence[tuple], path) -> None:
    width, height, margin = 640, 440, 60
    ns = sorted({r[0] for r in agg_rows})
    qs = sorted({r[1] for r in agg_rows})
    errs = [r[2] for r in agg_rows]
    lo_n, hi_n = min(ns), max(ns)
    hi_e = max(errs) * 1.1 or 1.0

    def sx(n):
        span = (hi_n - lo_n) or 1
        return margin + (n - lo_n) / span * (width - 2 * margin)

    def sy(e):
        return height - margin - e / hi_e * (height - 2 * margin)

    colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b"]
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{margin}" y1="{height - margin}" x2="{width - margin}" '
        f'y2="{height - margin}" stroke="black"/>',
        f'<line x1="{margin}" y1="{margin}" x2="{margin}" y2="{height - margin}" stroke="black"/>',
        f'<text x="{width // 2}" y="{height - 16}" text-anchor="middle" font-size="13">sample size n</text>',
        f'<text x="16" y="{height // 2}" font-size="13" transform="rotate(-90 16 {height // 2})" '
        f'text-anchor="middle">mean max error</text>',
    ]
    for i, q in enumerate(qs):
        pts = [(sx(r[0]), sy(r[2])) for r in sorted(agg_rows) if r[1] == q]
        coords = " ".join(f"{x:.1f},{y:.1f}" for x, y in pts)
        color = colors[i % len(colors)]
        parts.append(f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="2"/>')
        parts.append(
            f'<text x="{width - margin + 6}" y="{pts[-1][1] + 4:.1f}" font-size="12" '
            f'fill="{color}">q={q}</text>'
        )
    parts.append("</svg>")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(parts) + "\n")
