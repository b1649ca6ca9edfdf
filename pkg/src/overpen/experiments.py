"""Seeded Monte Carlo benchmark of bin-size selection criteria.

A benchmark sweeps densities x sample sizes x criteria over N independent
trials per cell.  The sample of a trial depends only on (master seed,
density, n, trial index), so all criteria of a trial are evaluated on the
same data and pairwise criterion comparisons are paired by construction.
Per-trial records and per-cell quantile summaries round-trip through CSV;
identical configurations produce byte-identical files, regardless of how
many worker processes run the sweep.
"""

from __future__ import annotations

import csv
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .criteria import Criterion, adaptive_constant_from_risks, criterion_from_string, penalty_vector
from .densities import TargetDensity, draw_samples, entropy_term, get_density
from .rng import derive_seed
from .selection import default_model_grid

__all__ = [
    "ExperimentConfig",
    "TrialRecord",
    "SummaryRow",
    "ExperimentSummary",
    "run_trial",
    "run_benchmark",
    "aggregate",
    "write_records",
    "read_records",
    "write_plotdata",
    "order_statistic_quantile",
]

DEFAULT_QUANTILE_LEVELS = (5.0, 25.0, 50.0, 75.0, 95.0)

TRIALS_COLUMNS = (
    "density", "n", "criterion", "trial", "seed",
    "selected_dim", "kl", "oracle_dim", "oracle_kl", "runtime_ms",
)


@dataclass(frozen=True)
class ExperimentConfig:
    densities: tuple[str, ...]
    sample_sizes: tuple[int, ...]
    trials: int
    criteria: tuple[str, ...]
    master_seed: int = 1
    quantile_levels: tuple[float, ...] = DEFAULT_QUANTILE_LEVELS
    max_cells: int | None = None        # None: n / log(n+1) rule
    threads: int = 1
    record_runtime: bool = False        # wall time breaks byte-identity; opt in
    br_variant: str = "paper"
    aic1_base: str = "one-plus"

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        if any(n < 1 for n in self.sample_sizes):
            raise ValueError("sample sizes must be >= 1")
        levels = self.quantile_levels
        if any(not 0.0 < q < 100.0 for q in levels) or list(levels) != sorted(set(levels)):
            raise ValueError("quantile levels must be strictly increasing in (0, 100)")
        for c in self.criteria:
            criterion_from_string(c, self.br_variant, self.aic1_base)
        for d in self.densities:
            get_density(d)


@dataclass(frozen=True)
class TrialRecord:
    density: str
    n: int
    criterion: str
    trial: int
    seed: int
    selected_dim: int
    kl: float
    oracle_dim: int
    oracle_kl: float
    runtime_ms: float = 0.0


@dataclass(frozen=True)
class SummaryRow:
    density: str
    n: int
    criterion: str
    quantiles: tuple[float, ...]
    inf_count: int
    mean_finite: float
    trials: int


@dataclass(frozen=True)
class ExperimentSummary:
    levels: tuple[float, ...]
    rows: tuple[SummaryRow, ...]
    warnings: tuple[str, ...] = ()


def order_statistic_quantile(values, q: float) -> float:
    """Inclusive order statistic: element ceil(q * N) - 1 of the sorted list.

    q is a proportion in (0, 1); infinities sort above every finite value.
    """
    arr = np.sort(np.asarray(values, dtype=float))
    if arr.size == 0:
        raise ValueError("quantile of an empty list")
    idx = min(max(math.ceil(q * arr.size) - 1, 0), arr.size - 1)
    return float(arr[idx])


# ---------------------------------------------------------------------------
# per-cell evaluation
# ---------------------------------------------------------------------------


class _CellTables:
    """Precomputed per-(density, n) quantities shared by every trial."""

    def __init__(self, density: TargetDensity, n: int, max_cells: int | None):
        self.density = density
        self.n = n
        self.models = default_model_grid(density.support, n, max_cells)
        self.dims = np.array([m.dim for m in self.models])
        self.breaks = [np.asarray(m.breakpoints) for m in self.models]
        self.mus = [m.cell_measures for m in self.models]
        ent = entropy_term(density)
        self.probs = []
        self.bias = np.empty(len(self.models))
        for i, t in enumerate(self.breaks):
            p = np.diff(density.cdf(t))
            self.probs.append(p)
            pos = p > 0.0
            self.bias[i] = ent - float(
                np.sum(p[pos] * np.log(p[pos] / self.mus[i][pos]))
            )

    def trial_stats(self, samples: np.ndarray):
        """(empirical risk, true KL of the fit) per model for one sample."""
        xs = np.sort(samples)
        k = len(self.models)
        emp_risk = np.empty(k)
        kl = np.empty(k)
        for i in range(k):
            t, mu, p = self.breaks[i], self.mus[i], self.probs[i]
            counts = np.diff(np.searchsorted(xs, t, side="left"))
            counts[-1] += np.count_nonzero(xs == t[-1])
            pn = counts / self.n
            occ = pn > 0.0
            emp_risk[i] = -float(np.sum(pn[occ] * np.log(pn[occ] / mu[occ])))
            pos = p > 0.0
            if np.any(pos & ~occ):
                kl[i] = np.inf
            else:
                kl[i] = self.bias[i] + float(
                    np.sum(p[pos] * np.log(p[pos] / pn[pos]))
                )
        return emp_risk, kl


def _select_index(crit: np.ndarray, dims: np.ndarray) -> int:
    finite_order = sorted(range(crit.size), key=lambda i: (crit[i], dims[i], i))
    return int(finite_order[0])


def _evaluate_trial(tables: _CellTables, config: ExperimentConfig,
                    criteria: list[tuple[str, Criterion]], trial: int):
    seed = derive_seed(config.master_seed, tables.density.id, tables.n, trial)
    samples = draw_samples(tables.density, seed, tables.n)
    emp_risk, kl = tables.trial_stats(samples)
    oracle_idx = _select_index(kl, tables.dims)
    records = []
    for label, criterion in criteria:
        t0 = time.perf_counter()
        if criterion.kind == "adaptive" and criterion.c_hat is None:
            trace = adaptive_constant_from_risks(
                tables.dims, -emp_risk, tables.n, criterion.alpha_grid
            )
            pens = penalty_vector(
                Criterion("overpen", c=trace.c_hat), tables.dims, tables.n
            )
        else:
            pens = penalty_vector(criterion, tables.dims, tables.n)
        crit = np.where(np.isfinite(pens), emp_risk + pens, np.inf)
        sel = _select_index(crit, tables.dims)
        elapsed = (time.perf_counter() - t0) * 1e3
        records.append(TrialRecord(
            density=tables.density.id,
            n=tables.n,
            criterion=label,
            trial=trial,
            seed=seed,
            selected_dim=int(tables.dims[sel]),
            kl=float(kl[sel]),
            oracle_dim=int(tables.dims[oracle_idx]),
            oracle_kl=float(kl[oracle_idx]),
            runtime_ms=elapsed if config.record_runtime else 0.0,
        ))
    return records


def run_trial(config: ExperimentConfig, density_id: str, n: int,
              criterion: str, trial_index: int) -> TrialRecord:
    """One trial of one criterion; the sample depends only on
    (master seed, density, n, trial index), never on the criterion."""
    tables = _CellTables(get_density(density_id), n, config.max_cells)
    parsed = criterion_from_string(criterion, config.br_variant, config.aic1_base)
    return _evaluate_trial(tables, config, [(criterion, parsed)], trial_index)[0]


def _run_cell(args):
    config, density_id, n, trial_lo, trial_hi = args
    tables = _CellTables(get_density(density_id), n, config.max_cells)
    criteria = [
        (c, criterion_from_string(c, config.br_variant, config.aic1_base))
        for c in config.criteria
    ]
    records = []
    for trial in range(trial_lo, trial_hi):
        try:
            records.extend(_evaluate_trial(tables, config, criteria, trial))
        except Exception:  # failed trials are recorded in band, never abort
            seed = derive_seed(config.master_seed, density_id, n, trial)
            for label, _ in criteria:
                records.append(TrialRecord(
                    density=density_id, n=n, criterion=label, trial=trial,
                    seed=seed, selected_dim=-1, kl=float("nan"),
                    oracle_dim=-1, oracle_kl=float("nan"), runtime_ms=0.0,
                ))
    return records


def run_benchmark(config: ExperimentConfig):
    """Full sweep; returns (records, summary) in canonical order."""
    chunk = 25  # trials per task: small enough to balance, large enough to amortize
    tasks = []
    for density_id in config.densities:
        for n in config.sample_sizes:
            for lo in range(0, config.trials, chunk):
                tasks.append((config, density_id, n, lo, min(lo + chunk, config.trials)))
    if config.threads > 1:
        with ProcessPoolExecutor(max_workers=config.threads) as pool:
            chunks = list(pool.map(_run_cell, tasks))
    else:
        chunks = [_run_cell(t) for t in tasks]
    records = [r for chunk_records in chunks for r in chunk_records]
    density_order = {d: i for i, d in enumerate(config.densities)}
    n_order = {n: i for i, n in enumerate(config.sample_sizes)}
    criterion_order = {c: i for i, c in enumerate(config.criteria)}
    records.sort(key=lambda r: (
        density_order[r.density], n_order[r.n], criterion_order[r.criterion], r.trial
    ))
    summary = aggregate(records, config.quantile_levels)
    return records, summary


def aggregate(records, levels=DEFAULT_QUANTILE_LEVELS) -> ExperimentSummary:
    """Per-cell order-statistic quantiles with infinities counted separately."""
    cells: dict[tuple[str, int, str], list[float]] = {}
    for r in records:
        cells.setdefault((r.density, r.n, r.criterion), []).append(r.kl)
    rows = []
    warnings = []
    for (density, n, criterion), values in cells.items():
        arr = np.asarray(values, dtype=float)
        failed = int(np.count_nonzero(np.isnan(arr)))
        if failed:
            warnings.append(
                f"{density}/n={n}/{criterion}: {failed} failed trial(s) excluded"
            )
            arr = arr[~np.isnan(arr)]
        if arr.size == 0:
            warnings.append(f"{density}/n={n}/{criterion}: empty cell omitted")
            continue
        quantiles = tuple(
            order_statistic_quantile(arr, q / 100.0) for q in levels
        )
        finite = arr[np.isfinite(arr)]
        rows.append(SummaryRow(
            density=density,
            n=n,
            criterion=criterion,
            quantiles=quantiles,
            inf_count=int(np.count_nonzero(np.isinf(arr))),
            mean_finite=float(np.mean(finite)) if finite.size else float("nan"),
            trials=int(arr.size),
        ))
    return ExperimentSummary(levels=tuple(levels), rows=tuple(rows),
                             warnings=tuple(warnings))


# ---------------------------------------------------------------------------
# persistence
# ---------------------------------------------------------------------------


def _fmt(x) -> str:
    if isinstance(x, float):
        return repr(x)
    return str(x)


def write_records(records, summary: ExperimentSummary, out_dir) -> dict:
    """Write trials.csv and summary.csv; overwrites existing files."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    trials_path = out / "trials.csv"
    with trials_path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(TRIALS_COLUMNS)
        for r in records:
            writer.writerow([
                r.density, r.n, r.criterion, r.trial, r.seed,
                r.selected_dim, _fmt(r.kl), r.oracle_dim, _fmt(r.oracle_kl),
                _fmt(r.runtime_ms),
            ])
    summary_path = out / "summary.csv"
    qcols = [f"q{int(round(q)):02d}" for q in summary.levels]
    with summary_path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["density", "n", "criterion", *qcols, "inf_count", "mean_finite", "trials"]
        )
        for row in summary.rows:
            writer.writerow([
                row.density, row.n, row.criterion,
                *[_fmt(q) for q in row.quantiles],
                row.inf_count, _fmt(row.mean_finite), row.trials,
            ])
    return {"trials": trials_path, "summary": summary_path}


def read_records(path) -> list[TrialRecord]:
    """Read back a trials.csv written by :func:`write_records`."""
    records = []
    with Path(path).open(newline="") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            records.append(TrialRecord(
                density=row["density"],
                n=int(row["n"]),
                criterion=row["criterion"],
                trial=int(row["trial"]),
                seed=int(row["seed"]),
                selected_dim=int(row["selected_dim"]),
                kl=float(row["kl"]),
                oracle_dim=int(row["oracle_dim"]),
                oracle_kl=float(row["oracle_kl"]),
                runtime_ms=float(row["runtime_ms"]),
            ))
    return records


def write_plotdata(records, summary: ExperimentSummary, out_dir) -> dict:
    """Long-format CSVs for external plotting of the benchmark results."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    box_path = out / "kl_quantiles_long.csv"
    with box_path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["density", "n", "criterion", "level", "value"])
        for row in summary.rows:
            for level, value in zip(summary.levels, row.quantiles):
                writer.writerow(
                    [row.density, row.n, row.criterion, _fmt(level), _fmt(value)]
                )
    inf_path = out / "inf_counts.csv"
    with inf_path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["density", "n", "criterion", "inf_count", "trials"])
        for row in summary.rows:
            writer.writerow(
                [row.density, row.n, row.criterion, row.inf_count, row.trials]
            )
    dims_path = out / "selected_dims_long.csv"
    with dims_path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["density", "n", "criterion", "trial", "selected_dim"])
        for r in records:
            writer.writerow([r.density, r.n, r.criterion, r.trial, r.selected_dim])
    return {"quantiles": box_path, "inf_counts": inf_path, "dims": dims_path}
