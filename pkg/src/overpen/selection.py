"""Model selection over a collection of histogram partitions.

Two equivalent routes are provided: the penalized argmin, and the iterative
pairwise comparison scheme that walks the collection keeping the current
winner.  On collections ordered by increasing dimension they select the same
model.  The oracle selector, available when the target is known, minimizes
the true KL divergence of the fitted histogram.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .criteria import AdaptiveTrace, Criterion, penalty_vector, resolve_adaptive
from .densities import TargetDensity, entropy_term
from .histogram import build_regular_model, cell_counts

__all__ = [
    "SelectionResult",
    "OracleResult",
    "default_model_grid",
    "select_argmin",
    "select_by_pseudo_tests",
    "oracle_model",
]


@dataclass(frozen=True)
class SelectionResult:
    selected: int                       # index into the model list
    crit_values: tuple[float, ...]
    selected_dim: int
    excluded: tuple[int, ...]           # infeasible models (infinite penalty)
    n: int
    adaptive_trace: Optional[AdaptiveTrace] = None

    def to_dict(self, criterion_label: str = "") -> dict:
        return {
            "criterion": criterion_label,
            "n": self.n,
            "selected": self.selected,
            "selected_dim": self.selected_dim,
            "crit_values": [v for v in self.crit_values],
            "excluded": list(self.excluded),
        }


@dataclass(frozen=True)
class OracleResult:
    oracle: int
    kl_values: tuple[float, ...]

    @property
    def oracle_kl(self) -> float:
        return self.kl_values[self.oracle]


def default_model_grid(support, n: int, max_cells: Optional[int] = None):
    """Regular partitions with 1..K_max cells, K_max = max(2, n/log(n+1))."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if max_cells is None:
        max_cells = max(2, int(np.floor(n / np.log(n + 1.0))))
    return [build_regular_model(support, k) for k in range(1, max_cells + 1)]


def _empirical_risks(models, x: np.ndarray) -> np.ndarray:
    risks = np.empty(len(models))
    for i, m in enumerate(models):
        emp = cell_counts(m, x) / x.size
        mu = m.cell_measures
        occ = emp > 0.0
        risks[i] = float(-np.sum(emp[occ] * np.log(emp[occ] / mu[occ])))
    return risks


def _criterion_table(models, samples, criterion: Criterion):
    """Per-model criterion values, exclusions and the resolved adaptive trace."""
    x = np.asarray(samples, dtype=float)
    if x.size == 0:
        raise ValueError("selection needs at least one sample")
    trace = None
    if criterion.kind == "adaptive" and criterion.c_hat is None:
        criterion, trace = resolve_adaptive(criterion, models, x)
    dims = np.array([m.dim for m in models])
    pens = penalty_vector(criterion, dims, x.size)
    risks = _empirical_risks(models, x)
    crit = np.where(np.isfinite(pens), risks + pens, np.inf)
    excluded = tuple(int(i) for i in np.flatnonzero(~np.isfinite(pens)))
    return crit, dims, excluded, x.size, trace


def _argmin_with_tiebreak(values: np.ndarray, dims: np.ndarray, feasible) -> int:
    candidates = list(feasible)
    if not candidates:
        raise ValueError("no feasible model to select from")
    return int(min(candidates, key=lambda i: (values[i], dims[i], i)))


def select_argmin(models, samples, criterion: Criterion) -> SelectionResult:
    """Penalized argmin; ties broken by smallest dimension, then index."""
    models = list(models)
    crit, dims, excluded, n, trace = _criterion_table(models, samples, criterion)
    feasible = [i for i in range(len(models)) if i not in excluded]
    best = _argmin_with_tiebreak(crit, dims, feasible)
    return SelectionResult(
        selected=best,
        crit_values=tuple(float(c) for c in crit),
        selected_dim=int(dims[best]),
        excluded=excluded,
        n=n,
        adaptive_trace=trace,
    )


def select_by_pseudo_tests(models, samples, criterion: Criterion) -> SelectionResult:
    """Iterative pairwise scheme: the walk keeps the current winner.

    The candidate starts at the first feasible model; each later model is
    compared once against the candidate and replaces it when its criterion
    value is strictly smaller.  One comparison per remaining model.
    """
    models = list(models)
    crit, dims, excluded, n, trace = _criterion_table(models, samples, criterion)
    feasible = [i for i in range(len(models)) if i not in excluded]
    if not feasible:
        raise ValueError("no feasible model to select from")
    candidate = feasible[0]
    for j in feasible[1:]:
        keeps = crit[candidate] <= crit[j]
        if not keeps:
            candidate = j
    return SelectionResult(
        selected=int(candidate),
        crit_values=tuple(float(c) for c in crit),
        selected_dim=int(dims[candidate]),
        excluded=excluded,
        n=n,
        adaptive_trace=trace,
    )


def oracle_model(models, samples, target: TargetDensity) -> OracleResult:
    """The model whose fit has the smallest true KL divergence to the target."""
    models = list(models)
    x = np.asarray(samples, dtype=float)
    if x.size == 0:
        raise ValueError("oracle selection needs at least one sample")
    ent = entropy_term(target)
    kl = np.empty(len(models))
    dims = np.empty(len(models), dtype=int)
    for i, m in enumerate(models):
        t = np.asarray(m.breakpoints, dtype=float)
        probs = np.diff(target.cdf(t))
        emp = cell_counts(m, x) / x.size
        mu = m.cell_measures
        pos = probs > 0.0
        bias = ent - float(np.sum(probs[pos] * np.log(probs[pos] / mu[pos])))
        if np.any(pos & (emp <= 0.0)):
            kl[i] = np.inf
        else:
            kl[i] = bias + float(np.sum(probs[pos] * np.log(probs[pos] / emp[pos])))
        dims[i] = m.dim
    best = min(range(len(models)), key=lambda i: (kl[i], dims[i], i))
    return OracleResult(oracle=int(best), kl_values=tuple(float(v) for v in kl))
