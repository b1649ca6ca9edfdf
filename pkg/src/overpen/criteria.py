"""Penalties for histogram selection and the data-driven constant of AIC_a.

Available criteria: AIC (D/n), AICc (D/(n-D-1)), the Birge-Rozenholc
penalty, the over-penalized AIC family (1 + C eps(D,n)) D/n built on the
deviation scale

    eps(D, n) = max( sqrt(D log(n+1)/n), sqrt(log(n+1)/D), log(n+1)/D ),

its two-parameter generalization (theta + Delta eps(D,n)) D/n, and the
adaptive variant whose constant C is estimated from the data by the
plateau rule implemented in :func:`adaptive_constant`.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .histogram import HistogramModel, cell_counts

__all__ = [
    "Criterion",
    "AdaptiveTrace",
    "DEFAULT_ALPHA_GRID",
    "epsilon_terms",
    "penalty",
    "penalty_vector",
    "criterion_value",
    "adaptive_constant",
    "adaptive_constant_from_risks",
    "resolve_adaptive",
    "criterion_from_string",
]

DEFAULT_ALPHA_GRID: tuple[float, ...] = tuple(
    round(0.05 * k, 2) for k in range(1, 20)
)

_KINDS = ("aic", "aicc", "br", "overpen", "thetadelta", "adaptive")


@dataclass(frozen=True)
class Criterion:
    """A penalized-likelihood criterion, identified by kind plus parameters."""

    kind: str
    c: float = 0.0                      # overpen constant C
    theta: float = 1.0                  # thetadelta base
    delta: float = 0.0                  # thetadelta deviation coefficient
    br_variant: str = "paper"           # "paper" (log term only) or "classic"
    alpha_grid: tuple[float, ...] = DEFAULT_ALPHA_GRID
    c_hat: Optional[float] = None       # resolved adaptive constant
    label: str = field(default="", compare=False)

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown criterion kind {self.kind!r}")
        if self.kind == "overpen" and self.c < 0.0:
            raise ValueError(f"overpen constant must be >= 0, got {self.c}")
        if self.kind == "thetadelta" and self.delta < 0.0:
            raise ValueError(f"delta must be >= 0, got {self.delta}")
        if self.br_variant not in ("paper", "classic"):
            raise ValueError(f"unknown br variant {self.br_variant!r}")
        if not self.label:
            object.__setattr__(self, "label", self._default_label())

    def _default_label(self) -> str:
        if self.kind == "overpen":
            return f"overpen:{self.c:g}"
        if self.kind == "thetadelta":
            return f"thetadelta:{self.theta:g},{self.delta:g}"
        if self.kind == "br" and self.br_variant == "classic":
            return "br:classic"
        return self.kind


@dataclass(frozen=True)
class AdaptiveTrace:
    """Everything the adaptive constant estimator computed along the way.

    The per-model deviations refer to the line fit at the largest proportion
    of the grid (the fit that covers the most models); the per-proportion
    constants and selected dimensions drive the plateau rule.
    """

    intercept_hat: float
    dims: tuple[int, ...]
    deltas: tuple[float, ...]
    c_hat_m: tuple[float, ...]
    alpha_grid: tuple[float, ...]
    c_hat_alpha: tuple[float, ...]
    selected_dim_per_alpha: tuple[int, ...]
    plateau: tuple[int, int]            # [start, stop) indices into alpha_grid
    c_hat: float

    def to_dict(self) -> dict:
        return {
            "intercept_hat": self.intercept_hat,
            "dims": list(self.dims),
            "deltas": list(self.deltas),
            "c_hat_m": list(self.c_hat_m),
            "alpha_grid": list(self.alpha_grid),
            "c_hat_alpha": list(self.c_hat_alpha),
            "selected_dim_per_alpha": list(self.selected_dim_per_alpha),
            "plateau": list(self.plateau),
            "c_hat": self.c_hat,
        }


def epsilon_terms(dim: int, n: int) -> tuple[float, float]:
    """Deviation scales (eps_plus, eps_minus) for a model of dimension D >= 1.

    eps_plus is the max of sqrt(D log(n+1)/n), sqrt(log(n+1)/D) and
    log(n+1)/D; eps_minus omits the last term.
    """
    if dim < 1:
        raise ValueError(f"dimension must be >= 1, got {dim}")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    log_term = np.log(n + 1.0)
    t1 = np.sqrt(dim * log_term / n)
    t2 = np.sqrt(log_term / dim)
    t3 = log_term / dim
    return float(max(t1, t2, t3)), float(max(t1, t2))


def _eps_plus_vec(dims: np.ndarray, n: int) -> np.ndarray:
    log_term = np.log(n + 1.0)
    d = np.maximum(dims, 1)
    return np.maximum.reduce(
        [np.sqrt(d * log_term / n), np.sqrt(log_term / d), log_term / d]
    )


def penalty_vector(criterion: Criterion, dims: np.ndarray, n: int) -> np.ndarray:
    """Penalty of a criterion over an array of dimensions (inf = infeasible)."""
    dims = np.asarray(dims, dtype=float)
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    log_term = np.log(n + 1.0)
    if criterion.kind == "aic":
        return dims / n
    if criterion.kind == "aicc":
        denom = n - dims - 1.0
        return np.where(denom > 0.0, dims / np.where(denom > 0.0, denom, 1.0), np.inf)
    if criterion.kind == "br":
        with np.errstate(divide="ignore"):
            log_pen = np.where(
                dims >= 2.0, np.log(np.maximum(dims, 2.0)) ** 2.5 / n, 0.0
            )
        if criterion.br_variant == "classic":
            return dims / n + log_pen
        return log_pen
    if criterion.kind in ("overpen", "thetadelta", "adaptive"):
        if criterion.kind == "overpen":
            theta, coef = 1.0, criterion.c
        elif criterion.kind == "thetadelta":
            theta, coef = criterion.theta, criterion.delta
        else:
            if criterion.c_hat is None:
                raise ValueError(
                    "adaptive criterion not resolved; run adaptive_constant first"
                )
            theta, coef = 1.0, criterion.c_hat
        pen = (theta + coef * _eps_plus_vec(dims, n)) * dims / n
        # continuity limit at D = 0: eps(D, n) * D -> log(n+1)
        return np.where(dims >= 1.0, pen, coef * log_term / n)
    raise ValueError(f"unknown criterion kind {criterion.kind!r}")


def penalty(criterion: Criterion, dim: int, n: int) -> float:
    """Penalty value for one model; inf marks an infeasible (excluded) model."""
    if dim < 0:
        raise ValueError(f"dimension must be >= 0, got {dim}")
    return float(penalty_vector(criterion, np.asarray([dim]), n)[0])


def criterion_value(criterion: Criterion, model: HistogramModel, samples) -> float:
    """Empirical risk of the fit plus the penalty; inf when infeasible."""
    x = np.asarray(samples, dtype=float)
    if x.size == 0:
        raise ValueError("criterion value needs at least one sample")
    pen = penalty(criterion, model.dim, x.size)
    if not np.isfinite(pen):
        return np.inf
    counts = cell_counts(model, x)
    emp = counts / x.size
    mu = model.cell_measures
    occ = emp > 0.0
    emp_risk = float(-np.sum(emp[occ] * np.log(emp[occ] / mu[occ])))
    return emp_risk + pen


def _longest_run(values) -> tuple[int, int]:
    """[start, stop) of the longest run of equal consecutive values.

    Ties go to the earliest run.
    """
    best = (0, 1)
    start = 0
    for i in range(1, len(values) + 1):
        if i == len(values) or values[i] != values[start]:
            if i - start > best[1] - best[0]:
                best = (start, i)
            start = i
    return best


def adaptive_constant(models, samples, grid=DEFAULT_ALPHA_GRID) -> AdaptiveTrace:
    """Estimate the over-penalization constant by the plateau rule.

    For each proportion alpha of the grid, take the ceil(alpha * #models)
    models of largest dimension, fit the intercept of the line
    y = D/n + a to the points (D_m, -empirical risk), normalize the absolute
    residuals by max(sqrt(D/n), sqrt(1/D)) * D/2 and take their median as the
    candidate constant C_alpha.  Selection with the over-penalized criterion
    at C_alpha gives a selected model per alpha; the final constant is the
    median of C_alpha over the longest run of proportions selecting the same
    model.
    """
    models = list(models)
    x = np.asarray(samples, dtype=float)
    n = x.size
    if n < 1:
        raise ValueError("adaptive constant needs at least one sample")
    dims = np.array([m.dim for m in models])
    neg_risk = np.empty(len(models))
    for i, m in enumerate(models):
        counts = cell_counts(m, x)
        emp = counts / n
        mu = m.cell_measures
        occ = emp > 0.0
        neg_risk[i] = float(np.sum(emp[occ] * np.log(emp[occ] / mu[occ])))
    return adaptive_constant_from_risks(dims, neg_risk, n, grid)


def adaptive_constant_from_risks(dims, neg_risk, n: int,
                                 grid=DEFAULT_ALPHA_GRID) -> AdaptiveTrace:
    """Plateau-rule constant from precomputed (dimension, -risk) pairs."""
    if len(grid) < 2:
        raise ValueError("alpha grid needs at least two proportions")
    dims = np.asarray(dims)
    neg_risk = np.asarray(neg_risk, dtype=float)
    if len(set(dims.tolist())) < 3:
        raise ValueError("adaptive constant needs >= 3 models of distinct dimension")
    n_models = dims.size

    order = np.argsort(dims, kind="stable")
    eps_plus = _eps_plus_vec(dims, n)
    log_term = np.log(n + 1.0)

    def fit_alpha(alpha: float):
        k = int(np.ceil(alpha * n_models))
        idx = order[n_models - k:]
        idx = idx[dims[idx] >= 1]  # the degenerate model has no deviation scale
        if idx.size == 0:
            raise ValueError(f"proportion {alpha} selects no model of dimension >= 1")
        a_hat = float(np.mean(neg_risk[idx] - dims[idx] / n))
        deltas = np.abs(neg_risk[idx] - (dims[idx] / n + a_hat))
        scale = np.maximum(np.sqrt(dims[idx] / n), np.sqrt(1.0 / dims[idx]))
        c_m = deltas / (scale * dims[idx] / 2.0)
        return idx, a_hat, deltas, c_m

    c_hat_alpha = []
    selected_dim = []
    for alpha in grid:
        _, _, _, c_m = fit_alpha(alpha)
        c_alpha = float(np.median(np.abs(c_m)))
        c_hat_alpha.append(c_alpha)
        pen = (1.0 + c_alpha * eps_plus) * dims / n
        pen = np.where(dims >= 1, pen, c_alpha * log_term / n)
        crit = neg_risk * (-1.0) + pen
        best = np.flatnonzero(crit == crit.min())
        best = min(best, key=lambda i: (dims[i], i))
        selected_dim.append(int(dims[best]))

    plateau = _longest_run(selected_dim)
    c_hat = float(np.median(c_hat_alpha[plateau[0]:plateau[1]]))

    # per-model diagnostics from the widest fit of the grid
    idx, a_hat, deltas, c_m = fit_alpha(max(grid))
    return AdaptiveTrace(
        intercept_hat=a_hat,
        dims=tuple(int(d) for d in dims[idx]),
        deltas=tuple(float(d) for d in deltas),
        c_hat_m=tuple(float(abs(c)) for c in c_m),
        alpha_grid=tuple(float(a) for a in grid),
        c_hat_alpha=tuple(c_hat_alpha),
        selected_dim_per_alpha=tuple(selected_dim),
        plateau=plateau,
        c_hat=c_hat,
    )


def resolve_adaptive(criterion: Criterion, models, samples) -> tuple[Criterion, AdaptiveTrace]:
    """Return a copy of an adaptive criterion with its constant estimated."""
    trace = adaptive_constant(models, samples, criterion.alpha_grid)
    return replace(criterion, c_hat=trace.c_hat), trace


def criterion_from_string(spec: str, br_variant: str = "paper",
                          aic1_base: str = "one-plus") -> Criterion:
    """Parse a criterion descriptor.

    Accepted forms: ``aic``, ``aicc``, ``br``, ``br:classic``, ``aic1``,
    ``overpen:C``, ``thetadelta:T,D``, ``adaptive``.  ``aic1`` maps to the
    over-penalized criterion with C = 1; with ``aic1_base='none'`` it drops
    the unit base and uses the deviation term alone.
    """
    spec = spec.strip()
    base, _, arg = spec.partition(":")
    base = base.lower()
    if base == "aic":
        return Criterion("aic")
    if base == "aicc":
        return Criterion("aicc")
    if base == "br":
        variant = arg.lower() if arg else br_variant
        return Criterion("br", br_variant=variant)
    if base == "aic1":
        if aic1_base == "none":
            return Criterion("thetadelta", theta=0.0, delta=1.0, label="aic1")
        return Criterion("overpen", c=1.0, label="aic1")
    if base == "overpen":
        if not arg:
            raise ValueError("overpen needs a constant, e.g. overpen:1.0")
        return Criterion("overpen", c=float(arg))
    if base == "thetadelta":
        parts = arg.split(",") if arg else []
        if len(parts) != 2:
            raise ValueError("thetadelta needs two parameters, e.g. thetadelta:1,2")
        return Criterion("thetadelta", theta=float(parts[0]), delta=float(parts[1]))
    if base == "adaptive":
        return Criterion("adaptive")
    raise ValueError(f"unknown criterion {spec!r}")
