"""Histogram models on a fixed partition: fitting, projections and risks.

A model is a partition of the support into K cells and has dimension
D = K - 1 (the number of free heights once the unit-mass constraint is
imposed).  The maximum-likelihood fit is the frequencies histogram with
heights count/(n * cell_width); the best approximation of a known target on
the model is the cell-average histogram with heights P(cell)/width.

Cell membership is half-open, [t_i, t_{i+1}), with the last cell closed.
Infinite values of Kullback-Leibler type quantities are representable and
returned in band (they are counted by the benchmark), never raised.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .densities import TargetDensity, entropy_term

__all__ = [
    "HistogramModel",
    "HistogramDensity",
    "RiskReport",
    "build_regular_model",
    "fit_mle",
    "project_target",
    "empirical_risk",
    "kl_between",
    "kl_target_to_histogram",
    "excess_risks",
    "cell_index",
    "cell_counts",
]


@dataclass(frozen=True)
class HistogramModel:
    """A partition of [a, b] into cells of positive width."""

    breakpoints: tuple[float, ...]

    def __post_init__(self):
        t = np.asarray(self.breakpoints, dtype=float)
        if t.size < 2:
            raise ValueError("a model needs at least two breakpoints")
        if not np.all(np.diff(t) > 0.0):
            raise ValueError("breakpoints must be strictly increasing")

    @property
    def support(self) -> tuple[float, float]:
        return (self.breakpoints[0], self.breakpoints[-1])

    @property
    def cells(self) -> int:
        return len(self.breakpoints) - 1

    @property
    def dim(self) -> int:
        return self.cells - 1

    @property
    def cell_measures(self) -> np.ndarray:
        return np.diff(np.asarray(self.breakpoints, dtype=float))


@dataclass(frozen=True)
class HistogramDensity:
    """Nonnegative cell heights on a model, integrating to one."""

    model: HistogramModel
    heights: tuple[float, ...]

    def __post_init__(self):
        h = np.asarray(self.heights, dtype=float)
        if h.size != self.model.cells:
            raise ValueError(
                f"got {h.size} heights for a model with {self.model.cells} cells"
            )
        if np.any(~np.isfinite(h)) or np.any(h < 0.0):
            raise ValueError("heights must be finite and nonnegative")
        mass = float(np.sum(h * self.model.cell_measures))
        if abs(mass - 1.0) > 1e-12 * max(1.0, abs(mass)):
            raise ValueError(f"heights integrate to {mass!r}, expected 1")

    def pdf(self, x) -> np.ndarray:
        idx = cell_index(self.model, x)
        return np.asarray(self.heights, dtype=float)[idx]


@dataclass(frozen=True)
class RiskReport:
    """Risk decomposition of the fit on one model against a known target."""

    emp_risk: float        # empirical risk of the fitted histogram
    true_excess: float     # p1 = K(best-on-model, fit); may be inf
    emp_excess: float      # p2 = K(fit, best-on-model)
    bias: float            # K(target, best-on-model)
    total_kl: float        # K(target, fit) = bias + true_excess
    chi_sq: float          # sum over cells of (Pn - P)^2 / P
    sup_ratio: float       # max over cells of |Pn - P| / P


def build_regular_model(support, cells: int) -> HistogramModel:
    """Model with ``cells`` equal-width cells over the support."""
    if cells < 1:
        raise ValueError(f"cells must be >= 1, got {cells}")
    a, b = float(support[0]), float(support[1])
    return HistogramModel(tuple(np.linspace(a, b, cells + 1)))


def cell_index(model: HistogramModel, x) -> np.ndarray:
    """Cell index of each sample; half-open cells, last cell closed."""
    t = np.asarray(model.breakpoints, dtype=float)
    x = np.asarray(x, dtype=float)
    if np.any(x < t[0]) or np.any(x > t[-1]):
        bad = x[(x < t[0]) | (x > t[-1])]
        raise ValueError(
            f"sample value {bad.flat[0]!r} outside support ({t[0]}, {t[-1]})"
        )
    idx = np.searchsorted(t, x, side="right") - 1
    return np.minimum(idx, model.cells - 1)


def cell_counts(model: HistogramModel, samples) -> np.ndarray:
    """Number of samples per cell."""
    return np.bincount(cell_index(model, samples), minlength=model.cells)


def fit_mle(model: HistogramModel, samples) -> HistogramDensity:
    """Frequencies histogram: heights are count / (n * cell width)."""
    x = np.asarray(samples, dtype=float)
    if x.size == 0:
        raise ValueError("cannot fit a histogram to an empty sample")
    counts = cell_counts(model, x)
    heights = counts / (x.size * model.cell_measures)
    return HistogramDensity(model, tuple(heights))


def project_target(model: HistogramModel, target: TargetDensity) -> HistogramDensity:
    """Cell-average histogram of a known target: heights P(cell)/width."""
    if tuple(model.support) != tuple(target.support):
        raise ValueError(
            f"support mismatch: model {model.support}, target {target.support}"
        )
    t = np.asarray(model.breakpoints, dtype=float)
    probs = np.diff(target.cdf(t))
    return HistogramDensity(model, tuple(probs / model.cell_measures))


def empirical_risk(hist: HistogramDensity, samples) -> float:
    """Mean negative log height at the samples; inf on a zero-height cell."""
    x = np.asarray(samples, dtype=float)
    idx = cell_index(hist.model, x)
    h = np.asarray(hist.heights, dtype=float)[idx]
    if np.any(h <= 0.0):
        return np.inf
    return float(-np.mean(np.log(h)))


def kl_between(f: HistogramDensity, g: HistogramDensity) -> float:
    """KL divergence of g from f for histograms on the same partition."""
    if f.model.breakpoints != g.model.breakpoints:
        raise ValueError("histograms live on different partitions")
    hf = np.asarray(f.heights, dtype=float)
    hg = np.asarray(g.heights, dtype=float)
    mu = f.model.cell_measures
    pos = hf > 0.0
    if np.any(pos & (hg <= 0.0)):
        return np.inf
    ratio = np.log(hf[pos] / hg[pos])
    return float(np.sum(mu[pos] * hf[pos] * ratio))


def kl_target_to_histogram(target: TargetDensity, hist: HistogramDensity) -> float:
    """KL divergence of a histogram density from the known target."""
    if tuple(hist.model.support) != tuple(target.support):
        raise ValueError(
            f"support mismatch: histogram {hist.model.support}, "
            f"target {target.support}"
        )
    t = np.asarray(hist.model.breakpoints, dtype=float)
    probs = np.diff(target.cdf(t))
    h = np.asarray(hist.heights, dtype=float)
    pos = probs > 0.0
    if np.any(pos & (h <= 0.0)):
        return np.inf
    cross = float(np.sum(probs[pos] * np.log(h[pos])))
    return entropy_term(target) - cross


def _p1_from(probs: np.ndarray, emp: np.ndarray) -> float:
    pos = probs > 0.0
    if np.any(pos & (emp <= 0.0)):
        return np.inf
    return float(np.sum(probs[pos] * np.log(probs[pos] / emp[pos])))


def _p2_from(probs: np.ndarray, emp: np.ndarray) -> float:
    pos = emp > 0.0
    return float(np.sum(emp[pos] * np.log(emp[pos] / probs[pos])))


def excess_risks(model: HistogramModel, samples, target: TargetDensity) -> RiskReport:
    """Full risk decomposition of the fit on ``model`` for known ``target``."""
    if tuple(model.support) != tuple(target.support):
        raise ValueError(
            f"support mismatch: model {model.support}, target {target.support}"
        )
    x = np.asarray(samples, dtype=float)
    if x.size == 0:
        raise ValueError("excess risks need at least one sample")
    t = np.asarray(model.breakpoints, dtype=float)
    mu = model.cell_measures
    probs = np.diff(target.cdf(t))
    emp = cell_counts(model, x) / x.size
    if np.any((probs <= 0.0) & (emp > 0.0)):
        raise ValueError(
            "degenerate model: target assigns zero mass to an occupied cell"
        )
    occupied = emp > 0.0
    emp_risk = float(-np.sum(emp[occupied] * np.log(emp[occupied] / mu[occupied])))
    p1 = _p1_from(probs, emp)
    p2 = _p2_from(probs, emp)
    pos = probs > 0.0
    bias = entropy_term(target) - float(
        np.sum(probs[pos] * np.log(probs[pos] / mu[pos]))
    )
    chi_sq = float(np.sum((emp[pos] - probs[pos]) ** 2 / probs[pos]))
    sup_ratio = float(np.max(np.abs(emp[pos] - probs[pos]) / probs[pos]))
    return RiskReport(
        emp_risk=emp_risk,
        true_excess=p1,
        emp_excess=p2,
        bias=bias,
        total_kl=bias + p1,
        chi_sq=chi_sq,
        sup_ratio=sup_ratio,
    )


def histogram_to_dict(hist: HistogramDensity) -> dict:
    """JSON-ready form of a histogram density."""
    return {
        "support": list(hist.model.support),
        "breakpoints": list(hist.model.breakpoints),
        "heights": list(hist.heights),
    }


def histogram_from_dict(payload: dict) -> HistogramDensity:
    model = HistogramModel(tuple(float(t) for t in payload["breakpoints"]))
    return HistogramDensity(model, tuple(float(h) for h in payload["heights"]))
