"""Catalog of analytically known target densities on a bounded support.

Each density carries a vectorized pdf and cdf, an optional closed-form
inverse cdf (otherwise sampling inverts the cdf by bisection), and an
optional positive lower bound on the pdf over the support.  The catalog
holds the four benchmark shapes used in the bin-size experiments plus two
diagnostic densities with exactly known behavior (uniform and a tilted
uniform bounded away from zero).

The two peaked shapes are transcribed from the Berlinet-Devroye benchmark
catalog (the `benchden` collection): the infinite peak is
f(x) = 1 / (2 sqrt(x)) on (0, 1) and the bilogarithmic peak is
f(x) = -log(x (1 - x)) / 2 on (0, 1).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional

import numpy as np

from .quadrature import integral, improper_integral
from .rng import uniform_stream

__all__ = [
    "TargetDensity",
    "MomentConstants",
    "register_density",
    "get_density",
    "list_densities",
    "pdf_at",
    "cell_probability",
    "draw_samples",
    "entropy_term",
    "moment_constants",
    "variance_proxies",
]

_BISECTION_TOL = 1e-12


@dataclass(frozen=True)
class TargetDensity:
    """A known density with support [a, b], pdf, cdf and sampling machinery."""

    id: str
    support: tuple[float, float]
    pdf: Callable[[np.ndarray], np.ndarray]
    cdf: Callable[[np.ndarray], np.ndarray]
    lower_bound: Optional[float] = None
    description: str = ""
    inv_cdf: Optional[Callable[[np.ndarray], np.ndarray]] = field(
        default=None, compare=False
    )

    def contains(self, x) -> np.ndarray:
        a, b = self.support
        x = np.asarray(x, dtype=float)
        return (x >= a) & (x <= b)


@dataclass(frozen=True)
class MomentConstants:
    """Moment integrals of a density: J penalizes large values, Q small ones."""

    p: float
    J: float
    Q: float
    J_finite: bool
    Q_finite: bool


# ---------------------------------------------------------------------------
# registry
# ---------------------------------------------------------------------------

_REGISTRY: dict[str, TargetDensity] = {}


def register_density(density: TargetDensity, overwrite: bool = False) -> TargetDensity:
    """Add a density to the global registry, addressable by its string id."""
    if density.id in _REGISTRY and not overwrite:
        raise ValueError(f"density id {density.id!r} already registered")
    _REGISTRY[density.id] = density
    return density


def get_density(density_id: str) -> TargetDensity:
    try:
        return _REGISTRY[density_id]
    except KeyError:
        known = ", ".join(sorted(_REGISTRY))
        raise KeyError(f"unknown density {density_id!r}; known ids: {known}") from None


def list_densities() -> list[TargetDensity]:
    return [_REGISTRY[k] for k in sorted(_REGISTRY)]


# ---------------------------------------------------------------------------
# catalog definitions
# ---------------------------------------------------------------------------


def _uniform_pdf(x):
    return np.ones_like(np.asarray(x, dtype=float))


def _uniform_cdf(x):
    return np.clip(np.asarray(x, dtype=float), 0.0, 1.0)


def _tilted_pdf(x):
    return 0.5 + np.asarray(x, dtype=float)


def _tilted_cdf(x):
    x = np.asarray(x, dtype=float)
    return 0.5 * x + 0.5 * x * x


def _tilted_inv(u):
    u = np.asarray(u, dtype=float)
    return 0.5 * (-1.0 + np.sqrt(1.0 + 8.0 * u))


def _triangle_pdf(x):
    return 1.0 - np.abs(np.asarray(x, dtype=float))


def _triangle_cdf(x):
    x = np.asarray(x, dtype=float)
    return np.where(x <= 0.0, 0.5 * (1.0 + x) ** 2, 1.0 - 0.5 * (1.0 - x) ** 2)


def _triangle_inv(u):
    u = np.asarray(u, dtype=float)
    return np.where(u <= 0.5, -1.0 + np.sqrt(2.0 * u), 1.0 - np.sqrt(2.0 * (1.0 - u)))


def _beta22_pdf(x):
    x = np.asarray(x, dtype=float)
    return 6.0 * x * (1.0 - x)


def _beta22_cdf(x):
    x = np.asarray(x, dtype=float)
    return x * x * (3.0 - 2.0 * x)


def _bilog_pdf(x):
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore"):
        return -0.5 * np.log(x * (1.0 - x))


def _bilog_cdf(x):
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        xlx = np.where(x > 0.0, x * np.log(x), 0.0)
        ylier = np.where(x < 1.0, (1.0 - x) * np.log(1.0 - x), 0.0)
    return x + 0.5 * (-xlx + ylier)


def _infpeak_pdf(x):
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore"):
        return 0.5 / np.sqrt(x)


def _infpeak_cdf(x):
    return np.sqrt(np.asarray(x, dtype=float))


def _infpeak_inv(u):
    u = np.asarray(u, dtype=float)
    return u * u


register_density(TargetDensity(
    id="uniform",
    support=(0.0, 1.0),
    pdf=_uniform_pdf,
    cdf=_uniform_cdf,
    lower_bound=1.0,
    description="uniform on [0,1]",
    inv_cdf=lambda u: np.asarray(u, dtype=float),
))

register_density(TargetDensity(
    id="tilted",
    support=(0.0, 1.0),
    pdf=_tilted_pdf,
    cdf=_tilted_cdf,
    lower_bound=0.5,
    description="tilted uniform 0.5 + x on [0,1]",
    inv_cdf=_tilted_inv,
))

register_density(TargetDensity(
    id="triangle",
    support=(-1.0, 1.0),
    pdf=_triangle_pdf,
    cdf=_triangle_cdf,
    description="isosceles triangle 1 - |x| on [-1,1]",
    inv_cdf=_triangle_inv,
))

register_density(TargetDensity(
    id="beta22",
    support=(0.0, 1.0),
    pdf=_beta22_pdf,
    cdf=_beta22_cdf,
    description="Beta(2,2): 6 x (1-x) on [0,1]",
))

register_density(TargetDensity(
    id="bilog_peak",
    support=(0.0, 1.0),
    pdf=_bilog_pdf,
    cdf=_bilog_cdf,
    description="bilogarithmic peak -log(x(1-x))/2 on (0,1)",
))

register_density(TargetDensity(
    id="inf_peak",
    support=(0.0, 1.0),
    pdf=_infpeak_pdf,
    cdf=_infpeak_cdf,
    description="infinite peak 1/(2 sqrt(x)) on (0,1)",
    inv_cdf=_infpeak_inv,
))


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------


def pdf_at(density: TargetDensity, x: float) -> float:
    """Evaluate the pdf at a point of the support."""
    if not np.all(density.contains(x)):
        raise ValueError(f"x={x} outside support {density.support} of {density.id!r}")
    return float(density.pdf(np.asarray(x, dtype=float)))


def cell_probability(density: TargetDensity, interval) -> float:
    """Probability mass of a subinterval [x, y] of the support."""
    x, y = float(interval[0]), float(interval[1])
    a, b = density.support
    if x > y:
        raise ValueError(f"inverted interval [{x}, {y}]")
    if x < a or y > b:
        raise ValueError(f"interval [{x}, {y}] not contained in support [{a}, {b}]")
    return float(density.cdf(np.asarray(y)) - density.cdf(np.asarray(x)))


def _invert_cdf_bisection(density: TargetDensity, u: np.ndarray) -> np.ndarray:
    a, b = density.support
    lo = np.full(u.shape, a, dtype=float)
    hi = np.full(u.shape, b, dtype=float)
    # unit-width supports need ~40 halvings for 1e-12; cap well above that
    for _ in range(100):
        if np.max(hi - lo) <= _BISECTION_TOL:
            break
        mid = 0.5 * (lo + hi)
        below = density.cdf(mid) < u
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    return 0.5 * (lo + hi)


def draw_samples(density: TargetDensity, seed: int, n: int) -> np.ndarray:
    """Draw n i.i.d. samples by inverse cdf on a counter-based uniform stream.

    Identical (seed, n) gives identical output bit for bit, and the first k
    samples do not depend on n.
    """
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    u = uniform_stream(seed, n)
    if density.inv_cdf is not None:
        return np.asarray(density.inv_cdf(u), dtype=float)
    return _invert_cdf_bisection(density, u)


@lru_cache(maxsize=None)
def _entropy_cached(density: TargetDensity) -> float:
    a, b = density.support

    def integrand(x):
        f = density.pdf(np.asarray(x, dtype=float))
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(f > 0.0, f * np.log(np.where(f > 0.0, f, 1.0)), 0.0)
        return out

    return integral(integrand, a, b, epsabs=1e-9)


def entropy_term(density: TargetDensity) -> float:
    """The integral of f log f over the support (0 for the uniform density)."""
    if density.id == "uniform":
        return 0.0
    return _entropy_cached(density)


def moment_constants(density: TargetDensity, p: float) -> MomentConstants:
    """Moment integrals J and Q at order p, with divergence detection.

    J integrates f**p (log(f)^2 v 1); Q integrates (log(f)^2 v 1) / f**(p-1).
    Divergence near the support edges is reported in-band via the finiteness
    flags rather than as an error.
    """
    if not p > 1.0:
        raise ValueError(f"p must be > 1, got {p}")
    a, b = density.support

    def j_integrand(x):
        f = density.pdf(np.asarray(x, dtype=float))
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            lf2 = np.maximum(np.log(np.where(f > 0.0, f, 1.0)) ** 2, 1.0)
            out = np.where(f > 0.0, f**p * lf2, 0.0)
        return out

    def q_integrand(x):
        f = density.pdf(np.asarray(x, dtype=float))
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            lf2 = np.maximum(np.log(np.where(f > 0.0, f, 1.0)) ** 2, 1.0)
            out = np.where(f > 0.0, lf2 / f ** (p - 1.0), np.inf)
        return out

    j_val, j_fin = improper_integral(j_integrand, a, b)
    q_val, q_fin = improper_integral(q_integrand, a, b)
    return MomentConstants(
        p=p,
        J=j_val if j_fin else np.inf,
        Q=q_val if q_fin else np.inf,
        J_finite=j_fin,
        Q_finite=q_fin,
    )


def variance_proxies(density: TargetDensity, hist, r: float) -> tuple[float, float]:
    """Variance proxies of the log-ratio log(f/f*) for a histogram density f.

    Returns (v, w_r) with v the integral of (f v f*) log(f/f*)^2 and w_r the
    integral of ((f*^(r+1)/f^r) v f*) log(f/f*)^2, computed cell by cell (f is
    constant on each cell).
    """
    if not r > 0.0:
        raise ValueError(f"r must be > 0, got {r}")
    heights = np.asarray(hist.heights, dtype=float)
    if np.any(heights <= 0.0):
        raise ValueError("variance proxies require strictly positive heights")
    if tuple(hist.model.support) != tuple(density.support):
        raise ValueError(
            f"support mismatch: histogram {hist.model.support}, "
            f"density {density.support}"
        )
    breaks = hist.model.breakpoints
    v_total, w_total = 0.0, 0.0
    for i, h in enumerate(heights):
        lo, hi = breaks[i], breaks[i + 1]
        log_h = np.log(h)

        def v_integrand(x, h=h, log_h=log_h):
            f = density.pdf(np.asarray(x, dtype=float))
            with np.errstate(divide="ignore", invalid="ignore"):
                lr2 = (log_h - np.log(f)) ** 2
                out = np.maximum(h, f) * lr2
            return np.where(np.isfinite(out), out, 0.0)

        def w_integrand(x, h=h, log_h=log_h):
            f = density.pdf(np.asarray(x, dtype=float))
            with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
                lr2 = (log_h - np.log(f)) ** 2
                out = np.maximum(f ** (r + 1.0) / h**r, f) * lr2
            return np.where(np.isfinite(out), out, 0.0)

        v_total += integral(v_integrand, lo, hi, epsabs=1e-10)
        w_total += integral(w_integrand, lo, hi, epsabs=1e-10)
    return v_total, w_total
