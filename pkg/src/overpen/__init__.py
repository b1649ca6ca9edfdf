"""Histogram bin-size selection by penalized maximum likelihood.

The package provides a catalog of benchmark target densities, histogram
fitting and Kullback-Leibler risk computations, a family of penalized
criteria including over-penalized AIC variants, model selection over grids
of regular partitions, a reproducible Monte Carlo benchmark, and numerical
verification suites for the concentration inequalities that justify
over-penalization.
"""

from .criteria import (
    AdaptiveTrace,
    Criterion,
    DEFAULT_ALPHA_GRID,
    adaptive_constant,
    criterion_from_string,
    criterion_value,
    epsilon_terms,
    penalty,
)
from .densities import (
    MomentConstants,
    TargetDensity,
    cell_probability,
    draw_samples,
    entropy_term,
    get_density,
    list_densities,
    moment_constants,
    pdf_at,
    register_density,
    variance_proxies,
)
from .experiments import (
    ExperimentConfig,
    ExperimentSummary,
    TrialRecord,
    aggregate,
    read_records,
    run_benchmark,
    run_trial,
    write_records,
)
from .histogram import (
    HistogramDensity,
    HistogramModel,
    RiskReport,
    build_regular_model,
    empirical_risk,
    excess_risks,
    fit_mle,
    kl_between,
    kl_target_to_histogram,
    project_target,
)
from .selection import (
    OracleResult,
    SelectionResult,
    default_model_grid,
    oracle_model,
    select_argmin,
    select_by_pseudo_tests,
)
from .verify import estimate_pen_opt, run_suite

__version__ = "0.1.0"
