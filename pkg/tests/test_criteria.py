import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from overpen import (
    Criterion,
    adaptive_constant,
    build_regular_model,
    criterion_from_string,
    criterion_value,
    default_model_grid,
    draw_samples,
    epsilon_terms,
    get_density,
    penalty,
)
from overpen.criteria import adaptive_constant_from_risks, _longest_run


def test_epsilon_terms_tie_case():
    # D = sqrt(n) makes the first two terms equal: sqrt(10 ln(101) / 100)
    plus, minus = epsilon_terms(10, 100)
    expected = math.sqrt(10 * math.log(101) / 100)
    assert plus == pytest.approx(expected, abs=1e-12)
    assert minus == pytest.approx(expected, abs=1e-12)


def test_epsilon_terms_small_n():
    plus, minus = epsilon_terms(1, 1)
    assert plus == pytest.approx(math.sqrt(math.log(2)), abs=1e-12)
    assert minus == plus


def test_epsilon_terms_grows_with_n_at_fixed_dim():
    assert epsilon_terms(4, 10_000)[0] > epsilon_terms(4, 1_000)[0]


def test_epsilon_terms_rejects_zero_dim():
    with pytest.raises(ValueError):
        epsilon_terms(0, 100)


def test_penalty_values():
    assert penalty(Criterion("aic"), 5, 100) == pytest.approx(0.05)
    assert penalty(Criterion("aicc"), 5, 100) == pytest.approx(5 / 94)
    plus, _ = epsilon_terms(10, 100)
    assert penalty(Criterion("overpen", c=1.0), 10, 100) == pytest.approx(
        (1 + plus) * 0.1, abs=1e-12
    )
    assert penalty(Criterion("br"), 8, 100) == pytest.approx(
        math.log(8) ** 2.5 / 100, abs=1e-12
    )


def test_penalty_conventions_at_small_dims():
    # AIC family vanishes at D = 0; BR uses 0 below D = 2
    for kind in ("aic", "aicc", "br"):
        assert penalty(Criterion(kind), 0, 50) == 0.0
    assert penalty(Criterion("br"), 1, 50) == 0.0
    assert penalty(Criterion("br", br_variant="classic"), 1, 50) == pytest.approx(0.02)
    # the over-penalized family keeps its continuity limit C log(n+1)/n
    assert penalty(Criterion("overpen", c=2.0), 0, 50) == pytest.approx(
        2.0 * math.log(51) / 50
    )
    assert penalty(Criterion("overpen", c=0.0), 0, 50) == 0.0


def test_aicc_infeasible_boundary():
    assert penalty(Criterion("aicc"), 99, 100) == np.inf
    assert np.isfinite(penalty(Criterion("aicc"), 98, 100))


def test_br_variants():
    paper = penalty(Criterion("br"), 8, 100)
    classic = penalty(Criterion("br", br_variant="classic"), 8, 100)
    assert classic == pytest.approx(paper + 0.08, abs=1e-12)


@given(c=st.floats(0.0, 10.0), dim=st.integers(0, 200), n=st.integers(1, 5000))
@settings(max_examples=200, deadline=None)
def test_overpen_dominates_aic(c, dim, n):
    assert penalty(Criterion("overpen", c=c), dim, n) >= penalty(
        Criterion("aic"), dim, n
    ) - 1e-15
    # strictness is representable once c is not vanishingly small
    if c > 1e-9 and dim >= 1:
        assert penalty(Criterion("overpen", c=c), dim, n) > penalty(
            Criterion("aic"), dim, n
        )


@given(c=st.floats(0.0, 5.0), dim=st.integers(0, 150), n=st.integers(1, 2000))
@settings(max_examples=200, deadline=None)
def test_thetadelta_matches_overpen(c, dim, n):
    a = penalty(Criterion("thetadelta", theta=1.0, delta=c), dim, n)
    b = penalty(Criterion("overpen", c=c), dim, n)
    assert a == b


def test_overpen_zero_equals_aic_for_positive_dims():
    for n in (1, 10, 100, 1000):
        for dim in range(1, min(n, 40)):
            assert penalty(Criterion("overpen", c=0.0), dim, n) == pytest.approx(
                penalty(Criterion("aic"), dim, n), abs=1e-15
            )


def test_penalty_nondecreasing_in_dim():
    for kind in ("aic", "aicc"):
        crit = Criterion(kind)
        values = [penalty(crit, d, 200) for d in range(0, 150)]
        finite = [v for v in values if np.isfinite(v)]
        assert all(b >= a for a, b in zip(finite, finite[1:]))


def test_criterion_value_one_cell():
    m = build_regular_model((0.0, 1.0), 1)
    samples = [0.2, 0.6, 0.9]
    # the single-cell fit on a unit support has empirical risk 0
    for kind in ("aic", "aicc", "br"):
        assert criterion_value(Criterion(kind), m, samples) == 0.0
    # the over-penalized family keeps its continuity-limit penalty at D = 0
    assert criterion_value(Criterion("overpen", c=1.0), m, samples) == pytest.approx(
        math.log(4) / 3
    )


def test_criterion_value_two_cells_hand_oracle():
    m = build_regular_model((0.0, 1.0), 2)
    samples = [0.1, 0.2, 0.3, 0.8]
    emp = -(0.75 * math.log(1.5) + 0.25 * math.log(0.5))
    assert criterion_value(Criterion("aic"), m, samples) == pytest.approx(
        emp + 0.25, abs=1e-12
    )


def test_criterion_value_infeasible():
    m = build_regular_model((0.0, 1.0), 4)  # D = 3 = n - 1
    assert criterion_value(Criterion("aicc"), m, [0.1, 0.4, 0.6, 0.9]) == np.inf


def test_longest_run_semantics():
    assert _longest_run([1, 1, 2, 2, 2, 3]) == (2, 5)
    assert _longest_run([1, 2, 3]) == (0, 1)       # tie: earliest run
    assert _longest_run([4, 4, 5, 5]) == (0, 2)    # tie: earliest run
    assert _longest_run([7]) == (0, 1)


def test_adaptive_constant_perfect_line():
    # risks exactly on y = D/n + c leave no residual: constant 0
    # (dyadic offset keeps the float arithmetic exact)
    dims = np.arange(0, 12)
    n = 64
    neg_risk = dims / n + 0.375
    trace = adaptive_constant_from_risks(dims, neg_risk, n)
    assert trace.c_hat == 0.0
    assert all(d == 0.0 for d in trace.deltas)
    assert all(c == 0.0 for c in trace.c_hat_m)


def test_adaptive_constant_shift_invariance():
    rng = np.random.default_rng(8)
    dims = np.arange(0, 15)
    n = 100
    neg_risk = dims / n + rng.normal(0, 0.01, dims.size)
    t1 = adaptive_constant_from_risks(dims, neg_risk, n)
    t2 = adaptive_constant_from_risks(dims, neg_risk + 5.0, n)
    assert t1.deltas == pytest.approx(t2.deltas, abs=1e-12)
    assert t1.c_hat == pytest.approx(t2.c_hat, abs=1e-12)


def test_adaptive_constant_plateau_tie():
    # craft criterion landscapes where two proportions agree, one differs:
    # with 3 models and alphas (1/3, 2/3, 1), residuals vanish so the
    # selected model is constant; the plateau must cover the whole grid
    dims = np.array([0, 1, 2])
    n = 10
    neg_risk = dims / n + 1.0
    trace = adaptive_constant_from_risks(dims, neg_risk, n, grid=(0.34, 0.67, 1.0))
    assert trace.plateau == (0, 3)
    assert trace.c_hat == 0.0


def test_adaptive_constant_requires_distinct_dims():
    with pytest.raises(ValueError):
        adaptive_constant_from_risks(np.array([1, 1, 1]), np.array([0.1, 0.2, 0.3]), 10)
    with pytest.raises(ValueError):
        adaptive_constant_from_risks(np.arange(5), np.zeros(5), 10, grid=(0.5,))


def test_adaptive_constant_golden_determinism():
    # frozen at implementation time: uniform target, n = 200, 40 models
    uni = get_density("uniform")
    x = draw_samples(uni, 1234, 200)
    models = [build_regular_model((0.0, 1.0), k) for k in range(1, 41)]
    t1 = adaptive_constant(models, x)
    t2 = adaptive_constant(models, x)
    assert t1 == t2
    assert t1.c_hat == 0.0031672980001241384


def test_adaptive_trace_fields_consistent():
    uni = get_density("uniform")
    x = draw_samples(uni, 77, 150)
    models = default_model_grid((0.0, 1.0), 150)
    trace = adaptive_constant(models, x)
    lo, hi = trace.plateau
    assert trace.c_hat == pytest.approx(
        float(np.median(trace.c_hat_alpha[lo:hi])), abs=1e-15
    )
    sel = trace.selected_dim_per_alpha
    assert len(set(sel[lo:hi])) == 1
    payload = trace.to_dict()
    assert set(payload) >= {"c_hat", "alpha_grid", "plateau", "intercept_hat"}


def test_criterion_from_string():
    assert criterion_from_string("aic").kind == "aic"
    assert criterion_from_string("aicc").kind == "aicc"
    assert criterion_from_string("br").br_variant == "paper"
    assert criterion_from_string("br:classic").br_variant == "classic"
    aic1 = criterion_from_string("aic1")
    assert aic1.kind == "overpen" and aic1.c == 1.0
    literal = criterion_from_string("aic1", aic1_base="none")
    assert literal.kind == "thetadelta" and literal.theta == 0.0
    ov = criterion_from_string("overpen:2.5")
    assert ov.c == 2.5
    td = criterion_from_string("thetadelta:0.5,3")
    assert td.theta == 0.5 and td.delta == 3.0
    assert criterion_from_string("adaptive").kind == "adaptive"
    for bad in ("nope", "overpen", "thetadelta:1"):
        with pytest.raises(ValueError):
            criterion_from_string(bad)


def test_criterion_validation():
    with pytest.raises(ValueError):
        Criterion("overpen", c=-1.0)
    with pytest.raises(ValueError):
        Criterion("br", br_variant="bogus")
    with pytest.raises(ValueError):
        Criterion("mystery")
