import math

import numpy as np
import pytest

from overpen import (
    ExperimentConfig,
    aggregate,
    read_records,
    run_benchmark,
    run_trial,
    write_records,
)
from overpen.experiments import (
    TrialRecord,
    order_statistic_quantile,
    write_plotdata,
)


def _config(**kw):
    base = dict(
        densities=("beta22",),
        sample_sizes=(50,),
        trials=3,
        criteria=("aic", "aic1"),
        master_seed=1,
    )
    base.update(kw)
    return ExperimentConfig(**base)


def test_config_validation():
    with pytest.raises(ValueError):
        _config(trials=0)
    with pytest.raises(ValueError):
        _config(sample_sizes=(0,))
    with pytest.raises(ValueError):
        _config(quantile_levels=(5.0, 5.0))
    with pytest.raises(ValueError):
        _config(criteria=("bogus",))
    with pytest.raises(KeyError):
        _config(densities=("missing",))


def test_run_trial_determinism_and_shared_seed():
    cfg = _config()
    a = run_trial(cfg, "beta22", 50, "aic", 0)
    b = run_trial(cfg, "beta22", 50, "aic", 0)
    assert a == b
    other = run_trial(cfg, "beta22", 50, "aic1", 0)
    assert other.seed == a.seed  # same sample for every criterion
    assert run_trial(cfg, "beta22", 50, "aic", 1).seed != a.seed


def test_trial_record_oracle_dominance():
    cfg = _config(trials=10)
    records, _ = run_benchmark(cfg)
    for r in records:
        assert r.kl >= 0.0
        if math.isfinite(r.kl) and math.isfinite(r.oracle_kl):
            assert r.oracle_kl <= r.kl + 1e-12


def test_one_cell_grid_gives_zero_kl_for_uniform():
    cfg = _config(densities=("uniform",), criteria=("aic",), max_cells=1)
    records, _ = run_benchmark(cfg)
    assert all(r.kl == 0.0 for r in records)
    assert all(r.selected_dim == 0 for r in records)


def test_record_count_and_order():
    cfg = _config(trials=3)
    records, _ = run_benchmark(cfg)
    assert len(records) == 3 * 2
    keys = [(r.density, r.n, r.criterion, r.trial) for r in records]
    assert keys == sorted(keys, key=lambda k: (0, k[1], cfg.criteria.index(k[2]), k[3]))


def test_criterion_order_does_not_change_content():
    r1, _ = run_benchmark(_config(criteria=("aic", "aic1")))
    r2, _ = run_benchmark(_config(criteria=("aic1", "aic")))
    assert sorted(map(repr, r1)) == sorted(map(repr, r2))


def test_benchmark_matches_run_trial():
    cfg = _config(trials=4)
    records, _ = run_benchmark(cfg)
    for r in records[:4]:
        assert run_trial(cfg, r.density, r.n, r.criterion, r.trial) == r


def test_order_statistic_quantile_examples():
    assert order_statistic_quantile([1, 2, 3, 4, np.inf], 0.5) == 3.0
    assert order_statistic_quantile([7.0] * 9, 0.25) == 7.0
    values = [np.inf, np.inf, 1.0]
    assert order_statistic_quantile(values, 0.05) == 1.0
    assert order_statistic_quantile(values, 0.95) == np.inf


def test_aggregate_examples():
    def rec(kl, i):
        return TrialRecord("beta22", 50, "aic", i, 0, 1, kl, 1, kl, 0.0)

    summary = aggregate([rec(v, i) for i, v in enumerate([1, 2, 3, 4, np.inf])])
    row = summary.rows[0]
    assert row.quantiles[2] == 3.0   # median of (1,2,3,4,inf)
    assert row.inf_count == 1
    assert row.mean_finite == pytest.approx(2.5)
    assert row.trials == 5

    same = aggregate([rec(0.25, i) for i in range(7)])
    assert all(q == 0.25 for q in same.rows[0].quantiles)

    infs = aggregate([rec(np.inf, 0), rec(np.inf, 1), rec(1.0, 2)])
    assert infs.rows[0].inf_count == 2


def test_aggregate_excludes_failed_trials_with_warning():
    def rec(kl, i):
        return TrialRecord("beta22", 50, "aic", i, 0, 1, kl, 1, kl, 0.0)

    summary = aggregate([rec(float("nan"), 0), rec(1.0, 1)])
    assert summary.rows[0].trials == 1
    assert any("failed" in w for w in summary.warnings)


def test_write_and_read_round_trip(tmp_path):
    cfg = _config(trials=3)
    records, summary = run_benchmark(cfg)
    paths = write_records(records, summary, tmp_path)
    text = paths["trials"].read_text().splitlines()
    assert len(text) == len(records) + 1
    assert text[0] == "density,n,criterion,trial,seed,selected_dim,kl,oracle_dim,oracle_kl,runtime_ms"
    back = read_records(paths["trials"])
    assert back == records
    summary_lines = paths["summary"].read_text().splitlines()
    assert len(summary_lines) == len(summary.rows) + 1


def test_infinite_kl_round_trips(tmp_path):
    rec = TrialRecord("beta22", 50, "aic", 0, 7, 3, float("inf"), 2, 0.5, 0.0)
    summary = aggregate([rec])
    paths = write_records([rec], summary, tmp_path)
    assert ",inf," in paths["trials"].read_text()
    assert read_records(paths["trials"])[0].kl == np.inf


def test_byte_identical_reruns(tmp_path):
    cfg = _config(trials=5, densities=("beta22", "uniform"))
    for sub in ("a", "b"):
        records, summary = run_benchmark(cfg)
        write_records(records, summary, tmp_path / sub)
    assert (tmp_path / "a" / "trials.csv").read_bytes() == \
        (tmp_path / "b" / "trials.csv").read_bytes()
    assert (tmp_path / "a" / "summary.csv").read_bytes() == \
        (tmp_path / "b" / "summary.csv").read_bytes()


def test_threads_do_not_change_output(tmp_path):
    base = _config(trials=30)
    threaded = _config(trials=30, threads=2)
    r1, s1 = run_benchmark(base)
    r2, s2 = run_benchmark(threaded)
    assert r1 == r2
    p1 = write_records(r1, s1, tmp_path / "t1")
    p2 = write_records(r2, s2, tmp_path / "t2")
    assert p1["trials"].read_bytes() == p2["trials"].read_bytes()


def test_plotdata_files(tmp_path):
    cfg = _config(trials=3)
    records, summary = run_benchmark(cfg)
    paths = write_plotdata(records, summary, tmp_path)
    quantiles = paths["quantiles"].read_text().splitlines()
    assert quantiles[0] == "density,n,criterion,level,value"
    # one row per (cell, level)
    assert len(quantiles) == 1 + len(summary.rows) * len(summary.levels)
    inf_lines = paths["inf_counts"].read_text().splitlines()
    assert len(inf_lines) == 1 + len(summary.rows)
    dims_lines = paths["dims"].read_text().splitlines()
    assert len(dims_lines) == 1 + len(records)
