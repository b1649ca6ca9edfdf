import json

import numpy as np
import pytest

from overpen.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_densities_list(capsys):
    code, out, _ = run_cli(capsys, "densities", "list")
    assert code == 0
    ids = [line.split("\t")[0] for line in out.strip().splitlines()]
    assert ids == sorted(
        ["uniform", "tilted", "triangle", "beta22", "bilog_peak", "inf_peak"]
    )


def test_densities_sample_format_and_determinism(capsys, tmp_path):
    code, out1, _ = run_cli(capsys, "densities", "sample", "--id", "beta22",
                            "--n", "5", "--seed", "7")
    assert code == 0
    lines = out1.strip().splitlines()
    assert len(lines) == 5
    # 17 significant digits round-trip exactly
    for line in lines:
        assert float(line) == float(f"{float(line):.17g}")
    code, out2, _ = run_cli(capsys, "densities", "sample", "--id", "beta22",
                            "--n", "5", "--seed", "7")
    assert out1 == out2
    target = tmp_path / "s.txt"
    run_cli(capsys, "densities", "sample", "--id", "beta22", "--n", "5",
            "--seed", "7", "--out", str(target))
    assert target.read_text().strip() == out1.strip()


def _write_samples(tmp_path, values, name="x.txt"):
    path = tmp_path / name
    path.write_text("\n".join(str(v) for v in values) + "\n")
    return path


def test_select_smoke_json(capsys, tmp_path):
    path = _write_samples(tmp_path, [0.1, 0.2, 0.3, 0.8])
    out_json = tmp_path / "hist.json"
    code, out, err = run_cli(capsys, "select", "--input", str(path),
                             "--criterion", "aic", "--out", str(out_json))
    assert code == 0
    payload = json.loads(out)
    assert "selected_dim" in payload
    assert payload["n"] == 4
    hist = json.loads(out_json.read_text())
    assert set(hist) == {"support", "breakpoints", "heights"}
    assert "selected" in err


def test_select_alias_overpen_equals_aic1(capsys, tmp_path):
    path = _write_samples(tmp_path, list(np.linspace(0.05, 0.95, 20)))
    code1, out1, _ = run_cli(capsys, "select", "--input", str(path),
                             "--criterion", "aic1")
    code2, out2, _ = run_cli(capsys, "select", "--input", str(path),
                             "--criterion", "overpen:1.0")
    assert code1 == code2 == 0
    a, b = json.loads(out1), json.loads(out2)
    a.pop("criterion"), b.pop("criterion")  # labels echo the user's spelling
    assert a == b


def test_select_csv_column(capsys, tmp_path):
    path = tmp_path / "d.csv"
    path.write_text("id,value\n1,0.25\n2,0.5\n3,0.75\n")
    code, out, _ = run_cli(capsys, "select", "--input", str(path),
                           "--column", "value", "--criterion", "aic")
    assert code == 0
    assert json.loads(out)["n"] == 3


def test_select_out_of_support_exit_2(capsys, tmp_path):
    path = _write_samples(tmp_path, [0.5, 1.7])
    code, _, err = run_cli(capsys, "select", "--input", str(path),
                           "--criterion", "aic")
    assert code == 2
    assert "1.7" in err


def test_select_unknown_criterion_exit_2(capsys, tmp_path):
    path = _write_samples(tmp_path, [0.5])
    code, _, _ = run_cli(capsys, "select", "--input", str(path),
                         "--criterion", "mystery")
    assert code == 2


def test_select_missing_input_exit_2(capsys, tmp_path):
    code, _, _ = run_cli(capsys, "select", "--input", str(tmp_path / "no.txt"))
    assert code == 2


def test_select_adaptive_trace_dump(capsys, tmp_path):
    rng = np.random.default_rng(5)
    path = _write_samples(tmp_path, rng.uniform(0, 1, 120).tolist())
    trace_path = tmp_path / "trace.json"
    code, out, _ = run_cli(capsys, "select", "--input", str(path),
                           "--criterion", "adaptive",
                           "--dump-adaptive-trace", str(trace_path))
    assert code == 0
    trace = json.loads(trace_path.read_text())
    assert "c_hat" in trace and "alpha_grid" in trace


def test_benchmark_row_count_and_determinism(capsys, tmp_path):
    args = ["benchmark", "--densities", "beta22", "--n", "50", "--trials", "3",
            "--criteria", "aic,aic1", "--seed", "1"]
    code, _, _ = run_cli(capsys, *args, "--out-dir", str(tmp_path / "one"))
    assert code == 0
    lines = (tmp_path / "one" / "trials.csv").read_text().splitlines()
    assert len(lines) == 1 + 3 * 2
    code, _, _ = run_cli(capsys, *args, "--out-dir", str(tmp_path / "two"))
    assert code == 0
    assert (tmp_path / "one" / "trials.csv").read_bytes() == \
        (tmp_path / "two" / "trials.csv").read_bytes()


def test_benchmark_threads_byte_identical(capsys, tmp_path):
    base = ["benchmark", "--densities", "uniform", "--n", "60", "--trials", "8",
            "--criteria", "aic", "--seed", "3"]
    run_cli(capsys, *base, "--threads", "1", "--out-dir", str(tmp_path / "t1"))
    run_cli(capsys, *base, "--threads", "3", "--out-dir", str(tmp_path / "t3"))
    assert (tmp_path / "t1" / "trials.csv").read_bytes() == \
        (tmp_path / "t3" / "trials.csv").read_bytes()


def test_benchmark_config_file_flags_win(capsys, tmp_path):
    cfg = tmp_path / "bench.cfg"
    cfg.write_text("densities=uniform\nn=50\ntrials=2\ncriteria=aic\nseed=9\n")
    code, _, _ = run_cli(capsys, "benchmark", "--config", str(cfg),
                         "--trials", "4", "--out-dir", str(tmp_path / "o"))
    assert code == 0
    lines = (tmp_path / "o" / "trials.csv").read_text().splitlines()
    assert len(lines) == 1 + 4  # flag overrode the config file's trials=2
    assert all(line.split(",")[0] == "uniform" for line in lines[1:])


def test_benchmark_env_seed(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("OVERPEN_SEED", "77")
    run_cli(capsys, "benchmark", "--densities", "uniform", "--n", "30",
            "--trials", "1", "--criteria", "aic",
            "--out-dir", str(tmp_path / "env"))
    monkeypatch.delenv("OVERPEN_SEED")
    run_cli(capsys, "benchmark", "--densities", "uniform", "--n", "30",
            "--trials", "1", "--criteria", "aic", "--seed", "77",
            "--out-dir", str(tmp_path / "flag"))
    assert (tmp_path / "env" / "trials.csv").read_bytes() == \
        (tmp_path / "flag" / "trials.csv").read_bytes()


def test_benchmark_bad_density_exit_2(capsys, tmp_path):
    code, _, _ = run_cli(capsys, "benchmark", "--densities", "missing",
                         "--n", "50", "--trials", "1", "--criteria", "aic",
                         "--out-dir", str(tmp_path))
    assert code == 2


def test_verify_smoke_exit_0(capsys, tmp_path):
    report_path = tmp_path / "report.json"
    code, _, _ = run_cli(capsys, "verify", "--suite", "identities",
                         "--reps", "100", "--seed", "1",
                         "--report", str(report_path))
    assert code == 0
    report = json.loads(report_path.read_text())
    assert report["passed"] is True
    assert {c["id"] for c in report["checks"]} == {
        "identity:risk-drop-is-kl", "identity:kl-pythagoras"
    }


def test_verify_self_test_exit_1(capsys, tmp_path):
    code, _, err = run_cli(capsys, "verify", "--suite", "identities",
                           "--reps", "50", "--seed", "1", "--self-test",
                           "--report", str(tmp_path / "r.json"))
    assert code == 1
    assert "self-test" in err


def test_verify_stdout_report(capsys):
    code, out, _ = run_cli(capsys, "verify", "--suite", "identities",
                           "--reps", "50", "--seed", "1")
    assert code == 0
    assert json.loads(out)["suite"] == "identities"


def test_plotdata_from_trials(capsys, tmp_path):
    run_cli(capsys, "benchmark", "--densities", "uniform", "--n", "40",
            "--trials", "2", "--criteria", "aic", "--seed", "1",
            "--out-dir", str(tmp_path / "bench"))
    code, _, _ = run_cli(capsys, "plotdata", "--trials",
                         str(tmp_path / "bench" / "trials.csv"),
                         "--out-dir", str(tmp_path / "plots"))
    assert code == 0
    assert (tmp_path / "plots" / "kl_quantiles_long.csv").exists()
    assert (tmp_path / "plots" / "inf_counts.csv").exists()
