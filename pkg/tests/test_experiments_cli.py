import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from regsub import __version__
from regsub.cli import main
from regsub.experiments import (
    ExperimentConfig,
    run_experiment,
    run_trial,
)
from regsub.graphs import parse_graph, process_trace
from regsub.oracles import first_cycle_step
from regsub.thresholds import emergence_threshold

SMALL = {
    "E1": dict(n=2000, c=4.0, trials=3),
    "E2": dict(n=60, k=3, trials=2),
    "E3": dict(n=400, M=1400, trials=3),
    "E4": dict(n=300, M=1000, trials=3),
    "E5": dict(params={"ks": [20, 30]}),
    "E6": dict(params={"suite": [[10, 35, 3], [12, 40, 3]]}),
}


def _rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_config_validation():
    for bad in (dict(experiment="E9"), dict(experiment="E2", trials=0),
                dict(experiment="E2", seed=-1), dict(experiment="E2", seed=2**64),
                dict(experiment="E2", mode="fast"), dict(experiment="E1"),
                dict(experiment="E3"), dict(experiment="E2", n=0)):
        with pytest.raises(ValueError):
            ExperimentConfig(**bad)


def test_trial_streams_independent_of_trial_count():
    a = run_experiment(ExperimentConfig("E1", n=500, c=4.0, trials=2, seed=9))
    b = run_experiment(ExperimentConfig("E1", n=500, c=4.0, trials=4, seed=9))
    assert [r.values for r in a.records] == [r.values for r in b.records[:2]]
    c = run_experiment(ExperimentConfig("E1", n=500, c=4.0, trials=2, seed=10))
    assert [r.values for r in a.records] != [r.values for r in c.records]


@pytest.mark.parametrize("exp", sorted(SMALL))
def test_replay_is_byte_identical(exp, tmp_path):
    cfg = ExperimentConfig(exp, seed=123, **SMALL[exp])
    one, two = run_experiment(cfg), run_experiment(cfg)
    assert one.csv_text().encode() == two.csv_text().encode()
    assert not any(r.error for r in one.records)
    path = tmp_path / f"{exp}.csv"
    one.write(path)
    assert path.read_bytes() == one.csv_text().encode()
    side = json.loads((tmp_path / f"{exp}.csv.json").read_text())
    assert side["version"] == __version__ and side["config"]["experiment"] == exp
    assert side["config"]["seed"] == 123 and len(side["wall_time"]) == len(one.records)


def test_parallel_matches_sequential(monkeypatch):
    cfg = ExperimentConfig("E4", n=300, M=1000, trials=4, seed=5)
    seq = run_experiment(cfg).csv_text()
    monkeypatch.setenv("REGSUB_THREADS", "2")
    assert run_experiment(cfg).csv_text() == seq


def test_e2_k1_always_one():
    res = run_experiment(ExperimentConfig("E2", n=100, k=1, trials=5, seed=1))
    assert all(r.values["m_upper"] == 1 and r.values["method"] == "exact" for r in res.records)


def test_e2_k2_first_cycle():
    cfg = ExperimentConfig("E2", n=200, k=2, trials=4, seed=2)
    res = run_experiment(cfg)
    for r in res.records:
        assert r.values["m_upper"] == first_cycle_step(process_trace(200, cfg.rng(r.trial)))


def test_summaries():
    th = emergence_threshold(3)
    e1 = run_experiment(ExperimentConfig("E1", n=5000, c=th.c_k + 0.5, trials=3, seed=0))
    assert abs(e1.summary["core_fraction_mean"] - e1.summary["theory_core_fraction"]) < 0.05
    e3 = run_experiment(ExperimentConfig("E3", n=2000, M=7000, trials=3, seed=0))
    assert "diff_mean" in e3.summary
    e4 = run_experiment(ExperimentConfig("E4", n=500, M=1500, trials=50, seed=0))
    assert e4.summary["theory_simple_probability"] == pytest.approx(np.exp(-2))
    assert "lambda" not in e4.summary


def test_errors_recorded_per_trial():
    cfg = ExperimentConfig("E3", n=10, M=31, trials=2)  # odd degree total
    rec = run_trial(cfg, 0)
    assert rec.error.startswith("ValueError") and rec.values == {}
    res = run_experiment(cfg)
    assert res.summary["errors"] == 2
    assert _rows(res.csv_text())[0]["error"].startswith("ValueError")


# -- command line -------------------------------------------------------------

def test_cli_thresholds(capsys):
    assert main(["thresholds", "--k", "3..10"]) == 0
    rows = _rows(capsys.readouterr().out)
    assert [int(r["k"]) for r in rows] == list(range(3, 11))
    c = [float(r["c_k"]) for r in rows]
    assert all(a < b for a, b in zip(c, c[1:]))


def test_cli_process_exact(capsys, tmp_path):
    out = tmp_path / "p.csv"
    assert main(["process", "--n", "20", "--k", "2", "--trials", "5", "--mode", "exact",
                 "--seed", "4", "--out", str(out)]) == 0
    rows = _rows(out.read_text())
    cfg = ExperimentConfig("E2", n=20, k=2, seed=4)
    for r in rows:
        assert int(r["m_upper"]) == first_cycle_step(process_trace(20, cfg.rng(int(r["trial"]))))


def test_cli_sample_and_bounds(capsys, tmp_path):
    assert main(["sample", "--model", "hnmk", "--n", "50", "--M", "160", "--k", "3"]) == 0
    g = parse_graph(capsys.readouterr().out)
    assert g.n == 50 and g.degrees.min() >= 3
    assert main(["sample", "--model", "gnp", "--n", "30", "--c", "2", "--seed", "1"]) == 0
    first = capsys.readouterr().out
    main(["sample", "--model", "gnp", "--n", "30", "--c", "2", "--seed", "1"])
    assert capsys.readouterr().out == first
    assert main(["bounds", "--k", "50", "--out", str(tmp_path / "b.csv")]) == 0
    assert "epsilon_k = 0.308" in capsys.readouterr().err


def test_cli_run(capsys):
    assert main(["run", "E5", "--ks", "50", "100"]) == 0
    rows = _rows(capsys.readouterr().out)
    assert [r["k"] for r in rows] == ["50", "100"]


def test_cli_verify(capsys):
    assert main(["verify", "--suite", "kernel"]) == 0
    assert "[PASS]" in capsys.readouterr().out


@pytest.mark.parametrize("argv", [
    [], ["thresholds", "--k", "2..5"], ["sample", "--model", "gnp", "--n", "10"],
    ["run", "E1"], ["process", "--n", "10"], ["verify", "--suite", "nope"],
    ["sample", "--model", "gnp", "--n", "10", "--c", "1", "--seed", "-3"],
])
def test_cli_usage_errors(argv):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == 2


def test_cli_runtime_error_exit_one():
    # a dense request that never yields a simple graph, run as a real process
    proc = subprocess.run(
        [sys.executable, "-m", "regsub", "sample", "--model", "hnmk", "--n", "4",
         "--M", "40", "--k", "3"], capture_output=True, text=True)
    assert proc.returncode == 1 and "error" in proc.stderr
    proc = subprocess.run([sys.executable, "-m", "regsub", "sample", "--model", "mnmk",
                           "--n", "4", "--M", "13", "--k", "3"], capture_output=True, text=True)
    assert proc.returncode == 1
