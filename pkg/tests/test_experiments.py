import numpy as np
import pytest
from numpy.testing import assert_allclose

from pickands.evdtest import TestConfig
from pickands.experiments import (
    WORKERS_ENV,
    ExperimentConfig,
    estimate_all,
    model_sample,
    run_k_sweep,
    run_mise,
    run_power_table,
    workers_from_env,
    write_csv,
)


def test_model_sample_is_deterministic_per_replicate():
    a = model_sample("gumbel(2)", 50, 1, 3)
    b = model_sample("gumbel(2)", 50, 1, 3)
    c = model_sample("gumbel(2)", 50, 1, 4)
    assert np.array_equal(a.u, b.u) and not np.array_equal(a.u, c.u)


def test_estimate_all_produces_valid_curves():
    ps = model_sample("asy-neg-log(rho=0.4)", 100, 0, 0)
    t = np.linspace(0, 1, 51)
    curves = estimate_all(ps, ("pickands", "cfg", "md:0.4"), t)
    for c in curves.values():
        v = c.values
        assert v[0] == 1.0 and v[-1] == 1.0
        assert np.all(v >= np.maximum(t, 1 - t) - 1e-12) and np.all(v <= 1)
        assert np.all(np.diff(v, 2) >= -1e-12)
    with pytest.raises(ValueError):
        estimate_all(ps, ("bogus",), t)
    with pytest.raises(ValueError):
        estimate_all(ps, ("md:opt",), t)


def test_run_mise_rows_and_determinism():
    kw = dict(models=["gumbel(2)"], estimators=("pickands", "md:0.4"), n=60, replicates=8, seed=3, t_grid=np.linspace(0, 1, 21))
    rows = run_mise(**kw)
    assert rows == run_mise(**kw)
    assert [r["estimator"] for r in rows] == ["pickands", "md:0.4"]
    for r in rows:
        assert r["mise"] >= 0 and r["replicates"] == 8 and r["seed"] == 3 and "version" in r
    with pytest.raises(ValueError):
        run_mise(["clayton(2)"], replicates=2)


def test_run_mise_is_split_invariant():
    # replicate r depends only on (seed, model, r), so the mean over a full run
    # equals the pooled mean of two halves
    t = np.linspace(0, 1, 21)
    full = run_mise(["gumbel(2)"], ("md:0.4",), 50, 6, 0, t)[0]["mise"]
    from pickands.experiments import _mise_matrix

    ise = _mise_matrix("gumbel(2)", 50, 6, 0, ("md:0.4",), t, 0.95, True, 1)[:, 0]
    assert_allclose(full, ise.mean(), rtol=1e-15)
    assert_allclose(full, (ise[:3].sum() + ise[3:].sum()) / 6, rtol=1e-14)


def test_workers_do_not_change_results(monkeypatch):
    kw = dict(models=["mixed(0.5)"], estimators=("md:0.4",), n=40, replicates=6, seed=1, t_grid=np.linspace(0, 1, 11))
    serial = run_mise(**kw, workers=1)
    assert run_mise(**kw, workers=2) == serial
    monkeypatch.setenv(WORKERS_ENV, "2")
    assert workers_from_env() == 2
    monkeypatch.setenv(WORKERS_ENV, "x")
    with pytest.raises(ValueError):
        workers_from_env()


def test_k_sweep_ratios():
    rows, summary = run_k_sweep("asy-neg-log", (0.2, 0.5), (0.0, 0.4, 1.0), n=60, replicates=6, t_grid=np.linspace(0, 1, 21))
    per_rho = [r for r in rows if r["rho"] != "max"]
    for rho in (0.2, 0.5):
        ratios = [r["ratio"] for r in per_rho if r["rho"] == rho]
        assert min(ratios) == 1.0 and all(q >= 1 for q in ratios)
    worst = [r["ratio"] for r in rows if r["rho"] == "max"]
    assert len(worst) == 3 and all(q >= 1 for q in worst)
    assert set(summary["argmin"]) == {0.2, 0.5}
    assert summary["worst_case_argmin"] in (0.0, 0.4, 1.0)


def test_power_table_rows():
    cfg = TestConfig(B=20, t_points=11)
    rows = run_power_table(["independence", "clayton(tau=0.5)"], n=50, trials=4, cfg=cfg, seed=2)
    assert [r["model"] for r in rows] == ["independence", "clayton(2)"]
    for r in rows:
        assert 0 <= r["reject_0.05"] <= r["reject_0.1"] <= 1
    assert rows == run_power_table(["independence", "clayton(tau=0.5)"], n=50, trials=4, cfg=cfg, seed=2)


def test_experiment_config_validation():
    with pytest.raises(ValueError):
        ExperimentConfig(replicates=0)
    with pytest.raises(ValueError):
        ExperimentConfig(models=("nosuch",))


def test_write_csv(tmp_path):
    rows = [{"a": 1, "b": 2.5}, {"a": 3, "b": 4.0}]
    text = write_csv(rows, tmp_path / "x.csv", comments=["hello"])
    assert text.splitlines() == ["# hello", "a,b", "1,2.5", "3,4.0"]
    assert (tmp_path / "x.csv").read_text() == text
