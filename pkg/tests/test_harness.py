import os

import numpy as np
import pytest

from sparsepref.harness import (Metrics, TrialConfig, emit_report, gen_uniform,
                                metrics_from_csv, metrics_to_csv, run_trials,
                                summarize)


def test_gen_uniform_contract():
    ds = gen_uniform(1000, 10, np.random.default_rng(0))
    assert ds.values.shape == (1000, 10)
    assert np.all(ds.values > 0) and np.all(ds.values <= 1)
    assert np.all(ds.values.max(axis=0) == 1.0)


def test_gen_uniform_deterministic():
    a = gen_uniform(100, 5, np.random.default_rng(3))
    b = gen_uniform(100, 5, np.random.default_rng(3))
    assert np.array_equal(a.values, b.values)


def test_gen_uniform_column_means():
    ds = gen_uniform(100_000, 4, np.random.default_rng(1))
    sigma = 1.0 / np.sqrt(12 * 100_000)
    assert np.all(np.abs(ds.values.mean(axis=0) - 0.5) < 3 * sigma + 1e-3)


def test_run_trials_p1_small_scale():
    cfg = TrialConfig(n=400, d=20, d_int=2, mode="p1", reps=5, seed=1)
    m = run_trials(cfg)
    assert m.success_rate == 1.0
    assert m.mean_regret == pytest.approx(0.0, abs=1e-12)
    assert m.mean_questions > 0


def test_run_trials_p2_budget_enforced():
    cfg = TrialConfig(n=400, d=21, d_int=2, mode="p2", q=3, K=8, reps=6, seed=2)
    m = run_trials(cfg)
    assert m.mean_questions == 3.0
    assert 0.0 <= m.mean_regret <= 1.0
    assert 0.0 <= m.outperformance_rate <= 1.0


def strip_timing(m: Metrics) -> Metrics:
    # Wall-clock fields can never be bit-reproducible; everything the
    # algorithms control must be.
    from dataclasses import replace
    return replace(m, mean_time_s=0.0, p95_time_s=0.0)


def test_run_trials_reproducible():
    cfg = TrialConfig(n=300, d=14, d_int=2, mode="p2", q=2, K=5, reps=4, seed=9)
    a, b = run_trials(cfg), run_trials(cfg)
    assert metrics_to_csv([strip_timing(a)]) == metrics_to_csv([strip_timing(b)])


def test_metrics_csv_roundtrip():
    m = Metrics(n=10, d=5, d_int=2, mode="p2", q=3, K=4, reps=2, seed=0,
                mean_time_s=0.123456789123, p95_time_s=0.2, mean_regret=1 / 3,
                mean_questions=3.0, success_rate=0.5, outperformance_rate=0.75)
    text = metrics_to_csv([m])
    assert text.count("\n") == 2  # header plus one row
    assert metrics_from_csv(text) == [m]


def test_report_grid_rows_and_figures(tmp_path):
    rows = []
    for d in (10, 50, 100):
        rows.append(Metrics(n=10, d=d, d_int=2, mode="p2", q=3, K=4, reps=2,
                            seed=0, mean_time_s=0.1, p95_time_s=0.2,
                            mean_regret=0.1 + d / 1000, mean_questions=3.0,
                            success_rate=0.5, outperformance_rate=0.75))
    paths = emit_report(rows, tmp_path)
    names = {os.path.basename(p) for p in paths}
    assert "metrics.csv" in names and "summary.txt" in names
    pngs = [p for p in paths if p.endswith(".png")]
    assert pngs and all(os.path.getsize(p) > 0 for p in pngs)
    parsed = metrics_from_csv((tmp_path / "metrics.csv").read_text())
    assert [m.d for m in parsed] == [10, 50, 100]


def test_report_byte_identical(tmp_path):
    cfg = TrialConfig(n=200, d=10, d_int=2, mode="p2", q=2, K=5, reps=3, seed=4)
    a_dir, b_dir = tmp_path / "a", tmp_path / "b"
    emit_report([strip_timing(run_trials(cfg))], a_dir, figures=False)
    emit_report([strip_timing(run_trials(cfg))], b_dir, figures=False)
    assert (a_dir / "metrics.csv").read_bytes() == (b_dir / "metrics.csv").read_bytes()
    assert (a_dir / "summary.txt").read_bytes() == (b_dir / "summary.txt").read_bytes()


def test_summarize_mentions_baseline():
    m = Metrics(n=10, d=5, d_int=2, mode="p2", q=3, K=4, reps=2, seed=0,
                mean_time_s=0.1, p95_time_s=0.2, mean_regret=0.1,
                mean_questions=3.0, success_rate=0.5, outperformance_rate=0.75)
    assert "uniform_random_k" in summarize([m])


def test_trial_config_validation():
    with pytest.raises(ValueError):
        TrialConfig(mode="p3")
    with pytest.raises(ValueError):
        TrialConfig(mode="p2", q=0)
    with pytest.raises(ValueError):
        TrialConfig(reps=0)


def test_regret_monotone_in_q_and_K():
    # More feedback and bigger output sets never hurt on average.
    base = dict(n=800, d=28, d_int=2, reps=8, seed=5, mode="p2")
    r_q = [run_trials(TrialConfig(q=q, K=8, **base)).mean_regret
           for q in (2, 4, 8)]
    assert r_q[0] >= r_q[-1] - 0.02
    r_K = [run_trials(TrialConfig(q=4, K=K, **base)).mean_regret
           for K in (4, 16)]
    assert r_K[0] >= r_K[-1] - 0.02
