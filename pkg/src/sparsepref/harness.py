"""Experiment harness: synthetic data, simulated trials, metrics, reports.

Each repetition draws a fresh sparse ground-truth utility, runs a session
against the simulated user, and scores the outcome. Full-interaction mode
("p1") answers until the favorite is returned; budgeted mode ("p2") answers
q questions, quits, and scores the returned K-set's regret against a
uniform-random K-set baseline. Wall-clock timing covers only the algorithm
(dataset generation and I/O excluded).
"""

from __future__ import annotations

import csv
import io
import time
from dataclasses import dataclass, fields

import numpy as np

from .dataset import Dataset, load_csv
from .preference import (Answer, SimulatedUser, gen_sparse_utility, regret_ratio,
                         simulate_answer)
from .session import Session, SessionConfig

BASELINE_NAME = "uniform_random_k"


def gen_uniform(n: int, d: int, rng: np.random.Generator) -> Dataset:
    """i.i.d. uniform values on (0, 1], each column rescaled to max exactly 1."""
    if n < 1 or d < 1:
        raise ValueError("n and d must be positive")
    vals = 1.0 - rng.random((n, d))
    vals /= vals.max(axis=0)
    return Dataset(vals, tuple(f"a{j}" for j in range(d)))


@dataclass(frozen=True)
class TrialConfig:
    n: int = 10_000
    d: int = 100
    d_int: int = 3
    mode: str = "p2"            # "p1": answer everything; "p2": budget q then quit
    q: int = 15
    K: int = 30
    reps: int = 100
    seed: int = 0
    dataset_path: str | None = None
    m: int = 7
    s: int = 2
    d_max: int = 5

    def __post_init__(self):
        if self.mode not in ("p1", "p2"):
            raise ValueError("mode must be 'p1' or 'p2'")
        if self.mode == "p2" and self.q < 1:
            raise ValueError("budgeted mode needs q >= 1")
        if self.reps < 1:
            raise ValueError("reps must be at least 1")


@dataclass(frozen=True)
class Metrics:
    n: int
    d: int
    d_int: int
    mode: str
    q: int
    K: int
    reps: int
    seed: int
    mean_time_s: float
    p95_time_s: float
    mean_regret: float
    mean_questions: float
    success_rate: float
    outperformance_rate: float
    baseline: str = BASELINE_NAME


def _load_dataset(cfg: TrialConfig) -> Dataset:
    if cfg.dataset_path:
        return load_csv(cfg.dataset_path)
    return gen_uniform(cfg.n, cfg.d, np.random.default_rng(cfg.seed))


def run_trials(cfg: TrialConfig, dataset: Dataset | None = None) -> Metrics:
    X = dataset if dataset is not None else _load_dataset(cfg)
    master = np.random.SeedSequence(cfg.seed)
    times: list[float] = []
    regrets: list[float] = []
    questions: list[int] = []
    successes: list[bool] = []
    outperforms: list[bool] = []

    for child in master.spawn(cfg.reps):
        rng = np.random.default_rng(child)
        truth = gen_sparse_utility(X.d, cfg.d_int, rng, d_max=max(cfg.d_max, cfg.d_int))
        user = SimulatedUser(truth)
        scfg = SessionConfig(m=cfg.m, s=cfg.s, d_max=cfg.d_max, K=cfg.K,
                             seed=int(rng.integers(2**31)))
        session = Session(X, scfg)
        t0 = time.perf_counter()
        answered = 0
        while not session.terminal:
            if cfg.mode == "p2" and answered >= cfg.q:
                session.submit_answer(Answer.quit())
                break
            record = session.current_question()
            ans = simulate_answer(user, record.dims_shown, X.values[list(record.rows)])
            session.submit_answer(ans)
            answered += 1
        elapsed = time.perf_counter() - t0
        result = session.session_result()
        ideal = int(np.argmax(X.values @ truth.weights))
        if result.kind == "favorite":
            regret = regret_ratio(X, X.values[result.favorite_row], truth)
            successes.append(result.favorite_row == ideal or regret == 0.0)
        else:
            regret = regret_ratio(X, X.values[list(result.set_rows)], truth)
            successes.append(regret == 0.0)
        times.append(elapsed)
        regrets.append(regret)
        questions.append(result.questions_asked)

        base_rng = np.random.default_rng(child.spawn(1)[0])
        tb0 = time.perf_counter()
        base_rows = base_rng.choice(X.n, size=min(cfg.K, X.n), replace=False)
        base_regret = regret_ratio(X, X.values[base_rows], truth)
        tb = time.perf_counter() - tb0
        if regret != base_regret:
            outperforms.append(regret < base_regret)
        else:
            outperforms.append(elapsed < tb)  # ties go to the faster method

    order = np.sort(times)
    return Metrics(
        n=X.n, d=X.d, d_int=cfg.d_int, mode=cfg.mode, q=cfg.q, K=cfg.K,
        reps=cfg.reps, seed=cfg.seed,
        mean_time_s=float(np.mean(times)),
        p95_time_s=float(order[min(len(order) - 1, int(np.ceil(0.95 * len(order))) - 1)]),
        mean_regret=float(np.mean(regrets)),
        mean_questions=float(np.mean(questions)),
        success_rate=float(np.mean(successes)),
        outperformance_rate=float(np.mean(outperforms)))


_FLOAT_FIELDS = {"mean_time_s", "p95_time_s", "mean_regret", "mean_questions",
                 "success_rate", "outperformance_rate"}


def metrics_to_csv(rows: list[Metrics]) -> str:
    cols = [f.name for f in fields(Metrics)]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for m in rows:
        w.writerow([repr(getattr(m, c)) if c in _FLOAT_FIELDS else getattr(m, c)
                    for c in cols])
    return buf.getvalue()


def metrics_from_csv(text: str) -> list[Metrics]:
    rows = list(csv.reader(io.StringIO(text)))
    header, body = rows[0], rows[1:]
    out = []
    for raw in body:
        kw = dict(zip(header, raw))
        for key in ("n", "d", "d_int", "q", "K", "reps", "seed"):
            kw[key] = int(kw[key])
        for key in _FLOAT_FIELDS:
            kw[key] = float(kw[key])
        out.append(Metrics(**kw))
    return out


def summarize(rows: list[Metrics]) -> str:
    lines = ["trial summary", "============="]
    for m in rows:
        lines.append(
            f"mode={m.mode} n={m.n} d={m.d} d_int={m.d_int} q={m.q} K={m.K} "
            f"reps={m.reps}: regret={m.mean_regret:.4f} "
            f"questions={m.mean_questions:.1f} time={m.mean_time_s:.3f}s "
            f"success={m.success_rate:.2f} "
            f"outperform[{m.baseline}]={m.outperformance_rate:.2f}")
    return "\n".join(lines) + "\n"


def emit_report(rows: list[Metrics], out_dir, figures: bool = True) -> list[str]:
    """Write metrics.csv and summary.txt, plus figures next to them.

    Returns the written paths. Output is deterministic for identical rows.
    """
    import os

    os.makedirs(out_dir, exist_ok=True)
    paths = []
    csv_path = os.path.join(out_dir, "metrics.csv")
    with open(csv_path, "w") as fh:
        fh.write(metrics_to_csv(rows))
    paths.append(csv_path)
    txt_path = os.path.join(out_dir, "summary.txt")
    with open(txt_path, "w") as fh:
        fh.write(summarize(rows))
    paths.append(txt_path)
    if figures:
        from .figures import render_metric_figures
        paths.extend(render_metric_figures(rows, out_dir))
    return paths
