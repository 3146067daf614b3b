import numpy as np
import pytest

from sparsepref.dataset import Dataset

# Five houses, five attributes; every column attains 1.0 somewhere.
HOUSE_VALUES = np.array([
    [0.84, 0.61, 0.93, 0.70, 0.31],
    [0.59, 0.95, 0.77, 0.86, 0.79],
    [0.69, 0.84, 1.00, 0.99, 0.55],
    [1.00, 0.64, 0.68, 0.45, 1.00],
    [0.74, 1.00, 0.44, 1.00, 0.73],
])
HOUSE_TRUTH = np.array([0.40, 0.35, 0.25, 0.0, 0.0])
HOUSE_UTILITIES = np.array([0.782, 0.761, 0.820, 0.794, 0.756])


@pytest.fixture
def houses() -> Dataset:
    return Dataset(HOUSE_VALUES.copy(), ("D1", "D2", "D3", "D4", "D5"))


def brute_skyline_mask(values: np.ndarray) -> np.ndarray:
    """O(n^2) dominance filter used as the independent oracle."""
    n = values.shape[0]
    keep = np.ones(n, dtype=bool)
    for i in range(n):
        for j in range(n):
            if i != j and np.all(values[j] >= values[i]) \
                    and np.any(values[j] > values[i]):
                keep[i] = False
                break
    return keep


def sampled_max_regret(values: np.ndarray, subset: np.ndarray, n_samples: int,
                       rng: np.random.Generator) -> float:
    """Monte-Carlo lower bound on the worst-case regret ratio."""
    d = values.shape[1]
    U = rng.dirichlet(np.ones(d), size=n_samples)
    best_x = (values @ U.T).max(axis=0)
    best_s = (subset @ U.T).max(axis=0)
    return float(np.max(1.0 - best_s / best_x))


def drive_session(session, user, X, budget=None):
    """Answer with the simulated user; after `budget` answers, quit."""
    from sparsepref.preference import Answer, simulate_answer

    answered = 0
    while not session.terminal:
        if budget is not None and answered >= budget:
            session.submit_answer(Answer.quit())
            break
        q = session.current_question()
        ans = simulate_answer(user, q.dims_shown, X.values[list(q.rows)])
        session.submit_answer(ans)
        answered += 1
    return session.session_result()
