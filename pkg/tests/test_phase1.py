import numpy as np
import pytest

from sparsepref.harness import gen_uniform
from sparsepref.phase1 import (Phase1State, make_blocks, phase1_apply,
                               phase1_next_question, sample_question_rows)
from sparsepref.preference import (Answer, SimulatedUser, gen_sparse_utility,
                                   simulate_answer)


def test_make_blocks_paper_shape():
    blocks = make_blocks(100, 7)
    assert len(blocks) == 15
    assert blocks[0] == tuple(range(7))
    assert blocks[-1] == (98, 99)


def test_make_blocks_single_and_remainder():
    assert make_blocks(7, 7) == [tuple(range(7))]
    sizes = [len(b) for b in make_blocks(10, 3)]
    assert sizes == [3, 3, 3, 1]
    assert make_blocks(5, 9) == [tuple(range(5))]


def test_make_blocks_validation():
    with pytest.raises(ValueError):
        make_blocks(10, 0)
    with pytest.raises(ValueError):
        make_blocks(0, 3)


@pytest.fixture
def data():
    return gen_uniform(60, 20, np.random.default_rng(0))


def test_first_question_shape(data):
    state = Phase1State.start(20, 7)
    dims, rows = phase1_next_question(state, data, 2, np.random.default_rng(1))
    assert dims == tuple(range(7))
    assert len(rows) == 2 and rows[0] != rows[1]


def test_short_block_padded_with_eliminated(data):
    state = Phase1State.start(20, 7)  # blocks of 7, 7, 6
    rng = np.random.default_rng(2)
    phase1_next_question(state, data, 2, rng)
    phase1_apply(state, Answer.opt_out())        # dims 0..6 eliminated
    phase1_next_question(state, data, 2, rng)
    phase1_apply(state, Answer.choose(0))        # dims 7..13 kept
    dims, _ = phase1_next_question(state, data, 2, rng)
    # The short block (14..19) pads with the lowest-indexed eliminated dim.
    assert dims == (14, 15, 16, 17, 18, 19, 0)


def test_short_block_unpadded_when_nothing_eliminated():
    X = gen_uniform(30, 6, np.random.default_rng(0))
    state = Phase1State.start(6, 7)
    dims, _ = phase1_next_question(state, X, 2, np.random.default_rng(0))
    assert dims == tuple(range(6))


def test_apply_semantics(data):
    state = Phase1State.start(20, 7)
    rng = np.random.default_rng(3)
    phase1_next_question(state, data, 2, rng)
    phase1_apply(state, Answer.opt_out())
    assert state.eliminated == list(range(7)) and state.kept == []
    phase1_next_question(state, data, 2, rng)
    phase1_apply(state, Answer.choose(1))
    assert state.kept == list(range(7, 14))
    assert state.cursor == 2
    # Padding never changes status: eliminated stays exactly block 0.
    dims, _ = phase1_next_question(state, data, 2, rng)
    phase1_apply(state, Answer.choose(0))
    assert state.eliminated == list(range(7))
    assert state.done


def test_quit_rejected_by_phase_machine(data):
    state = Phase1State.start(20, 7)
    phase1_next_question(state, data, 2, np.random.default_rng(0))
    with pytest.raises(ValueError):
        phase1_apply(state, Answer.quit())


def test_full_run_hand_simulation():
    # Support {3, 40, 77} lands in blocks 0, 5, and 11 of the 15 blocks.
    rng = np.random.default_rng(10)
    X = gen_uniform(500, 100, rng)
    w = np.zeros(100)
    w[[3, 40, 77]] = (0.5, 0.3, 0.2)
    user = SimulatedUser(__import__("sparsepref").UtilityVector(w))
    state = Phase1State.start(100, 7)
    questions = 0
    while not state.done:
        dims, rows = phase1_next_question(state, X, 2, rng)
        ans = simulate_answer(user, dims, X.values[rows])
        phase1_apply(state, ans)
        questions += 1
    assert questions == 15
    kept_blocks = {i // 7 for i in state.kept}
    assert kept_blocks == {0, 5, 11}
    assert len(state.kept) == 21


def test_elimination_exactness_randomized():
    # A block survives iff it holds a support dimension; support always kept.
    rng = np.random.default_rng(42)
    for trial in range(40):
        d = int(rng.integers(8, 40))
        m = int(rng.integers(2, 9))
        X = gen_uniform(80, d, rng)
        truth = gen_sparse_utility(d, int(rng.integers(1, 4)), rng)
        user = SimulatedUser(truth)
        state = Phase1State.start(d, m)
        count = 0
        while not state.done:
            dims, rows = phase1_next_question(state, X, 2, rng)
            phase1_apply(state, simulate_answer(user, dims, X.values[rows]))
            count += 1
        assert count == len(make_blocks(d, m))
        support = set(truth.support)
        assert support <= set(state.kept)
        for block in make_blocks(d, m):
            if not support & set(block):
                assert set(block) <= set(state.eliminated)
        assert len(state.kept) <= len(truth.support) * m


def test_sample_rows_distinct_projections():
    vals = np.ones((10, 3))
    vals[0] = [1.0, 0.5, 0.5]
    from sparsepref.dataset import Dataset
    ds = Dataset(vals, ("a", "b", "c"))
    rng = np.random.default_rng(0)
    rows = sample_question_rows(ds, (0, 1, 2), 2, rng)
    assert len(rows) == 2
    with pytest.raises(ValueError):
        sample_question_rows(ds, (0,), 11, rng)
