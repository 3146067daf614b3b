import numpy as np
import pytest
from scipy.optimize import linprog

from sparsepref._lp import INFEASIBLE, OPTIMAL, UNBOUNDED, highs_max, tiny_max


def scipy_reference(c, A_ub, b_ub, A_eq, b_eq):
    res = linprog(-np.asarray(c, float), A_ub=A_ub, b_ub=b_ub, A_eq=A_eq,
                  b_eq=b_eq, bounds=(0, None), method="highs")
    if res.status == 2:
        return INFEASIBLE, None
    if res.status == 3:
        return UNBOUNDED, None
    return OPTIMAL, -res.fun


def test_simple_maximization():
    # max x+y st x+2y <= 4, 3x+y <= 6
    res = tiny_max([1, 1], [[1, 2], [3, 1]], [4, 6])
    assert res.status == OPTIMAL
    assert res.value == pytest.approx(2.8)


def test_equality_constraint():
    res = tiny_max([1, 0], A_eq=[[1, 1]], b_eq=[1])
    assert res.status == OPTIMAL
    assert res.value == pytest.approx(1.0)
    assert res.x == pytest.approx([1.0, 0.0])


def test_infeasible():
    res = tiny_max([1], A_ub=[[1], [-1]], b_ub=[1, -3])
    assert res.status == INFEASIBLE


def test_unbounded():
    assert tiny_max([1, 0]).status == UNBOUNDED
    assert tiny_max([1], A_ub=[[-1]], b_ub=[0]).status == UNBOUNDED


def test_degenerate_vertex():
    # Multiple redundant constraints meeting at the optimum.
    res = tiny_max([1, 1], [[1, 0], [1, 0], [0, 1], [1, 1]], [1, 1, 1, 2])
    assert res.status == OPTIMAL
    assert res.value == pytest.approx(2.0)


def test_matches_scipy_on_random_instances():
    rng = np.random.default_rng(11)
    checked = 0
    for _ in range(400):
        n = int(rng.integers(1, 8))
        m_ub = int(rng.integers(0, 9))
        m_eq = int(rng.integers(0, 3))
        c = rng.normal(size=n)
        A_ub = rng.normal(size=(m_ub, n)) if m_ub else None
        b_ub = rng.normal(size=m_ub) if m_ub else None
        A_eq = rng.normal(size=(m_eq, n)) if m_eq else None
        b_eq = rng.normal(size=m_eq) if m_eq else None
        ours = tiny_max(c, A_ub, b_ub, A_eq, b_eq)
        ref_status, ref_value = scipy_reference(c, A_ub, b_ub, A_eq, b_eq)
        if ours.status != ref_status:
            # HiGHS occasionally reports "infeasible" for infeasible-or-
            # unbounded models; only a verified disagreement is a failure.
            assert {ours.status, ref_status} == {UNBOUNDED, INFEASIBLE}
            feas = linprog(np.zeros(n), A_ub=A_ub, b_ub=b_ub, A_eq=A_eq,
                           b_eq=b_eq, bounds=(0, None), method="highs")
            assert (feas.status == 0) == (ours.status == UNBOUNDED)
            continue
        if ours.status == OPTIMAL:
            assert ours.value == pytest.approx(ref_value, abs=1e-6, rel=1e-6)
            checked += 1
    assert checked > 50


def test_polytope_family_matches_scipy():
    rng = np.random.default_rng(5)
    for _ in range(200):
        k = int(rng.integers(2, 6))
        g = int(rng.integers(0, 12))
        G = rng.normal(size=(g, k)) if g else None
        c = rng.normal(size=k)
        A_ub = -G if g else None
        b_ub = np.full(g, 1e-9) if g else None
        ours = tiny_max(c, A_ub, b_ub, np.ones((1, k)), [1.0])
        status, value = scipy_reference(c, A_ub, b_ub, np.ones((1, k)), [1.0])
        assert ours.status == status
        if status == OPTIMAL:
            assert ours.value == pytest.approx(value, abs=1e-7)


def test_highs_wrapper_statuses():
    assert highs_max([1, 1], [[1, 2], [3, 1]], [4, 6]).value == pytest.approx(2.8)
    assert highs_max([1], A_ub=[[1], [-1]], b_ub=[1, -3]).status == INFEASIBLE
    assert highs_max([1]).status == UNBOUNDED
