import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from equilat.lp import LinearProgram, LpError, LpIterationLimit, LpStatus, solve_lp
from equilat.oracles import lp_by_vertices


def test_one_variable_bound():
    lp = LinearProgram(c=[-1.0], A_ub=[[1.0], [-1.0]], b_ub=[3.0, 0.0])
    res = solve_lp(lp)
    assert res.status is LpStatus.OPTIMAL
    assert res.solution == pytest.approx([3.0])
    assert res.value == pytest.approx(-3.0)


def test_nonneg_mask_matches_explicit_row():
    a = solve_lp(LinearProgram(c=[-1.0], A_ub=[[1.0]], b_ub=[3.0], nonneg=[True]))
    assert a.value == pytest.approx(-3.0)


def test_contradictory_bounds_infeasible():
    lp = LinearProgram(c=[1.0], A_ub=[[-1.0], [1.0]], b_ub=[-1.0, 0.0])
    assert solve_lp(lp).status is LpStatus.INFEASIBLE


def test_unbounded_detected():
    lp = LinearProgram(c=[-1.0, 0.0], A_ub=[[-1.0, 0.0], [0.0, 1.0]], b_ub=[0.0, 1.0])
    assert solve_lp(lp).status is LpStatus.UNBOUNDED


def test_equality_rows():
    # min x + y with x + y = 2, x - y <= 0.5, x, y >= 0
    lp = LinearProgram(c=[1.0, 2.0], A_ub=[[1.0, -1.0]], b_ub=[0.5], A_eq=[[1.0, 1.0]], b_eq=[2.0], nonneg=[True, True])
    res = solve_lp(lp)
    assert res.solution == pytest.approx([1.25, 0.75])
    assert res.value == pytest.approx(2.75)


def test_beale_cycling_example():
    # degenerate instance on which Dantzig pricing with naive ties cycles
    c = [-0.75, 20.0, -0.5, 6.0]
    A = [[0.25, -8.0, -1.0, 9.0], [0.5, -12.0, -0.5, 3.0], [0.0, 0.0, 1.0, 0.0]]
    res = solve_lp(LinearProgram(c, A, [0.0, 0.0, 1.0], nonneg=[True] * 4))
    assert res.status is LpStatus.OPTIMAL
    assert res.value == pytest.approx(-1.25, abs=1e-12)


def test_dimension_mismatch():
    with pytest.raises(LpError, match="columns"):
        LinearProgram(c=[1.0, 2.0], A_ub=[[1.0, 2.0, 3.0]], b_ub=[1.0])
    with pytest.raises(LpError, match="b_ub"):
        LinearProgram(c=[1.0], A_ub=[[1.0]], b_ub=[1.0, 2.0])
    with pytest.raises(LpError):
        LinearProgram(c=[], A_ub=None, b_ub=None)


def test_iteration_cap():
    lp = LinearProgram(c=[-1.0, -1.0], A_ub=[[1.0, 2.0], [3.0, 1.0]], b_ub=[4.0, 6.0], nonneg=[True, True])
    with pytest.raises(LpIterationLimit):
        solve_lp(lp, max_iter=0)


def test_shadow_prices():
    # min -x - y, x + 2y <= 4, 3x + y <= 6 -> vertex (1.6, 1.2)
    lp = LinearProgram(c=[-1.0, -1.0], A_ub=[[1.0, 2.0], [3.0, 1.0]], b_ub=[4.0, 6.0], nonneg=[True, True])
    res = solve_lp(lp)
    assert res.solution == pytest.approx([1.6, 1.2])
    assert res.value == pytest.approx(float(res.duals_ub @ lp.b_ub))


def _random_lp(seed, n_max=3, m_max=8):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, n_max + 1))
    m = int(rng.integers(1, m_max - n + 1))
    A = rng.normal(size=(m, n))
    if rng.random() < 0.75:
        b = A @ rng.uniform(-1, 1, n) + rng.uniform(0, 1, m)
    else:
        b = rng.normal(size=m)
    A = np.vstack([A, np.eye(n), -np.eye(n)])
    b = np.concatenate([b, np.full(2 * n, 2.0)])
    return rng.normal(size=n), A, b


def _agrees_with_vertices(c, A, b):
    ref, _ = lp_by_vertices(c, A, b)
    res = solve_lp(LinearProgram(c, A, b))
    if ref is None:
        assert res.status is LpStatus.INFEASIBLE
    else:
        assert res.status is LpStatus.OPTIMAL
        assert abs(res.value - ref) <= 1e-9
        assert np.all(A @ res.solution <= b + 1e-9)


@pytest.mark.parametrize("seed", range(40))
def test_two_variable_lps_match_vertex_enumeration(seed):
    _agrees_with_vertices(*_random_lp(seed, n_max=2, m_max=6))


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_small_lps_match_vertex_enumeration(seed):
    _agrees_with_vertices(*_random_lp(seed))


def test_deterministic():
    c, A, b = _random_lp(7)
    r1, r2 = solve_lp(LinearProgram(c, A, b)), solve_lp(LinearProgram(c, A, b))
    assert r1.value == r2.value
    assert np.array_equal(r1.solution, r2.solution)
