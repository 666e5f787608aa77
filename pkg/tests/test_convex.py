import numpy as np
import pytest

from equilat.convex import ConvexDivergence, minimize_convex


def _abs(x):
    return float(abs(x[0]))


def _abs_grad(x):
    return np.sign(x)


def test_absolute_value():
    x, fx = minimize_convex(_abs, _abs_grad, [3.7], tol=1e-10)
    assert abs(x[0]) < 1e-9
    assert fx < 1e-9


def test_quadratic_vertex():
    res = minimize_convex(lambda x: float((x[0] - 2) ** 2), lambda x: 2 * (x - 2), [-5.0], tol=1e-12)
    assert res.x[0] == pytest.approx(2.0, abs=1e-6)


def test_polyak_step_with_known_lower_bound():
    res = minimize_convex(lambda x: float(np.abs(x).sum()), np.sign, [1.0, -2.0, 0.5], f_lower=0.0, tol=1e-12)
    assert res.value <= 1e-9


def _residual_plus_abs(v, w):
    def f(x):
        return float(np.linalg.norm(v - x[0] * w) + abs(x[0]))

    def g(x):
        r = v - x[0] * w
        return np.array([-(r @ w) / np.linalg.norm(r) + np.sign(x[0])])

    return f, g


# minima from a 10^7-point grid on [-5, 5] refined by a 4 * 10^6-point grid
@pytest.mark.parametrize(
    "w, t_star, f_star",
    [
        ([0.5, 1.0, -2.0], 0.0, 2.29128784747792),
        ([1.5, 3.0, -6.0], -0.015375124007, 2.2889007766365),
    ],
)
def test_norm_plus_abs_matches_grid_scan(w, t_star, f_star):
    f, g = _residual_plus_abs(np.array([2.0, -1.0, 0.5]), np.array(w))
    res = minimize_convex(f, g, [0.0], tol=1e-10)
    assert res.value == pytest.approx(f_star, abs=1e-6)
    assert res.x[0] == pytest.approx(t_star, abs=1e-5)


def test_history_non_increasing():
    f, g = _residual_plus_abs(np.array([1.0, 2.0]), np.array([1.0, -0.3]))
    res = minimize_convex(f, g, [4.0])
    h = np.array(res.history)
    assert np.all(np.diff(h) <= 0)


def test_divergence_guard():
    with pytest.raises(ConvexDivergence):
        minimize_convex(lambda x: float(x[0]), lambda x: np.ones(1), [0.0], radius=1e3, max_iter=10_000)


def test_deterministic():
    f, g = _residual_plus_abs(np.array([1.0, 2.0]), np.array([1.0, -0.3]))
    a, b = minimize_convex(f, g, [4.0]), minimize_convex(f, g, [4.0])
    assert np.array_equal(a.x, b.x) and a.value == b.value


def test_rejects_bad_tolerance():
    with pytest.raises(ValueError):
        minimize_convex(_abs, _abs_grad, [1.0], tol=0.0)
