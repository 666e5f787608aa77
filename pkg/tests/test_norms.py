import itertools
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from equilat.norms import (
    DimensionError,
    HullGauge,
    Lp,
    MaxOf,
    NormError,
    Polyhedral,
    Scaled,
    SpreadingComposite,
    UnsupportedNorm,
    dual_norm_eval,
    extend_norm,
    gauge_of_hull,
    norm_eval,
    norm_from_dict,
    norm_from_json,
    norming_functional,
    spreading_composite_norm,
)
from equilat.oracles import hull_gauge_oracle_2d

HEXAGON = np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
L1_BALL_3D = np.array(list(itertools.product((1.0, -1.0), repeat=3)))


def all_variants():
    return [
        Lp(1.0),
        Lp(2.0),
        Lp(3.0),
        Lp(math.inf),
        Polyhedral(HEXAGON),
        Scaled(0.5, Lp(math.inf)),
        MaxOf((Scaled(2.0 / 3.0, Lp(math.inf, 3)), Scaled(0.5, Lp(2.0, 3)))),
        HullGauge(0.5, Lp(2.0, 3), np.array([[1.0, -1.0, 0.0]])),
        HullGauge(0.8, Polyhedral(HEXAGON), np.array([[1.5, 0.5]])),
        extend_norm(3, [[1, 0, 0], [0, 1, 0]], Polyhedral(HEXAGON), Lp(2.0), 2.0),
        SpreadingComposite(Lp(2.0, 5), Lp(2.0, 2), 2, 0.1),
    ]


# ------------------------------------------------------------- evaluation


def test_sup_norm():
    assert norm_eval(Lp(math.inf), [1, -2, 3]) == 3.0


def test_euclidean():
    assert norm_eval(Lp(2), [3, 4]) == 5.0


def test_lp_general_exponent():
    assert norm_eval(Lp(3), [1, 2]) == pytest.approx(9 ** (1 / 3))
    # large entries do not overflow
    assert norm_eval(Lp(3), [1e200, 1e200]) == pytest.approx(2 ** (1 / 3) * 1e200)


def test_polyhedral_matches_facet_maximum():
    rng = np.random.default_rng(1)
    spec = Polyhedral(HEXAGON)
    for v in rng.normal(size=(50, 2)):
        expected = max(abs(v[0]), abs(v[1]), abs(v[0] + v[1]))
        assert norm_eval(spec, v) == pytest.approx(expected, rel=1e-15)


def test_zero_vector_has_zero_norm():
    for spec in all_variants():
        assert norm_eval(spec, np.zeros(spec.dim or 3)) == 0.0


def test_dimension_mismatch():
    with pytest.raises(DimensionError):
        norm_eval(Polyhedral(HEXAGON), [1.0, 2.0, 3.0])
    with pytest.raises(DimensionError):
        norm_eval(Lp(2), np.zeros((2, 2)))


def test_invalid_parameters():
    with pytest.raises(NormError):
        Lp(0.5)
    with pytest.raises(NormError):
        Polyhedral([[1.0, 0.0]])
    with pytest.raises(NormError):
        Scaled(-1.0, Lp(2))
    with pytest.raises(NormError):
        HullGauge(0.0, Lp(2), np.zeros((0, 2)))


# ------------------------------------------------------------- duality


def test_l1_dual_is_sup():
    assert dual_norm_eval(Lp(1), [1, -2]) == 2.0


def test_l2_self_dual():
    assert dual_norm_eval(Lp(2), [3, 4]) == 5.0


def test_polyhedral_l1_ball_dual_matches_sup_norm():
    spec = Polyhedral(L1_BALL_3D)
    rng = np.random.default_rng(2)
    for f in rng.normal(size=(20, 3)):
        assert dual_norm_eval(spec, f) == pytest.approx(np.abs(f).max(), abs=1e-9)


def test_hexagon_dual_by_vertices():
    # vertices of the hexagon are +-(1, 0), +-(0, 1), +-(1, -1)
    verts = np.array([[1, 0], [0, 1], [1, -1]], dtype=float)
    spec = Polyhedral(HEXAGON)
    for f in np.random.default_rng(3).normal(size=(20, 2)):
        assert dual_norm_eval(spec, f) == pytest.approx(np.abs(verts @ f).max(), abs=1e-9)


@pytest.mark.parametrize("spec", all_variants(), ids=lambda s: s.variant)
def test_duality_pairing(spec):
    rng = np.random.default_rng(4)
    n = spec.dim or 3
    for _ in range(10):
        f, x = rng.normal(size=n), rng.normal(size=n)
        assert abs(f @ x) <= dual_norm_eval(spec, f) * norm_eval(spec, x) + 1e-9


# ------------------------------------------------------------- norming functionals


def test_norming_functional_l2():
    f = norming_functional(Lp(2), [3, 4])
    assert f.coeffs == pytest.approx([0.6, 0.8])


def test_norming_functional_sup():
    f = norming_functional(Lp(math.inf), [1, -2, 3])
    assert np.array_equal(f.coeffs, [0.0, 0.0, 1.0])
    assert f([1, -2, 3]) == 3.0


@pytest.mark.parametrize("spec", all_variants(), ids=lambda s: s.variant)
def test_norming_functional_postconditions(spec):
    rng = np.random.default_rng(5)
    n = spec.dim or 3
    for v in rng.normal(size=(5, n)):
        f = norming_functional(spec, v)
        assert f(v) == pytest.approx(norm_eval(spec, v), abs=1e-9)
        assert dual_norm_eval(spec, f.coeffs) == pytest.approx(1.0, abs=1e-9)


def test_norming_functional_rejects_zero():
    with pytest.raises(NormError):
        norming_functional(Lp(2), [0.0, 0.0])


# ------------------------------------------------------------- hull gauges


def test_pure_scaled_ball():
    assert gauge_of_hull(0.5, Lp(2), [], [1.0, 0.0]) == pytest.approx(2.0)


def test_difference_of_basis_vectors_on_boundary():
    W = [[1.0, -1.0], [-1.0, 1.0]]
    assert gauge_of_hull(1.0, Lp(2), W, [1.0, -1.0]) == pytest.approx(1.0, abs=1e-12)


def test_asymmetric_generators_rejected_without_symmetrize():
    with pytest.raises(NormError):
        gauge_of_hull(1.0, Lp(2), [[1.0, 0.0]], [1.0, 1.0], symmetrize=False)


def test_generators_are_deduplicated():
    g = HullGauge(1.0, Lp(2), np.array([[1.0, 2.0], [-1.0, -2.0], [1.0, 2.0], [0.0, 0.0]]))
    assert g.generators.shape == (1, 2)


@pytest.mark.parametrize("seed", range(5))
def test_polyhedral_hull_matches_angular_scan(seed):
    rng = np.random.default_rng(seed)
    rho = rng.uniform(0.3, 1.5)
    W = rng.normal(size=(2, 2)) * 1.5
    oracle = hull_gauge_oracle_2d(rho, HEXAGON, W)
    for v in rng.normal(size=(40, 2)):
        exact = float(oracle(v))
        assert gauge_of_hull(rho, Polyhedral(HEXAGON), W, v) == pytest.approx(exact, rel=1e-3)


@pytest.mark.parametrize("ambient", [Lp(2.0), Lp(math.inf), Polyhedral(HEXAGON)], ids=["l2", "linf", "hexagon"])
@settings(max_examples=30, deadline=None)
@given(
    rho=st.floats(0.2, 3.0),
    W=arrays(float, (2, 2), elements=st.floats(-3, 3)),
    v=arrays(float, 2, elements=st.floats(-10, 10)),
)
def test_hull_gauge_sandwich(ambient, rho, W, v):
    U = max(rho, float(np.max(ambient.evaluate(W))))
    a = norm_eval(ambient, v)
    g = gauge_of_hull(rho, ambient, W, v)
    assert a / U - 1e-9 * (1 + a) <= g <= a / rho + 1e-9 * (1 + a)


# ------------------------------------------------------------- subspace extension


def test_extension_agrees_on_subspace():
    ext = extend_norm(2, [[1.0, 0.0]], Scaled(2.0, Lp(1.0, 1)), Lp(2.0), 0.5)
    assert norm_eval(ext, [1.0, 0.0]) == pytest.approx(2.0)
    assert norm_eval(ext, [-3.0, 0.0]) == pytest.approx(6.0)


def test_extension_off_subspace():
    ext = extend_norm(2, [[1.0, 0.0]], Scaled(2.0, Lp(1.0, 1)), Lp(2.0), 0.5)
    # minimal extensions of functionals on span{e1} annihilate e2
    assert np.allclose(ext.functionals[:, 1], 0.0)
    assert norm_eval(ext, [0.0, 1.0]) == pytest.approx(2.0)


def test_extension_sandwich_in_r3():
    B = np.array([[1.0, 1.0, 0.0], [0.0, 1.0, -1.0]])
    z_norm = Polyhedral(HEXAGON)
    c2 = 2.0
    ext = extend_norm(3, B, z_norm, Lp(2.0), c2)
    assert ext.dual_sphere == "exact"
    rng = np.random.default_rng(6)
    X = rng.normal(size=(1000, 3))
    vals = ext.evaluate(X)
    amb = Lp(2.0).evaluate(X)
    assert np.all(vals >= amb / c2 - 1e-12)
    assert np.all(vals <= ext.upper_constant() * amb + 1e-12)
    coords = rng.normal(size=(1000, 2))
    assert np.allclose(ext.evaluate(coords @ B), z_norm.evaluate(coords), rtol=1e-9)


def test_extension_sandwich_violation_reported():
    with pytest.raises(NormError, match="sandwich"):
        extend_norm(2, [[1.0, 0.0]], Lp(1.0, 1), Lp(2.0), 0.5)


def test_extension_dependent_basis():
    with pytest.raises(NormError, match="dependent"):
        extend_norm(3, [[1, 0, 0], [2, 0, 0]], Lp(2.0, 2), Lp(2.0), 1.0)


def test_extension_sampled_dual_sphere():
    ext = extend_norm(3, [[1, 0, 0], [0, 1, 0]], Lp(2.0, 2), Lp(2.0), 1.0, n_dirs=512)
    assert ext.dual_sphere == "sampled"
    # the sampled sup under-estimates the Euclidean norm by at most 1 - cos(pi / 1024)
    x = np.array([np.cos(0.3), np.sin(0.3), 0.0])
    assert 1.0 - math.cos(math.pi / 1024) >= 1.0 - norm_eval(ext, x) >= 0.0


# ------------------------------------------------------------- spreading composite


def _composite_by_enumeration(alpha, m, eps):
    subsets = itertools.combinations(range(alpha.size), m)
    model = max(np.linalg.norm(alpha[list(F)]) for F in subsets)
    return max(np.linalg.norm(alpha) / (1 + eps), model)


SPREAD = SpreadingComposite(Lp(2.0), Lp(2.0), 2, 0.1)


def test_spreading_difference_of_unit_vectors():
    e = np.eye(8)
    assert spreading_composite_norm(SPREAD, e[0] - e[1]) == pytest.approx(math.sqrt(2), abs=1e-15)
    assert _composite_by_enumeration(e[0] - e[1], 2, 0.1) == pytest.approx(math.sqrt(2), abs=1e-15)


def test_spreading_unit_vector():
    e = np.eye(8)
    assert spreading_composite_norm(SPREAD, e[0]) == pytest.approx(1.0, abs=1e-15)


def test_spreading_constant_over_pairs_and_signs():
    I = np.eye(8)
    vals = [spreading_composite_norm(SPREAD, I[n] + s * I[m]) for n, m in itertools.combinations(range(8), 2) for s in (1, -1)]
    assert len(vals) == 56
    assert max(vals) - min(vals) <= 1e-12


@settings(max_examples=100, deadline=None)
@given(arrays(float, 8, elements=st.floats(-5, 5)))
def test_spreading_matches_enumeration(alpha):
    assert spreading_composite_norm(SPREAD, alpha) == pytest.approx(_composite_by_enumeration(alpha, 2, 0.1), abs=1e-12)


@settings(max_examples=50, deadline=None)
@given(
    st.lists(st.floats(-5, 5), min_size=3, max_size=3),
    st.lists(st.integers(0, 7), min_size=3, max_size=3, unique=True),
    st.lists(st.integers(0, 7), min_size=3, max_size=3, unique=True),
)
def test_spreading_order_preserving_replacement(coeffs, idx_a, idx_b):
    spec = SpreadingComposite(Lp(2.0), Lp(2.0), 3, 0.1)
    a, b = np.zeros(8), np.zeros(8)
    a[sorted(idx_a)] = coeffs
    b[sorted(idx_b)] = coeffs
    assert spreading_composite_norm(spec, a) == pytest.approx(spreading_composite_norm(spec, b), rel=1e-12)


def test_spreading_exhaustive_agrees():
    ex = SpreadingComposite(Lp(2.0), Lp(2.0), 2, 0.1, exhaustive=True)
    for alpha in np.random.default_rng(7).normal(size=(20, 6)):
        assert ex.evaluate(alpha) == pytest.approx(SPREAD.evaluate(alpha), rel=1e-14)


def test_spreading_errors():
    with pytest.raises(DimensionError):
        spreading_composite_norm(SPREAD, [1.0])
    with pytest.raises(UnsupportedNorm):
        SpreadingComposite(Lp(2.0), Polyhedral(HEXAGON), 2, 0.1)
    with pytest.raises(NormError):
        SpreadingComposite(Lp(2.0), Lp(2.0), 1, 0.1)


# ------------------------------------------------------------- axioms and JSON


@pytest.mark.parametrize("spec", all_variants(), ids=lambda s: s.variant)
def test_norm_axioms_sampled(spec):
    rng = np.random.default_rng(8)
    n = spec.dim or 3
    X, Y = rng.normal(size=(200, n)), rng.normal(size=(200, n)) * 3
    t = rng.uniform(-4, 4, 200)
    nx, ny = spec.evaluate(X), spec.evaluate(Y)
    assert np.all(nx + ny - spec.evaluate(X + Y) >= -1e-9)
    assert np.allclose(spec.evaluate(-X), nx, rtol=1e-12, atol=0)
    assert np.allclose(spec.evaluate(t[:, None] * X), np.abs(t) * nx, rtol=1e-12, atol=0)
    assert np.all(nx > 0)


@pytest.mark.parametrize("spec", all_variants(), ids=lambda s: s.variant)
def test_json_round_trip(spec):
    text = spec.to_json()
    back = norm_from_json(text)
    assert json.loads(back.to_json()) == json.loads(text)
    x = np.random.default_rng(9).normal(size=spec.dim or 3)
    assert norm_eval(back, x) == norm_eval(spec, x)


def test_unknown_variant():
    with pytest.raises(NormError, match="unknown"):
        norm_from_dict({"variant": "ellipsoid"})
