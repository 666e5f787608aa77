import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from equilat.antipodal import (
    AntipodalCertificate,
    BiorthogonalSystem,
    certify_antipodal,
    normalize_biorthogonal,
    rescale_certificate,
)
from equilat.equilateral import petty_certificate, verify_equilateral
from equilat.norms import Lp, Polyhedral, norm_from_dict
from equilat.oracles import AngularGauge, polygon_vertices_2d
from equilat.pointset import PointSet, cube_vertices, standard_basis
from equilat.renorm import RenormError, bm_bound_audit, build_antipodal_renorm, corollary_renorm

SUP = Lp(math.inf)


def _renorm(spec, S, c2=1.0):
    return build_antipodal_renorm(spec, S, certify_antipodal(spec, S, c2))


@pytest.mark.parametrize("n", range(2, 7))
def test_basis_l2(n):
    r = _renorm(Lp(2), standard_basis(n))
    assert r.max_distance_error <= 1e-9
    assert r.distortion_bound == pytest.approx(math.sqrt(2), abs=1e-9)
    assert np.abs(r.support_gaps).max() <= 1e-8


def test_two_points():
    v = np.array([0.6, -0.8])
    r = _renorm(Lp(2), PointSet([np.zeros(2), v]))
    assert r.distances[0, 1] == pytest.approx(1.0, abs=1e-12)
    assert r.distortion_bound == pytest.approx(2.0, abs=1e-9)


def test_cube_gauge_against_angular_oracle():
    # triangle under the sup norm: K is a genuine hexagon-like body
    S = PointSet([[1.0, 0.0], [0.0, 1.0], [-1.0, -1.0]])
    cert = certify_antipodal(SUP, S)
    r = build_antipodal_renorm(SUP, S, cert)
    _, _, W = S.pair_differences()
    rho = cert.d / cert.c2
    square = polygon_vertices_2d(np.array([[1.0, 0.0], [0.0, 1.0]])) * rho
    oracle = AngularGauge(np.vstack([square, W, -W]))
    V = np.random.default_rng(0).normal(size=(200, 2))
    assert np.asarray(r.new_norm.evaluate(V)) == pytest.approx(oracle(V), rel=1e-8)
    assert r.max_distance_error <= 1e-9


def test_square_corners_give_half_sup_norm():
    r = _renorm(SUP, cube_vertices(2))
    V = np.random.default_rng(1).normal(size=(50, 2))
    assert np.asarray(r.new_norm.evaluate(V)) == pytest.approx(np.abs(V).max(axis=1) / 2, rel=1e-9)


def test_rejects_c1_above_one():
    S = cube_vertices(2).scaled(2.0)
    with pytest.raises(RenormError, match="c1"):
        build_antipodal_renorm(SUP, S, certify_antipodal(SUP, S))


def test_rejects_foreign_certificate():
    cert = certify_antipodal(SUP, cube_vertices(2))
    with pytest.raises(RenormError, match="different"):
        build_antipodal_renorm(SUP, cube_vertices(2).scaled(0.5), cert)


def test_rejects_unverified_certificate():
    cert = certify_antipodal(SUP, cube_vertices(2))
    bad = AntipodalCertificate(cert.spec, cert.points, cert.functionals, cert.c1, cert.c2, 3.0)
    with pytest.raises(RenormError, match="verification"):
        build_antipodal_renorm(SUP, cert.points, bad)


def test_rescaled_points_are_usable():
    S = cube_vertices(2).scaled(2.0)
    cert = rescale_certificate(certify_antipodal(SUP, S), 0.5, "scale_points")
    r = build_antipodal_renorm(SUP, cert.points, cert)
    assert r.max_distance_error <= 1e-9


def test_new_norm_is_serialisable():
    r = _renorm(Lp(2), standard_basis(3))
    d = json.loads(r.to_json())
    back = norm_from_dict(d["new_norm"])
    P = standard_basis(3).points
    assert back.evaluate(P[0] - P[1]) == pytest.approx(1.0, abs=1e-9)
    assert d["constants"]["d"] == pytest.approx(math.sqrt(2), abs=1e-9)


def test_petty_on_renormed_set():
    S = PointSet([[1.0, 0.0], [0.0, 1.0], [-1.0, -1.0]])
    r = _renorm(SUP, S)
    assert verify_equilateral(r.new_norm, S).max_abs_deviation <= 1e-9
    cert = petty_certificate(r.new_norm, S, tol=1e-8)
    assert cert.d == pytest.approx(1.0, abs=1e-8)


# ------------------------------------------------------------- biorthogonal route


@pytest.mark.parametrize("n", range(2, 7))
def test_corollary_euclidean_basis(n):
    r = corollary_renorm(BiorthogonalSystem(np.eye(n), np.eye(n), Lp(2)))
    assert r.max_distance_error <= 1e-9
    assert r.distortion_bound == 2.0


def test_corollary_requires_unit_vectors():
    sys = BiorthogonalSystem(np.diag([2.0, 3.0]), np.diag([0.5, 1 / 3]), Lp(2))
    with pytest.raises(RenormError, match="norm one"):
        corollary_renorm(sys)
    r = corollary_renorm(normalize_biorthogonal(sys))
    assert r.max_distance_error <= 1e-9
    assert r.distortion_bound == pytest.approx(2.0 * sys.M)


def test_corollary_chain_violation_wrapped():
    F = np.eye(2)
    F[0, 1] = -0.5
    X = np.eye(2)
    with pytest.raises(RenormError, match="outside"):
        corollary_renorm(BiorthogonalSystem(X, F, Lp(2)))


# ------------------------------------------------------------- audit


def test_audit_ratios_within_envelope():
    r = _renorm(Lp(2), standard_basis(3))
    a = bm_bound_audit(Lp(2), r, n_dirs=500, seed=4)
    assert a.ok
    assert a.lower_bound == 0.5 and a.upper_bound == pytest.approx(1 / math.sqrt(2), abs=1e-9)
    # K is the ball of radius sqrt(2): every ratio is 1/sqrt(2)
    assert a.min_ratio == pytest.approx(1 / math.sqrt(2), abs=1e-8)
    assert a.empirical_distortion <= r.distortion_bound
    assert a.to_dict()["ok"] is True


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_audit_on_random_polygons(seed):
    rng = np.random.default_rng(seed)
    ang = np.sort(rng.uniform(0, np.pi, 3))
    facets = np.stack([np.cos(ang), np.sin(ang)], axis=1) * rng.uniform(0.7, 1.3, (3, 1))
    spec = Polyhedral(facets)
    S = cube_vertices(2)
    S = S.scaled(1.0 / float(np.max(spec.evaluate(S.points))))
    cert = certify_antipodal(spec, S)
    r = build_antipodal_renorm(spec, S, cert)
    assert r.max_distance_error <= 1e-8
    assert bm_bound_audit(spec, r, n_dirs=200, seed=seed).ok
