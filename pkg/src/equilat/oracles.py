"""Brute-force reference computations.

Nothing here calls the simplex solver or the gauge code; these routines
exist to check them.
"""

from __future__ import annotations

import itertools

import numpy as np
from scipy.spatial import ConvexHull


def lp_by_vertices(c, A_ub, b_ub, tol=1e-9):
    """``min c @ x`` over a bounded polyhedron ``A_ub @ x <= b_ub`` by enumerating vertices.

    Returns ``(value, x)``, or ``(None, None)`` when no vertex is feasible.
    """
    c = np.asarray(c, dtype=float)
    A = np.asarray(A_ub, dtype=float)
    b = np.asarray(b_ub, dtype=float)
    n = c.size
    best_val, best_x = None, None
    for rows in itertools.combinations(range(A.shape[0]), n):
        M = A[list(rows)]
        if abs(np.linalg.det(M)) < 1e-12:
            continue
        x = np.linalg.solve(M, b[list(rows)])
        if np.all(A @ x <= b + tol * np.maximum(1.0, np.abs(b))):
            val = float(c @ x)
            if best_val is None or val < best_val:
                best_val, best_x = val, x
    return best_val, best_x


def polygon_vertices_2d(facets):
    """Vertices of ``{x in R^2 : |f @ x| <= 1 for all facets f}``."""
    F = np.asarray(facets, dtype=float)
    rows = np.vstack([F, -F])
    pts = []
    for a, b in itertools.combinations(range(rows.shape[0]), 2):
        M = rows[[a, b]]
        if abs(np.linalg.det(M)) < 1e-12:
            continue
        x = np.linalg.solve(M, np.ones(2))
        if np.all(rows @ x <= 1.0 + 1e-9):
            pts.append(x)
    return np.unique(np.round(np.array(pts), 12), axis=0)


class AngularGauge:
    """Gauge of a planar symmetric convex polygon, tabulated on a dense angle grid.

    The boundary point is computed exactly at each grid angle. A query is
    answered by intersecting its ray with the chord joining the boundary
    points at the two bracketing grid angles; the chord lies on the boundary
    except across a vertex, where it cuts slightly inside.
    """

    def __init__(self, points, n_angles=1 << 16):
        pts = np.asarray(points, dtype=float)
        hull = ConvexHull(pts)
        # facets a @ x <= b with b > 0
        a = hull.equations[:, :2]
        b = -hull.equations[:, 2]
        theta = 2.0 * np.pi * np.arange(n_angles) / n_angles
        u = np.stack([np.cos(theta), np.sin(theta)], axis=1)
        proj = u @ a.T
        with np.errstate(divide="ignore"):
            radii = np.where(proj > 1e-15, b / proj, np.inf)
        self.radius = radii.min(axis=1)
        self.boundary = u * self.radius[:, None]
        self.n_angles = n_angles

    def __call__(self, v):
        v = np.asarray(v, dtype=float)
        ang = np.mod(np.arctan2(v[..., 1], v[..., 0]), 2.0 * np.pi)
        k = np.floor(ang / (2.0 * np.pi) * self.n_angles).astype(int) % self.n_angles
        p = self.boundary[k]
        q = self.boundary[(k + 1) % self.n_angles]
        # v = lam * (p + s (q - p)); the chord's normal n gives lam = (n @ v) / (n @ p)
        e = q - p
        nrm = np.stack([e[..., 1], -e[..., 0]], axis=-1)
        return np.sum(nrm * v, axis=-1) / np.sum(nrm * p, axis=-1)


def hull_gauge_oracle_2d(rho, facets, W, n_angles=1 << 16):
    """Gauge of ``conv(rho * B_poly  U  {+-w})`` for a planar polyhedral ball."""
    verts = polygon_vertices_2d(facets) * rho
    W = np.asarray(W, dtype=float).reshape(-1, 2)
    return AngularGauge(np.vstack([verts, W, -W]), n_angles)


def regular_simplex_gram(k):
    """Gram matrix of the centred vertices of a regular simplex with unit edges."""
    return 0.5 * (np.eye(k) - np.ones((k, k)) / k)
