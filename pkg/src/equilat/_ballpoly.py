"""Exact linear maximization over a Euclidean ball cut by half-spaces."""

from __future__ import annotations

import numpy as np


def _affine_slice(AW, bW, v):
    """Min-norm point of ``AW f = bW`` and the projection of ``v`` onto ``null(AW)``."""
    if AW.shape[0] == 0:
        return np.zeros(v.size), v.copy()
    pinv = np.linalg.pinv(AW)
    f0 = pinv @ bW
    pv = v - pinv @ (AW @ v)
    return f0, pv


def maximize_ball_polytope(v, A, b, R, tol=1e-12, max_iter=None):
    """Solve ``max v @ f`` subject to ``||f||_2 <= R`` and ``A @ f <= b``.

    Primal active-set method started from ``f = 0``, so ``b`` must be
    strictly positive. Each subproblem restricts to the affine slice of the
    working constraints, where the maximizer over the ball is explicit.

    Returns
    -------
    f : ndarray
        Optimal point.
    lam : ndarray
        Nonnegative multipliers, one per row of ``A``.
    nu : float
        Multiplier of the ball constraint: ``v = A.T @ lam + nu * f``.
    """
    v = np.asarray(v, dtype=float)
    A = np.asarray(A, dtype=float).reshape(-1, v.size)
    b = np.asarray(b, dtype=float)
    if np.any(b <= 0):
        raise ValueError("right-hand sides must be positive")
    m, n = A.shape
    scale = max(float(np.linalg.norm(v)), 1e-300)
    if max_iter is None:
        max_iter = 20 * (m + n) + 50
    f = np.zeros(n)
    work: list[int] = []
    for _ in range(max_iter):
        AW = A[work]
        f0, pv = _affine_slice(AW, b[work], v)
        npv = float(np.linalg.norm(pv))
        if npv <= tol * scale:
            target = f
        else:
            rem = max(R * R - float(f0 @ f0), 0.0)
            target = f0 + np.sqrt(rem) * pv / npv
        d = target - f
        ad = A @ d
        slack = np.maximum(b - A @ f, 0.0)
        free = np.ones(m, bool)
        free[work] = False
        block = np.flatnonzero(free & (ad > tol * max(1.0, np.abs(d).max())))
        alpha, hit = 1.0, -1
        if block.size:
            ratios = slack[block] / ad[block]
            k = int(np.argmin(ratios))
            if ratios[k] < 1.0:
                alpha, hit = float(ratios[k]), int(block[k])
        f = f + alpha * d
        if hit >= 0:
            work.append(hit)
            continue
        on_sphere = float(np.linalg.norm(f)) >= R * (1.0 - 1e-9)
        cols = [A[work].T] + ([f[:, None]] if on_sphere else [])
        M = np.hstack(cols) if cols else np.zeros((n, 0))
        coef = np.linalg.lstsq(M, v, rcond=None)[0] if M.shape[1] else np.zeros(0)
        lam_w = coef[: len(work)]
        if lam_w.size == 0 or lam_w.min() >= -tol * scale:
            lam = np.zeros(m)
            lam[work] = np.maximum(lam_w, 0.0)
            nu = float(max(coef[-1], 0.0)) if on_sphere else 0.0
            return f, lam, nu
        work.pop(int(np.argmin(lam_w)))
    raise RuntimeError("active-set iteration did not terminate")


def nonneg_least_squares(E, u, tol=1e-13, max_iter=None):
    """Lawson-Hanson active-set solution of ``min ||E @ mu - u||`` over ``mu >= 0``."""
    E = np.asarray(E, dtype=float)
    u = np.asarray(u, dtype=float)
    k = E.shape[1]
    mu = np.zeros(k)
    passive = np.zeros(k, bool)
    scale = max(1.0, float(np.abs(E).max(initial=0.0)) * max(1.0, float(np.abs(u).max(initial=0.0))))
    if max_iter is None:
        max_iter = 5 * k + 20
    for _ in range(max_iter):
        w = E.T @ (u - E @ mu)
        w[passive] = -np.inf
        j = int(np.argmax(w)) if k else -1
        if j < 0 or w[j] <= tol * scale:
            return mu
        passive[j] = True
        while True:
            idx = np.flatnonzero(passive)
            s = np.zeros(k)
            s[idx] = np.linalg.lstsq(E[:, idx], u, rcond=None)[0]
            if s[idx].min() > 0:
                break
            neg = idx[s[idx] <= 0]
            alpha = float(np.min(mu[neg] / (mu[neg] - s[neg])))
            mu = mu + alpha * (s - mu)
            passive &= mu > tol
            mu[~passive] = 0.0
        mu = s
    return mu


def maximize_ball_cone(u, G, R):
    """Solve ``max u @ f`` subject to ``||f||_2 <= R`` and ``G @ f <= 0``.

    The maximizer is ``R`` times the normalized projection of ``u`` onto the
    cone; the projection is the residual of a nonnegative least-squares fit
    of ``u`` by the rows of ``G`` (polar decomposition).
    """
    u = np.asarray(u, dtype=float)
    G = np.asarray(G, dtype=float).reshape(-1, u.size)
    if G.shape[0]:
        mu = nonneg_least_squares(G.T, u)
        p = u - G.T @ mu
    else:
        p = u.copy()
    norm = float(np.linalg.norm(p))
    if norm <= 1e-12 * max(float(np.linalg.norm(u)), 1e-300):
        return np.zeros_like(u), 0.0
    return R * p / norm, R * norm
