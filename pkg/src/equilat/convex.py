"""First-order minimization of black-box convex functions."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


class ConvexDivergence(RuntimeError):
    """The iterates left every bounded region: the objective is not coercive."""


@dataclass(frozen=True)
class ConvexResult:
    x: np.ndarray
    value: float
    history: list[float] = field(repr=False)
    iterations: int = 0

    def __iter__(self):
        yield self.x
        yield self.value


def _line_minimize(phi, tol, radius, h0=1.0):
    """Golden-section search for a convex function of one real variable."""
    f0 = phi(0.0)
    h = h0
    if phi(h) >= f0 and phi(-h) >= f0:
        lo, hi = -h, h
    else:
        direction = 1.0 if phi(h) < f0 else -1.0
        a, fa = 0.0, f0
        b, fb = direction * h, phi(direction * h)
        while True:
            c = direction * 2.0 * abs(b) if b != 0 else direction * h
            if abs(c) > radius:
                raise ConvexDivergence(f"line search exceeded radius {radius:g}")
            fc = phi(c)
            if fc >= fb:
                break
            a, fa, b, fb = b, fb, c, fc
        lo, hi = sorted((a, c))
    x1 = hi - _GOLDEN * (hi - lo)
    x2 = lo + _GOLDEN * (hi - lo)
    f1, f2 = phi(x1), phi(x2)
    while hi - lo > tol:
        if f1 <= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - _GOLDEN * (hi - lo)
            f1 = phi(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + _GOLDEN * (hi - lo)
            f2 = phi(x2)
    t = x1 if f1 <= f2 else x2
    ft = min(f1, f2)
    if f0 <= ft:
        return 0.0, f0
    return t, ft


def minimize_convex(
    f: Callable[[np.ndarray], float],
    subgradient: Callable[[np.ndarray], np.ndarray],
    x0,
    tol: float = 1e-9,
    f_lower: float | None = None,
    max_iter: int = 2000,
    radius: float = 1e8,
    polish_sweeps: int = 50,
) -> ConvexResult:
    """Minimize a convex function given a subgradient oracle.

    Subgradient steps use the Polyak rule when a lower bound ``f_lower`` on
    the optimum is known and ``1/sqrt(k)`` steps otherwise. The best iterate
    is then polished by exact line searches along the coordinate axes and the
    accumulated displacement.

    ``history`` records the best value seen so far and is non-increasing.
    Iterates leaving the ball of the given radius raise ConvexDivergence.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    x = np.array(x0, dtype=float, ndmin=1)
    if not np.all(np.isfinite(x)):
        raise ValueError("x0 must be finite")
    best_x, best_f = x.copy(), float(f(x))
    history = [best_f]
    scale = max(1.0, float(np.linalg.norm(x)))
    it = 0
    for it in range(1, max_iter + 1):
        g = np.asarray(subgradient(x), dtype=float)
        gn = float(np.linalg.norm(g))
        if gn == 0.0:
            break
        if f_lower is not None:
            gap = float(f(x)) - f_lower
            if gap <= tol:
                break
            step = gap / gn**2
            x = x - step * g
        else:
            x = x - (scale / math.sqrt(it)) * g / gn
        if np.linalg.norm(x) > radius:
            raise ConvexDivergence(f"iterate norm exceeded {radius:g}")
        fx = float(f(x))
        if fx < best_f:
            best_f, best_x = fx, x.copy()
        history.append(best_f)

    x = best_x.copy()
    n = x.size
    directions = list(np.eye(n))
    line_tol = min(tol, 1e-6) * 1e-3
    for _ in range(polish_sweeps):
        start_f, start_x = best_f, x.copy()
        for d in directions:
            t, ft = _line_minimize(lambda s: float(f(x + s * d)), line_tol * scale, radius, h0=scale)
            if ft < best_f:
                x = x + t * d
                best_f = ft
                history.append(best_f)
        move = x - start_x
        if np.linalg.norm(move) > 0:
            d = move / np.linalg.norm(move)
            t, ft = _line_minimize(lambda s: float(f(x + s * d)), line_tol * scale, radius, h0=scale)
            if ft < best_f:
                x = x + t * d
                best_f = ft
                history.append(best_f)
        if np.linalg.norm(x) > radius:
            raise ConvexDivergence(f"iterate norm exceeded {radius:g}")
        if start_f - best_f <= tol * 1e-3:
            break
    return ConvexResult(x=x, value=best_f, history=history, iterations=it)
