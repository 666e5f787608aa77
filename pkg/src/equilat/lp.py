"""Small dense two-phase simplex solver.

Problems here have at most a few hundred variables, so the solver favours
exactness and reproducibility over speed: a dense tableau, Dantzig pricing
that falls back to Bland's rule on degenerate stalls, and a final basis
refinement against the original data.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

TOL_FEAS = 1e-9
TOL_OBJ = 1e-9
_PIVOT_TOL = 1e-11


class LpStatus(str, enum.Enum):
    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"
    UNBOUNDED = "Unbounded"


class LpError(ValueError):
    """Raised for malformed linear programs."""


class LpIterationLimit(RuntimeError):
    """Raised when the pivot budget is exhausted (numerical cycling)."""


@dataclass(frozen=True)
class LinearProgram:
    """``minimize c @ x`` subject to ``A_ub @ x <= b_ub`` and ``A_eq @ x == b_eq``.

    Variables are free unless flagged in ``nonneg``.
    """

    c: np.ndarray
    A_ub: np.ndarray | None = None
    b_ub: np.ndarray | None = None
    A_eq: np.ndarray | None = None
    b_eq: np.ndarray | None = None
    nonneg: np.ndarray | None = None

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.c, dtype=float))
        if c.ndim != 1 or c.size == 0:
            raise LpError("objective must be a nonempty vector")
        n = c.size
        object.__setattr__(self, "c", c)
        for a_name, b_name in (("A_ub", "b_ub"), ("A_eq", "b_eq")):
            A, b = getattr(self, a_name), getattr(self, b_name)
            if A is None and b is None:
                A, b = np.zeros((0, n)), np.zeros(0)
            elif A is None or b is None:
                raise LpError(f"{a_name} and {b_name} must be given together")
            A = np.atleast_2d(np.asarray(A, dtype=float))
            b = np.atleast_1d(np.asarray(b, dtype=float))
            if A.size == 0:
                A = A.reshape(0, n)
            if A.shape[1] != n:
                raise LpError(f"{a_name} has {A.shape[1]} columns, expected {n}")
            if b.shape != (A.shape[0],):
                raise LpError(f"{b_name} has shape {b.shape}, expected ({A.shape[0]},)")
            if not (np.all(np.isfinite(A)) and np.all(np.isfinite(b))):
                raise LpError(f"{a_name}/{b_name} contain non-finite entries")
            object.__setattr__(self, a_name, A)
            object.__setattr__(self, b_name, b)
        if not np.all(np.isfinite(c)):
            raise LpError("objective contains non-finite entries")
        nonneg = np.zeros(n, bool) if self.nonneg is None else np.asarray(self.nonneg, bool)
        if nonneg.shape != (n,):
            raise LpError(f"nonneg mask has shape {nonneg.shape}, expected ({n},)")
        object.__setattr__(self, "nonneg", nonneg)

    @property
    def n_vars(self) -> int:
        return self.c.size


@dataclass(frozen=True)
class LpResult:
    status: LpStatus
    solution: np.ndarray | None = None
    value: float = float("nan")
    # shadow prices d(value)/d(b) for each row
    duals_ub: np.ndarray | None = field(default=None, repr=False)
    duals_eq: np.ndarray | None = field(default=None, repr=False)
    iterations: int = 0

    @property
    def optimal(self) -> bool:
        return self.status is LpStatus.OPTIMAL


class _Tableau:
    """Standard-form tableau ``min c@x, A@x = b, x >= 0`` with ``b >= 0``.

    The tableau is periodically rebuilt from the original data and the
    current basis so that roundoff cannot accumulate across long pivot runs.
    """

    REINVERT_EVERY = 25

    def __init__(self, A, b, basis, max_iter):
        m, n = A.shape
        self.A0, self.b0 = A.copy(), b.copy()
        self.T = np.zeros((m + 1, n + 1))
        self.T[:m, :n] = A
        self.T[:m, n] = b
        self.basis = np.array(basis, dtype=int)
        self.m, self.n = m, n
        self.cost = np.zeros(n)
        self.iterations = 0
        self.max_iter = max_iter

    def set_objective(self, cost):
        self.cost = np.asarray(cost, dtype=float)
        T = self.T
        T[-1, :] = 0.0
        T[-1, : self.n] = self.cost
        for i, j in enumerate(self.basis):
            if T[-1, j] != 0.0:
                T[-1, :] -= T[-1, j] * T[i, :]

    def drop(self, rows_kept, cols_kept):
        self.T = np.vstack([self.T[rows_kept][:, np.r_[cols_kept, -1]], self.T[-1:, np.r_[cols_kept, -1]]])
        self.A0 = self.A0[np.ix_(rows_kept, cols_kept)]
        self.b0 = self.b0[rows_kept]
        self.basis = self.basis[rows_kept]
        self.m, self.n = len(rows_kept), len(cols_kept)

    def reinvert(self):
        B = self.A0[:, self.basis]
        try:
            body = np.linalg.solve(B, np.column_stack([self.A0, self.b0]))
        except np.linalg.LinAlgError:
            return
        if not np.all(np.isfinite(body)):
            return
        self.T[: self.m, :] = body
        self.T[: self.m, self.basis] = np.eye(self.m)
        self.T[: self.m, -1] = np.maximum(self.T[: self.m, -1], 0.0)
        self.set_objective(self.cost)

    def pivot(self, r, q):
        T = self.T
        T[r, :] /= T[r, q]
        col = T[:, q].copy()
        col[r] = 0.0
        T -= np.outer(col, T[r, :])
        T[:, q] = 0.0
        T[r, q] = 1.0
        self.basis[r] = q
        self.iterations += 1
        if self.iterations % self.REINVERT_EVERY == 0:
            self.reinvert()

    def run(self, allowed):
        """Pivot until optimal; return False when unbounded."""
        T = self.T
        m = self.m
        degenerate_streak = 0
        bland = False
        stall_limit = 2 * (self.m + self.n) + 10
        while True:
            T = self.T
            scale = max(1.0, np.abs(T[-1, : self.n]).max(initial=0.0))
            reduced = T[-1, : self.n]
            candidates = np.flatnonzero((reduced < -_PIVOT_TOL * scale) & allowed)
            if candidates.size == 0:
                return True
            if self.iterations >= self.max_iter:
                raise LpIterationLimit(f"simplex exceeded {self.max_iter} pivots")
            q = candidates[0] if bland else candidates[np.argmin(reduced[candidates])]
            col = T[:m, q]
            col_tol = _PIVOT_TOL * max(1.0, np.abs(col).max())
            positive = np.flatnonzero(col > col_tol)
            if positive.size == 0:
                return False
            rhs = np.maximum(T[positive, -1], 0.0)
            ratios = rhs / col[positive]
            if bland:
                best = ratios.min()
                ties = positive[ratios <= best + 1e-12 * max(1.0, best)]
                r = ties[np.argmin(self.basis[ties])]
            else:
                # Harris two-pass: tolerate tiny infeasibility, prefer large pivots
                bound = ((rhs + 1e-10) / col[positive]).min()
                ok = positive[ratios <= bound]
                r = ok[np.argmax(col[ok])]
                best = rhs[positive == r][0] / col[r]
            if best <= 1e-12:
                degenerate_streak += 1
                if degenerate_streak > stall_limit:
                    bland = True
            else:
                degenerate_streak = 0
            self.pivot(r, q)


def _standard_form(lp: LinearProgram):
    """Split free variables, add slacks and orient rows so ``b >= 0``."""
    n = lp.n_vars
    free = ~lp.nonneg
    n_free = int(free.sum())
    # column map: x = P @ z with z >= 0
    P = np.zeros((n, n + n_free))
    P[:, :n] = np.eye(n)
    P[np.flatnonzero(free), n + np.arange(n_free)] = -1.0
    m_ub, m_eq = lp.A_ub.shape[0], lp.A_eq.shape[0]
    n_std = n + n_free + m_ub
    A = np.zeros((m_ub + m_eq, n_std))
    A[:m_ub, : n + n_free] = lp.A_ub @ P
    A[:m_ub, n + n_free :] = np.eye(m_ub)
    A[m_ub:, : n + n_free] = lp.A_eq @ P
    b = np.concatenate([lp.b_ub, lp.b_eq])
    sign = np.where(b < 0, -1.0, 1.0)
    A *= sign[:, None]
    b = b * sign
    cost = np.zeros(n_std)
    cost[: n + n_free] = lp.c @ P
    return A, b, cost, P, sign


def solve_lp(
    lp: LinearProgram,
    tol_feas: float = TOL_FEAS,
    tol_obj: float = TOL_OBJ,
    max_iter: int | None = None,
) -> LpResult:
    """Solve a small dense linear program.

    Parameters
    ----------
    lp : LinearProgram
    tol_feas : float
        Phase-one threshold below which the problem is declared feasible,
        and the constraint violation accepted in the reported solution.
    tol_obj : float
        Optimality slack used when refining the final basis.
    max_iter : int, optional
        Pivot budget; defaults to ``50 * (rows + columns)``.

    Returns
    -------
    LpResult
        ``status`` is one of Optimal, Infeasible, Unbounded.

    Raises
    ------
    LpIterationLimit
        If the pivot budget is exhausted.
    """
    A, b, cost, P, sign = _standard_form(lp)
    m, n_std = A.shape
    m_ub = lp.A_ub.shape[0]
    n_struct = P.shape[1]
    if max_iter is None:
        max_iter = 50 * (m + n_std) + 100

    # rows whose slack already forms an identity column can start basic
    basis = np.full(m, -1, dtype=int)
    for i in range(m_ub):
        if sign[i] > 0:
            basis[i] = n_struct + i
    needs_art = np.flatnonzero(basis < 0)
    n_art = needs_art.size
    A_full = np.zeros((m, n_std + n_art))
    A_full[:, :n_std] = A
    A_full[needs_art, n_std + np.arange(n_art)] = 1.0
    basis[needs_art] = n_std + np.arange(n_art)

    tab = _Tableau(A_full, b, basis, max_iter)
    scale_b = max(1.0, np.abs(b).max(initial=0.0))

    if n_art:
        phase1 = np.zeros(n_std + n_art)
        phase1[n_std:] = 1.0
        tab.set_objective(phase1)
        tab.run(np.ones(n_std + n_art, bool))
        infeas = -tab.T[-1, -1]
        if infeas > tol_feas * scale_b:
            return LpResult(LpStatus.INFEASIBLE, iterations=tab.iterations)
        # drive remaining artificials out of the basis
        keep_rows = []
        for r in range(m):
            j = tab.basis[r]
            if j < n_std:
                keep_rows.append(r)
                continue
            row = tab.T[r, :n_std]
            nz = np.flatnonzero(np.abs(row) > 1e-9)
            if nz.size:
                tab.pivot(r, nz[np.argmax(np.abs(row[nz]))])
                keep_rows.append(r)
        tab.drop(np.array(keep_rows, dtype=int), np.arange(n_std))

    rows = np.array(keep_rows, dtype=int) if n_art else np.arange(m)
    tab.set_objective(cost)
    if not tab.run(np.ones(n_std, bool)):
        return LpResult(LpStatus.UNBOUNDED, iterations=tab.iterations)

    z = np.zeros(n_std)
    z[tab.basis] = tab.T[: tab.m, -1]
    # refine against the original data; keep tableau values if that degrades
    B = A[np.ix_(rows, tab.basis)]
    y_rows = np.zeros(m)
    try:
        zb = np.linalg.solve(B, b[rows])
        y_basis = np.linalg.solve(B.T, cost[tab.basis])
        if np.all(zb >= -tol_feas) and np.all(np.isfinite(zb)):
            z_ref = np.zeros(n_std)
            z_ref[tab.basis] = np.maximum(zb, 0.0)
            if np.abs(A @ z_ref - b).max(initial=0.0) <= np.abs(A @ z - b).max(initial=0.0) + tol_obj:
                z = z_ref
        y_rows[rows] = y_basis
    except np.linalg.LinAlgError:
        pass
    x = P @ z[:n_struct]
    duals = y_rows * sign
    return LpResult(
        LpStatus.OPTIMAL,
        solution=x,
        value=float(lp.c @ x),
        duals_ub=duals[:m_ub],
        duals_eq=duals[m_ub:],
        iterations=tab.iterations,
    )
