"""Incremental LP builder for dual-ball models.

Polyhedral pieces become linear rows. Euclidean pieces become second-order
cone constraints handed to a conic interior-point solver; other smooth
pieces are handled by tangent cuts.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp

from .lp import LinearProgram, LpResult, LpStatus, solve_lp


class Affine:
    """Vector-valued affine expression ``coef @ z + const`` in the LP variables ``z``."""

    __slots__ = ("coef", "const")
    # make ``ndarray @ Affine`` defer to __rmatmul__
    __array_ufunc__ = None

    def __init__(self, coef, const):
        self.coef = np.atleast_2d(np.asarray(coef, dtype=float))
        self.const = np.atleast_1d(np.asarray(const, dtype=float))

    @classmethod
    def constant(cls, value):
        value = np.atleast_1d(np.asarray(value, dtype=float))
        return cls(np.zeros((value.size, 0)), value)

    @property
    def size(self):
        return self.const.size

    def _widen(self, width):
        if self.coef.shape[1] >= width:
            return self.coef
        out = np.zeros((self.coef.shape[0], width))
        out[:, : self.coef.shape[1]] = self.coef
        return out

    def __add__(self, other):
        if not isinstance(other, Affine):
            return Affine(self.coef, self.const + other)
        w = max(self.coef.shape[1], other.coef.shape[1])
        return Affine(self._widen(w) + other._widen(w), self.const + other.const)

    __radd__ = __add__

    def __neg__(self):
        return Affine(-self.coef, -self.const)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, scalar):
        return Affine(self.coef * scalar, self.const * scalar)

    __rmul__ = __mul__

    def __rmatmul__(self, A):
        A = np.atleast_2d(np.asarray(A, dtype=float))
        return Affine(A @ self.coef, A @ self.const)

    def __getitem__(self, idx):
        return Affine(self.coef[idx], self.const[idx])

    def broadcast(self, n):
        if self.size == n:
            return self
        if self.size != 1:
            raise ValueError("cannot broadcast a vector expression")
        return Affine(np.repeat(self.coef, n, axis=0), np.repeat(self.const, n))

    def value(self, z):
        return self._widen(z.size) @ z + self.const


def affine_sum(exprs):
    out = exprs[0]
    for e in exprs[1:]:
        out = out + e
    return out


class LpModel:
    def __init__(self):
        self.nonneg: list[bool] = []
        self._ub: list[Affine] = []
        self._eq: list[Affine] = []
        self.separators: list[tuple] = []

    @property
    def n_vars(self):
        return len(self.nonneg)

    def new_vars(self, k, nonneg=False) -> Affine:
        start = self.n_vars
        self.nonneg.extend([nonneg] * k)
        coef = np.zeros((k, start + k))
        coef[:, start:] = np.eye(k)
        return Affine(coef, np.zeros(k))

    def add_le(self, expr: Affine):
        """Constrain ``expr <= 0`` elementwise."""
        self._ub.append(expr)

    def add_eq(self, expr: Affine):
        self._eq.append(expr)

    def add_separator(self, atom, f_expr: Affine, r_expr: Affine):
        """Register the nonlinear constraint ``atom.dual(f_expr) <= r_expr``."""
        self.separators.append((atom, f_expr, r_expr))

    def _stack(self, exprs, n):
        if not exprs:
            return None, None
        A = np.vstack([e._widen(n) for e in exprs])
        b = -np.concatenate([e.const for e in exprs])
        return A, b

    def build(self, objective: Affine, maximize=False) -> LinearProgram:
        n = self.n_vars
        c = objective._widen(n)[0]
        if maximize:
            c = -c
        A_ub, b_ub = self._stack(self._ub, n)
        A_eq, b_eq = self._stack(self._eq, n)
        return LinearProgram(c, A_ub, b_ub, A_eq, b_eq, nonneg=np.array(self.nonneg, bool))

    def n_eq_rows(self):
        return sum(e.size for e in self._eq)

    def _violation(self, z, floor=1e-12):
        """Largest relative violation ``dual(f)/r - 1``.

        Excesses below ``floor`` times the problem scale are roundoff on
        pieces the solution barely uses and are ignored; measured relative
        to their own tiny radius they would swamp the answer.
        """
        pairs = []
        for atom, f_expr, r_expr in self.separators:
            pairs.append((atom.dual(f_expr.value(z)), float(r_expr.value(z)[0])))
        scale = max([max(d, r) for d, r in pairs] + [float(np.abs(z).max(initial=0.0))])
        delta = 0.0
        for dual, r in pairs:
            if dual - r > floor * scale:
                delta = max(delta, dual / r - 1.0 if r > 0 else np.inf)
        return delta

    def _solve_conic(self, objective, maximize):
        import clarabel

        lp = self.build(objective, maximize)
        n = lp.n_vars
        blocks, rhs, cones = [], [], []
        if lp.A_eq.shape[0]:
            blocks.append(lp.A_eq)
            rhs.append(lp.b_eq)
            cones.append(clarabel.ZeroConeT(lp.A_eq.shape[0]))
        nn = np.flatnonzero(lp.nonneg)
        ub = np.vstack([lp.A_ub, -np.eye(n)[nn]])
        if ub.shape[0]:
            blocks.append(ub)
            rhs.append(np.concatenate([lp.b_ub, np.zeros(nn.size)]))
            cones.append(clarabel.NonnegativeConeT(ub.shape[0]))
        for _, f_expr, r_expr in self.separators:
            # (r, f) in the second-order cone, written as b - A z
            blocks.append(-np.vstack([r_expr._widen(n), f_expr._widen(n)]))
            rhs.append(np.concatenate([r_expr.const, f_expr.const]))
            cones.append(clarabel.SecondOrderConeT(f_expr.size + 1))
        A = sp.csc_matrix(np.vstack(blocks))
        settings = clarabel.DefaultSettings()
        settings.verbose = False
        settings.tol_gap_abs = settings.tol_gap_rel = 1e-12
        settings.tol_feas = 1e-12
        settings.tol_ktratio = 1e-10
        solver = clarabel.DefaultSolver(sp.csc_matrix((n, n)), lp.c, A, np.concatenate(rhs), cones, settings)
        sol = solver.solve()
        status = str(sol.status)
        if "Infeasible" in status and "Primal" in status:
            return LpResult(LpStatus.INFEASIBLE), None, np.inf, np.nan
        if "Infeasible" in status and "Dual" in status:
            return LpResult(LpStatus.UNBOUNDED), None, np.inf, np.nan
        if not ("Solved" in status or "Insufficient" in status or "MaxIter" in status):
            return LpResult(LpStatus.INFEASIBLE), None, np.inf, np.nan
        z = np.array(sol.x)
        duals = -np.array(sol.z)
        m_eq = lp.A_eq.shape[0]
        result = LpResult(
            LpStatus.OPTIMAL,
            solution=z,
            value=float(lp.c @ z),
            duals_ub=duals[m_eq : m_eq + lp.A_ub.shape[0]],
            duals_eq=duals[:m_eq],
        )
        value = -result.value if maximize else result.value
        return result, z, self._violation(z), value

    def solve(self, objective: Affine, maximize=False, cut_tol=1e-10, max_rounds=150):
        """Solve the model; Euclidean separators go to a conic solver, others get tangent cuts.

        Returns ``(result, z, delta, value)`` where ``delta`` is the largest relative
        violation ``dual(f)/r - 1`` of the smooth constraints at ``z``; scaling
        every radius variable by ``1 + delta`` makes ``z`` exactly feasible.
        """
        if self.separators and all(getattr(atom, "p", None) == 2.0 for atom, _, _ in self.separators):
            return self._solve_conic(objective, maximize)
        delta = 0.0
        for _ in range(max_rounds):
            lp = self.build(objective, maximize)
            result = solve_lp(lp)
            if result.status is not LpStatus.OPTIMAL:
                return result, None, np.inf, np.nan
            z = result.solution
            delta = 0.0
            added = False
            for atom, f_expr, r_expr in self.separators:
                f = f_expr.value(z)
                r = float(r_expr.value(z)[0])
                dual = atom.dual(f)
                if dual <= 0.0:
                    continue
                ratio = dual / r - 1.0 if r > 0 else np.inf
                delta = max(delta, ratio)
                if ratio > cut_tol:
                    x = atom.lmo(f)
                    self.add_le(x @ f_expr - r_expr)
                    added = True
            if not added:
                break
        value = -result.value if maximize else result.value
        return result, z, self._violation(z), value
