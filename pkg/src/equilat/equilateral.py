"""Equilateral sets: verification, the sup-norm fixed-point construction,
a generic numeric search and norming-functional certificates.
"""

from __future__ import annotations

import csv
import enum
import io
import json
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import least_squares

from .antipodal import AntipodalCertificate
from .norms import Lp, NormError, NormSpec, norming_functional
from .pointset import PointSet, PointSetError

_SUP = Lp(np.inf)


class PreconditionError(ValueError):
    pass


class NotEquilateral(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class EquilateralReport:
    """Pairwise distances compared with their mean ``lam``.

    ``deviations[i, j] = ||x_i - x_j|| - lam`` off the diagonal and ``-lam``
    on it.
    """

    lam: float
    deviations: np.ndarray
    max_abs_deviation: float
    tol: float

    @property
    def is_equilateral(self) -> bool:
        return self.max_abs_deviation <= self.tol

    @property
    def distances(self) -> np.ndarray:
        return self.deviations + self.lam

    def to_dict(self) -> dict:
        return {
            "lambda": self.lam,
            "max_abs_deviation": self.max_abs_deviation,
            "tol": self.tol,
            "equilateral": self.is_equilateral,
            "deviations": self.deviations.tolist(),
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    def to_csv(self) -> str:
        k = self.deviations.shape[0]
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["point"] + [f"p{j}" for j in range(k)])
        for i, row in enumerate(self.deviations):
            writer.writerow([f"p{i}"] + [repr(float(v)) for v in row])
        return buf.getvalue()


def verify_equilateral(spec: NormSpec, S: PointSet, tol: float = 1e-9) -> EquilateralReport:
    """Compare every pairwise distance under ``spec`` with their mean."""
    k = len(S)
    if k < 2:
        raise PointSetError("need at least two points")
    i, j, diffs = S.pair_differences()
    dist = np.asarray(spec.evaluate(diffs), dtype=float)
    lam = float(dist.mean())
    dev = np.full((k, k), -lam)
    dev[i, j] = dev[j, i] = dist - lam
    return EquilateralReport(lam, dev, float(np.abs(dist - lam).max()), tol)


# ------------------------------------------------------- fixed-point construction


class FixedPointStatus(str, enum.Enum):
    CONVERGED = "Converged"
    MAX_ITER = "MaxIter"
    DIVERGED = "Diverged"


@dataclass(frozen=True, eq=False)
class FixedPointState:
    """Cube coordinates ``eps[n, m]`` for ``n < m`` (zero-based), each in ``[0, 1/2]``.

    Entries on and below the diagonal are ignored.
    """

    eps: np.ndarray
    residuals: tuple[float, ...] = ()
    status: FixedPointStatus | None = None
    notes: tuple[str, ...] = field(default=(), repr=False)

    def __post_init__(self):
        E = np.array(self.eps, dtype=float)
        if E.ndim != 2 or E.shape[0] != E.shape[1] or E.shape[0] < 1:
            raise PreconditionError(f"eps must be a square matrix, got shape {E.shape}")
        upper = E[np.triu_indices(E.shape[0], 1)]
        if not np.all(np.isfinite(upper)):
            raise PreconditionError("eps is missing entries above the diagonal")
        if upper.size and (upper.min() < 0.0 or upper.max() > 0.5):
            raise PreconditionError("eps entries must lie in [0, 1/2]")
        E = np.triu(E, 1)
        E.setflags(write=False)
        object.__setattr__(self, "eps", E)
        object.__setattr__(self, "residuals", tuple(float(r) for r in self.residuals))

    @property
    def N(self) -> int:
        return self.eps.shape[0]

    @classmethod
    def zeros(cls, N: int) -> "FixedPointState":
        return cls(np.zeros((N, N)))

    def pair_values(self) -> np.ndarray:
        return self.eps[np.triu_indices(self.N, 1)]

    def to_dict(self) -> dict:
        return {
            "N": self.N,
            "eps": self.eps.tolist(),
            "residuals": list(self.residuals),
            "status": None if self.status is None else self.status.value,
            "notes": list(self.notes),
        }


def _eps_matrix(eps, N=None):
    E = eps.eps if isinstance(eps, FixedPointState) else np.asarray(eps, dtype=float)
    if E.ndim != 2 or E.shape[0] != E.shape[1]:
        raise PreconditionError(f"eps must be a square matrix, got shape {np.shape(E)}")
    if N is not None and E.shape[0] != N:
        raise PreconditionError(f"eps covers {E.shape[0]} points, expected {N}")
    if not np.all(np.isfinite(E[np.triu_indices(E.shape[0], 1)])):
        raise PreconditionError("eps is missing entries above the diagonal")
    return np.triu(E, 1)


def make_p_points(eps, N: int | None = None) -> PointSet:
    """Points ``p_n`` with ``eps[k, n]`` in coordinate ``k < n``, ``-1`` at ``n``, zeros after."""
    E = _eps_matrix(eps, N)
    return PointSet(E.T - np.eye(E.shape[0]))


def _p_matrix(E):
    return E.T - np.eye(E.shape[0])


def check_c0_sandwich(spec: NormSpec, N: int, extra=None, n_dirs: int = 1000, seed: int = 0):
    """Check ``||x|| <= ||x||_inf <= 1.5 ||x||`` on random directions and on ``extra``.

    Raises PreconditionError naming the first witness.
    """
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n_dirs, N))
    if extra is not None:
        X = np.vstack([X, np.asarray(extra, dtype=float).reshape(-1, N)])
    _witness(spec, X)


def _witness(spec, X):
    sup = _SUP.evaluate(X)
    val = np.asarray(spec.evaluate(X), dtype=float)
    slack = 1e-12 * sup + 1e-15
    low = np.flatnonzero(val > sup + slack)
    high = np.flatnonzero(sup > 1.5 * val + slack)
    for bad, msg in ((low, "||x|| > ||x||_inf"), (high, "||x||_inf > 1.5 ||x||")):
        if bad.size:
            k = bad[0]
            raise PreconditionError(
                f"sandwich violated ({msg}): ||x|| = {val[k]:.12g}, ||x||_inf = {sup[k]:.12g} at x = {X[k].tolist()}"
            )


def _phi_pairs(spec, E, iu):
    P = _p_matrix(E)
    diffs = P[iu[0]] - P[iu[1]]
    norms = np.asarray(spec.evaluate(diffs), dtype=float)
    return 1.0 + E[iu] - norms, diffs, norms


def phi_step(spec: NormSpec, eps, N: int | None = None, check: bool = True, seed: int = 0) -> FixedPointState:
    """Apply ``phi(eps)_(n,m) = 1 + eps_(n,m) - ||p_n - p_m||``.

    With ``check`` the sandwich ``||x|| <= ||x||_inf <= 1.5 ||x||`` is
    tested on 1000 seeded directions plus every ``p_n - p_m``; the
    differences themselves are always tested. The returned state carries
    the residual ``||phi(eps) - eps||_inf`` appended to the input history.
    """
    E = _eps_matrix(eps, N)
    N = E.shape[0]
    iu = np.triu_indices(N, 1)
    phi, diffs, _ = _phi_pairs(spec, E, iu)
    if check:
        check_c0_sandwich(spec, N, diffs, seed=seed)
    else:
        _witness(spec, diffs)
    # the sandwich puts phi in [0, 1/2]; only roundoff can leave it
    out = np.zeros((N, N))
    out[iu] = np.clip(phi, 0.0, 0.5)
    prior = eps.residuals if isinstance(eps, FixedPointState) else ()
    res = float(np.abs(phi - E[iu]).max(initial=0.0))
    return FixedPointState(out, prior + (res,))


def _residual_jacobian(spec, E, iu, diffs):
    """Jacobian of ``1 - ||p_n - p_m||`` with respect to the pair coordinates."""
    N = E.shape[0]
    index = -np.ones((N, N), dtype=int)
    index[iu] = np.arange(iu[0].size)
    J = np.zeros((iu[0].size, iu[0].size))
    for r, (n, m) in enumerate(zip(*iu)):
        g = spec.subgradient(diffs[r])
        # coordinate k < n of p_n - p_m is eps[k, n] - eps[k, m]; coordinate n is -1 - eps[n, m]
        for k in range(n):
            J[r, index[k, n]] -= g[k]
        for k in range(m):
            J[r, index[k, m]] += g[k]
    return J


def _least_squares_fallback(spec, E0, iu):
    N = E0.shape[0]

    def unpack(v):
        E = np.zeros((N, N))
        E[iu] = v
        return E

    def residual(v):
        return _phi_pairs(spec, unpack(v), iu)[0] - v

    def jac(v):
        E = unpack(v)
        diffs = _phi_pairs(spec, E, iu)[1]
        return _residual_jacobian(spec, E, iu, diffs)

    sol = least_squares(
        residual, E0[iu], jac=jac, bounds=(0.0, 0.5), method="dogbox", xtol=1e-15, ftol=1e-15, gtol=1e-15,
        max_nfev=200,
    )
    return unpack(np.clip(sol.x, 0.0, 0.5))


def find_equilateral_c0(
    spec: NormSpec,
    N: int,
    tol: float = 1e-12,
    max_iter: int = 5000,
    theta: float = 0.5,
    patience: int = 10,
    seed: int = 0,
):
    """Locate ``eps`` with ``phi(eps) = eps``; the points ``p_n(eps)`` are then 1-equilateral.

    Damped iteration ``eps <- (1 - theta) eps + theta phi(eps)`` from
    ``eps = 0``. When the best residual fails to improve for ``patience``
    steps, a bounded least-squares solve of ``phi(eps) - eps = 0`` takes
    over from the best iterate; iteration then resumes from its result.

    Returns
    -------
    (PointSet, FixedPointState, EquilateralReport)
        The state holds the best iterate; its status is Converged when the
        residual ``max |1 - ||p_n - p_m|| |`` is at most ``tol``.
    """
    if N < 2:
        raise PreconditionError("N must be at least 2")
    if not 0 < theta <= 1:
        raise PreconditionError("theta must lie in (0, 1]")
    if spec.dim is not None and spec.dim != N:
        raise NormError(f"norm has dimension {spec.dim}, expected {N}")
    iu = np.triu_indices(N, 1)
    E = np.zeros((N, N))
    phi, diffs, _ = _phi_pairs(spec, E, iu)
    check_c0_sandwich(spec, N, diffs, seed=seed)
    history: list[float] = []
    notes: list[str] = []
    best_E, best_res, since_best = E.copy(), np.inf, 0
    status = FixedPointStatus.MAX_ITER
    fallback_used = False
    for _ in range(max_iter):
        phi, diffs, _ = _phi_pairs(spec, E, iu)
        _witness(spec, diffs)
        res = float(np.abs(phi - E[iu]).max())
        if not np.isfinite(res):
            status = FixedPointStatus.DIVERGED
            break
        history.append(res)
        if res < best_res:
            best_E, best_res, since_best = E.copy(), res, 0
        else:
            since_best += 1
        if res <= tol:
            status = FixedPointStatus.CONVERGED
            break
        if since_best >= patience:
            if fallback_used:
                break
            fallback_used = True
            notes.append(f"least-squares fallback after {len(history)} iterations")
            E = _least_squares_fallback(spec, best_E, iu)
            since_best = 0
            continue
        step = np.clip(phi, 0.0, 0.5)
        E[iu] = (1.0 - theta) * E[iu] + theta * step
    state = FixedPointState(best_E, history, status, tuple(notes))
    S = make_p_points(state)
    report = verify_equilateral(spec, S, tol)
    return S, state, report


# ------------------------------------------------------- certificates and search


def petty_certificate(spec: NormSpec, S: PointSet, tol: float = 1e-9) -> AntipodalCertificate:
    """Certificate from norming functionals of the differences of an equilateral set.

    For the ordered pair ``(x, y)`` the functional norms ``y - x``; the
    constants are ``c1 = max ||x||``, ``c2 = 1`` and ``d = lam``.
    """
    report = verify_equilateral(spec, S, tol)
    if not report.is_equilateral:
        raise NotEquilateral(f"max deviation {report.max_abs_deviation:.3g} exceeds tol {tol:.3g}")
    k, n = len(S), S.dim
    F = np.zeros((k, k, n))
    i, j, diffs = S.pair_differences()
    for a, b, v in zip(i, j, diffs):
        f = norming_functional(spec, v).coeffs
        F[a, b], F[b, a] = f, -f
    c1 = float(np.max(spec.evaluate(S.points)))
    if c1 == 0.0:
        c1 = report.lam
    return AntipodalCertificate(spec, S, F, c1, 1.0, report.lam)


def search_equilateral(
    spec: NormSpec,
    n_points: int,
    dim: int,
    seed: int = 0,
    n_starts: int = 16,
    tol: float = 1e-9,
) -> tuple[PointSet, EquilateralReport]:
    """Multistart least squares on ``sum (||x_i - x_j|| - 1)^2`` with ``x_0 = 0``.

    Nothing guarantees that an equilateral configuration is found; inspect
    the report. Starts are compared by residual, then by start index.
    """
    return search_equilateral_detailed(spec, n_points, dim, seed, n_starts, tol)[:2]


def search_equilateral_detailed(spec, n_points, dim, seed=0, n_starts=16, tol=1e-9):
    if n_points < 2:
        raise ValueError("n_points must be at least 2")
    if dim < 1:
        raise ValueError("dim must be positive")
    if spec.dim is not None and spec.dim != dim:
        raise NormError(f"norm has dimension {spec.dim}, requested {dim}")
    k = n_points
    i, j = np.triu_indices(k, 1)

    def points(v):
        return np.vstack([np.zeros(dim), v.reshape(k - 1, dim)])

    def residual(v):
        X = points(v)
        return np.asarray(spec.evaluate(X[j] - X[i]), dtype=float) - 1.0

    def jac(v):
        X = points(v)
        J = np.zeros((i.size, k * dim))
        for r, (a, b) in enumerate(zip(i, j)):
            g = spec.subgradient(X[b] - X[a])
            J[r, b * dim : (b + 1) * dim] += g
            J[r, a * dim : (a + 1) * dim] -= g
        return J[:, dim:]

    rng = np.random.default_rng(seed)
    best = None
    for start in range(n_starts):
        v0 = rng.normal(size=(k - 1) * dim) / np.sqrt(dim)
        sol = least_squares(residual, v0, jac=jac, method="trf", xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=500)
        r = float(np.sum(residual(sol.x) ** 2))
        if best is None or r < best[0]:
            try:
                S = PointSet(points(sol.x))
            except PointSetError:
                continue
            best = (r, start, S)
    if best is None:
        raise RuntimeError("every start collapsed onto coincident points")
    r, start, S = best
    report = verify_equilateral(spec, S, tol)
    return S, report, r, start
