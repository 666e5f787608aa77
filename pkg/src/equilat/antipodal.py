"""Antipodality certificates, biorthogonal systems and Auerbach bases.

A set ``S`` is antipodal with constants ``(c1, c2, d)`` when every point
lies in the ``c1``-ball and each ordered pair ``(x, y)`` has a functional
``f`` of dual norm at most ``c2`` with ``f(y) - f(x) >= d`` and
``f(x) <= f(z) <= f(y)`` for all ``z`` in ``S``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from ._ballpoly import maximize_ball_cone
from ._lpmodel import Affine, LpModel
from .norms import DualFunctional, NormError, NormSpec, euclidean_factor, norm_from_dict
from .pointset import PointSet

RESCALE_MODES = ("scale_functionals", "scale_points")


class CertificationFailure(ValueError):
    """No functional separates the pair ``(i, j)`` with a positive margin."""

    def __init__(self, pair, margin):
        self.pair = tuple(int(k) for k in pair)
        self.margin = float(margin)
        super().__init__(f"pair {self.pair} admits no separating functional (best margin {self.margin:.3g})")

    def to_dict(self):
        return {"status": "failure", "pair": list(self.pair), "margin": self.margin}


class AntipodalError(ValueError):
    """Invalid input to a certificate or biorthogonal-system operation."""


class CertificateError(AntipodalError):
    pass


class ChainViolation(AntipodalError):
    """A functional of the system takes a value outside ``[0, 1]`` on a vector."""

    def __init__(self, functional_index, vector_index, value):
        self.functional_index = int(functional_index)
        self.vector_index = int(vector_index)
        self.value = float(value)
        super().__init__(
            f"functional {self.functional_index} takes value {self.value:.6g} "
            f"on vector {self.vector_index}, outside [0, 1]"
        )


class BiorthogonalityError(AntipodalError):
    pass


class AuerbachStagnation(RuntimeError):
    def __init__(self, message, best):
        super().__init__(message)
        self.best = best


@dataclass(frozen=True)
class CertificateCheck:
    norm_excess: float
    dual_excess: float
    margin_deficit: float
    min_slack: float
    tol: float

    @property
    def ok(self) -> bool:
        return (
            self.norm_excess <= self.tol
            and self.dual_excess <= self.tol
            and self.margin_deficit <= self.tol
            and self.min_slack >= -self.tol
        )


@dataclass(frozen=True, eq=False)
class AntipodalCertificate:
    """Per-pair functionals and the constants they witness.

    ``functionals[i, j]`` separates the ordered pair ``(x_i, x_j)``:
    its margin is ``f(x_j) - f(x_i)``. Diagonal entries are unused.
    """

    spec: NormSpec
    points: PointSet
    functionals: np.ndarray
    c1: float
    c2: float
    d: float

    def __post_init__(self):
        k, n = len(self.points), self.points.dim
        F = np.array(self.functionals, dtype=float)
        if F.shape != (k, k, n):
            raise CertificateError(f"functionals have shape {F.shape}, expected {(k, k, n)}")
        F.setflags(write=False)
        object.__setattr__(self, "functionals", F)
        for name in ("c1", "c2", "d"):
            value = float(getattr(self, name))
            if not value > 0:
                raise CertificateError(f"{name} must be positive, got {value}")
            object.__setattr__(self, name, value)

    @property
    def values(self) -> np.ndarray:
        """``values[i, j, z] = f_ij(x_z)``."""
        return self.functionals @ self.points.points.T

    @property
    def margins(self) -> np.ndarray:
        vals = self.values
        k = len(self.points)
        idx = np.arange(k)
        m = vals[:, idx, idx] - vals[idx, :, idx]
        m[idx, idx] = 0.0
        return m

    @property
    def slacks(self) -> np.ndarray:
        """Smallest of ``f(z) - f(x_i)`` and ``f(x_j) - f(z)`` over ``z``."""
        vals = self.values
        k = len(self.points)
        idx = np.arange(k)
        low = vals - vals[idx, :, idx][:, :, None]
        high = vals[:, idx, idx][:, :, None] - vals
        s = np.minimum(low, high).min(axis=2)
        s[idx, idx] = 0.0
        return s

    def dual_norms(self) -> np.ndarray:
        k = len(self.points)
        out = np.zeros((k, k))
        for i in range(k):
            for j in range(k):
                if i != j:
                    out[i, j] = self.spec.dual(self.functionals[i, j])
        return out

    def functional(self, i, j) -> DualFunctional:
        return DualFunctional(self.functionals[i, j], self.c2)

    def check(self, tol: float = 1e-9) -> CertificateCheck:
        """Re-evaluate every defining inequality from the raw data."""
        k = len(self.points)
        off = ~np.eye(k, dtype=bool)
        norms = self.spec.evaluate(self.points.points)
        margins = self.margins
        return CertificateCheck(
            norm_excess=float(np.max(norms) - self.c1),
            dual_excess=float(np.max(self.dual_norms()[off], initial=-np.inf) - self.c2),
            margin_deficit=float(self.d - np.min(margins[off], initial=np.inf)),
            min_slack=float(np.min(self.slacks[off], initial=np.inf)),
            tol=tol,
        )

    def verify(self, tol: float = 1e-9) -> bool:
        return self.check(tol).ok

    def to_dict(self) -> dict:
        return {
            "status": "certified",
            "norm": self.spec.to_dict(),
            "points": self.points.to_dict(),
            "c1": self.c1,
            "c2": self.c2,
            "d": self.d,
            "functionals": self.functionals.tolist(),
            "margins": self.margins.tolist(),
            "slacks": self.slacks.tolist(),
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_dict(cls, d) -> "AntipodalCertificate":
        return cls(
            norm_from_dict(d["norm"]),
            PointSet.from_dict(d["points"]),
            np.asarray(d["functionals"], dtype=float),
            d["c1"],
            d["c2"],
            d["d"],
        )


def _pair_constraints(P, i, j):
    """Rows ``G`` with ``G @ f <= 0`` iff ``f(x_i) <= f(z) <= f(x_j)`` for all ``z``."""
    others = np.delete(P, [i, j], axis=0)
    return np.vstack([P[i] - others, others - P[j]])


def _max_margin(spec, P, i, j, c2):
    u = P[j] - P[i]
    G = _pair_constraints(P, i, j)
    a = euclidean_factor(spec)
    if a is not None:
        f, _ = maximize_ball_cone(u, G, a * c2)
    else:
        model = LpModel()
        fv = model.new_vars(P.shape[1])
        spec.model_dual_ball(model, fv, Affine.constant(c2))
        if G.shape[0]:
            model.add_le(G @ fv)
        result, z, delta, _ = model.solve(u @ fv, maximize=True)
        if z is None:
            raise NormError(f"separation LP failed: {result.status.value}")
        f = fv.value(z) / (1.0 + delta)
    dual = float(spec.dual(f)) if np.any(f) else 0.0
    if dual > c2:
        f = f * (c2 / dual)
    return f, float(f @ u)


def certify_antipodal(spec: NormSpec, S: PointSet, c2: float = 1.0, tol: float = 1e-9) -> AntipodalCertificate:
    """Find, for each pair, the functional of dual norm ``<= c2`` with the largest margin.

    Parameters
    ----------
    spec : NormSpec
    S : PointSet
        At least two points.
    c2 : float
        Bound on the dual norm of the functionals.
    tol : float
        Margins at or below ``tol`` (relative to the diameter of ``S``) count as failure.

    Returns
    -------
    AntipodalCertificate
        ``d`` is the smallest optimal margin, ``c1`` the largest point norm.

    Raises
    ------
    CertificationFailure
        For the first pair (in index order) with no positive margin.
    """
    if len(S) < 2:
        raise CertificateError("need at least two points")
    if not c2 > 0:
        raise CertificateError("c2 must be positive")
    P = S.points
    k, n = P.shape
    scale = max(1.0, float(np.abs(P).max()))
    F = np.zeros((k, k, n))
    margins = []
    for i in range(k):
        for j in range(i + 1, k):
            f, margin = _max_margin(spec, P, i, j, c2)
            if margin <= tol * scale:
                raise CertificationFailure((i, j), margin)
            F[i, j], F[j, i] = f, -f
            margins.append(margin)
    c1 = float(np.max(spec.evaluate(P)))
    return AntipodalCertificate(spec, S, F, c1, c2, min(margins))


def separation_margin(spec: NormSpec, S: PointSet, tol: float = 1e-9) -> float:
    """Smallest over pairs of the best margin achievable with ``c2 = 1``; 0 if some pair fails.

    This is a property of the finite set only, a lower bound for
    suprema taken over infinite sets.
    """
    norms = spec.evaluate(S.points)
    if np.max(norms) > 1.0 + tol:
        raise CertificateError(f"point {int(np.argmax(norms))} lies outside the unit ball")
    try:
        return certify_antipodal(spec, S, 1.0, tol).d
    except CertificationFailure:
        return 0.0


def rescale_certificate(cert: AntipodalCertificate, lam: float, mode: str, tol: float = 1e-9) -> AntipodalCertificate:
    """Multiply functionals (or points) by ``lam`` and update the constants.

    ``scale_functionals`` gives ``(c1, lam c2, lam d)``; ``scale_points``
    gives ``(lam c1, c2, lam d)``.
    """
    if not lam > 0:
        raise CertificateError("rescaling factor must be positive")
    if mode == "scale_functionals":
        out = AntipodalCertificate(
            cert.spec, cert.points, cert.functionals * lam, cert.c1, cert.c2 * lam, cert.d * lam
        )
    elif mode == "scale_points":
        out = AntipodalCertificate(
            cert.spec, cert.points.scaled(lam), cert.functionals, cert.c1 * lam, cert.c2, cert.d * lam
        )
    else:
        raise CertificateError(f"unknown mode {mode!r}; expected one of {RESCALE_MODES}")
    check = out.check(tol)
    if not check.ok:
        raise CertificateError(f"rescaled certificate fails verification: {check}")
    return out


# ------------------------------------------------------- biorthogonal systems


@dataclass(frozen=True, eq=False)
class BiorthogonalSystem:
    """Vectors ``x_k`` and functionals ``x_k^*`` with ``x_b^*(x_a) = delta_ab``.

    ``M`` bounds ``||x_k|| * ||x_k^*||``; it defaults to the largest product.
    """

    vectors: np.ndarray
    functionals: np.ndarray
    spec: NormSpec
    M: float | None = None
    tol: float = field(default=1e-9, repr=False)

    def __post_init__(self):
        X = np.atleast_2d(np.array(self.vectors, dtype=float))
        F = np.atleast_2d(np.array(self.functionals, dtype=float))
        if X.shape != F.shape:
            raise BiorthogonalityError(f"{X.shape[0]} vectors of shape {X.shape} vs functionals {F.shape}")
        X.setflags(write=False)
        F.setflags(write=False)
        object.__setattr__(self, "vectors", X)
        object.__setattr__(self, "functionals", F)
        products = self.vector_norms() * self.functional_norms()
        if self.M is None:
            object.__setattr__(self, "M", float(products.max()))
        elif products.max() > self.M + self.tol:
            raise BiorthogonalityError(f"||x|| * ||x*|| reaches {products.max():.6g} > M = {self.M}")

    def __len__(self):
        return self.vectors.shape[0]

    def vector_norms(self) -> np.ndarray:
        return np.asarray(self.spec.evaluate(self.vectors), dtype=float)

    def functional_norms(self) -> np.ndarray:
        return np.array([self.spec.dual(f) for f in self.functionals])

    def pairing(self) -> np.ndarray:
        """``pairing()[b, a] = x_b^*(x_a)``."""
        return self.functionals @ self.vectors.T

    def check_biorthogonal(self, tol: float = 1e-9):
        err = np.abs(self.pairing() - np.eye(len(self)))
        b, a = np.unravel_index(int(np.argmax(err)), err.shape)
        if err[b, a] > tol:
            raise BiorthogonalityError(
                f"functional {b} on vector {a} gives {self.pairing()[b, a]:.6g}, expected {float(a == b)}"
            )

    @property
    def dual_functionals(self) -> list[DualFunctional]:
        return [DualFunctional(f, n) for f, n in zip(self.functionals, self.functional_norms())]


def antipodal_from_biorthogonal(sys: BiorthogonalSystem, tol: float = 1e-9) -> AntipodalCertificate:
    """Certificate using ``x_j^*`` for the ordered pair ``(x_i, x_j)``; ``d = 1``.

    Raises ChainViolation if some ``x_b^*(x_a)`` leaves ``[0, 1]`` and
    BiorthogonalityError if the pairing is not the identity.
    """
    V = sys.pairing()
    bad = np.argwhere((V < -tol) | (V > 1.0 + tol))
    if bad.size:
        b, a = bad[0]
        raise ChainViolation(b, a, V[b, a])
    sys.check_biorthogonal(tol)
    k, n = sys.vectors.shape
    F = np.broadcast_to(sys.functionals[None, :, :], (k, k, n)).copy()
    F[np.arange(k), np.arange(k)] = 0.0
    c1 = float(sys.vector_norms().max())
    c2 = float(sys.functional_norms().max())
    return AntipodalCertificate(sys.spec, PointSet(sys.vectors), F, c1, c2, 1.0)


def normalize_biorthogonal(sys: BiorthogonalSystem) -> BiorthogonalSystem:
    """``y = x / ||x||`` and ``y^* = ||x|| x^*``: unit vectors, same ``M``."""
    norms = sys.vector_norms()
    if np.any(norms == 0):
        raise BiorthogonalityError(f"vector {int(np.argmin(norms))} is zero")
    return BiorthogonalSystem(
        sys.vectors / norms[:, None], sys.functionals * norms[:, None], sys.spec, sys.M, sys.tol
    )


def _cofactors(X):
    """Rows ``c_i`` with ``det(X) = c_i @ X[:, i]``."""
    return np.linalg.det(X) * np.linalg.inv(X)


def auerbach_basis(
    spec: NormSpec,
    dim: int,
    n_starts: int = 32,
    seed: int = 0,
    tol: float = 1e-6,
    max_sweeps: int = 500,
) -> BiorthogonalSystem:
    """Unit vectors of maximal ``|det|`` and their cofactor functionals.

    Each sweep replaces ``x_i`` by a unit vector maximizing the cofactor
    functional ``c_i``, which never decreases ``det``. At a fixed point
    ``x_i^* = c_i / det`` has dual norm one, so the system is Auerbach.
    The best of ``n_starts`` seeded starts is kept (ties by start order).
    """
    if dim < 1:
        raise ValueError("dim must be positive")
    if spec.dim is not None and spec.dim != dim:
        raise NormError(f"norm has dimension {spec.dim}, requested {dim}")
    rng = np.random.default_rng(seed)
    best_X, best_det = None, -np.inf
    for _ in range(n_starts):
        X = rng.normal(size=(dim, dim))
        X /= spec.evaluate(X.T)[None, :]
        det = abs(np.linalg.det(X))
        if det < 1e-12:
            continue
        for _ in range(max_sweeps):
            start = det
            for i in range(dim):
                c = _cofactors(X)[i]
                if np.linalg.det(X) < 0:
                    c = -c
                x = np.asarray(spec.lmo(c), dtype=float)
                x = x / float(spec.evaluate(x))
                if c @ x > c @ X[:, i] * (1.0 + 1e-15):
                    X[:, i] = x
            det = abs(np.linalg.det(X))
            if det <= start * (1.0 + 1e-14):
                break
        if det > best_det * (1.0 + 1e-12):
            best_X, best_det = X.copy(), det
    if best_X is None:
        raise AuerbachStagnation("every start was degenerate", None)
    X = best_X
    F = np.linalg.inv(X)
    system = BiorthogonalSystem(X.T, F, spec, tol=np.inf)
    vn, fn = system.vector_norms(), system.functional_norms()
    pair_err = float(np.abs(system.pairing() - np.eye(dim)).max())
    if max(np.abs(vn - 1).max(), np.abs(fn - 1).max(), pair_err) > tol:
        raise AuerbachStagnation(
            f"ascent stalled: max | ||x||-1 | = {np.abs(vn - 1).max():.3g}, "
            f"max | ||x*||-1 | = {np.abs(fn - 1).max():.3g}, pairing error {pair_err:.3g}",
            system,
        )
    return BiorthogonalSystem(X.T, F, spec, M=float((vn * fn).max()))
