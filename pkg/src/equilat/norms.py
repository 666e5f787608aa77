"""Norms on R^n: evaluation, duality, norming functionals and derived norms.

Every norm is an immutable :class:`NormSpec`. Besides evaluation each one
knows how to describe its dual unit ball to the LP layer, which is what
makes dual norms, hull gauges and antipodality certificates computable with
a single small simplex solver. Polyhedral pieces (``l1``, ``l_inf``, facet
lists) are modelled exactly; smooth ``l_p`` pieces are handled by tangent
cuts until the relative violation drops below ``cut_tol``.
"""

from __future__ import annotations

import itertools
import json
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import ClassVar, Sequence

import numpy as np

from ._ballpoly import maximize_ball_polytope
from ._lpmodel import Affine, LpModel

CUT_TOL = 1e-10


class NormError(ValueError):
    pass


class DimensionError(NormError):
    pass


class UnsupportedNorm(NormError):
    pass


def _frozen(a, ndim):
    a = np.array(a, dtype=float, ndmin=ndim)
    a.setflags(write=False)
    return a


def _vector(v, dim=None) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.ndim != 1 or v.size == 0:
        raise DimensionError(f"expected a nonempty 1-d vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise NormError("vector has non-finite entries")
    if dim is not None and v.size != dim:
        raise DimensionError(f"vector has dimension {v.size}, norm expects {dim}")
    return v


@dataclass(frozen=True)
class DualFunctional:
    """A linear functional ``x -> coeffs @ x`` with a bound on its dual norm."""

    coeffs: np.ndarray
    dual_norm_bound: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _frozen(self.coeffs, 1))

    def __call__(self, x):
        return np.asarray(x, dtype=float) @ self.coeffs

    def scaled(self, factor: float) -> "DualFunctional":
        return DualFunctional(self.coeffs * factor, self.dual_norm_bound * abs(factor))


class NormSpec(ABC):
    variant: ClassVar[str]

    @property
    def dim(self) -> int | None:
        return None

    def __call__(self, x):
        return self.evaluate(x)

    def _check(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.ndim == 0 or x.shape[-1] == 0:
            raise DimensionError("expected vectors with at least one coordinate")
        if self.dim is not None and x.shape[-1] != self.dim:
            raise DimensionError(f"vector has dimension {x.shape[-1]}, norm expects {self.dim}")
        if not np.all(np.isfinite(x)):
            raise NormError("vector has non-finite entries")
        return x

    @abstractmethod
    def evaluate(self, x):
        """Norm of ``x``; vectorized over leading axes."""

    @abstractmethod
    def subgradient(self, x) -> np.ndarray:
        """A functional ``g`` with ``g @ x == ||x||`` and dual norm at most one."""

    def dual(self, f) -> float:
        return _generic_dual(self, f)[0]

    def lmo(self, f) -> np.ndarray:
        """A point of the unit ball maximizing ``f @ x``."""
        return _generic_dual(self, f)[1]

    @property
    def lp_exact(self) -> bool:
        return True

    @abstractmethod
    def model_dual_ball(self, model: LpModel, f: Affine, r: Affine) -> None:
        """Add constraints forcing ``dual(f) <= r`` (homogeneously in ``r``)."""

    @abstractmethod
    def to_dict(self) -> dict: ...

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)


# ---------------------------------------------------------------- atoms


@dataclass(frozen=True, eq=False)
class Lp(NormSpec):
    """The ``l_p`` norm, ``1 <= p <= inf``, on any (or a fixed) dimension."""

    p: float
    n: int | None = None
    variant: ClassVar[str] = "lp"

    def __post_init__(self):
        p = float(self.p)
        if not (p >= 1.0):
            raise NormError(f"l_p needs p >= 1, got {self.p}")
        object.__setattr__(self, "p", p)
        if self.n is not None and self.n < 1:
            raise NormError("dimension must be positive")

    @property
    def dim(self):
        return self.n

    @property
    def conjugate(self) -> float:
        if self.p == 1.0:
            return math.inf
        if math.isinf(self.p):
            return 1.0
        return self.p / (self.p - 1.0)

    @property
    def lp_exact(self):
        return self.p == 1.0 or math.isinf(self.p)

    def evaluate(self, x):
        x = self._check(x)
        a = np.abs(x)
        if math.isinf(self.p):
            return a.max(axis=-1)
        if self.p == 1.0:
            return a.sum(axis=-1)
        if self.p == 2.0:
            return np.sqrt((a * a).sum(axis=-1))
        m = a.max(axis=-1, keepdims=True)
        safe = np.where(m > 0, m, 1.0)
        return (m * ((a / safe) ** self.p).sum(axis=-1, keepdims=True) ** (1.0 / self.p))[..., 0]

    def subgradient(self, x):
        x = _vector(x, self.dim)
        nrm = float(self.evaluate(x))
        if nrm == 0.0:
            return np.zeros_like(x)
        if math.isinf(self.p):
            k = int(np.argmax(np.abs(x)))
            g = np.zeros_like(x)
            g[k] = np.sign(x[k])
            return g
        if self.p == 1.0:
            return np.sign(x)
        if self.p == 2.0:
            return x / nrm
        return np.sign(x) * (np.abs(x) / nrm) ** (self.p - 1.0)

    def dual(self, f):
        return float(Lp(self.conjugate).evaluate(_vector(f, self.dim)))

    def lmo(self, f):
        f = _vector(f, self.dim)
        if math.isinf(self.p):
            # a vertex of the cube, also where f vanishes
            return np.where(f >= 0, 1.0, -1.0)
        return Lp(self.conjugate).subgradient(f)

    def model_dual_ball(self, model, f, r):
        n = f.size
        r = r.broadcast(n)
        if self.p == 1.0:
            model.add_le(f - r)
            model.add_le(-f - r)
        elif math.isinf(self.p):
            u = model.new_vars(n, nonneg=True)
            model.add_le(f - u)
            model.add_le(-f - u)
            model.add_le(np.ones((1, n)) @ u - r[0])
        else:
            # unit vectors lie in every l_p ball; they bound the relaxation
            model.add_le(f - r)
            model.add_le(-f - r)
            model.add_separator(self, f, r[0])

    def to_dict(self):
        d = {"variant": self.variant, "p": "inf" if math.isinf(self.p) else self.p}
        if self.n is not None:
            d["dim"] = self.n
        return d


@dataclass(frozen=True, eq=False)
class Polyhedral(NormSpec):
    """Norm whose unit ball is ``{x : |f @ x| <= 1 for every facet f}``."""

    facets: np.ndarray
    variant: ClassVar[str] = "polyhedral"

    def __post_init__(self):
        F = _frozen(self.facets, 2)
        if F.shape[0] == 0 or F.shape[1] == 0:
            raise NormError("polyhedral norm needs a nonempty facet list")
        if not np.all(np.isfinite(F)):
            raise NormError("facets must be finite")
        if np.linalg.matrix_rank(F) < F.shape[1]:
            raise NormError("facets do not span the dual space; the ball is unbounded")
        object.__setattr__(self, "facets", F)

    @property
    def dim(self):
        return self.facets.shape[1]

    def evaluate(self, x):
        x = self._check(x)
        return np.abs(x @ self.facets.T).max(axis=-1)

    def subgradient(self, x):
        x = _vector(x, self.dim)
        vals = self.facets @ x
        k = int(np.argmax(np.abs(vals)))
        if vals[k] == 0.0:
            return np.zeros_like(x)
        return np.sign(vals[k]) * self.facets[k]

    def model_dual_ball(self, model, f, r):
        k = self.facets.shape[0]
        mu = model.new_vars(k)
        t = model.new_vars(k, nonneg=True)
        model.add_eq(f - self.facets.T @ mu)
        model.add_le(mu - t)
        model.add_le(-mu - t)
        model.add_le(np.ones((1, k)) @ t - r)

    def to_dict(self):
        return {"variant": self.variant, "facets": self.facets.tolist()}


# ------------------------------------------------------------ combinators


@dataclass(frozen=True, eq=False)
class Scaled(NormSpec):
    factor: float
    base: NormSpec
    variant: ClassVar[str] = "scaled"

    def __post_init__(self):
        if not (self.factor > 0 and math.isfinite(self.factor)):
            raise NormError("scale factor must be positive and finite")
        object.__setattr__(self, "factor", float(self.factor))

    @property
    def dim(self):
        return self.base.dim

    @property
    def lp_exact(self):
        return self.base.lp_exact

    def evaluate(self, x):
        return self.factor * self.base.evaluate(x)

    def subgradient(self, x):
        return self.factor * self.base.subgradient(x)

    def dual(self, f):
        return self.base.dual(f) / self.factor

    def lmo(self, f):
        return self.base.lmo(f) / self.factor

    def model_dual_ball(self, model, f, r):
        self.base.model_dual_ball(model, f, r * self.factor)

    def to_dict(self):
        return {"variant": self.variant, "factor": self.factor, "base": self.base.to_dict()}


class _PiecewiseMax(NormSpec):
    """Norms of the form ``max_i q_i(A_i x)`` for norms ``q_i``."""

    def pieces(self, n: int) -> list[tuple[NormSpec, np.ndarray | None]]:
        raise NotImplementedError

    @property
    def lp_exact(self):
        n = self.dim or 1
        return all(q.lp_exact for q, _ in self.pieces(n))

    def model_dual_ball(self, model, f, r):
        n = f.size
        pieces = self.pieces(n)
        if len(pieces) == 1 and pieces[0][1] is None:
            pieces[0][0].model_dual_ball(model, f, r)
            return
        parts, radii = [], []
        for q, A in pieces:
            s = model.new_vars(1, nonneg=True)
            if A is None:
                g = model.new_vars(n)
                parts.append(g)
            else:
                g = model.new_vars(A.shape[0])
                parts.append(A.T @ g)
            q.model_dual_ball(model, g, s)
            radii.append(s)
        total = parts[0]
        for p in parts[1:]:
            total = total + p
        model.add_eq(f - total)
        rsum = radii[0]
        for s in radii[1:]:
            rsum = rsum + s
        model.add_le(rsum - r)


@dataclass(frozen=True, eq=False)
class MaxOf(_PiecewiseMax):
    parts: tuple
    variant: ClassVar[str] = "max_of"

    def __post_init__(self):
        parts = tuple(self.parts)
        if not parts:
            raise NormError("max_of needs at least one part")
        dims = {p.dim for p in parts} - {None}
        if len(dims) > 1:
            raise DimensionError(f"parts disagree on dimension: {sorted(dims)}")
        object.__setattr__(self, "parts", parts)

    @property
    def dim(self):
        dims = {p.dim for p in self.parts} - {None}
        return dims.pop() if dims else None

    def pieces(self, n):
        return [(p, None) for p in self.parts]

    def evaluate(self, x):
        x = self._check(x)
        return np.max([p.evaluate(x) for p in self.parts], axis=0)

    def subgradient(self, x):
        x = _vector(x, self.dim)
        vals = [float(p.evaluate(x)) for p in self.parts]
        return self.parts[int(np.argmax(vals))].subgradient(x)

    def to_dict(self):
        return {"variant": self.variant, "parts": [p.to_dict() for p in self.parts]}


def euclidean_factor(norm: NormSpec) -> float | None:
    """``a`` when ``norm == a * ||.||_2``, else None."""
    if isinstance(norm, Lp) and norm.p == 2:
        return 1.0
    if isinstance(norm, Scaled):
        inner = euclidean_factor(norm.base)
        return None if inner is None else norm.factor * inner
    return None


def _dedupe_symmetric(W, n):
    """Drop zero vectors and keep one representative of each pair ``+-w``."""
    kept = []
    for w in W:
        if np.max(np.abs(w), initial=0.0) <= 1e-15:
            continue
        scale = max(1.0, np.abs(w).max())
        if any(np.abs(w - u).max() <= 1e-12 * scale or np.abs(w + u).max() <= 1e-12 * scale for u in kept):
            continue
        kept.append(w)
    return np.array(kept, dtype=float).reshape(len(kept), n)


def is_symmetric_set(W, tol=1e-12) -> bool:
    W = np.asarray(W, dtype=float)
    if W.size == 0:
        return True
    return all(np.abs(W + w).max(axis=1).min() <= tol * max(1.0, np.abs(w).max()) for w in W)


@dataclass(frozen=True, eq=False)
class HullGauge(NormSpec):
    """Gauge of ``conv(rho * B_ambient  U  {+-w : w in generators})``.

    Evaluated through the infimal convolution
    ``inf_t ambient(v - sum t_i w_i) / rho + sum |t_i|``, solved in its dual
    form ``max {f @ v : rho * ambient^*(f) <= 1, |f @ w_i| <= 1}``.
    Generators are stored with one representative per ``+-`` pair.
    """

    rho: float
    ambient: NormSpec
    generators: np.ndarray
    cut_tol: float = CUT_TOL
    variant: ClassVar[str] = "hull_gauge"

    def __post_init__(self):
        if not (self.rho > 0 and math.isfinite(self.rho)):
            raise NormError("rho must be positive and finite")
        object.__setattr__(self, "rho", float(self.rho))
        W = np.asarray(self.generators, dtype=float)
        n = self.ambient.dim
        if W.size == 0:
            W = np.zeros((0, n or 0))
        else:
            W = np.atleast_2d(W)
            if n is not None and W.shape[1] != n:
                raise DimensionError(f"generators have dimension {W.shape[1]}, ambient {n}")
            if not np.all(np.isfinite(W)):
                raise NormError("generators must be finite")
            W = _dedupe_symmetric(W, W.shape[1])
        W.setflags(write=False)
        object.__setattr__(self, "generators", W)

    @property
    def dim(self):
        if self.ambient.dim is not None:
            return self.ambient.dim
        return self.generators.shape[1] if self.generators.shape[0] else None

    @property
    def lp_exact(self):
        return self.ambient.lp_exact

    def solve(self, v):
        """Return ``(upper, lower, f)`` with ``f`` an exactly dual-feasible functional.

        ``upper`` is the LP relaxation value, never above ``ambient(v)/rho``;
        ``lower = f @ v``. Both agree once the cuts converge.
        """
        v = _vector(v, self.dim)
        n = v.size
        amb_v = float(self.ambient.evaluate(v))
        if amb_v == 0.0:
            return 0.0, 0.0, np.zeros(n)
        W = self.generators.reshape(-1, n)
        a = euclidean_factor(self.ambient)
        if a is not None:
            return self._solve_euclidean(v, W, a, amb_v)
        model = LpModel()
        f = model.new_vars(n)
        one = Affine.constant(1.0)
        self.ambient.model_dual_ball(model, f, one * (1.0 / self.rho))
        if W.shape[0]:
            model.add_le(W @ f - one.broadcast(W.shape[0]))
            model.add_le(-(W @ f) - one.broadcast(W.shape[0]))
        # valid for the exact dual ball; caps the relaxation at ambient(v)/rho
        model.add_le(v @ f - amb_v / self.rho)
        result, z, delta, value = model.solve(v @ f, maximize=True, cut_tol=self.cut_tol)
        if z is None:
            raise NormError(f"hull gauge LP failed: {result.status.value}")
        fz = f.value(z) / (1.0 + delta)
        upper = min(value, amb_v / self.rho)
        lower = float(fz @ v)
        return upper, min(lower, upper), fz

    def _solve_euclidean(self, v, W, a, amb_v):
        f, lam, _ = maximize_ball_polytope(v, np.vstack([W, -W]), np.ones(2 * W.shape[0]), a / self.rho)
        # shrink onto the dual ball against roundoff
        f = f / max(1.0, self.dual(f))
        lower = float(f @ v)
        k = W.shape[0]
        t = lam[:k] - lam[k:]
        upper = min(float(np.abs(t).sum()) + float(self.ambient.evaluate(v - W.T @ t)) / self.rho, amb_v / self.rho)
        return max(upper, lower), lower, f

    def evaluate(self, x):
        x = self._check(x)
        if x.ndim == 1:
            return self.solve(x)[0]
        flat = x.reshape(-1, x.shape[-1])
        return np.array([self.solve(row)[0] for row in flat]).reshape(x.shape[:-1])

    def subgradient(self, x):
        return self.solve(x)[2]

    def dual(self, f):
        f = _vector(f, self.dim)
        w = np.abs(self.generators @ f).max(initial=0.0) if self.generators.shape[0] else 0.0
        return max(self.rho * self.ambient.dual(f), float(w))

    def lmo(self, f):
        f = _vector(f, self.dim)
        best = self.rho * self.ambient.lmo(f)
        best_val = float(best @ f)
        for w in self.generators:
            val = float(w @ f)
            if abs(val) > best_val:
                best, best_val = np.sign(val) * w, abs(val)
        return best

    def model_dual_ball(self, model, f, r):
        self.ambient.model_dual_ball(model, f, r * (1.0 / self.rho))
        W = self.generators
        if W.shape[0]:
            rr = r.broadcast(W.shape[0])
            model.add_le(W @ f - rr)
            model.add_le(-(W @ f) - rr)

    def to_dict(self):
        d = {
            "variant": self.variant,
            "rho": self.rho,
            "ambient": self.ambient.to_dict(),
            "generators": self.generators.tolist(),
        }
        if self.dim is not None:
            d["dim"] = self.dim
        return d


@dataclass(frozen=True, eq=False)
class SubspaceExtension(_PiecewiseMax):
    """Extension of a norm given on a subspace ``Z`` to the whole space.

    Value: ``max(max_k |F_k @ x|, ambient(x) / c2)`` where the rows ``F_k``
    are minimal-ambient-norm extensions of the extreme (or sampled) points
    of the dual unit ball of ``(Z, z_norm)``. Build it with :func:`extend_norm`.
    """

    ambient: NormSpec
    basis: np.ndarray
    z_norm: NormSpec
    c2: float
    functionals: np.ndarray
    dual_sphere: str = "exact"
    variant: ClassVar[str] = "subspace_extension"

    def __post_init__(self):
        object.__setattr__(self, "basis", _frozen(self.basis, 2))
        object.__setattr__(self, "functionals", _frozen(self.functionals, 2))
        object.__setattr__(self, "c2", float(self.c2))

    @property
    def dim(self):
        return self.basis.shape[1]

    def pieces(self, n):
        out = [(Lp(1.0), row[None, :]) for row in self.functionals]
        out.append((Scaled(1.0 / self.c2, self.ambient), None))
        return out

    def evaluate(self, x):
        x = self._check(x)
        ext = np.abs(x @ self.functionals.T).max(axis=-1)
        return np.maximum(ext, self.ambient.evaluate(x) / self.c2)

    def subgradient(self, x):
        x = _vector(x, self.dim)
        vals = self.functionals @ x
        k = int(np.argmax(np.abs(vals)))
        amb = float(self.ambient.evaluate(x)) / self.c2
        if abs(vals[k]) >= amb:
            return np.sign(vals[k]) * self.functionals[k]
        return self.ambient.subgradient(x) / self.c2

    def upper_constant(self) -> float:
        """``C`` with ``|||x||| <= C * ambient(x)`` for all ``x``."""
        duals = [dual_norm_eval(self.ambient, f) for f in self.functionals]
        return max(max(duals, default=0.0), 1.0 / self.c2)

    def to_dict(self):
        return {
            "variant": self.variant,
            "ambient": self.ambient.to_dict(),
            "basis": self.basis.tolist(),
            "z_norm": self.z_norm.to_dict(),
            "c2": self.c2,
            "functionals": self.functionals.tolist(),
            "dual_sphere": self.dual_sphere,
        }


def _is_permutation_symmetric(norm: NormSpec) -> bool:
    if isinstance(norm, Lp):
        return True
    if isinstance(norm, Scaled):
        return _is_permutation_symmetric(norm.base)
    return False


@dataclass(frozen=True, eq=False)
class SpreadingComposite(_PiecewiseMax):
    """``max(base(x)/(1+eps), sup_{|F|=m} model(x_F))``.

    ``model`` acts on ``R^m`` and plays the role of a 1-unconditional
    spreading norm. For permutation- and sign-symmetric models (``l_p``) the
    supremum is read off the ``m`` largest magnitudes; other models need
    ``exhaustive=True`` and are scanned over all ordered index sets.
    """

    base: NormSpec
    model: NormSpec
    m: int
    eps: float
    exhaustive: bool = False
    n: int | None = None
    variant: ClassVar[str] = "spreading_composite"

    def __post_init__(self):
        if self.m < 2:
            raise NormError("m must be at least 2")
        if not self.eps > 0:
            raise NormError("eps must be positive")
        if self.model.dim is not None and self.model.dim != self.m:
            raise DimensionError("model norm must act on R^m")
        if not (self.exhaustive or _is_permutation_symmetric(self.model)):
            raise UnsupportedNorm(
                "model norm is not known to be permutation/sign symmetric; pass exhaustive=True"
            )
        n = self.n if self.n is not None else self.base.dim
        if n is not None and self.m > n:
            raise DimensionError(f"m = {self.m} exceeds dimension {n}")
        object.__setattr__(self, "eps", float(self.eps))

    @property
    def dim(self):
        return self.n if self.n is not None else self.base.dim

    @property
    def lp_exact(self):
        return self.base.lp_exact and self.model.lp_exact

    def _subsets(self, n):
        return itertools.combinations(range(n), self.m)

    def pieces(self, n):
        out = [(Scaled(1.0 / (1.0 + self.eps), self.base), None)]
        for F in self._subsets(n):
            P = np.zeros((self.m, n))
            P[np.arange(self.m), F] = 1.0
            out.append((self.model, P))
        return out

    def _model_part(self, x):
        n = x.shape[-1]
        if self.m > n:
            raise DimensionError(f"m = {self.m} exceeds dimension {n}")
        if not self.exhaustive:
            top = -np.sort(-np.abs(x), axis=-1)[..., : self.m]
            return self.model.evaluate(top)
        idx = np.array(list(self._subsets(n)))
        return self.model.evaluate(x[..., idx]).max(axis=-1)

    def evaluate(self, x):
        x = self._check(x)
        return np.maximum(self.base.evaluate(x) / (1.0 + self.eps), self._model_part(x))

    def subgradient(self, x):
        x = _vector(x, self.dim)
        n = x.size
        base_val = float(self.base.evaluate(x)) / (1.0 + self.eps)
        if self.exhaustive:
            subsets = list(self._subsets(n))
            vals = [float(self.model.evaluate(x[list(F)])) for F in subsets]
            F = list(subsets[int(np.argmax(vals))])
        else:
            F = sorted(np.argsort(-np.abs(x), kind="stable")[: self.m].tolist())
        model_val = float(self.model.evaluate(x[F]))
        if base_val >= model_val:
            return self.base.subgradient(x) / (1.0 + self.eps)
        g = np.zeros(n)
        g[F] = self.model.subgradient(x[F])
        return g

    def to_dict(self):
        d = {
            "variant": self.variant,
            "base": self.base.to_dict(),
            "model": self.model.to_dict(),
            "m": self.m,
            "eps": self.eps,
            "exhaustive": self.exhaustive,
        }
        if self.n is not None:
            d["dim"] = self.n
        return d


# ------------------------------------------------------------ operations


def _generic_dual(norm: NormSpec, f, cut_tol=CUT_TOL):
    """Dual norm by LP: ``min r`` subject to ``f in r * B^*``.

    Returns ``(upper_bound, lmo_point)``; the point comes from the shadow
    prices of the constraint pinning the functional to ``f``.
    """
    f = _vector(f, norm.dim)
    n = f.size
    if not np.any(f):
        return 0.0, np.zeros(n)
    model = LpModel()
    g = model.new_vars(n)
    model.add_eq(g - f)
    r = model.new_vars(1, nonneg=True)
    norm.model_dual_ball(model, g, r)
    result, z, delta, value = model.solve(r, maximize=False, cut_tol=cut_tol)
    if z is None:
        raise NormError(f"dual norm LP failed: {result.status.value}")
    x = np.array(result.duals_eq[:n])
    nx = float(norm.evaluate(x))
    if nx > 1.0:
        x = x / nx
    upper = value * (1.0 + delta)
    if isinstance(norm, _PiecewiseMax):
        # a max of norms has dual norm at most that of any unrestricted piece
        for q, A in norm.pieces(n):
            if A is None:
                upper = min(upper, float(q.dual(f)))
    return max(upper, float(x @ f)), x


def norm_eval(spec: NormSpec, v) -> float:
    """Norm of a single vector."""
    return float(spec.evaluate(_vector(v, spec.dim)))


def dual_norm_eval(spec: NormSpec, f) -> float:
    """``sup {f @ x : spec(x) <= 1}``.

    Closed form for ``l_p``, scaled norms and hull gauges over them; an LP
    (with tangent cuts for smooth pieces) otherwise. The LP path returns an
    upper bound that is tight to the cut tolerance.
    """
    return float(spec.dual(_vector(f, spec.dim)))


def norming_functional(spec: NormSpec, v) -> DualFunctional:
    """A functional of dual norm one attaining ``spec(v)`` at ``v``."""
    v = _vector(v, spec.dim)
    if not np.any(v):
        raise NormError("the zero vector has no norming functional")
    g = np.asarray(spec.subgradient(v), dtype=float)
    return DualFunctional(g, 1.0)


def gauge_of_hull(rho: float, ambient: NormSpec, W, v, symmetrize: bool = True) -> float:
    """Minkowski functional of ``conv(rho * B_ambient U W)`` at ``v``.

    ``W`` must be symmetric (``W = -W``) unless ``symmetrize`` is set, in
    which case the negatives are added implicitly.
    """
    v = _vector(v)
    W = np.asarray(W, dtype=float)
    if W.size and not symmetrize and not is_symmetric_set(np.atleast_2d(W)):
        raise NormError("generator set is not symmetric and symmetrize=False")
    if W.size == 0:
        W = np.zeros((0, v.size))
    return float(HullGauge(rho, ambient, W).evaluate(v))


def spreading_composite_norm(spec: SpreadingComposite, alpha) -> float:
    alpha = _vector(alpha, spec.dim)
    if spec.m > alpha.size:
        raise DimensionError(f"m = {spec.m} exceeds dimension {alpha.size}")
    return float(spec.evaluate(alpha))


def _dual_extreme_points(z_norm: NormSpec, k: int, n_dirs: int):
    """Extreme points of the dual unit ball (exact) or a deterministic sample."""
    if isinstance(z_norm, Scaled):
        pts, kind = _dual_extreme_points(z_norm.base, k, n_dirs)
        return pts * z_norm.factor, kind
    if isinstance(z_norm, Polyhedral):
        return np.array(z_norm.facets), "exact"
    if isinstance(z_norm, Lp) and math.isinf(z_norm.p):
        return np.eye(k), "exact"
    if isinstance(z_norm, Lp) and z_norm.p == 1.0 and k <= 12:
        signs = np.array(list(itertools.product((1.0, -1.0), repeat=k)))
        return signs[signs[:, 0] > 0], "exact"
    if k == 1:
        return np.array([[1.0 / z_norm.dual(np.ones(1))]]), "exact"
    if k == 2:
        theta = np.pi * np.arange(n_dirs) / n_dirs
        dirs = np.stack([np.cos(theta), np.sin(theta)], axis=1)
    else:
        dirs = np.random.default_rng(0).normal(size=(n_dirs, k))
    return np.array([d / z_norm.dual(d) for d in dirs]), "sampled"


def minimal_extension(ambient: NormSpec, basis, g) -> tuple[np.ndarray, float]:
    """Norm-preserving extension of the functional ``a -> g @ a`` on ``span(basis)``.

    The functional is given in basis coordinates. Returns ``(f, ambient^*(f))``
    with ``basis @ f == g`` and ``ambient^*(f)`` minimal.
    """
    B = np.atleast_2d(np.asarray(basis, dtype=float))
    g = np.atleast_1d(np.asarray(g, dtype=float))
    n = B.shape[1]
    if isinstance(ambient, Lp) and ambient.p == 2.0:
        f = B.T @ np.linalg.solve(B @ B.T, g)
        return f, float(np.linalg.norm(f))
    model = LpModel()
    f = model.new_vars(n)
    model.add_eq(B @ f - g)
    r = model.new_vars(1, nonneg=True)
    ambient.model_dual_ball(model, f, r)
    result, z, delta, value = model.solve(r, maximize=False)
    if z is None:
        raise NormError(f"extension LP failed: {result.status.value}")
    fz = f.value(z)
    return fz, float(ambient.dual(fz))


def extend_norm(
    ambient_dim: int,
    Z_basis,
    z_norm: NormSpec,
    ambient: NormSpec,
    c2: float,
    n_dirs: int = 512,
    n_check: int = 1000,
    seed: int = 0,
) -> SubspaceExtension:
    """Extend ``z_norm`` (in coordinates of ``Z_basis``) to all of ``R^ambient_dim``.

    The result agrees with ``z_norm`` on the subspace and dominates
    ``ambient / c2`` everywhere. ``c2`` must satisfy
    ``ambient(z) <= c2 * z_norm(z)`` on the subspace; this is checked on
    ``n_check`` random points.
    """
    B = np.atleast_2d(np.asarray(Z_basis, dtype=float))
    if B.shape[1] != ambient_dim:
        raise DimensionError(f"basis vectors have dimension {B.shape[1]}, expected {ambient_dim}")
    k = B.shape[0]
    if np.linalg.matrix_rank(B) < k:
        raise NormError("subspace basis is linearly dependent")
    if not c2 > 0:
        raise NormError("c2 must be positive")
    rng = np.random.default_rng(seed)
    coords = rng.normal(size=(n_check, k))
    amb = ambient.evaluate(coords @ B)
    zn = z_norm.evaluate(coords)
    bad = np.flatnonzero(amb > c2 * zn * (1 + 1e-9) + 1e-12)
    if bad.size:
        i = bad[0]
        raise NormError(
            f"sandwich violated: ambient(z) = {amb[i]:.6g} > c2 * z_norm(z) = {c2 * zn[i]:.6g} "
            f"at coordinates {coords[i].tolist()}"
        )
    G, kind = _dual_extreme_points(z_norm, k, n_dirs)
    F = np.array([minimal_extension(ambient, B, g)[0] for g in G]).reshape(len(G), ambient_dim)
    return SubspaceExtension(ambient, B, z_norm, c2, F, kind)


# ------------------------------------------------------------ JSON


def norm_from_dict(d: dict) -> NormSpec:
    try:
        variant = d["variant"]
    except (KeyError, TypeError):
        raise NormError("norm object needs a 'variant' field") from None
    if variant == "lp":
        p = d["p"]
        p = math.inf if p in ("inf", "infinity", math.inf) else float(p)
        return Lp(p, d.get("dim"))
    if variant == "polyhedral":
        return Polyhedral(np.asarray(d["facets"], dtype=float))
    if variant == "scaled":
        return Scaled(float(d["factor"]), norm_from_dict(d["base"]))
    if variant == "max_of":
        return MaxOf(tuple(norm_from_dict(p) for p in d["parts"]))
    if variant == "hull_gauge":
        ambient = norm_from_dict(d["ambient"])
        W = np.asarray(d.get("generators", []), dtype=float)
        if W.size == 0:
            W = np.zeros((0, d.get("dim") or ambient.dim or 0))
        return HullGauge(float(d["rho"]), ambient, W)
    if variant == "subspace_extension":
        return SubspaceExtension(
            norm_from_dict(d["ambient"]),
            np.asarray(d["basis"], dtype=float),
            norm_from_dict(d["z_norm"]),
            float(d["c2"]),
            np.asarray(d["functionals"], dtype=float),
            d.get("dual_sphere", "exact"),
        )
    if variant == "spreading_composite":
        return SpreadingComposite(
            norm_from_dict(d["base"]),
            norm_from_dict(d["model"]),
            int(d["m"]),
            float(d["eps"]),
            bool(d.get("exhaustive", False)),
            d.get("dim"),
        )
    raise NormError(f"unknown norm variant {variant!r}")


def norm_from_json(text: str) -> NormSpec:
    return norm_from_dict(json.loads(text))


__all__ = [
    "CUT_TOL",
    "DimensionError",
    "DualFunctional",
    "HullGauge",
    "Lp",
    "MaxOf",
    "NormError",
    "NormSpec",
    "Polyhedral",
    "Scaled",
    "SpreadingComposite",
    "SubspaceExtension",
    "UnsupportedNorm",
    "dual_norm_eval",
    "extend_norm",
    "gauge_of_hull",
    "is_symmetric_set",
    "minimal_extension",
    "norm_eval",
    "norm_from_dict",
    "norm_from_json",
    "norming_functional",
    "spreading_composite_norm",
]
