"""Renormings that make a certified antipodal set equilateral.

Given a certificate ``(1, c, d)`` for ``S``, the gauge of
``K = conv((d/c) B  U  {x - y : x, y in S})`` makes every pair of ``S`` lie
at distance one, and ``(d/c) B <= K <= 2 B`` bounds the distortion by
``2c/d``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .antipodal import AntipodalCertificate, AntipodalError, BiorthogonalSystem, antipodal_from_biorthogonal
from .norms import HullGauge, NormSpec
from .pointset import PointSet


class RenormError(ValueError):
    pass


@dataclass(frozen=True)
class AuditStats:
    """Ratios ``||v||_K / ||v||`` over sampled directions against the proven envelope."""

    n_dirs: int
    seed: int
    min_ratio: float
    max_ratio: float
    lower_bound: float
    upper_bound: float
    tol: float

    @property
    def empirical_distortion(self) -> float:
        return self.max_ratio / self.min_ratio

    @property
    def ok(self) -> bool:
        return self.min_ratio >= self.lower_bound - self.tol and self.max_ratio <= self.upper_bound + self.tol

    def to_dict(self) -> dict:
        return {
            "n_dirs": self.n_dirs,
            "seed": self.seed,
            "min_ratio": self.min_ratio,
            "max_ratio": self.max_ratio,
            "lower_bound": self.lower_bound,
            "upper_bound": self.upper_bound,
            "empirical_distortion": self.empirical_distortion,
            "tol": self.tol,
            "ok": self.ok,
        }


@dataclass(frozen=True, eq=False)
class RenormResult:
    new_norm: HullGauge
    distortion_bound: float
    points: PointSet
    certificate: AntipodalCertificate
    distances: np.ndarray = field(repr=False)
    support_gaps: np.ndarray = field(repr=False)
    audit: AuditStats | None = None

    @property
    def max_distance_error(self) -> float:
        k = len(self.points)
        off = ~np.eye(k, dtype=bool)
        return float(np.abs(self.distances[off] - 1.0).max(initial=0.0))

    def with_audit(self, audit: AuditStats) -> "RenormResult":
        return RenormResult(
            self.new_norm, self.distortion_bound, self.points, self.certificate, self.distances, self.support_gaps, audit
        )

    def to_dict(self) -> dict:
        return {
            "new_norm": self.new_norm.to_dict(),
            "distortion_bound": self.distortion_bound,
            "points": self.points.to_dict(),
            "constants": {"c1": self.certificate.c1, "c2": self.certificate.c2, "d": self.certificate.d},
            "distances": self.distances.tolist(),
            "max_distance_error": self.max_distance_error,
            "support_gaps": self.support_gaps.tolist(),
            "audit": None if self.audit is None else self.audit.to_dict(),
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)


def _support_gaps(gauge: HullGauge, cert: AntipodalCertificate) -> np.ndarray:
    """How far each scaled functional ``g = f_ij / m_ij`` is from proving ``||x_j - x_i||_K >= 1``.

    ``g`` supports ``K`` at ``x_j - x_i`` when ``g(x_j - x_i) = 1`` and
    ``g <= 1`` on ``K``, that is ``|g(w)| <= 1`` for generators and
    ``rho * ||g||_* <= 1``. The entry is the largest violation (0 when exact).
    """
    P = cert.points.points
    k = len(P)
    margins = cert.margins
    gaps = np.zeros((k, k))
    for i in range(k):
        for j in range(k):
            if i == j:
                continue
            g = cert.functionals[i, j] / margins[i, j]
            on_pair = 1.0 - float(g @ (P[j] - P[i]))
            on_K = float(gauge.dual(g)) - 1.0
            gaps[i, j] = max(abs(on_pair), on_K, 0.0)
    return gaps


def build_antipodal_renorm(
    spec: NormSpec, S: PointSet, cert: AntipodalCertificate, tol: float = 1e-9
) -> RenormResult:
    """Gauge of ``conv((d/c) B  U  {x_i - x_j})`` for a certificate with ``c1 = 1``.

    Raises RenormError when the certificate fails verification or has
    ``c1 > 1`` (rescale the points first).
    """
    if len(S) != len(cert.points) or np.abs(S.points - cert.points.points).max() > 0:
        raise RenormError("certificate was issued for a different point set")
    if cert.c1 > 1.0 + tol:
        raise RenormError(f"certificate has c1 = {cert.c1:.6g} > 1; rescale the points first")
    check = cert.check(tol)
    if not check.ok:
        raise RenormError(f"certificate fails verification: {check}")
    c, d = cert.c2, cert.d
    i, j, W = S.pair_differences()
    gauge = HullGauge(d / c, spec, W)
    k = len(S)
    dist = np.zeros((k, k))
    dist[i, j] = dist[j, i] = gauge.evaluate(W)
    return RenormResult(gauge, 2.0 * c / d, S, cert, dist, _support_gaps(gauge, cert))


def corollary_renorm(sys: BiorthogonalSystem, spec: NormSpec | None = None, tol: float = 1e-9) -> RenormResult:
    """Renorm making the unit vectors of a biorthogonal system equilateral; bound ``2c``.

    ``c`` is the largest dual norm of the functionals.
    """
    spec = sys.spec if spec is None else spec
    if spec is not sys.spec:
        sys = BiorthogonalSystem(sys.vectors, sys.functionals, spec, tol=np.inf)
    norms = sys.vector_norms()
    if np.abs(norms - 1.0).max() > tol:
        raise RenormError(f"system vectors must have norm one; got norms in [{norms.min():.6g}, {norms.max():.6g}]")
    try:
        cert = antipodal_from_biorthogonal(sys, tol)
    except AntipodalError as exc:
        raise RenormError(str(exc)) from exc
    S = PointSet(sys.vectors)
    return build_antipodal_renorm(spec, S, cert, tol)


def bm_bound_audit(
    original: NormSpec, result: RenormResult, n_dirs: int = 1000, seed: int = 0, tol: float = 1e-9
) -> AuditStats:
    """Sample directions and check ``||v||/2 <= ||v||_K <= (c/d) ||v||``.

    This audits the two inclusions ``(d/c) B <= K <= 2 B`` behind the
    distortion bound; it is not the Banach-Mazur distance itself.
    """
    n = result.points.dim
    rng = np.random.default_rng(seed)
    V = rng.normal(size=(n_dirs, n))
    base = np.asarray(original.evaluate(V), dtype=float)
    V = V / base[:, None]
    ratios = np.asarray(result.new_norm.evaluate(V), dtype=float)
    cert = result.certificate
    return AuditStats(
        n_dirs=n_dirs,
        seed=seed,
        min_ratio=float(ratios.min()),
        max_ratio=float(ratios.max()),
        lower_bound=0.5,
        upper_bound=cert.c2 / cert.d,
        tol=tol,
    )
