"""Named acceptance criteria, runnable individually or as a battery.

Each criterion returns a :class:`CriterionResult` listing the individual
checks it made, the observed value of each and the bound it was held to.
"""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .antipodal import (
    BiorthogonalSystem,
    CertificationFailure,
    certify_antipodal,
    rescale_certificate,
)
from .equilateral import (
    FixedPointStatus,
    find_equilateral_c0,
    petty_certificate,
    search_equilateral,
    verify_equilateral,
)
from .lp import LinearProgram, LpStatus, solve_lp
from .norms import (
    HullGauge,
    Lp,
    MaxOf,
    NormSpec,
    Polyhedral,
    Scaled,
    SpreadingComposite,
    extend_norm,
    gauge_of_hull,
)
from .oracles import hull_gauge_oracle_2d, lp_by_vertices
from .pointset import PointSet, cube_vertices, standard_basis
from .renorm import bm_bound_audit, build_antipodal_renorm, corollary_renorm


@dataclass
class Check:
    label: str
    value: float
    bound: float
    passed: bool

    def to_dict(self) -> dict:
        return {"label": self.label, "value": _finite(self.value), "bound": self.bound, "passed": self.passed}


@dataclass
class CriterionResult:
    name: str
    passed: bool
    summary: str
    tolerances: dict
    checks: list[Check] = field(default_factory=list)
    seconds: float = 0.0

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}: {self.summary} ({self.seconds:.1f}s)"

    def to_dict(self, timing: bool = True) -> dict:
        d = {
            "name": self.name,
            "passed": self.passed,
            "summary": self.summary,
            "tolerances": self.tolerances,
            "checks": [c.to_dict() for c in self.checks],
        }
        if timing:
            d["seconds"] = self.seconds
        return d


def _finite(x):
    x = float(x)
    return x if math.isfinite(x) else str(x)


class _Recorder:
    def __init__(self):
        self.checks: list[Check] = []

    def at_most(self, label, value, bound):
        self.checks.append(Check(label, float(value), float(bound), bool(value <= bound)))

    def at_least(self, label, value, bound):
        self.checks.append(Check(label, float(value), float(bound), bool(value >= bound)))

    def true(self, label, ok):
        self.checks.append(Check(label, float(bool(ok)), 1.0, bool(ok)))

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def summary(self):
        bad = [c.label for c in self.checks if not c.passed]
        if not bad:
            return f"{len(self.checks)} checks passed"
        return f"{len(bad)}/{len(self.checks)} checks failed: " + "; ".join(bad[:5])


def c0_norm(N: int) -> NormSpec:
    """``max{(2/3)||x||_inf, ||x||_2 / sqrt(N)}``, which satisfies the ``c_0`` sandwich."""
    return MaxOf((Scaled(2.0 / 3.0, Lp(math.inf)), Scaled(1.0 / math.sqrt(N), Lp(2.0))))


# ------------------------------------------------------------------ criteria


def fixed_point(sizes=(8, 16, 32), tol=1e-8, time_limit=10.0):
    """Damped fixed-point construction for the sup norm and a mixed norm."""
    rec = _Recorder()
    for N in sizes:
        for label, spec in (("sup", Lp(math.inf)), ("mixed", c0_norm(N))):
            t0 = time.perf_counter()
            S, state, report = find_equilateral_c0(spec, N, tol=min(tol, 1e-12))
            dt = time.perf_counter() - t0
            tag = f"{label} N={N}"
            rec.true(f"{tag} converged", state.status is FixedPointStatus.CONVERGED)
            dev = np.abs(report.distances - 1.0)[~np.eye(N, dtype=bool)].max()
            rec.at_most(f"{tag} max |distance - 1|", dev, tol)
            rec.at_most(f"{tag} seconds", dt, time_limit)
            if label == "sup":
                rec.at_most(f"{tag} max eps", np.abs(state.pair_values()).max(), 0.0)
    return rec, {"distance": tol, "seconds": time_limit, "sup_eps": 0.0}


def _basis_renorms(dims, norms=(("l2", 2.0), ("linf", math.inf))):
    for label, p in norms:
        for n in dims:
            spec = Lp(p)
            S = standard_basis(n)
            cert = certify_antipodal(spec, S, c2=1.0)
            yield f"{label} n={n}", spec, S, cert, build_antipodal_renorm(spec, S, cert)


def hull_renorm(dims=range(2, 7), dist_tol=1e-6, audit_tol=1e-9, n_dirs=1000, seed=0):
    """Gauge renorm of the standard basis under l2 and l_inf."""
    rec = _Recorder()
    for tag, spec, S, cert, result in _basis_renorms(dims):
        rec.at_most(f"{tag} max |distance - 1|", result.max_distance_error, dist_tol)
        audit = bm_bound_audit(spec, result, n_dirs=n_dirs, seed=seed, tol=audit_tol)
        rec.at_least(f"{tag} min ratio - 1/2", audit.min_ratio - audit.lower_bound, -audit_tol)
        rec.at_most(f"{tag} max ratio - c/d", audit.max_ratio - audit.upper_bound, audit_tol)
    return rec, {"distance": dist_tol, "audit": audit_tol, "n_dirs": n_dirs, "seed": seed}


def _check_petty(rec, tag, spec, S, d_tol, slack_tol, eq_tol=1e-9):
    report = verify_equilateral(spec, S, eq_tol)
    rec.at_most(f"{tag} equilateral deviation", report.max_abs_deviation, eq_tol)
    cert = petty_certificate(spec, S, eq_tol)
    check = cert.check(slack_tol)
    rec.at_most(f"{tag} |d - lambda|", abs(cert.d - report.lam), d_tol)
    off = ~np.eye(len(S), dtype=bool)
    rec.at_most(f"{tag} |margin - lambda|", np.abs(cert.margins[off] - report.lam).max(), d_tol)
    rec.at_least(f"{tag} min slack", check.min_slack, -slack_tol)
    rec.at_most(f"{tag} dual norm excess", check.dual_excess, d_tol)


def equilateral_closure(sizes=(8, 16, 32), dims=range(2, 7), d_tol=1e-6, slack_tol=1e-9):
    """Norming-functional certificates for every equilateral set built elsewhere."""
    rec = _Recorder()
    for N in sizes:
        for label, spec in (("fixed-point sup", Lp(math.inf)), ("fixed-point mixed", c0_norm(N))):
            S, state, _ = find_equilateral_c0(spec, N)
            _check_petty(rec, f"{label} N={N}", spec, S, d_tol, slack_tol)
    for tag, _, S, _, result in _basis_renorms(dims):
        _check_petty(rec, f"renorm {tag}", result.new_norm, S, d_tol, slack_tol)
    searches = [
        ("search l2 simplex dim=2", Lp(2.0), 3, 2),
        ("search l2 simplex dim=3", Lp(2.0), 4, 3),
        ("search linf square", Lp(math.inf), 4, 2),
        ("search l1 square", Lp(1.0), 4, 2),
    ]
    for tag, spec, k, dim in searches:
        S, _ = search_equilateral(spec, k, dim, seed=0)
        _check_petty(rec, tag, spec, S, d_tol, slack_tol)
    return rec, {"d": d_tol, "slack": slack_tol, "equilateral": 1e-9}


def _uniform_ball(rng, k, n):
    g = rng.normal(size=(k, n))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    return g * rng.random((k, 1)) ** (1.0 / n)


def danzer_grunbaum(dims=(2, 3), n_sets=100, seed=0, tol=1e-9):
    """Cube vertices are antipodal with ``d = 2``; one extra point always breaks it."""
    rec = _Recorder()
    for n in dims:
        cert = certify_antipodal(Lp(math.inf), cube_vertices(n), c2=1.0, tol=tol)
        rec.at_most(f"cube n={n} |d - 2|", abs(cert.d - 2.0), tol)
        rec.at_most(f"cube n={n} |c1 - 1|", abs(cert.c1 - 1.0), tol)
        rec.true(f"cube n={n} certificate verifies", cert.verify(tol))
        rng = np.random.default_rng(seed + n)
        failures = 0
        for _ in range(n_sets):
            S = PointSet(_uniform_ball(rng, 2**n + 1, n))
            try:
                certify_antipodal(Lp(2.0), S, c2=1.0, tol=tol)
            except CertificationFailure:
                failures += 1
        rec.at_least(f"random {2**n + 1}-point sets n={n} failing", failures, n_sets)
    return rec, {"d": tol, "n_sets": n_sets, "seed": seed}


def _random_polygon(rng):
    """Facets of a random symmetric polygon with moderate eccentricity."""
    k = int(rng.integers(2, 5))
    angles = np.sort(rng.uniform(0.0, np.pi, k))
    angles[0] = 0.0
    angles[1] = max(angles[1], 0.5)
    radii = rng.uniform(0.5, 2.0, k)
    return np.stack([np.cos(angles), np.sin(angles)], axis=1) * radii[:, None]


def _random_lp(rng):
    n = int(rng.integers(2, 4))
    m = int(rng.integers(1, 9 - n))
    A = rng.normal(size=(m, n))
    if rng.random() < 0.8:
        b = A @ rng.uniform(-1, 1, n) + rng.uniform(0.0, 1.0, m)
    else:
        b = rng.normal(size=m)
    box = np.vstack([np.eye(n), -np.eye(n)])
    A = np.vstack([A, box])
    b = np.concatenate([b, np.full(2 * n, 3.0)])
    return rng.normal(size=n), A, b


def oracle_equivalence(n_instances=20, n_queries=1000, n_lps=1000, seed=0, gauge_tol=1e-3, lp_tol=1e-9):
    """Hull gauges against an angular boundary scan; the simplex against vertex enumeration."""
    rec = _Recorder()
    rng = np.random.default_rng(seed)
    worst = 0.0
    per = n_queries // n_instances
    for _ in range(n_instances):
        facets = _random_polygon(rng)
        rho = rng.uniform(0.3, 1.5)
        W = rng.normal(size=(int(rng.integers(0, 4)), 2)) * 1.5
        oracle = hull_gauge_oracle_2d(rho, facets, W)
        ambient = Polyhedral(facets)
        for v in rng.normal(size=(per, 2)):
            exact = float(oracle(v))
            got = gauge_of_hull(rho, ambient, W, v)
            worst = max(worst, abs(got - exact) / exact)
    rec.at_most(f"hull gauge vs angular scan, {per * n_instances} queries, max rel err", worst, gauge_tol)

    worst_lp, mismatched = 0.0, 0
    for _ in range(n_lps):
        c, A, b = _random_lp(rng)
        ref, _ = lp_by_vertices(c, A, b)
        res = solve_lp(LinearProgram(c, A, b))
        if ref is None:
            mismatched += res.status is not LpStatus.INFEASIBLE
        elif res.status is not LpStatus.OPTIMAL:
            mismatched += 1
        else:
            worst_lp = max(worst_lp, abs(res.value - ref))
    rec.at_most(f"simplex vs vertex enumeration, {n_lps} LPs, status mismatches", mismatched, 0)
    rec.at_most(f"simplex vs vertex enumeration, {n_lps} LPs, max abs err", worst_lp, lp_tol)
    return rec, {"gauge_relative": gauge_tol, "lp_absolute": lp_tol, "seed": seed}


def axiom_specs() -> dict[str, NormSpec]:
    """One instance of every norm variant, sized for fast evaluation."""
    hexagon = np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
    return {
        "lp p=1": Lp(1.0, 4),
        "lp p=2": Lp(2.0, 4),
        "lp p=3": Lp(3.0, 4),
        "lp p=inf": Lp(math.inf, 4),
        "polyhedral": Polyhedral(hexagon),
        "scaled": Scaled(2.5, Lp(1.5, 3)),
        "max_of": MaxOf((Scaled(2.0 / 3.0, Lp(math.inf, 4)), Scaled(0.5, Lp(2.0, 4)))),
        "hull_gauge l2": HullGauge(0.7, Lp(2.0, 3), np.array([[1.0, -1.0, 0.0], [0.0, 1.0, -1.0]])),
        "hull_gauge polyhedral": HullGauge(0.7, Polyhedral(hexagon), np.array([[1.0, -1.0], [2.0, 0.3]])),
        "subspace_extension": extend_norm(3, [[1, 0, 0], [0, 1, 0]], Polyhedral(hexagon), Lp(2.0), 2.0),
        "spreading_composite": SpreadingComposite(Lp(2.0, 6), Lp(2.0, 2), 2, 0.1),
    }


def _axiom_stats(args):
    name, spec, n_samples, seed = args
    rng = np.random.default_rng(seed)
    n = spec.dim
    X = rng.normal(size=(n_samples, n)) * rng.lognormal(size=(n_samples, 1))
    Y = rng.normal(size=(n_samples, n)) * rng.lognormal(size=(n_samples, 1))
    t = rng.uniform(-5.0, 5.0, n_samples)
    nx, ny = spec.evaluate(X), spec.evaluate(Y)
    nsum, nneg, nt = spec.evaluate(X + Y), spec.evaluate(-X), spec.evaluate(t[:, None] * X)
    return {
        "name": name,
        "triangle_slack": float((nx + ny - nsum).min()),
        "symmetry": float((np.abs(nneg - nx) / nx).max()),
        "homogeneity": float((np.abs(nt - np.abs(t) * nx) / (np.abs(t) * nx)).max()),
        "min_value": float(nx.min()),
    }


def norm_axioms(n_samples=10_000, seed=0, slack_tol=1e-9, exact_tol=1e-12, workers=1):
    """Sampled triangle, symmetry and homogeneity checks for every variant."""
    rec = _Recorder()
    jobs = [(name, spec, n_samples, seed + k) for k, (name, spec) in enumerate(axiom_specs().items())]
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            stats = list(pool.map(_axiom_stats, jobs))
    else:
        stats = [_axiom_stats(job) for job in jobs]
    for s in stats:
        rec.at_least(f"{s['name']} triangle slack", s["triangle_slack"], -slack_tol)
        rec.at_most(f"{s['name']} symmetry rel err", s["symmetry"], exact_tol)
        rec.at_most(f"{s['name']} homogeneity rel err", s["homogeneity"], exact_tol)
        rec.at_least(f"{s['name']} positivity", s["min_value"], 1e-300)
    return rec, {"triangle": slack_tol, "homogeneity_relative": exact_tol, "n_samples": n_samples, "seed": seed}


def spreading_norm(n=8, m=2, eps=0.1, n_samples=1000, seed=0, tol=1e-12):
    """Unit-vector differences and sums all have the same composite norm."""
    rec = _Recorder()
    spec = SpreadingComposite(Lp(2.0), Lp(2.0), m, eps)
    I = np.eye(n)
    i, j = np.triu_indices(n, 1)
    minus = spec.evaluate(I[i] - I[j])
    plus = spec.evaluate(I[i] + I[j])
    rec.at_most(f"spread of |||e_n - e_m||| over {i.size} pairs", minus.max() - minus.min(), tol)
    rec.at_most("max | |||e_n + e_m||| - |||e_n - e_m||| |", np.abs(plus - minus).max(), tol)
    X = np.random.default_rng(seed).normal(size=(n_samples, n))
    lower = np.linalg.norm(X, axis=1) / (1.0 + eps)
    rec.at_least("min |||x||| - ||x||/(1+eps)", (spec.evaluate(X) - lower).min(), 0.0)
    return rec, {"constant": tol, "n_samples": n_samples, "seed": seed}


def biorthogonal_pipeline(dims=range(2, 7), tol=1e-12, dist_tol=1e-6):
    """Biorthogonal route to the renorm and certificate rescaling round trips."""
    rec = _Recorder()
    for tag, spec, S, cert, direct in _basis_renorms(dims, norms=(("l2", 2.0),)):
        n = S.dim
        sys = BiorthogonalSystem(np.eye(n), np.eye(n), spec)
        result = corollary_renorm(sys)
        rec.at_most(f"{tag} |distortion bound - 2|", abs(result.distortion_bound - 2.0), tol)
        rec.at_most(f"{tag} max |distance - 1|", result.max_distance_error, dist_tol)
        rec.at_most(f"{tag} distances vs direct renorm", np.abs(result.distances - direct.distances).max(), dist_tol)
        for lam in (2.0, 0.5, 3.7):
            for mode in ("scale_functionals", "scale_points"):
                back = rescale_certificate(rescale_certificate(cert, lam, mode), 1.0 / lam, mode)
                err = max(abs(back.c1 - cert.c1), abs(back.c2 - cert.c2), abs(back.d - cert.d))
                rec.at_most(f"{tag} round trip {mode} lambda={lam}", err, tol)
    return rec, {"constants": tol, "distance": dist_tol}


CRITERIA = {
    "fixed-point": fixed_point,
    "hull-renorm": hull_renorm,
    "equilateral-closure": equilateral_closure,
    "danzer-grunbaum": danzer_grunbaum,
    "oracle-equivalence": oracle_equivalence,
    "norm-axioms": norm_axioms,
    "spreading-norm": spreading_norm,
    "biorthogonal-pipeline": biorthogonal_pipeline,
}


class UnknownCriterion(KeyError):
    def __init__(self, name):
        super().__init__(name)
        self.name = name

    def __str__(self):
        return f"unknown criterion {self.name!r}; valid names: {', '.join(CRITERIA)}"


def run_criterion(name: str, **kwargs) -> CriterionResult:
    try:
        fn = CRITERIA[name]
    except KeyError:
        raise UnknownCriterion(name) from None
    t0 = time.perf_counter()
    try:
        rec, tolerances = fn(**kwargs)
    except Exception as exc:  # a crash is a failed criterion, not a crashed battery
        return CriterionResult(name, False, f"raised {type(exc).__name__}: {exc}", {}, [], time.perf_counter() - t0)
    return CriterionResult(name, rec.passed, rec.summary(), tolerances, rec.checks, time.perf_counter() - t0)


def run_suite(names=None, workers: int | None = None) -> list[CriterionResult]:
    """Run the named criteria (all by default) and return results in the requested order."""
    names = list(CRITERIA) if names is None else list(names)
    for name in names:
        if name not in CRITERIA:
            raise UnknownCriterion(name)
    if workers is None:
        workers = min(len(names), os.cpu_count() or 1)
    if workers <= 1 or len(names) == 1:
        return [run_criterion(name) for name in names]
    with ProcessPoolExecutor(workers) as pool:
        return list(pool.map(run_criterion, names))
