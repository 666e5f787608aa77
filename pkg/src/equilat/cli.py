"""Command-line interface: ``equilat {fixedpoint,renorm,suite} ...``.

Exit codes: 0 success, 1 input or usage error, 2 mathematical failure
(no convergence, certification failure, failed criterion).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from importlib import resources
from pathlib import Path

import numpy as np

from . import schemas, svg
from .antipodal import AntipodalError, CertificationFailure, certify_antipodal, rescale_certificate
from .equilateral import FixedPointStatus, PreconditionError, find_equilateral_c0
from .norms import NormError, norm_from_dict
from .pointset import PointSet, PointSetError
from .renorm import RenormError, bm_bound_audit, build_antipodal_renorm
from .suite import CRITERIA, run_suite

log = logging.getLogger("equilat")

EXIT_OK, EXIT_INPUT, EXIT_MATH = 0, 1, 2
FORMATS = ("json", "csv", "svg")


class InputError(Exception):
    pass


def bundled_examples() -> list[str]:
    return sorted(p.name[:-5] for p in resources.files("equilat.problems").iterdir() if p.name.endswith(".json"))


def _read_problem(args) -> tuple[dict, str]:
    if args.example and args.input:
        raise InputError("give either --input or --example, not both")
    if args.example:
        ref = resources.files("equilat.problems") / f"{args.example}.json"
        if not ref.is_file():
            raise InputError(f"no bundled example {args.example!r}; available: {', '.join(bundled_examples())}")
        text, source = ref.read_text(), f"example:{args.example}"
    elif args.input:
        try:
            text, source = Path(args.input).read_text(), args.input
        except OSError as exc:
            raise InputError(f"cannot read {args.input}: {exc.strerror}") from None
    else:
        raise InputError("an input problem is required (--input FILE or --example NAME)")
    try:
        problem = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{source}: invalid JSON: {exc}") from None
    try:
        schemas.validate(problem, "problem")
    except schemas.SchemaError as exc:
        raise InputError(f"{source}: {exc}") from None
    return problem, source


def _resolve(problem: dict, args, defaults: dict) -> dict:
    """Command-line values override the problem file, which overrides defaults."""
    cfg = {}
    for key, default in defaults.items():
        flag = getattr(args, key, None)
        cfg[key] = flag if flag is not None else problem.get(key, default)
    return cfg


def _formats(args) -> set[str]:
    return set(args.format) if args.format else set(FORMATS)


def _write(out_dir: Path, name: str, text: str) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / name).write_text(text)
    log.info("wrote %s", out_dir / name)


def _dump(obj, kind: str) -> str:
    schemas.validate(obj, kind)
    return json.dumps(obj, indent=2) + "\n"


def matrix_csv(M) -> str:
    """Square matrix with a header row and point labels ``p0, p1, ...``."""
    M = np.asarray(M, dtype=float)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["point"] + [f"p{j}" for j in range(M.shape[1])])
    for i, row in enumerate(M):
        writer.writerow([f"p{i}"] + [repr(float(v)) for v in row])
    return buf.getvalue()


def read_matrix_csv(text: str) -> np.ndarray:
    rows = list(csv.reader(io.StringIO(text)))
    return np.array([[float(v) for v in row[1:]] for row in rows[1:]])


# ------------------------------------------------------------------ commands


def cmd_fixedpoint(args) -> int:
    problem, source = _read_problem(args)
    spec = norm_from_dict(problem["norm"])
    cfg = _resolve(problem, args, {"N": None, "tol": 1e-12, "max_iter": 5000, "theta": 0.5, "seed": 0})
    if cfg["N"] is None:
        cfg["N"] = spec.dim
    if cfg["N"] is None:
        raise InputError("N is required when the norm has no fixed dimension")
    cfg["input"] = source
    S, state, report = find_equilateral_c0(
        spec, cfg["N"], tol=cfg["tol"], max_iter=cfg["max_iter"], theta=cfg["theta"], seed=cfg["seed"]
    )
    out = Path(args.out_dir)
    formats = _formats(args)
    body = {
        "schema_version": schemas.SCHEMA_VERSION,
        "command": "fixedpoint",
        "config": cfg,
        "norm": spec.to_dict(),
        "status": state.status.value,
        "state": state.to_dict(),
        "report": report.to_dict(),
        "points": S.to_dict(),
    }
    if "json" in formats:
        _write(out, "fixedpoint.json", _dump(body, "fixedpoint_report"))
    if "csv" in formats:
        _write(out, "distances.csv", matrix_csv(report.distances))
    if "svg" in formats and S.dim == 2:
        _write(out, "points.svg", svg.render([("unit ball", spec)], S.points, title="fixed-point configuration"))
    off = ~np.eye(len(S), dtype=bool)
    print(f"{state.status.value}: N = {cfg['N']}, max |distance - 1| = {np.abs(report.distances[off] - 1).max():.3g}")
    return EXIT_OK if state.status is FixedPointStatus.CONVERGED else EXIT_MATH


def cmd_renorm(args) -> int:
    problem, source = _read_problem(args)
    if "points" not in problem:
        raise InputError(f"{source}: renorm needs a 'points' field")
    spec = norm_from_dict(problem["norm"])
    S = PointSet.from_dict(problem["points"])
    if spec.dim is not None and spec.dim != S.dim:
        raise InputError(f"{source}: norm has dimension {spec.dim}, points have {S.dim}")
    cfg = _resolve(problem, args, {"c2": 1.0, "tol": 1e-9, "n_dirs": 1000, "seed": 0})
    cfg["input"] = source
    out = Path(args.out_dir)
    formats = _formats(args)

    # the renorm needs c1 = 1; scaling the points changes (c1, c2, d) to (1, c2, d / c1)
    scale = 1.0 / float(np.max(spec.evaluate(S.points)))
    S1 = S.scaled(scale)
    try:
        cert = certify_antipodal(spec, S1, c2=cfg["c2"], tol=cfg["tol"])
    except CertificationFailure as exc:
        if "json" in formats:
            _write(out, "failure.json", _dump({**exc.to_dict(), "config": cfg, "point_scale": scale}, "failure"))
        print(f"certification failed: {exc}")
        return EXIT_MATH
    cert = rescale_certificate(cert, 1.0 / cert.c1, "scale_points", cfg["tol"]) if cert.c1 < 1.0 else cert
    result = build_antipodal_renorm(spec, cert.points, cert, cfg["tol"])
    audit = bm_bound_audit(spec, result, n_dirs=cfg["n_dirs"], seed=cfg["seed"], tol=cfg["tol"])
    result = result.with_audit(audit)
    body = {
        "schema_version": schemas.SCHEMA_VERSION,
        "command": "renorm",
        "config": cfg,
        "point_scale": scale,
        "separation_margin": {"value": cert.d / cert.c2, "label": "finite lower bound"},
        "renorm": result.to_dict(),
    }
    if "json" in formats:
        _write(out, "certificate.json", _dump(cert.to_dict(), "certificate"))
        _write(out, "renorm.json", _dump(body, "renorm_report"))
        _write(out, "audit.json", _dump(audit.to_dict(), "audit"))
    if "csv" in formats:
        _write(out, "distances.csv", matrix_csv(result.distances))
    if "svg" in formats and S.dim == 2:
        picture = svg.render(
            [("original unit ball", spec), ("renormed unit ball K", result.new_norm)],
            cert.points.points,
            title="antipodal renorm",
        )
        _write(out, "overlay.svg", picture)
    print(
        f"certified: c1 = {cert.c1:.6g}, c2 = {cert.c2:.6g}, d = {cert.d:.6g}; "
        f"distortion bound {result.distortion_bound:.6g}; max distance error {result.max_distance_error:.3g}; "
        f"audit {'ok' if audit.ok else 'VIOLATED'}"
    )
    return EXIT_OK if audit.ok and result.max_distance_error <= 1e-6 else EXIT_MATH


def cmd_suite(args) -> int:
    names = None
    if args.input:
        try:
            config = json.loads(Path(args.input).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot read suite config {args.input}: {exc}") from None
        names = config.get("criteria") if isinstance(config, dict) else None
    if args.criteria:
        names = args.criteria
    names = list(CRITERIA) if names is None else list(names)
    unknown = [n for n in names if n not in CRITERIA]
    if unknown:
        raise InputError(f"unknown criterion {unknown[0]!r}; valid names: {', '.join(CRITERIA)}")
    results = run_suite(names, workers=args.workers)
    for r in results:
        print(r.line())
    passed = all(r.passed for r in results)
    out = Path(args.out_dir)
    for r in results:
        _write(out / "criteria", f"{r.name}.json", json.dumps(r.to_dict(timing=False), indent=2) + "\n")
    body = {
        "schema_version": schemas.SCHEMA_VERSION,
        "command": "suite",
        "config": {"criteria": names},
        "passed": passed,
        "criteria": [r.to_dict(timing=False) for r in results],
    }
    _write(out, "suite.json", _dump(body, "suite_report"))
    return EXIT_OK if passed else EXIT_MATH


# ------------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="equilat", description="Equilateral and antipodal sets in finite dimensions.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log written files")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, problem=True):
        p.add_argument("--input", help="JSON problem or config file")
        if problem:
            p.add_argument("--example", help=f"bundled problem ({', '.join(bundled_examples())})")
            p.add_argument("--tol", type=float)
            p.add_argument("--seed", type=int)
            p.add_argument("--format", action="append", choices=FORMATS, help="output format (repeatable)")
        p.add_argument("--out-dir", default=".", help="directory for report files")

    p = sub.add_parser("fixedpoint", help="equilateral set from the fixed-point construction")
    common(p)
    p.add_argument("--max-iter", type=int)
    p.add_argument("-N", type=int, dest="N", help="number of points (and dimension)")
    p.set_defaults(func=cmd_fixedpoint)

    p = sub.add_parser("renorm", help="certify antipodality and build the equilateral renorm")
    common(p)
    p.add_argument("--n-dirs", type=int, help="audit directions")
    p.add_argument("--c2", type=float, help="bound on the dual norm of certifying functionals")
    p.set_defaults(func=cmd_renorm)

    p = sub.add_parser("suite", help="run acceptance criteria")
    common(p, problem=False)
    p.add_argument("--criteria", nargs="+", metavar="NAME", help=f"subset of: {', '.join(CRITERIA)}")
    p.add_argument("--workers", type=int, help="worker processes (default: one per CPU)")
    p.set_defaults(func=cmd_suite)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except (InputError, PreconditionError, NormError, PointSetError, AntipodalError, RenormError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
