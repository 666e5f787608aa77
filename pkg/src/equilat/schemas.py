"""JSON schemas for problem files and emitted reports (version 1)."""

from __future__ import annotations

import jsonschema

SCHEMA_VERSION = 1
VARIANTS = ("lp", "polyhedral", "scaled", "max_of", "hull_gauge", "subspace_extension", "spreading_composite")

_number = {"type": "number"}
_vector = {"type": "array", "items": _number, "minItems": 1}
_matrix = {"type": "array", "items": _vector}
_exp = {"anyOf": [{"type": "number", "minimum": 1}, {"enum": ["inf", "infinity"]}]}

NORM = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "$id": "norm",
    "$ref": "#/$defs/norm",
    "$defs": {
        "norm": {
            "type": "object",
            "required": ["variant"],
            "properties": {"variant": {"enum": list(VARIANTS)}},
            "oneOf": [
                {
                    "properties": {"variant": {"const": "lp"}, "p": _exp, "dim": {"type": "integer", "minimum": 1}},
                    "required": ["p"],
                },
                {
                    "properties": {"variant": {"const": "polyhedral"}, "facets": {**_matrix, "minItems": 1}},
                    "required": ["facets"],
                },
                {
                    "properties": {
                        "variant": {"const": "scaled"},
                        "factor": {"type": "number", "exclusiveMinimum": 0},
                        "base": {"$ref": "#/$defs/norm"},
                    },
                    "required": ["factor", "base"],
                },
                {
                    "properties": {
                        "variant": {"const": "max_of"},
                        "parts": {"type": "array", "items": {"$ref": "#/$defs/norm"}, "minItems": 1},
                    },
                    "required": ["parts"],
                },
                {
                    "properties": {
                        "variant": {"const": "hull_gauge"},
                        "rho": {"type": "number", "exclusiveMinimum": 0},
                        "ambient": {"$ref": "#/$defs/norm"},
                        "generators": _matrix,
                        "dim": {"type": "integer", "minimum": 1},
                    },
                    "required": ["rho", "ambient"],
                },
                {
                    "properties": {
                        "variant": {"const": "subspace_extension"},
                        "ambient": {"$ref": "#/$defs/norm"},
                        "basis": _matrix,
                        "z_norm": {"$ref": "#/$defs/norm"},
                        "c2": {"type": "number", "exclusiveMinimum": 0},
                        "functionals": _matrix,
                        "dual_sphere": {"enum": ["exact", "sampled"]},
                    },
                    "required": ["ambient", "basis", "z_norm", "c2", "functionals"],
                },
                {
                    "properties": {
                        "variant": {"const": "spreading_composite"},
                        "base": {"$ref": "#/$defs/norm"},
                        "model": {"$ref": "#/$defs/norm"},
                        "m": {"type": "integer", "minimum": 2},
                        "eps": {"type": "number", "exclusiveMinimum": 0},
                        "exhaustive": {"type": "boolean"},
                        "dim": {"type": "integer", "minimum": 1},
                    },
                    "required": ["base", "model", "m", "eps"],
                },
            ],
        }
    },
}

POINTS = {
    "type": "object",
    "required": ["points"],
    "properties": {
        "points": {**_matrix, "minItems": 1},
        "labels": {"type": "array", "items": {"type": "string"}},
    },
}

PROBLEM = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["norm"],
    "properties": {
        "command": {"enum": ["fixedpoint", "renorm"]},
        "norm": NORM["$defs"]["norm"],
        "points": {"anyOf": [POINTS, {**_matrix, "minItems": 1}]},
        "N": {"type": "integer", "minimum": 2},
        "tol": {"type": "number", "exclusiveMinimum": 0},
        "max_iter": {"type": "integer", "minimum": 1},
        "theta": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
        "seed": {"type": "integer", "minimum": 0},
        "c2": {"type": "number", "exclusiveMinimum": 0},
        "n_dirs": {"type": "integer", "minimum": 1},
    },
    "$defs": NORM["$defs"],
}

CERTIFICATE = {
    "type": "object",
    "required": ["status", "norm", "points", "c1", "c2", "d", "functionals", "margins", "slacks"],
    "properties": {
        "status": {"const": "certified"},
        "norm": NORM["$defs"]["norm"],
        "points": POINTS,
        "c1": _number,
        "c2": _number,
        "d": _number,
        "functionals": {"type": "array", "items": _matrix},
        "margins": _matrix,
        "slacks": _matrix,
    },
    "$defs": NORM["$defs"],
}

FAILURE = {
    "type": "object",
    "required": ["status", "pair", "margin"],
    "properties": {
        "status": {"const": "failure"},
        "pair": {"type": "array", "items": {"type": "integer"}, "minItems": 2, "maxItems": 2},
        "margin": _number,
    },
}

_CONFIG = {"type": "object"}

FIXEDPOINT_REPORT = {
    "type": "object",
    "required": ["schema_version", "command", "config", "status", "state", "report", "points"],
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "command": {"const": "fixedpoint"},
        "config": _CONFIG,
        "status": {"enum": ["Converged", "MaxIter", "Diverged"]},
        "state": {"type": "object", "required": ["N", "eps", "residuals", "status"]},
        "report": {"type": "object", "required": ["lambda", "max_abs_deviation", "tol", "equilateral", "deviations"]},
        "points": POINTS,
    },
}

RENORM_REPORT = {
    "type": "object",
    "required": ["schema_version", "command", "config", "point_scale", "renorm"],
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "command": {"const": "renorm"},
        "config": _CONFIG,
        "point_scale": _number,
        "separation_margin": {
            "type": "object",
            "required": ["value", "label"],
            "properties": {"value": _number, "label": {"const": "finite lower bound"}},
        },
        "renorm": {
            "type": "object",
            "required": ["new_norm", "distortion_bound", "points", "constants", "distances", "audit"],
            "properties": {"new_norm": NORM["$defs"]["norm"]},
        },
    },
    "$defs": NORM["$defs"],
}

AUDIT = {
    "type": "object",
    "required": ["n_dirs", "seed", "min_ratio", "max_ratio", "lower_bound", "upper_bound", "ok"],
}

SUITE_REPORT = {
    "type": "object",
    "required": ["schema_version", "command", "config", "passed", "criteria"],
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "command": {"const": "suite"},
        "config": _CONFIG,
        "passed": {"type": "boolean"},
        "criteria": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["name", "passed", "summary", "tolerances", "checks"],
            },
        },
    },
}

SCHEMAS = {
    "norm": NORM,
    "problem": PROBLEM,
    "certificate": CERTIFICATE,
    "failure": FAILURE,
    "fixedpoint_report": FIXEDPOINT_REPORT,
    "renorm_report": RENORM_REPORT,
    "audit": AUDIT,
    "suite_report": SUITE_REPORT,
}


class SchemaError(ValueError):
    pass


def validate(obj, kind: str) -> None:
    """Raise SchemaError with a path-qualified message when ``obj`` does not match."""
    try:
        schema = SCHEMAS[kind]
    except KeyError:
        raise SchemaError(f"unknown schema {kind!r}; known: {sorted(SCHEMAS)}") from None
    validator = jsonschema.Draft202012Validator(schema)
    errors = list(validator.iter_errors(obj))
    # a direct error (such as an unknown variant tag) explains more than a failed oneOf
    direct = [e for e in errors if e.validator not in ("oneOf", "anyOf")]
    e = jsonschema.exceptions.best_match(direct or errors)
    if e is not None:
        # descend into the alternative whose variant tag matched
        while e.context:
            e = jsonschema.exceptions.best_match(c for c in e.context if c.validator != "const") or e.context[0]
        where = "/".join(str(p) for p in e.absolute_path) or "<root>"
        raise SchemaError(f"{kind} schema violation at {where}: {e.message}")
