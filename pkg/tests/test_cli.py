import json
import subprocess
import sys
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from equilat import schemas
from equilat.antipodal import AntipodalCertificate
from equilat.cli import bundled_examples, main, matrix_csv, read_matrix_csv
from equilat.norms import norm_from_dict


def run(tmp_path, *argv):
    return main([*argv, "--out-dir", str(tmp_path)])


def load(path):
    return json.loads(path.read_text())


def test_bundled_examples_listed():
    assert {"sup_norm_n8", "mixed_norm_n8", "l2_basis_n2", "cube_linf_n2", "collinear"} <= set(bundled_examples())


def test_fixedpoint_sup_norm(tmp_path, capsys):
    assert run(tmp_path, "fixedpoint", "--example", "sup_norm_n8") == 0
    assert capsys.readouterr().out.startswith("Converged: N = 8")
    body = load(tmp_path / "fixedpoint.json")
    schemas.validate(body, "fixedpoint_report")
    assert body["status"] == "Converged"
    D = read_matrix_csv((tmp_path / "distances.csv").read_text())
    assert np.array_equal(D[~np.eye(8, dtype=bool)], np.ones(56))
    assert norm_from_dict(body["norm"]).to_dict() == body["norm"]


def test_fixedpoint_mixed_norm(tmp_path):
    assert run(tmp_path, "fixedpoint", "--example", "mixed_norm_n8", "--format", "json") == 0
    body = load(tmp_path / "fixedpoint.json")
    assert body["config"]["N"] == 8
    assert not (tmp_path / "distances.csv").exists()


def test_fixedpoint_max_iter_is_math_failure(tmp_path):
    assert run(tmp_path, "fixedpoint", "--example", "mixed_norm_n8", "--max-iter", "1") == 2
    assert load(tmp_path / "fixedpoint.json")["status"] == "MaxIter"


def test_fixedpoint_svg_in_the_plane(tmp_path):
    problem = tmp_path / "p.json"
    problem.write_text(json.dumps({"norm": {"variant": "lp", "p": "inf"}, "N": 2}))
    assert run(tmp_path, "fixedpoint", "--input", str(problem)) == 0
    assert ET.parse(tmp_path / "points.svg").getroot().tag.endswith("svg")


def test_renorm_cube(tmp_path, capsys):
    assert run(tmp_path, "renorm", "--example", "cube_linf_n2") == 0
    assert "certified" in capsys.readouterr().out
    cert = AntipodalCertificate.from_dict(load(tmp_path / "certificate.json"))
    assert cert.d == pytest.approx(2.0, abs=1e-9) and cert.verify()
    body = load(tmp_path / "renorm.json")
    schemas.validate(body, "renorm_report")
    assert body["separation_margin"]["label"] == "finite lower bound"
    assert body["renorm"]["max_distance_error"] <= 1e-9
    schemas.validate(load(tmp_path / "audit.json"), "audit")
    D = read_matrix_csv((tmp_path / "distances.csv").read_text())
    assert D[0, 3] == pytest.approx(1.0, abs=1e-9)
    root = ET.parse(tmp_path / "overlay.svg").getroot()
    assert root.tag.endswith("svg")


def test_renorm_l2_basis(tmp_path):
    assert run(tmp_path, "renorm", "--example", "l2_basis_n2", "--n-dirs", "50") == 0
    assert load(tmp_path / "audit.json")["n_dirs"] == 50


def test_renorm_rescales_points(tmp_path):
    problem = tmp_path / "p.json"
    problem.write_text(json.dumps({"norm": {"variant": "lp", "p": 2}, "points": [[0, 0], [4, 0], [0, 4]]}))
    assert run(tmp_path, "renorm", "--input", str(problem)) == 0
    body = load(tmp_path / "renorm.json")
    assert body["point_scale"] == 0.25


def test_renorm_collinear_failure(tmp_path, capsys):
    assert run(tmp_path, "renorm", "--example", "collinear") == 2
    assert "certification failed" in capsys.readouterr().out
    failure = load(tmp_path / "failure.json")
    schemas.validate(failure, "failure")
    assert failure["pair"] == [0, 1]


def test_renorm_needs_points(tmp_path, capsys):
    assert run(tmp_path, "renorm", "--example", "sup_norm_n8") == 1
    assert "points" in capsys.readouterr().err


def test_malformed_json(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(tmp_path, "fixedpoint", "--input", str(bad)) == 1
    assert "error" in capsys.readouterr().err


def test_schema_violation_reported(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"norm": {"variant": "lp", "p": 0.5}, "N": 3}))
    assert run(tmp_path, "fixedpoint", "--input", str(bad)) == 1
    assert "norm" in capsys.readouterr().err


def test_missing_input_file(tmp_path):
    assert run(tmp_path, "fixedpoint", "--input", str(tmp_path / "nope.json")) == 1


def test_unknown_example(tmp_path):
    assert run(tmp_path, "fixedpoint", "--example", "nope") == 1


def test_usage_error(tmp_path):
    assert main(["fixedpoint", "--tol", "abc"]) == 1
    assert main([]) == 1


def test_suite_single_criterion(tmp_path, capsys):
    assert run(tmp_path, "suite", "--criteria", "danzer-grunbaum") == 0
    assert capsys.readouterr().out.startswith("PASS danzer-grunbaum")
    body = load(tmp_path / "suite.json")
    schemas.validate(body, "suite_report")
    assert body["passed"] is True
    assert (tmp_path / "criteria" / "danzer-grunbaum.json").exists()


def test_suite_config_file(tmp_path):
    cfg = tmp_path / "suite.json.in"
    cfg.write_text(json.dumps({"criteria": ["danzer-grunbaum"]}))
    assert run(tmp_path, "suite", "--input", str(cfg)) == 0
    assert [c["name"] for c in load(tmp_path / "suite.json")["criteria"]] == ["danzer-grunbaum"]


def test_suite_unknown_criterion(tmp_path, capsys):
    assert run(tmp_path, "suite", "--criteria", "bogus") == 1
    err = capsys.readouterr().err
    assert "bogus" in err and "fixed-point" in err


def test_matrix_csv_round_trip():
    M = np.random.default_rng(0).normal(size=(3, 3))
    assert np.array_equal(read_matrix_csv(matrix_csv(M)), M)


def test_module_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "equilat", "fixedpoint", "--example", "sup_norm_n8", "--out-dir", str(tmp_path)],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0 and "Converged" in proc.stdout


# ------------------------------------------------------------- schemas


def test_unknown_variant_message():
    with pytest.raises(schemas.SchemaError, match="variant"):
        schemas.validate({"variant": "lq", "p": 2}, "norm")


def test_nested_norm_error_path():
    norm = {"variant": "max_of", "parts": [{"variant": "scaled", "factor": -1, "base": {"variant": "lp", "p": 2}}]}
    with pytest.raises(schemas.SchemaError, match="parts/0/factor"):
        schemas.validate(norm, "norm")


def test_unknown_schema_kind():
    with pytest.raises(schemas.SchemaError, match="unknown schema"):
        schemas.validate({}, "nope")


@pytest.mark.parametrize("name", ["sup_norm_n8", "mixed_norm_n8", "l2_basis_n2", "cube_linf_n2", "collinear"])
def test_bundled_problems_are_valid(name):
    from importlib import resources

    problem = json.loads(resources.files("equilat.problems").joinpath(f"{name}.json").read_text())
    schemas.validate(problem, "problem")
    spec = norm_from_dict(problem["norm"])
    assert norm_from_dict(spec.to_dict()).to_dict() == spec.to_dict()
