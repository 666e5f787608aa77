"""Acceptance battery: one test per criterion at its stated tolerance.

Each test prints a single PASS/FAIL line (uncaptured, so it shows in
``pytest -v`` output) and fails when the criterion fails. Run
``python tests/test_acceptance.py`` for the lines alone.
"""

import pytest

from equilat.suite import CRITERIA, UnknownCriterion, run_criterion


@pytest.mark.parametrize("name", list(CRITERIA))
def test_criterion(name, capsys):
    result = run_criterion(name)
    with capsys.disabled():
        print(f"\n{result.line()}")
    failed = [f"{c.label}: {c.value} vs {c.bound}" for c in result.checks if not c.passed]
    assert result.passed, f"{result.summary}; failing checks: {failed}"


def test_unknown_criterion():
    with pytest.raises(UnknownCriterion):
        run_criterion("no-such-criterion")


def test_crash_becomes_failure(monkeypatch):
    def boom():
        raise ZeroDivisionError("x")

    monkeypatch.setitem(CRITERIA, "boom", boom)
    result = run_criterion("boom")
    assert not result.passed and result.summary == "raised ZeroDivisionError: x"


if __name__ == "__main__":
    import sys

    results = [run_criterion(name) for name in CRITERIA]
    for r in results:
        print(r.line())
    sys.exit(0 if all(r.passed for r in results) else 1)
