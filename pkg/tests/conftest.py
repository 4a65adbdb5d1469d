import functools

import pytest

from rprcusps.geometry import validate_geometry
from rprcusps.pipeline import SliceProblem, analyze_slice

M1 = {"a2x": 15.91, "a3x": 0, "a3y": 10, "d1": 17.04, "d2": 16.54, "d3": 20.84}
M2 = {"a2x": 30, "a3x": 11, "a3y": 27, "d1": 13, "d2": 9, "d3": 4}
# platform (4, 5, 3) is the base triangle (8, 10, 6) scaled by 1/2
SIMILAR = {"a2x": 8, "a3x": 0, "a3y": 6, "d1": 4, "d2": 5, "d3": 3}


@pytest.fixture(scope="session")
def m1():
    return validate_geometry(M1)


@pytest.fixture(scope="session")
def m2():
    return validate_geometry(M2)


@pytest.fixture(scope="session")
def similar():
    return validate_geometry(SIMILAR)


@functools.lru_cache(maxsize=None)
def _slice(name, l1, digits=90):
    geom = validate_geometry({"m1": M1, "m2": M2, "similar": SIMILAR}[name])
    return analyze_slice(SliceProblem(geom, l1, digits=digits))


@pytest.fixture(scope="session")
def slice_result():
    """Cached full-precision slice analyses, keyed by (geometry name, l1)."""
    return _slice


# one line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE = {}


def record(criterion, ok, detail):
    prev = ACCEPTANCE.get(criterion)
    if prev is not None:
        ok = ok and prev[0]
        detail = f"{prev[1]}; {detail}"
    ACCEPTANCE[criterion] = (ok, detail)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
