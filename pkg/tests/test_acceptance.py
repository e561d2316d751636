"""Acceptance criteria, one test per criterion.

Each test runs the matching scenario at its stated tolerance, prints a
single ``criterion N: PASS|FAIL`` line with the wall time, and asserts
both the checks and the time budget.
"""

import os
import tempfile
import time

import pytest

from crlab.cli import emit_report
from crlab.scenarios import resolve_params, run


def _run(name, overrides=None, seed=0):
    params = resolve_params(name, overrides or {})
    t0 = time.perf_counter()
    rep = run(name, params, seed, 1)
    return rep, time.perf_counter() - t0


def _verdict(number, rep, elapsed, budget, extra=""):
    ok = rep.passed and elapsed <= budget
    failed = [c.name for c in rep.checks if not c.passed]
    detail = f"{len(rep.checks)} checks" + (f", failed: {failed}" if failed else "")
    print(f"criterion {number}: {'PASS' if ok else 'FAIL'} ({detail}; {elapsed:.1f}s of {budget}s){extra}")
    for c in rep.checks:
        if not c.passed:
            print("  " + c.line())
    assert rep.passed, failed
    assert elapsed <= budget


def test_criterion_1_hilbert_identity():
    rep, dt = _run("hilbert-identity", {"N": 512, "kmax": 64, "samples": 100, "tol": 1e-10})
    _verdict(1, rep, dt, 5)


def test_criterion_2_bishop_solver():
    rep, dt = _run("bishop", {"c": 0.05, "max_ratio": 0.5, "c_min": 0.02, "c_max": 0.2, "min_slope": 1.9})
    _verdict(2, rep, dt, 30, f" slope={rep.constants['slope']:.3f}")


def test_criterion_3_half_attached_family():
    rep, dt = _run("disc-family", {"n": 3, "c": 0.02})
    _verdict(3, rep, dt, 60)


def test_criterion_4_foliation_near_hyperbolic_point():
    rep, dt = _run("foliation", {"gamma": 1.0, "slope_tol": 1e-3, "tol": 1e-8})
    _verdict(4, rep, dt, 10)


def test_criterion_5_condition_verdicts():
    rep, dt = _run("check-condition")
    _verdict(5, rep, dt, 30)


def test_criterion_6_special_point():
    rep, dt = _run("special-point", {"pitch": 0.01})
    _verdict(6, rep, dt, 30)


def test_criterion_7_envelope_coverage():
    rep, dt = _run("envelope", {"sigma_args": [0.1, 1, 2], "sigma_expected": 0.025})
    _verdict(7, rep, dt, 30)


def test_criterion_8_gauss_approximation():
    rep, dt = _run("gauss", {"taus": [1e2, 1e3, 1e4], "tol": 1e-3})
    _verdict(8, rep, dt, 20)


def test_criterion_9_torus_core():
    rep, dt = _run("torus", {"P": 1e3, "tol": 1e-8, "relation_samples": 10000, "ratio_samples": 100, "R": 0.5})
    _verdict(9, rep, dt, 120, f" P*(R=0.5)={rep.constants['min_P']['P_star']}")


@pytest.mark.long
def test_criterion_9_torus_radius_five():
    rep, dt = _run("torus-verify", {"radius": 5.0})
    _verdict("9 (R=5)", rep, dt, 600)


def test_criterion_10_reports_are_reproducible():
    names = ["hilbert-identity", "foliation", "check-condition", "envelope", "gauss"]
    t0 = time.perf_counter()
    mismatched = []
    with tempfile.TemporaryDirectory() as tmp:
        for name in names:
            dirs = []
            for attempt in ("a", "b"):
                rep, _ = _run(name)
                d = os.path.join(tmp, attempt)
                emit_report(rep, d, name)
                dirs.append(d)
            for f in sorted(os.listdir(dirs[0])):
                if not f.startswith(name):
                    continue
                with open(os.path.join(dirs[0], f), "rb") as fa, open(os.path.join(dirs[1], f), "rb") as fb:
                    if fa.read() != fb.read():
                        mismatched.append(f)
    dt = time.perf_counter() - t0
    print(f"criterion 10: {'PASS' if not mismatched else 'FAIL'} ({len(names)} scenarios rerun; {dt:.1f}s)" + (f" mismatched: {mismatched}" if mismatched else ""))
    assert not mismatched
