"""Acceptance criteria, one test per criterion at its stated tolerance.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the PASS/FAIL lines.
"""

import math
import time

import pytest

from modzeta import cli, lfunc, selberg, verify
from modzeta.lfunc import l1_fundamental, lambda_q_kloosterman
from modzeta.pell import pell4_fundamental
from modzeta.selberg import StripPoint, logderiv_dirichlet, logderiv_strip_estimate, psi


def report(n, ok, detail):
    print(f"\ncriterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")


def suite_ok(n, name, **limits):
    rep = verify.run_suite(name, **limits)
    report(n, rep.passed, f"{name}: cases={rep.cases} max_dev={rep.max_deviation:.3g} tol={rep.tolerance:g} "
                          f"time={rep.seconds:.1f}s")
    return rep


def test_criterion_01_bykovskii():
    rep = suite_ok(1, "bykovskii", tmax=500)
    assert rep.passed and rep.cases == 498
    assert rep.max_deviation <= 1e-8
    assert rep.seconds <= 60


def test_criterion_02_two_sided_psi():
    rep = suite_ok(2, "psi-two-sided", xs=[1e3, 1e4, 1e5])
    assert rep.passed and rep.cases == 9
    assert rep.max_deviation <= 1e-8


def test_criterion_03_lambda_kloosterman():
    rep = suite_ok(3, "lambda-kloosterman", qmax=50, tmax=50)
    assert rep.passed and rep.max_deviation <= 1e-8
    for t in range(3, 51):
        assert abs(lambda_q_kloosterman(2, t) - (0 if t % 2 == 0 else -1)) <= 1e-8


def test_criterion_04_weil():
    rep = suite_ok(4, "weil", nmax=10, cmax=500)
    assert rep.passed and rep.cases == 500 * 55


def test_criterion_05_classnumber_formula():
    rep = suite_ok(5, "classnumber-formula", dmax=3000)
    assert rep.passed and rep.max_deviation <= 1e-9


def test_criterion_06_pell_minimal():
    rep = verify.run_suite("pell-minimal", dmax=2000)
    spots = {D: (pell4_fundamental(D).t, pell4_fundamental(D).u) for D in (5, 8, 61)}
    ok = rep.passed and spots == {5: (3, 1), 8: (6, 2), 61: (1523, 195)}
    report(6, ok, f"pell-minimal: cases={rep.cases} failures={rep.failures} spots={spots}")
    assert ok


def test_criterion_07_l1_threeway():
    rep = verify.run_suite("l1-threeway", dmax=10**4)
    s5, s12 = l1_fundamental(5), l1_fundamental(12)
    ok = rep.passed and rep.max_deviation <= 1e-6 and abs(s5 - 0.4304089) <= 5e-8 and abs(s12 - 0.7603460) <= 5e-8
    report(7, ok, f"l1-threeway: cases={rep.cases} max_dev={rep.max_deviation:.3g} L(5)={s5:.7f} L(12)={s12:.7f}")
    assert ok


def test_criterion_08_pgt():
    rep = verify.run_suite("pgt", xs=(1e6,), window=0.05)
    ratio = rep.details[0]["ratio"]
    ok = rep.passed and 0.95 <= ratio <= 1.05
    report(8, ok, f"psi0(x)*2/x at x=1e6 = {ratio:.5f}")
    assert ok


def test_criterion_09_sigma_above_one():
    z = logderiv_dirichlet(2)
    g4 = abs(psi(2, 1e4)[0] - z)
    g6 = abs(psi(2, 1e6)[0] - z)
    ok = g4 >= 5 * g6
    report(9, ok, f"Z'/Z(2)={z.real:.12f} gap(1e4)={g4:.3g} gap(1e6)={g6:.3g} shrink={g4 / g6:.1f}x")
    assert ok


def test_criterion_10_strip_consistency_and_scan():
    worst = 0.0
    for sigma in (0.6, 0.75, 0.9):
        for T in (50.0, 100.0, 200.0, 500.0):
            x = T ** (20 / 9)
            a = logderiv_strip_estimate(StripPoint(sigma, T, x))
            b = logderiv_strip_estimate(StripPoint(sigma, T, 4 * x))
            worst = max(worst, abs(a.value - b.value) / (a.heuristic_err + b.heuristic_err))
    # time the scan from a cold start: empty trace table and L-value cache
    saved_cache, saved_table = lfunc.default_cache(), selberg._TABLE
    try:
        lfunc.set_default_cache(lfunc.LCache())
        selberg.reset_trace_table()
        start = time.perf_counter()
        rows, summary = cli.growth_scan(0.75, 50, 500, "log", 30, "pair")
        seconds = time.perf_counter() - start
    finally:
        lfunc.set_default_cache(saved_cache)
        selberg._TABLE = saved_table
    exps_ok = (
        math.isclose(cli.exponent_new(0.6), 19 / 9 - 20 / 9 * 0.6)
        and math.isclose(cli.exponent_new(0.75), 52 / 27 * 0.25)
        and math.isclose(cli.exponent_new(5 / 8), 13 / 18)
        and math.isclose(52 / 27 * (1 - 5 / 8), 13 / 18)
    )
    ok = worst <= 1 and seconds <= 600 and len(rows) == 60 and summary["n_points"] == 30 and exps_ok
    ok = ok and math.isclose(rows[0].bound_new, rows[0].T ** summary["exponent_new"])
    report(10, ok, f"max gap/(err sum)={worst:.3g} scan={seconds:.1f}s slope={summary['slope']:.3f} "
                   f"exponents new={summary['exponent_new']:.5f} old={summary['exponent_old']:.2f}")
    assert ok


def test_criterion_11_expsum_envelope():
    rep = verify.run_suite("expsum-envelope", max_ratio=10.0)
    worst = next(d["max_ratio"] for d in rep.details if "max_ratio" in d)
    report(11, rep.passed, f"expsum-envelope: max ratio={worst:.3f} (limit 10), FD checks within 1e-6, "
                           f"cases={rep.cases}")
    assert rep.passed and worst <= 10


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v", "-s"]))
