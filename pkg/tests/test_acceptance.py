"""Acceptance criteria 1-10, each at its stated tolerance and runtime budget.

Every criterion prints one ``criterion N: PASS|FAIL`` line.  Run directly with
``python3 tests/test_acceptance.py`` or as part of the pytest session.
"""
import io
import json
import math
import time
from contextlib import redirect_stdout

import jsonschema
import numpy as np
import pytest

from infentropy import cli
from infentropy.entropy import (bowen_growth_estimate, count_branched_horseshoe,
                                entropy_lower_bound, lap_growth_estimate)
from infentropy.intervals import Interval
from infentropy.maps import make_f, make_identity, make_tent, make_truncated_f
from infentropy.measure import conjugacy_residual, invariance_check, lebesgue, pullback_measure
from infentropy.regularity import (Modulus, difference_map, fa_holder_bound,
                                   holder_exponent_estimate, holder_seminorm, interior_points,
                                   little_zygmund_profile, modulus_ratio_sup,
                                   turning_points_of_block)
from infentropy.reports import REPORT_SCHEMA, Verdict
from infentropy.sobolev import (fa_sobolev_bound, sobolev_seminorm_f1_series,
                                sobolev_seminorm_quadrature)
from infentropy.zygmund import make_zygmund_map

UNIT = Interval(0.0, 1.0)


def block(n):
    return Interval.dyadic(n).closure()


@pytest.fixture
def criterion(capsys):
    """Collects named checks; prints the verdict line and fails on any miss."""
    class Run:
        def __init__(self):
            self.checks = []
            self.start = time.perf_counter()

        def check(self, name, ok, detail=""):
            self.checks.append((name, bool(ok), detail))

        def finish(self, number, budget):
            elapsed = time.perf_counter() - self.start
            self.check("runtime", elapsed < budget, f"{elapsed:.2f}s < {budget}s")
            failed = [c for c in self.checks if not c[1]]
            with capsys.disabled():
                status = "PASS" if not failed else "FAIL"
                print(f"\ncriterion {number}: {status} ({elapsed:.2f}s)"
                      + "".join(f"\n    {n}: {d}" for n, _, d in failed))
            assert not failed, failed
    return Run()


def test_criterion_01_branch_counts(criterion):
    for a in (0.5, 1.0):
        f = make_f(a)
        got = [count_branched_horseshoe(f, block(n), 1) for n in range(1, 9)]
        criterion.check(f"f_{a}", got == [2 * n + 1 for n in range(1, 9)], got)
    z, c = make_zygmund_map(16)
    got = [count_branched_horseshoe(z, c.I[n - 1], 2) for n in range(1, 9)]
    criterion.check("zygmund f^2", got == [2 * n for n in range(1, 9)], got)
    criterion.finish(1, 5)


def test_criterion_02_entropy_growth(criterion):
    f1 = make_f(1.0)
    reps = entropy_lower_bound(f1, [block(n) for n in range(1, 9)], 1)
    got = [r.lower_bound_nats for r in reps]
    want = [math.log(2 * n + 1) for n in range(1, 9)]
    criterion.check("lower bounds", got == want, got)
    tent = make_tent(3)
    lap = lap_growth_estimate(tent, UNIT, 6).lower_bound_nats
    criterion.check("lap growth", abs(lap / math.log(3) - 1) <= 0.01, lap)
    bowen = bowen_growth_estimate(tent, UNIT, range(1, 9), 0.01, 1_000_001).lower_bound_nats
    criterion.check("bowen", abs(bowen / math.log(3) - 1) <= 0.15, bowen)
    criterion.finish(2, 60)


def test_criterion_03_sobolev(criterion):
    for p, want in ((1, 5.0), (2, 33.0)):
        s = sobolev_seminorm_f1_series(p, 1e-12)
        criterion.check(f"series p={p}", abs(s - want) < 1e-12, s)
        q = sobolev_seminorm_quadrature(make_f(1.0), p).empirical
        criterion.check(f"quadrature p={p}", abs(q - s) <= 1e-6, q)
    f_half = make_f(0.5)
    r2 = sobolev_seminorm_quadrature(f_half, 2.0)
    criterion.check("f_0.5 p=2 diverged", r2.verdict is Verdict.DIVERGED, r2.verdict)
    r15 = sobolev_seminorm_quadrature(f_half, 1.5)
    bound = fa_sobolev_bound(0.5, 1.5)
    criterion.check("f_0.5 p=1.5 bounded", math.isfinite(r15.empirical) and r15.empirical <= bound,
                    (r15.empirical, bound))
    criterion.finish(3, 30)


def test_criterion_04_modulus(criterion):
    r = modulus_ratio_sup(make_f(1.0), Modulus.tloginv(), 10**6, 0)
    limit = 2 / math.log(2) + 1
    criterion.check("upper", r.empirical <= limit, (r.empirical, limit))
    criterion.check("non-degenerate", r.empirical >= 1.0, r.empirical)
    criterion.finish(4, 30)


def test_criterion_05_holder(criterion):
    for a in (0.3, 0.5, 0.8):
        f = make_f(a)
        est = holder_exponent_estimate(f)
        criterion.check(f"exponent a={a}", abs(est - a) <= 0.05, est)
        at = holder_seminorm(f, a, 200_000, 0)
        bound = fa_holder_bound(a, a)
        criterion.check(f"seminorm a={a}", math.isfinite(at.empirical) and at.empirical <= bound,
                        (at.empirical, bound))
        above = holder_seminorm(f, a + 0.2, 200_000, 0)
        criterion.check(f"divergence a={a}", above.verdict is Verdict.DIVERGED, above.grid)
    criterion.finish(5, 60)


def test_criterion_06_measure(criterion):
    f1, f_half = make_f(1.0), make_f(0.5)
    criterion.check("f_1 lebesgue", invariance_check(f1, lebesgue(), 200, 0, tol=1e-12).passed)
    criterion.check("f_0.5 lebesgue fails", not invariance_check(f_half, lebesgue(), 200, 0).passed)
    criterion.check("f_0.5 pullback",
                    invariance_check(f_half, pullback_measure(0.5), 200, 0, tol=1e-8).passed)
    criterion.finish(6, 30)


def test_criterion_07_conjugacy(criterion):
    for a in (0.25, 0.5, 0.75, 1.0):
        r = conjugacy_residual(a, 10**5, 0)
        criterion.check(f"a={a}", r <= 1e-9, r)
    criterion.finish(7, 10)


def test_criterion_08_zygmund(criterion):
    z, c = make_zygmund_map(16)
    dx = max(abs(c.x[n - 1] - (1 - 0.5 * math.exp(-n))) for n in range(1, 13))
    criterion.check("critical points", dx <= 1e-10, dx)
    ds = max(abs(c.slope_ratio(n) - n) for n in range(1, 13))
    criterion.check("slope ratios", ds <= 1e-9, ds)
    dj = max(z.junction_residuals(12))
    criterion.check("junctions", dj <= 1e-12, dj)
    criterion.check("K_empirical", math.isfinite(c.K_empirical), c.K_empirical)
    prof = little_zygmund_profile(z, interior_points(z, 100, 1e-3, seed=0))
    criterion.check("little-Zygmund decay", prof.passed, prof.decays)
    f1 = make_f(1.0)
    bad = little_zygmund_profile(f1, turning_points_of_block(f1, 1))
    criterion.check("f_1 turning points fail", not bad.passed)
    criterion.finish(8, 60)


def truncation_sup(n_start):
    """Sampled sup |f_{1,n} - id| over the first few truncated blocks."""
    f = make_truncated_f(1.0, n_start)
    lo = math.ldexp(1.0, -(n_start + 6))
    x = np.unique(np.concatenate([np.linspace(lo, 1.0, 200_001),
                                  np.array(f.break_points(lo, 1.0))]))
    return float(np.max(np.abs(f.values(x) - x)))


def test_criterion_09_truncation(criterion):
    ns = range(2, 11)
    sups = [truncation_sup(n) for n in ns]
    for n, s in zip(ns, sups):
        criterion.check(f"sup n={n} <= bound", s <= 2.0 ** (-n + 1), s)
        exact = 2.0 ** -n * 2 * n / (2 * n + 1)
        criterion.check(f"sup n={n} exact", abs(s - exact) <= 1e-15, (s, exact))
    ratios = [v / u for u, v in zip(sups, sups[1:])]
    criterion.check("halving", all(0.5 <= r <= 0.55 for r in ratios), ratios)
    ident = make_identity()
    holder = [holder_seminorm(difference_map(make_truncated_f(1.0, n), ident), 0.5, 50_000, 0).empirical
              for n in ns]
    criterion.check("C^0.5 decreasing", all(u > v for u, v in zip(holder, holder[1:])), holder)
    sob = [sobolev_seminorm_quadrature(make_truncated_f(0.5, n), 1.5, subtract_identity=True).empirical
           for n in ns]
    criterion.check("W^1,1.5 decreasing", all(u > v for u, v in zip(sob, sob[1:])), sob)
    criterion.finish(9, 30)


def _run_cli(argv):
    buf = io.StringIO()
    with redirect_stdout(buf):
        code = cli.main(argv)
    return code, buf.getvalue()


def test_criterion_10_cli(criterion):
    families = [["--family", "fa", "--a", "1"], ["--family", "fa", "--a", "0.5"],
                ["--family", "tent", "--b", "3"], ["--family", "gab", "--a", "0.5", "--b", "4"],
                ["--family", "zygmund"]]
    for fam in families:
        code, out = _run_cli(["verify", *fam, "--samples", "20000"])
        try:
            jsonschema.validate(json.loads(out), REPORT_SCHEMA)
            valid = True
        except (ValueError, jsonschema.ValidationError):
            valid = False
        criterion.check(f"verify {' '.join(fam)}", code == 0 and valid, code)
    for fam in families:
        code, out = _run_cli(["sample-graph", *fam, "--samples", "2049"])
        rows = np.array([[float(v) for v in line.split(",")] for line in out.splitlines()[1:]])
        inside = code == 0 and rows.min() >= 0.0 and rows.max() <= 1.0
        criterion.check(f"graph in square {' '.join(fam)}", inside)
        if fam[1] == "fa":
            x, y = rows[:, 0], rows[:, 1]
            dyadic = (x > 0) & (np.frexp(x)[0] == 0.5)
            criterion.check(f"dyadics fixed {' '.join(fam)}",
                            dyadic.sum() >= 10 and np.array_equal(x[dyadic], y[dyadic]))
    criterion.finish(10, 30)


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
