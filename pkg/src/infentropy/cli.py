"""Command-line front end: sample graphs, run verification suites, sweep entropy.

Exit codes: 0 pass, 1 verification failure, 2 resource limit (partial
output written), 3 usage error.
"""
from __future__ import annotations

import argparse
import io
import json
import math
import sys
from dataclasses import dataclass, field

import numpy as np

from .entropy import (count_branched_horseshoe, entropy_lower_bound, expansivity_probe,
                      lap_growth_estimate, running_sup)
from .intervals import Interval
from .maps import BranchCapError, make_f, make_power_conj_tent, make_tent
from .measure import (Density, conjugacy_residual, invariance_check, lebesgue,
                      pullback_measure)
from .regularity import (Modulus, holder_seminorm, interior_points, little_zygmund_profile,
                         modulus_ratio_sup)
from .reports import CheckReport
from .sobolev import sobolev_seminorm_f1_series, sobolev_seminorm_quadrature
from .zygmund import make_zygmund_map

EXIT_PASS, EXIT_FAIL, EXIT_RESOURCE, EXIT_USAGE = 0, 1, 2, 3
FAMILIES = ("tent", "gab", "fa", "zygmund")
SUITES = ("regularity", "entropy", "measure", "all")


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    family: str
    a: float | None = None
    b: int | None = None
    nmax: int = 8
    seed: int = 0
    samples: int = 20_000
    out: str | None = None
    format: str = "csv"
    suite: str = "all"
    p: list[float] = field(default_factory=list)

    def validate(self):
        if self.family not in FAMILIES:
            raise UsageError(f"unknown family {self.family!r}")
        if self.family in ("gab", "fa"):
            if self.a is None or not 0.0 < self.a <= 1.0:
                raise UsageError(f"--a must lie in (0, 1] for {self.family}")
        if self.family in ("tent", "gab"):
            if self.b is None or self.b < 1:
                raise UsageError(f"--b must be a positive integer for {self.family}")
        if self.nmax < 1:
            raise UsageError("--nmax must be positive")
        if self.samples < 2:
            raise UsageError("--samples must be at least 2")
        if any(p < 1 for p in self.p):
            raise UsageError("--p values must be >= 1")
        return self

    def params(self) -> dict:
        out = {}
        if self.family in ("gab", "fa"):
            out["a"] = float(self.a)
        if self.family in ("tent", "gab"):
            out["b"] = int(self.b)
        if self.family in ("fa", "zygmund"):
            out["nmax"] = int(self.nmax)
        return out


def build_map(cfg: RunConfig):
    if cfg.family == "tent":
        return make_tent(cfg.b)
    if cfg.family == "gab":
        return make_power_conj_tent(cfg.a, cfg.b)
    if cfg.family == "fa":
        return make_f(cfg.a)
    spec, _ = make_zygmund_map(max(cfg.nmax, 16))
    return spec


def fmt(x: float) -> str:
    return format(float(x), ".17g")


# -- sample-graph -------------------------------------------------------------

def graph_points(cfg: RunConfig) -> tuple[np.ndarray, np.ndarray]:
    spec = build_map(cfg)
    xs = [np.linspace(0.0, 1.0, cfg.samples)]
    lo = 0.0
    if cfg.family in ("fa", "zygmund"):
        # pieces accumulate at 0: stop at depth nmax
        lo = math.ldexp(1.0, -cfg.nmax)
        xs.append(np.ldexp(1.0, -np.arange(0, cfg.nmax + 1)))
    xs.append(np.array(spec.break_points(lo, 1.0)))
    x = np.unique(np.concatenate(xs))
    return x, spec.values(x)


def render_csv(x, y) -> str:
    buf = io.StringIO()
    buf.write("x,fx\n")
    for u, v in zip(x, y):
        buf.write(f"{fmt(u)},{fmt(v)}\n")
    return buf.getvalue()


def render_svg(x, y, size: int = 512) -> str:
    pts = " ".join(f"{u * size:.6f},{(1.0 - v) * size:.6f}" for u, v in zip(x, y))
    return (f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {size} {size}" '
            f'width="{size}" height="{size}">\n'
            f'<rect x="0" y="0" width="{size}" height="{size}" fill="none" stroke="#888"/>\n'
            f'<polyline fill="none" stroke="#000" stroke-width="0.5" points="{pts}"/>\n'
            "</svg>\n")


def cmd_sample_graph(cfg: RunConfig) -> int:
    x, y = graph_points(cfg)
    if cfg.format == "svg":
        text = render_svg(x, y)
    elif cfg.format == "json":
        text = json.dumps({"x": x.tolist(), "fx": y.tolist()}) + "\n"
    else:
        text = render_csv(x, y)
    _emit(text, cfg.out)
    return EXIT_PASS


# -- verify ------------------------------------------------------------------------

def _entry(suite, report, expected: str) -> dict:
    d = report.to_dict()
    if "verdict" in d:
        ok = d["verdict"] == expected
    else:
        ok = expected == "pass"
    d.update(suite=suite, expected=expected, ok=ok)
    return d


def _check(suite, name, value, threshold, passed, expected="pass", **detail) -> dict:
    return _entry(suite, CheckReport(name, value, threshold, bool(passed), detail), expected)


def _count_entries(suite, spec, regions, ks, want) -> list[dict]:
    out = []
    reps = entropy_lower_bound(spec, regions, ks)
    for rep, w, best in zip(reps, want, running_sup(reps)):
        d = _entry(suite, rep, "pass")
        d["ok"] = rep.raw_counts[0] == w
        d["expected_count"] = w
        d["running_sup"] = best
        out.append(d)
    return out


def _expect_sobolev(a, p):
    return "diverged" if a < 1.0 and p * (1.0 - a) >= 1.0 else "pass"


def suite_fa(cfg, spec, suites) -> list[dict]:
    a = cfg.a
    out = []
    if "regularity" in suites:
        if a == 1.0:
            out.append(_entry("regularity", modulus_ratio_sup(spec, Modulus.tloginv(), cfg.samples,
                                                              cfg.seed), "pass"))
            out.append(_entry("regularity", holder_seminorm(spec, 0.5, cfg.samples, cfg.seed), "pass"))
        else:
            out.append(_entry("regularity", holder_seminorm(spec, a, cfg.samples, cfg.seed), "pass"))
            if a <= 0.8:
                out.append(_entry("regularity", holder_seminorm(spec, a + 0.2, cfg.samples, cfg.seed),
                                  "diverged"))
        for p in cfg.p or [1.0]:
            rep = sobolev_seminorm_quadrature(spec, p)
            out.append(_entry("regularity", rep, _expect_sobolev(a, p)))
            if a == 1.0:
                series = sobolev_seminorm_f1_series(p)
                out.append(_check("regularity", f"sobolev_series_p{p:g}", abs(series - rep.empirical),
                                  1e-6, abs(series - rep.empirical) <= 1e-6, series=series))
    if "entropy" in suites:
        regions = [Interval.dyadic(n).closure() for n in range(1, cfg.nmax + 1)]
        out += _count_entries("entropy", spec, regions, 1, [2 * n + 1 for n in range(1, cfg.nmax + 1)])
        probes = [expansivity_probe(spec, 2.0 ** -j) for j in range(1, 11)]
        out.append(_check("entropy", "expansivity_probe_increasing", probes[-1], None,
                          all(u < v for u, v in zip(probes, probes[1:])), values=probes))
    if "measure" in suites:
        trials = 200
        if a == 1.0:
            v = invariance_check(spec, lebesgue(), trials, cfg.seed, tol=1e-12)
            out.append(_check("measure", "lebesgue_invariance", v.max_discrepancy, v.tol, v.passed))
        else:
            v = invariance_check(spec, lebesgue(), trials, cfg.seed)
            out.append(_check("measure", "lebesgue_invariance", v.max_discrepancy, v.tol, v.passed,
                              expected="fail"))
            v = invariance_check(spec, pullback_measure(a), trials, cfg.seed)
            out.append(_check("measure", "pullback_invariance", v.max_discrepancy, v.tol, v.passed))
        r = conjugacy_residual(a, cfg.samples, cfg.seed)
        out.append(_check("measure", "conjugacy_residual", r, 1e-9, r <= 1e-9))
    return out


def suite_gab(cfg, spec, suites, a) -> list[dict]:
    b = cfg.b
    out = []
    if "regularity" in suites:
        out.append(_entry("regularity", holder_seminorm(spec, a, cfg.samples, cfg.seed), "pass"))
        if a <= 0.8:
            out.append(_entry("regularity", holder_seminorm(spec, a + 0.2, cfg.samples, cfg.seed),
                              "diverged"))
        for p in cfg.p or [1.0]:
            out.append(_entry("regularity", sobolev_seminorm_quadrature(spec, p),
                              _expect_sobolev(a, p)))
    if "entropy" in suites:
        whole = Interval(0.0, 1.0)
        out += _count_entries("entropy", spec, [whole], 1, [b])
        rep = lap_growth_estimate(spec, whole, 4)
        d = _entry("entropy", rep, "pass")
        d["ok"] = abs(rep.lower_bound_nats - math.log(b)) <= 0.01 * max(math.log(b), 1e-300) \
            or (b == 1 and rep.lower_bound_nats == 0.0)
        out.append(d)
    if "measure" in suites:
        if a == 1.0:
            v = invariance_check(spec, lebesgue(), 200, cfg.seed, tol=1e-12, within=Interval(0.0, 1.0))
            out.append(_check("measure", "lebesgue_invariance", v.max_discrepancy, v.tol, v.passed))
        else:
            power = Density(lambda x: x ** (1 / a - 1) / a, lambda x: x ** (1 / a), "power_pullback")
            v = invariance_check(spec, power, 200, cfg.seed, within=Interval(0.0, 1.0))
            out.append(_check("measure", "pullback_invariance", v.max_discrepancy, v.tol, v.passed))
    return out


def suite_zygmund(cfg, spec, suites) -> list[dict]:
    c = spec.construction(max(cfg.nmax, 12))
    out = []
    if "regularity" in suites:
        n12 = range(1, 13)
        dx = max(abs(c.x[n - 1] - (1.0 - 0.5 * math.exp(-n))) for n in n12)
        out.append(_check("regularity", "critical_points", dx, 1e-10, dx <= 1e-10))
        ds = max(abs(c.slope_ratio(n) - n) for n in n12)
        out.append(_check("regularity", "slope_ratio", ds, 1e-9, ds <= 1e-9))
        dj = max(spec.junction_residuals(12))
        out.append(_check("regularity", "junction_continuity", dj, 1e-12, dj <= 1e-12))
        out.append(_check("regularity", "K_empirical", c.K_empirical, None,
                          math.isfinite(c.K_empirical)))
        pts = interior_points(spec, 100, 1e-3, cfg.seed)
        prof = little_zygmund_profile(spec, pts)
        out.append(_entry("regularity", prof.to_report(), "pass"))
    if "entropy" in suites:
        regions = [c.I[n - 1] for n in range(1, cfg.nmax + 1)]
        out += _count_entries("entropy", spec, regions, 2, [2 * n for n in range(1, cfg.nmax + 1)])
    return out


def run_suites(cfg: RunConfig) -> list[dict]:
    spec = build_map(cfg)
    suites = {"regularity", "entropy", "measure"} if cfg.suite == "all" else {cfg.suite}
    if cfg.family == "fa":
        return suite_fa(cfg, spec, suites)
    if cfg.family == "gab":
        return suite_gab(cfg, spec, suites, cfg.a)
    if cfg.family == "tent":
        return suite_gab(cfg, spec, suites, 1.0)
    return suite_zygmund(cfg, spec, suites)


def build_report(cfg: RunConfig) -> tuple[dict, int]:
    try:
        entries = run_suites(cfg)
        code = None
    except (BranchCapError, MemoryError) as exc:
        entries = [_check("entropy", "resource_limit", math.nan, None, False, message=str(exc))]
        code = EXIT_RESOURCE
    overall = "pass" if entries and all(e["ok"] for e in entries) else "fail"
    doc = {"family": cfg.family, "params": cfg.params(), "reports": entries, "overall": overall}
    if code is None:
        code = EXIT_PASS if overall == "pass" else EXIT_FAIL
    return doc, code


def cmd_verify(cfg: RunConfig) -> int:
    doc, code = build_report(cfg)
    _emit(json.dumps(doc, indent=2, allow_nan=False) + "\n", cfg.out)
    return code


# -- entropy-sweep ---------------------------------------------------------------------

def sweep_rows(cfg: RunConfig) -> list[tuple]:
    spec = build_map(cfg)
    if cfg.family == "fa":
        regions = [(n, Interval.dyadic(n).closure()) for n in range(1, cfg.nmax + 1)]
        k = 1
    elif cfg.family == "zygmund":
        c = spec.construction(max(cfg.nmax, 1))
        regions = [(n, c.I[n - 1]) for n in range(1, cfg.nmax + 1)]
        k = 2
    else:
        regions = [(1, Interval(0.0, 1.0))]
        k = 1
    rows, best = [], 0.0
    for n, region in regions:
        s = count_branched_horseshoe(spec, region, k)
        best = max(best, math.log(s) / k if s else 0.0)
        rows.append((n, region.lo, region.hi, s, best))
    return rows


def cmd_entropy_sweep(cfg: RunConfig) -> int:
    buf = io.StringIO()
    buf.write("n,region_lo,region_hi,branches,lower_bound_nats\n")
    try:
        rows = sweep_rows(cfg)
        code = EXIT_PASS
    except BranchCapError:
        rows, code = [], EXIT_RESOURCE
    for n, lo, hi, s, h in rows:
        buf.write(f"{n},{fmt(lo)},{fmt(hi)},{s},{fmt(h)}\n")
    _emit(buf.getvalue(), cfg.out)
    return code


# -- plumbing ------------------------------------------------------------------------

def _emit(text: str, path: str | None):
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc}") from exc


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--family", choices=FAMILIES, required=True)
    common.add_argument("--a", type=float, help="order of the power singularity, in (0, 1]")
    common.add_argument("--b", type=int, help="number of tent branches")
    common.add_argument("--nmax", type=int, default=8, help="deepest block or interval index")
    common.add_argument("--samples", type=int, default=20_000)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", default=None, help="output path (default stdout)")

    parser = _Parser(prog="infentropy", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    g = sub.add_parser("sample-graph", parents=[common], help="sample the graph of a map")
    g.add_argument("--format", choices=("csv", "json", "svg"), default="csv")
    v = sub.add_parser("verify", parents=[common], help="run the verification suites")
    v.add_argument("--suite", choices=SUITES, default="all")
    v.add_argument("--p", type=float, action="append", default=[],
                   help="Sobolev exponent (repeatable)")
    v.add_argument("--format", choices=("json",), default="json")
    s = sub.add_parser("entropy-sweep", parents=[common], help="branch-count entropy bounds")
    s.add_argument("--format", choices=("csv",), default="csv")
    return parser


COMMANDS = {"sample-graph": cmd_sample_graph, "verify": cmd_verify,
            "entropy-sweep": cmd_entropy_sweep}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        # --help exits 0, parse errors exit with EXIT_USAGE
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    cfg = RunConfig(command=args.command, family=args.family, a=args.a, b=args.b,
                    nmax=args.nmax, seed=args.seed, samples=args.samples, out=args.out,
                    format=args.format, suite=getattr(args, "suite", "all"),
                    p=list(getattr(args, "p", [])))
    try:
        cfg.validate()
        return COMMANDS[cfg.command](cfg)
    except UsageError as exc:
        print(f"infentropy: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
