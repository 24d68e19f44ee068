"""Empirical Hölder, modulus and Zygmund functionals, with explicit bounds.

Every empirical quantity here is a supremum over finitely many pairs or
points, so it is a lower estimate of the true seminorm.  The analytic bounds
(gluing assembly, auxiliary bounds for g_{a,b}) are upper estimates; a report
passes when the first does not exceed the second.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .intervals import Interval
from .maps import BranchCapError, FiniteMap, IntervalMapSpec
from .reports import SeminormReport, Verdict

DEEP_BLOCK = 40                      # blocks deeper than this are lumped with 0
DEEP = math.ldexp(1.0, -DEEP_BLOCK)
DIVERGENCE_SLOPE = -0.1              # log-log trend of small-scale maxima
SMALL_SCALE = 1e-3                   # trend window: shallow blocks are sampled
TINY_SCALE = 1e-12                   # at every decade in between


# -- moduli of continuity -----------------------------------------------------

@dataclass(frozen=True)
class Modulus:
    """A modulus of continuity omega, vectorized over t >= 0."""

    kind: str
    alpha: float | None = None
    fn: Callable | None = field(default=None, compare=False)
    concave: bool = True
    label: str = ""

    @classmethod
    def power(cls, alpha: float) -> "Modulus":
        if not 0.0 < alpha <= 1.0:
            raise ValueError(f"Hölder exponent must lie in (0, 1], got {alpha!r}")
        return cls("power", float(alpha), label=f"t^{alpha:g}")

    @classmethod
    def tloginv(cls) -> "Modulus":
        """t log(1/t), held at its maximum 1/e beyond t = 1/e so it stays monotone."""
        return cls("tloginv", label="t log(1/t)")

    @classmethod
    def custom(cls, fn: Callable, concave: bool = False, label: str = "custom") -> "Modulus":
        return cls("custom", fn=fn, concave=concave, label=label)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == "power":
            out = t ** self.alpha
        elif self.kind == "tloginv":
            s = np.clip(t, 0.0, 1.0 / math.e)
            with np.errstate(divide="ignore", invalid="ignore"):
                out = np.where(s > 0, -s * np.log(s), 0.0)
        else:
            out = np.asarray(self.fn(t), dtype=float)
        return out if out.ndim else float(out)

    def describe(self) -> dict:
        d = {"kind": self.kind, "label": self.label}
        if self.alpha is not None:
            d["alpha"] = self.alpha
        return d


# -- stratified pairs ------------------------------------------------------------

def _anchors(spec: IntervalMapSpec) -> np.ndarray:
    pts = {math.ldexp(1.0, -n) for n in range(0, DEEP_BLOCK + 1)}
    try:
        pts.update(spec.break_points(DEEP, 1.0, max_pieces=10**5))
    except BranchCapError:
        pass
    return np.array(sorted(pts))


def _block_of(x: np.ndarray) -> np.ndarray:
    m, e = np.frexp(x)
    return np.where(m == 0.5, 2 - e, 1 - e)


def stratified_pairs(spec: IntervalMapSpec, samples: int, seed) -> tuple[np.ndarray, np.ndarray]:
    """Random pairs (x, y) in [0, 1] covering the three kinds of position.

    Half the pairs lie in one block I_n, half of those anchored at a break
    point of the map; 40% straddle blocks (mostly adjacent ones, close to the
    shared endpoint); 10% have one point within 2^-40 of 0.  Pair distances
    are log-uniform so every scale is represented.
    """
    if samples < 1:
        raise ValueError("samples must be positive")
    rng = np.random.default_rng(seed)
    n_in = samples // 2
    n_cross = (samples * 2) // 5
    n_deep = samples - n_in - n_cross

    # within one block; a map with finitely many pieces is one block [0, 1]
    finite = isinstance(spec, FiniteMap)
    n = np.zeros(n_in, dtype=np.int64) if finite else rng.integers(1, DEEP_BLOCK + 1, n_in)
    lo = np.zeros(n_in) if finite else np.ldexp(1.0, -n)
    width = np.ones(n_in) if finite else lo
    x = lo + width * rng.random(n_in)
    anchors = _anchors(spec)
    a_block = np.zeros(len(anchors), dtype=np.int64) if finite else _block_of(anchors)
    order = np.argsort(a_block, kind="stable")
    a_sorted, b_sorted = anchors[order], a_block[order]
    first = np.searchsorted(b_sorted, n, side="left")
    count = np.searchsorted(b_sorted, n, side="right") - first
    use = (rng.random(n_in) < 0.5) & (count > 0)
    pick = first + (rng.random(n_in) * np.maximum(count, 1)).astype(np.int64)
    x = np.where(use, a_sorted[np.minimum(pick, len(a_sorted) - 1)], x)
    d = width * 10.0 ** rng.uniform(-12, 0, n_in)
    y = np.clip(x + np.where(rng.random(n_in) < 0.5, -d, d), lo, lo + width)
    xs, ys = [x], [y]

    # across blocks
    half = n_cross // 2
    m = rng.integers(1, DEEP_BLOCK, half)                 # shared endpoint 2^-m
    e = np.ldexp(1.0, -m)
    xs.append(e - 0.5 * e * 10.0 ** rng.uniform(-12, 0, half))
    ys.append(e + e * 10.0 ** rng.uniform(-12, 0, half))
    rest = n_cross - half
    n1 = rng.integers(1, DEEP_BLOCK + 1, rest)
    n2 = rng.integers(1, DEEP_BLOCK + 1, rest)
    xs.append(np.ldexp(1.0 + rng.random(rest), -n1))
    ys.append(np.ldexp(1.0 + rng.random(rest), -n2))

    # near the accumulation point
    x = np.where(rng.random(n_deep) < 0.5, 0.0, DEEP * rng.random(n_deep))
    xs.append(x)
    ys.append(2.0 ** rng.uniform(-DEEP_BLOCK, 0, n_deep))

    x, y = np.clip(np.concatenate(xs), 0.0, 1.0), np.clip(np.concatenate(ys), 0.0, 1.0)
    keep = x != y
    return x[keep], y[keep]


def _quotients(spec, x, y, omega):
    fx, fy = spec.values(x), spec.values(y)
    d = np.abs(x - y)
    return np.abs(fx - fy) / omega(d), d


def scale_trend(d: np.ndarray, ratios: np.ndarray, max_scale: float = SMALL_SCALE,
                min_scale: float = TINY_SCALE, min_count: int = 20) -> float:
    """Log-log slope of the per-decade maximum quotient at small scales.

    A clearly negative slope means the quotient keeps growing as pairs get
    closer, i.e. the seminorm is infinite.
    """
    sel = (d >= min_scale) & (d <= max_scale) & np.isfinite(ratios) & (ratios > 0)
    if not sel.any():
        return 0.0
    dec = np.floor(np.log10(d[sel])).astype(int)
    r = ratios[sel]
    centers, maxima = [], []
    for k in np.unique(dec):
        mask = dec == k
        if mask.sum() >= min_count:
            centers.append(k + 0.5)
            maxima.append(r[mask].max())
    if len(centers) < 4:
        return 0.0
    return float(np.polyfit(np.array(centers) * math.log(10), np.log(maxima), 1)[0])


# -- bounds ----------------------------------------------------------------------

def gluing_bound(case: str, piece_seminorms: Sequence[float], omega: Modulus,
                 diam: float) -> float:
    """Seminorm bound for a map glued from pieces with the given seminorms.

    Case "i" sums the piece constants (requires a concave modulus); case "ii"
    uses diam/omega(diam) + 2 sup C_k.  A divergent sum gives +inf.
    """
    cs = [float(c) for c in piece_seminorms]
    if not cs:
        raise ValueError("need at least one piece seminorm")
    if case == "i":
        if not omega.concave:
            raise ValueError("case (i) needs a concave modulus")
        return math.fsum(cs) if all(math.isfinite(c) for c in cs) else math.inf
    if case == "ii":
        if diam <= 0:
            raise ValueError("diameter must be positive")
        return diam / omega(diam) + 2.0 * max(cs)
    raise ValueError(f"unknown gluing case {case!r}")


def aux_holder_bound(a: float, alpha: float, b: int) -> float:
    """Explicit C^alpha bound for g_{a,b}; +inf when alpha > a."""
    if not 0.0 < a <= 1.0 or not 0.0 < alpha <= 1.0:
        raise ValueError("need a, alpha in (0, 1]")
    if b < 1 or int(b) != b:
        raise ValueError("b must be a positive integer")
    if alpha > a:
        return math.inf
    e = alpha * (1.0 / a - 1.0) + 1.0
    lead = b ** (alpha + 1.0) * a ** (1.0 - alpha) / (alpha * (1.0 - a) + a)
    return lead * ((1.0 + 1.0 / b) ** e - (1.0 / b) ** e)


def fa_block_holder_constants(a: float, alpha: float, n_start: int = 1, n_max: int | None = None):
    """Per-block constants |I_n|^(1-alpha) C(a, alpha, 2n+1), n = n_start..n_max."""
    if alpha > a:
        return [math.inf]
    if n_max is None:
        n_max = n_start + 400 if alpha < 1 else n_start
    return [2.0 ** (-n * (1.0 - alpha)) * aux_holder_bound(a, alpha, 2 * n + 1)
            for n in range(n_start, n_max + 1)]


def fa_holder_bound(a: float, alpha: float, n_start: int = 1) -> float:
    """Gluing (ii) bound for f_a (or its truncation), assembled from the blocks."""
    if alpha > a:
        return math.inf
    if alpha == 1.0:
        return math.inf  # block constants grow like (2n+1)^2
    cs = fa_block_holder_constants(a, alpha, n_start)
    if n_start > 1:
        cs.append(1.0)  # identity piece
    return gluing_bound("ii", cs, Modulus.power(alpha), 1.0)


def default_holder_bound(spec: IntervalMapSpec, alpha: float):
    p = spec.params
    if spec.name in ("fa", "fa_truncated"):
        return fa_holder_bound(p["a"], alpha, p.get("n_start", 1))
    if spec.name == "gab":
        return aux_holder_bound(p["a"], alpha, p["b"])
    if spec.name == "tent":
        return aux_holder_bound(1.0, alpha, p["b"])
    if spec.name == "power":
        return 1.0 if alpha <= p["a"] else math.inf
    if spec.name == "identity":
        return 1.0
    return None


# -- suprema over pairs -------------------------------------------------------------

def modulus_ratio_sup(spec: IntervalMapSpec, omega: Modulus, samples: int = 100_000, seed=0,
                      pairs=None, bound="auto", tol: float = 1e-9) -> SeminormReport:
    """sup |f(x) - f(y)| / omega(|x - y|) over stratified (or given) pairs."""
    x, y = pairs if pairs is not None else stratified_pairs(spec, samples, seed)
    x, y = np.asarray(x, float), np.asarray(y, float)
    r, d = _quotients(spec, x, y, omega)
    emp = float(r.max()) if r.size else 0.0
    if bound == "auto":
        bound = None
        if spec.name == "fa" and spec.params.get("a") == 1.0 and omega.kind == "tloginv":
            bound = 2.0 / math.log(2.0) + 1.0
    grid = {"pairs": int(x.size), "seed": seed, "modulus": omega.describe(),
            "argmax": [float(x[r.argmax()]), float(y[r.argmax()])] if r.size else None}
    return SeminormReport.judged("modulus_ratio", None, emp, bound, grid, tol)


def holder_seminorm(spec: IntervalMapSpec, alpha: float, samples: int = 200_000, seed=0,
                    pairs=None, bound="auto", tol: float = 1e-9) -> SeminormReport:
    """Empirical alpha-Hölder seminorm, with divergence detection at small scales."""
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"alpha must lie in (0, 1], got {alpha!r}")
    omega = Modulus.power(alpha)
    x, y = pairs if pairs is not None else stratified_pairs(spec, samples, seed)
    x, y = np.asarray(x, float), np.asarray(y, float)
    r, d = _quotients(spec, x, y, omega)
    trend = scale_trend(d, r)
    emp = float(r.max()) if r.size else 0.0
    if bound == "auto":
        bound = default_holder_bound(spec, alpha)
    grid = {"pairs": int(x.size), "seed": seed, "small_scale_slope": trend}
    return SeminormReport.judged("holder", alpha, emp, bound, grid, tol,
                                 diverged=trend < DIVERGENCE_SLOPE)


def difference_map(spec: IntervalMapSpec, other: IntervalMapSpec) -> "DifferenceMap":
    return DifferenceMap(spec, other)


class DifferenceMap:
    """x -> f(x) - g(x), evaluable like a spec (values may leave [0, 1])."""

    def __init__(self, f: IntervalMapSpec, g: IntervalMapSpec):
        self.f, self.g = f, g
        self.name = f"{f.name}-minus-{g.name}"
        self.params = {}

    def values(self, xs):
        return self.f.values(xs) - self.g.values(xs)

    def value(self, x):
        return self.f.value(x) - self.g.value(x)

    def break_points(self, lo=0.0, hi=1.0, max_pieces=10**7):
        return sorted(set(self.f.break_points(lo, hi, max_pieces))
                      | set(self.g.break_points(lo, hi, max_pieces)))


def piece_ratio_sup(spec: IntervalMapSpec, omega: Modulus, region: Interval,
                    samples: int = 20_000, seed=0) -> float:
    """sup of the omega-quotient over pairs inside one region (e.g. a block)."""
    rng = np.random.default_rng(seed)
    lo, hi = region.lo, region.hi
    w = hi - lo
    anchors = np.array([lo, hi] + [t for t in spec.break_points(lo, hi)])
    x = np.where(rng.random(samples) < 0.5, lo + w * rng.random(samples),
                 anchors[rng.integers(0, anchors.size, samples)])
    d = w * 10.0 ** rng.uniform(-12, 0, samples)
    y = np.clip(x + np.where(rng.random(samples) < 0.5, -d, d), lo, hi)
    keep = x != y
    r, _ = _quotients(spec, x[keep], y[keep], omega)
    return float(r.max())


# -- Hölder exponent -------------------------------------------------------------------

def default_scales() -> np.ndarray:
    return np.geomspace(1e-10, 1e-5, 11)


def holder_exponent_estimate(spec: IntervalMapSpec, scales=None, grid: int = 20001) -> float:
    """Least-squares slope of log max_x |f(x+t) - f(x)| against log t."""
    t = default_scales() if scales is None else np.asarray(scales, float)
    if t.size < 8 or t.max() / t.min() < 1e4 * (1 - 1e-9):
        raise ValueError("need at least 8 scales spanning 4 decades")
    base = np.linspace(0.0, 1.0, grid)
    try:
        bp = np.array(spec.break_points(math.ldexp(1.0, -30), 1.0, max_pieces=10**5))
    except BranchCapError:
        bp = np.empty(0)
    m = []
    for s in t:
        x = np.concatenate([base, bp, bp - s, [0.0]])
        x = x[(x >= 0.0) & (x + s <= 1.0)]
        inc = np.abs(spec.values(x + s) - spec.values(x)).max()
        if not inc > 0:
            raise ValueError("degenerate regression: increments vanish (constant map?)")
        m.append(inc)
    return float(np.polyfit(np.log(t), np.log(m), 1)[0])


# -- Zygmund functionals -----------------------------------------------------------------

def zygmund_ratio(spec, x: float, t: float) -> float:
    """|f(x+t) + f(x-t) - 2 f(x)| / t."""
    if not t > 0:
        raise ValueError("t must be positive")
    if x - t < 0.0 or x + t > 1.0:
        raise ValueError(f"x +- t = {x}+-{t} leaves [0, 1]")
    return abs(spec.value(x + t) + spec.value(x - t) - 2.0 * spec.value(x)) / t


@dataclass
class ZygmundProfile:
    points: np.ndarray
    t_grid: np.ndarray
    ratios: np.ndarray            # shape (points, t)
    decays: np.ndarray            # per point verdict
    passed: bool

    def uniform_profile(self) -> np.ndarray:
        """sup over the sampled points at each scale (reported, not judged)."""
        return self.ratios.max(axis=0)

    def to_report(self) -> SeminormReport:
        emp = float(self.ratios[:, -1].max()) if self.ratios.size else 0.0
        grid = {"points": int(self.points.size), "t_grid": [float(v) for v in self.t_grid],
                "failing_points": int((~self.decays).sum()),
                "uniform_profile": [float(v) for v in self.uniform_profile()]}
        return SeminormReport("zygmund", None, emp, None,
                              Verdict.PASS if self.passed else Verdict.FAIL, grid)


def default_t_grid() -> np.ndarray:
    return np.geomspace(1e-3, 1e-6, 7)


def _decays(r: np.ndarray) -> bool:
    if not r.any():
        return True
    if r[0] == 0.0:
        return False
    if np.any(r[1:] > 2.0 * r[:-1]):
        return False
    return bool(r[-1] < 0.05 * r[0])


def little_zygmund_profile(spec: IntervalMapSpec, points, t_grid=None,
                           check_boundaries: bool = True) -> ZygmundProfile:
    """Second-difference ratios at each point over decreasing scales.

    A point passes when the ratio never rises by more than a factor 2 between
    consecutive scales and ends below 5% of its first value.  Ratios below the
    rounding floor of the second difference count as 0.
    """
    t = default_t_grid() if t_grid is None else np.asarray(t_grid, float)
    if t.size < 2 or np.any(np.diff(t) >= 0):
        raise ValueError("t_grid must be strictly decreasing")
    pts = np.asarray(points, float).ravel()
    tmax = t[0]
    if check_boundaries:
        for x in pts:
            if x - tmax < 0 or x + tmax > 1 or spec.piece_index(x - tmax) != spec.piece_index(x + tmax):
                raise ValueError(f"point {x} is within {tmax} of a piece boundary")
    ratios = np.empty((pts.size, t.size))
    eps = np.finfo(float).eps
    for j, s in enumerate(t):
        f0 = spec.values(pts)
        sd = np.abs(spec.values(pts + s) + spec.values(pts - s) - 2.0 * f0) / s
        floor = 64 * eps * np.maximum(np.abs(f0), 1e-300) / s
        ratios[:, j] = np.where(sd <= floor, 0.0, sd)
    decays = np.array([_decays(row) for row in ratios], dtype=bool)
    return ZygmundProfile(pts, t, ratios, decays, bool(decays.all()))


def interior_points(spec: IntervalMapSpec, count: int, margin: float, seed=0,
                    lo: float | None = None, max_tries: int = 10**6) -> np.ndarray:
    """Random points at distance > margin from every piece boundary."""
    rng = np.random.default_rng(seed)
    lo = margin if lo is None else max(lo, margin)
    out = []
    tries = 0
    while len(out) < count:
        tries += 1
        if tries > max_tries:
            raise RuntimeError("could not find enough interior points")
        x = lo + (1.0 - 2 * margin - lo) * rng.random()
        x0, x1 = x - margin * 1.0001, x + margin * 1.0001
        if x0 > 0 and x1 < 1 and spec.piece_index(x0) == spec.piece_index(x1):
            out.append(x)
    return np.array(out)


def turning_points_of_block(spec: IntervalMapSpec, n: int) -> list[float]:
    lo = math.ldexp(1.0, -n)
    piece = spec.piece(spec.piece_index(1.5 * lo))
    return piece.turning_points()


__all__ = [
    "Modulus", "stratified_pairs", "scale_trend", "gluing_bound", "aux_holder_bound",
    "fa_block_holder_constants", "fa_holder_bound", "default_holder_bound",
    "modulus_ratio_sup", "holder_seminorm", "difference_map", "DifferenceMap",
    "piece_ratio_sup", "holder_exponent_estimate", "zygmund_ratio", "ZygmundProfile",
    "little_zygmund_profile", "interior_points", "turning_points_of_block",
]
