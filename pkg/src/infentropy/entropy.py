"""Entropy lower bounds: horseshoe branch counts, lap growth, Bowen spans."""
from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from .intervals import Interval
from .laps import DEFAULT_CAP, branch_decomposition, iterate_laps
from .maps import BranchCapError, IntervalMapSpec
from .reports import EntropyReport


def _slack(region: Interval) -> float:
    return min(1e-12, 1e-6 * region.length)


def count_branched_horseshoe(spec: IntervalMapSpec, J: Interval, k: int = 1,
                             cap: int = DEFAULT_CAP) -> int:
    """Number of maximal monotone laps of spec^k on J whose image covers J."""
    if int(k) != k or k < 1:
        raise ValueError("k must be a positive integer")
    laps = branch_decomposition(spec, J, int(k), cap)
    s = _slack(J) + 4 * math.ulp(max(abs(J.lo), abs(J.hi)))
    return sum(1 for lap in laps if lap.image[0] <= J.lo + s and lap.image[1] >= J.hi - s)


def entropy_lower_bound(spec: IntervalMapSpec, regions: Sequence[Interval],
                        k_per_region: int | Sequence[int] = 1,
                        cap: int = DEFAULT_CAP) -> list[EntropyReport]:
    """Per region (1/k) log(branch count); the last report carries the running sup."""
    ks = [k_per_region] * len(regions) if isinstance(k_per_region, int) else list(k_per_region)
    if len(ks) != len(regions):
        raise ValueError("one iterate order per region")
    out = []
    for region, k in zip(regions, ks):
        s = count_branched_horseshoe(spec, region, k, cap)
        h = math.log(s) / k if s > 0 else 0.0
        out.append(EntropyReport((region.lo, region.hi), "BranchCount", k, h, [s]))
    return out


def running_sup(reports: Sequence[EntropyReport]) -> list[float]:
    best, out = 0.0, []
    for r in reports:
        best = max(best, r.lower_bound_nats)
        out.append(best)
    return out


def lap_growth_estimate(spec: IntervalMapSpec, region: Interval, k_max: int,
                        cap: int = DEFAULT_CAP) -> EntropyReport:
    """Least-squares slope of log(lap count of spec^k) against k = 1..k_max.

    If the lap count exceeds ``cap`` before k_max, the slope is fitted on the
    levels reached and the report is flagged partial.
    """
    if k_max < 1:
        raise ValueError("k_max must be positive")
    counts = []
    partial = False
    try:
        for laps in iterate_laps(spec, region, k_max, cap):
            counts.append(len(laps))
    except BranchCapError:
        partial = True
    if not counts:
        raise BranchCapError(f"no complete level below cap {cap}")
    if len(counts) == 1:
        slope = math.log(counts[0])
    else:
        ks = np.arange(1, len(counts) + 1)
        slope = float(np.polyfit(ks, np.log(counts), 1)[0])
    return EntropyReport((region.lo, region.hi), "LapGrowth", len(counts), max(slope, 0.0),
                         counts, partial=partial)


# -- Bowen (n, delta)-spanning sets --------------------------------------------

def _orbits(spec: IntervalMapSpec, K: Interval, n: int, grid: int) -> np.ndarray:
    x = np.linspace(K.lo, K.hi, grid)
    orb = np.empty((n, grid))
    orb[0] = x
    for j in range(1, n):
        orb[j] = spec.values(orb[j - 1])
    return orb


def _greedy_cover(orb: np.ndarray, delta: float) -> int:
    """Centers picked left to right, each covering the run of points within delta."""
    size = orb.shape[1]
    i, count = 0, 0
    while i < size:
        count += 1
        c = orb[:, i:i + 1]
        j, w = i + 1, 64
        while j < size:
            block = orb[:, j:j + w]
            far = (np.abs(block - c) >= delta).any(axis=0)
            if far.any():
                j += int(far.argmax())
                break
            j += block.shape[1]
            w *= 2
        i = j
    return count


def _check_resolution(K: Interval, delta: float, grid: int):
    if grid < 2 or not delta > 0:
        raise ValueError("need grid >= 2 and delta > 0")
    if K.length / (grid - 1) >= delta / 4:
        raise ValueError(f"grid spacing {K.length / (grid - 1):.3g} is not below delta/4")


def bowen_spanning_estimate(spec: IntervalMapSpec, K: Interval, n: int, delta: float,
                            grid: int = 100_001) -> int:
    """Greedy cover size of K by (n, delta) Bowen balls centred on grid points."""
    if n < 1:
        raise ValueError("n must be positive")
    _check_resolution(K, delta, grid)
    return _greedy_cover(_orbits(spec, K, n, grid), delta)


def bowen_growth_estimate(spec: IntervalMapSpec, K: Interval, ns: Sequence[int], delta: float,
                          grid: int = 100_001) -> EntropyReport:
    """Slope of log(cover size) against n, from one set of orbits."""
    ns = sorted(int(v) for v in ns)
    if len(ns) < 2 or ns[0] < 1:
        raise ValueError("need at least two positive horizons")
    _check_resolution(K, delta, grid)
    orb = _orbits(spec, K, ns[-1], grid)
    counts = [_greedy_cover(orb[:n], delta) for n in ns]
    slope = float(np.polyfit(ns, np.log(counts), 1)[0])
    return EntropyReport((K.lo, K.hi), "BowenSpanning", ns[-1], max(slope, 0.0), counts, delta)


# -- expansivity --------------------------------------------------------------------

def probe_block(epsilon: float) -> int:
    """Smallest n with 2^-n < epsilon."""
    m, e = math.frexp(epsilon)
    return 2 - e if m == 0.5 else 1 - e


def expansivity_probe(spec: IntervalMapSpec, epsilon: float) -> float:
    """log of the branch count on the first block of diameter below epsilon.

    I_n has diameter 2^-n, so any epsilon-ball around a point of I_n contains
    it; the horseshoe there bounds h*(epsilon) from below.
    """
    if not 0.0 < epsilon <= 0.5:
        raise ValueError("epsilon must lie in (0, 1/2]")
    if spec.name not in ("fa", "fa_truncated"):
        raise ValueError("the expansivity probe is defined for the f_a family")
    n = probe_block(epsilon)
    return math.log(count_branched_horseshoe(spec, Interval.dyadic(n).closure(), 1))


__all__ = [
    "count_branched_horseshoe", "entropy_lower_bound", "running_sup", "lap_growth_estimate",
    "bowen_spanning_estimate", "bowen_growth_estimate", "probe_block", "expansivity_probe",
]
