"""Invariant measures: preimage masses, pullback densities, conjugacy residuals."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate

from .intervals import Interval
from .laps import Branch, monotone_branches
from .maps import IntervalMapSpec, dyadic_index, make_f, make_psi

DEEP = math.ldexp(1.0, -40)
TARGET_MAX_BLOCK = 12


@dataclass(frozen=True)
class Density:
    """A probability density on [0, 1], with its distribution function when known."""

    pdf: Callable[[float], float]
    cdf: Callable[[float], float] | None = None
    name: str = "density"

    def mass(self, lo: float, hi: float) -> float:
        if hi <= lo:
            return 0.0
        if self.cdf is not None:
            return self.cdf(hi) - self.cdf(lo)
        return integrate.quad(self.pdf, lo, hi, epsabs=0.0, epsrel=1e-13, limit=200)[0]


def lebesgue() -> Density:
    return Density(lambda x: 1.0, lambda x: x, "lebesgue")


def pullback_density(a: float, x: float) -> float | None:
    """Density at x of the f_a-invariant pullback of Lebesgue measure.

    The conjugacy straightening f_a to f_1 is the blockwise power map with
    exponent 1/a; its derivative in the chart of I_n is (1/a) u^(1/a - 1).
    Returns None at block endpoints and at 0, where it is undefined.
    """
    if not 0.0 < a <= 1.0:
        raise ValueError("a must lie in (0, 1]")
    if not 0.0 <= x <= 1.0:
        raise ValueError("x outside [0, 1]")
    if x == 0.0 or math.frexp(x)[0] == 0.5:
        return None
    if a == 1.0:
        return 1.0
    n = dyadic_index(x)
    u = math.ldexp(x, n) - 1.0
    return (1.0 / a) * u ** (1.0 / a - 1.0)


def pullback_measure(a: float) -> Density:
    """The invariant measure of f_a, with distribution function psi_a^-1."""
    _, psi_inv = make_psi(a)

    def pdf(x):
        v = pullback_density(a, x)
        return 0.0 if v is None else v
    return Density(pdf, psi_inv.value, f"pullback_{a:g}")


def _preimage_from_branches(branches: list[Branch], target: Interval, density: Density) -> float:
    c, d = target.lo, target.hi
    parts = []
    for br in branches:
        m, M = br.image
        lo, hi = max(c, m), min(d, M)
        if not lo < hi:
            continue
        x0, x1 = br.invert(lo), br.invert(hi)
        parts.append(density.mass(min(x0, x1), max(x0, x1)))
    return math.fsum(parts)


def preimage_measure(spec: IntervalMapSpec, target: Interval, within: Interval,
                     density: Density | None = None) -> float:
    """Mass of f^-1(target) inside `within`, summed over monotone branches."""
    if not within.contains_interval(target, slack=1e-15):
        raise ValueError("target must lie inside the search region")
    branches = monotone_branches(spec, within.lo, within.hi)
    return _preimage_from_branches(branches, target, density or lebesgue())


def conjugacy_residual(a: float, samples: int = 100_000, seed=0) -> float:
    """max |psi_a^-1(f_a(x)) - f_1(psi_a^-1(x))| over random x in [0, 1].

    Both sides go through different compositions: the left applies the
    power-conjugated tent then straightens, the right straightens first.
    """
    if not 0.0 < a <= 1.0:
        raise ValueError("a must lie in (0, 1]")
    rng = np.random.default_rng(seed)
    x = rng.random(samples)
    f_a, f_1 = make_f(a), make_f(1.0)
    _, psi_inv = make_psi(a)
    lhs = psi_inv.values(f_a.values(x))
    rhs = f_1.values(psi_inv.values(x))
    return float(np.abs(lhs - rhs).max())


@dataclass
class InvarianceVerdict:
    max_discrepancy: float
    trials: int
    tol: float
    passed: bool
    worst_target: tuple[float, float] | None = None


def random_targets(trials: int, seed, max_block: int = TARGET_MAX_BLOCK) -> list[Interval]:
    """Random [c, d] inside a block I_n, n <= max_block; a quarter spill into the next block up."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(trials):
        n = int(rng.integers(1, max_block + 1))
        lo, width = math.ldexp(1.0, -n), math.ldexp(1.0, -n)
        top = lo + width
        if n > 1 and rng.random() < 0.25:
            top = lo + 3 * width
        c, d = sorted(float(v) for v in lo + (top - lo) * rng.random(2))
        if c < d:
            out.append(Interval(c, d))
    return out


def invariance_check(spec: IntervalMapSpec, density: Density | None = None, trials: int = 200,
                     seed=0, tol: float = 1e-8, within: Interval | None = None) -> InvarianceVerdict:
    """max over random targets A of |mu(f^-1 A) - mu(A)|; passes iff <= tol."""
    density = density or lebesgue()
    within = within or Interval(DEEP, 1.0)
    branches = monotone_branches(spec, within.lo, within.hi)
    worst, where = 0.0, None
    targets = random_targets(trials, seed)
    for A in targets:
        gap = abs(_preimage_from_branches(branches, A, density) - density.mass(A.lo, A.hi))
        if gap > worst or where is None:
            worst, where = max(float(gap), worst), (A.lo, A.hi)
    return InvarianceVerdict(worst, len(targets), tol, bool(worst <= tol), where)


__all__ = [
    "Density", "lebesgue", "pullback_density", "pullback_measure", "preimage_measure",
    "conjugacy_residual", "InvarianceVerdict", "random_targets", "invariance_check",
]
