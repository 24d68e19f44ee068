"""Subintervals of [0, 1], affine bijections and exact dyadic charts."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Interval:
    """A nondegenerate subinterval of [0, 1].

    Openness flags only matter for membership tests; all geometric
    quantities (length, affine charts) use the closure.
    """

    lo: float
    hi: float
    closed_left: bool = True
    closed_right: bool = True

    def __post_init__(self):
        if not (self.lo < self.hi):
            raise ValueError(f"degenerate interval [{self.lo}, {self.hi}]")
        if self.lo < 0.0 or self.hi > 1.0:
            raise ValueError(f"interval [{self.lo}, {self.hi}] not inside [0, 1]")

    @classmethod
    def dyadic(cls, n: int) -> "Interval":
        """The half-open block (2^-n, 2^-n+1]."""
        if n < 1:
            raise ValueError("dyadic block index must be >= 1")
        return cls(math.ldexp(1.0, -n), math.ldexp(1.0, 1 - n), closed_left=False)

    @property
    def length(self) -> float:
        return self.hi - self.lo

    @property
    def mid(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def closure(self) -> "Interval":
        return Interval(self.lo, self.hi)

    def __contains__(self, x: float) -> bool:
        if x < self.lo or x > self.hi:
            return False
        if x == self.lo and not self.closed_left:
            return False
        if x == self.hi and not self.closed_right:
            return False
        return True

    def contains_interval(self, other: "Interval", slack: float = 0.0) -> bool:
        return other.lo >= self.lo - slack and other.hi <= self.hi + slack

    def __repr__(self):
        left = "[" if self.closed_left else "("
        right = "]" if self.closed_right else ")"
        return f"{left}{self.lo!r}, {self.hi!r}{right}"


@dataclass(frozen=True)
class AffineMap:
    """x -> scale * x + offset, with scale != 0."""

    scale: float
    offset: float = 0.0

    def __post_init__(self):
        if self.scale == 0.0 or not math.isfinite(self.scale):
            raise ValueError("affine map needs a finite nonzero slope")

    @classmethod
    def between(cls, src: Interval | tuple, dst: Interval | tuple,
                reverse: bool = False) -> "AffineMap":
        """The affine bijection src -> dst (orientation-reversing if `reverse`)."""
        s0, s1 = _ends(src)
        d0, d1 = _ends(dst)
        if reverse:
            d0, d1 = d1, d0
        scale = (d1 - d0) / (s1 - s0)
        return cls(scale, d0 - scale * s0)

    @classmethod
    def identity(cls) -> "AffineMap":
        return cls(1.0, 0.0)

    def __call__(self, x):
        return self.scale * x + self.offset

    def inverse(self) -> "AffineMap":
        return AffineMap(1.0 / self.scale, -self.offset / self.scale)

    def invert(self, y):
        """Solve scale * x + offset = y without forming the inverse map."""
        return (y - self.offset) / self.scale

    def compose(self, inner: "AffineMap") -> "AffineMap":
        """self o inner."""
        return AffineMap(self.scale * inner.scale, self.scale * inner.offset + self.offset)

    @property
    def preserves_orientation(self) -> bool:
        return self.scale > 0


def _ends(iv) -> tuple[float, float]:
    if isinstance(iv, Interval):
        return iv.lo, iv.hi
    lo, hi = iv
    return float(lo), float(hi)


@dataclass(frozen=True)
class DyadicChart:
    """The chart of a dyadic block, computed with ldexp.

    ``DyadicChart.to_unit(n)`` sends [2^-n, 2^-n+1] onto [0, 1] as x 2^n - 1;
    its inverse is y -> (1 + y) 2^-n.  Scaling by powers of two is exact, so
    the charts stay exact and finite even for blocks in the subnormal range,
    where an AffineMap slope of 2^n would overflow.
    """

    exponent: int
    forward: bool = True

    @classmethod
    def to_unit(cls, n: int) -> "DyadicChart":
        return cls(int(n), True)

    @property
    def scale(self) -> float:
        try:
            return math.ldexp(1.0, self.exponent)
        except OverflowError:
            return math.inf

    @property
    def offset(self) -> float:
        return -1.0 if self.forward else self.scale

    def __call__(self, x):
        if self.forward:
            return (np.ldexp(x, self.exponent) if isinstance(x, np.ndarray)
                    else math.ldexp(x, self.exponent)) - 1.0
        y = 1.0 + x
        return np.ldexp(y, self.exponent) if isinstance(y, np.ndarray) else math.ldexp(y, self.exponent)

    def inverse(self) -> "DyadicChart":
        return DyadicChart(-self.exponent, not self.forward)

    def invert(self, y):
        return self.inverse()(y)

    @property
    def preserves_orientation(self) -> bool:
        return True


def gain(post, pre) -> float:
    """post.scale * pre.scale, exact for pairs of dyadic charts of any depth."""
    e1, e2 = getattr(post, "exponent", None), getattr(pre, "exponent", None)
    if e1 is not None and e2 is not None:
        return math.ldexp(1.0, e1 + e2)
    return post.scale * pre.scale
