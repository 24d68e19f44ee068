"""Monotone branches of a map and laps of its iterates.

Break locations always come from piece metadata (piece boundaries and kernel
turning points), so lap counts are exact integers.  Pulling points back
through an iterate walks the chain of branches used at each level: affine
segments invert in closed form, the rest by bisection.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .intervals import Interval
from .maps import BranchCapError, IntervalMapSpec, Piece

DEFAULT_CAP = 10**7
#: breaks closer than this fraction of the image length to its ends are ignored
CUT_SLACK = 1e-9
BISECTION_STEPS = 100


@dataclass(frozen=True)
class Segment:
    piece: Piece
    lo: float
    hi: float
    ylo: float
    yhi: float

    def invert(self, y: float) -> float:
        lo_y, hi_y = (self.ylo, self.yhi) if self.ylo <= self.yhi else (self.yhi, self.ylo)
        if y <= lo_y:
            return self.lo if self.ylo <= self.yhi else self.hi
        if y >= hi_y:
            return self.hi if self.ylo <= self.yhi else self.lo
        if self.piece.piecewise_affine:
            return self.lo + (y - self.ylo) * (self.hi - self.lo) / (self.yhi - self.ylo)
        return _bisect(self.piece.value, self.lo, self.hi, y, self.ylo < self.yhi)


def _bisect(fn, lo, hi, y, increasing):
    for _ in range(BISECTION_STEPS):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if (fn(mid) < y) == increasing:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class Branch:
    """A maximal interval on which the map is strictly monotone."""

    lo: float
    hi: float
    direction: int
    segments: tuple[Segment, ...]

    @property
    def ylo(self) -> float:
        return self.segments[0].ylo

    @property
    def yhi(self) -> float:
        return self.segments[-1].yhi

    @property
    def image(self) -> tuple[float, float]:
        return (min(self.ylo, self.yhi), max(self.ylo, self.yhi))

    def invert(self, y: float) -> float:
        segs = self.segments
        if len(segs) > 1:
            for seg in segs:
                a, b = sorted((seg.ylo, seg.yhi))
                if a <= y <= b:
                    return seg.invert(y)
            # y outside the image: clamp to the nearer end
            return self.lo if abs(y - self.ylo) <= abs(y - self.yhi) else self.hi
        return segs[0].invert(y)


def monotone_branches(spec: IntervalMapSpec, lo: float, hi: float,
                      max_pieces: int = DEFAULT_CAP) -> list[Branch]:
    """Maximal monotone branches of spec restricted to [lo, hi], left to right."""
    if not lo < hi:
        raise ValueError("empty region")
    slack = CUT_SLACK * (hi - lo)
    pieces = spec.pieces_between(lo, hi, max_pieces)
    cuts = []
    exact = {}
    for p in pieces:
        cuts.append(p.domain.lo)
        for t, v in p.turning_pairs():
            cuts.append(t)
            exact[t] = v
    inner = sorted(c for c in set(cuts) if lo + slack < c < hi - slack)
    pts = [lo] + inner + [hi]

    segments = []
    for a, b in zip(pts, pts[1:]):
        piece = spec.piece(spec.piece_index(0.5 * (a + b)))
        ya = exact.get(a)
        yb = exact.get(b)
        ya = piece.value(a) if ya is None else ya
        yb = piece.value(b) if yb is None else yb
        if ya == yb:
            continue
        segments.append(Segment(piece, a, b, ya, yb))

    branches: list[Branch] = []
    run: list[Segment] = []
    for seg in segments:
        if run and (seg.yhi > seg.ylo) != (run[-1].yhi > run[-1].ylo):
            branches.append(_branch(run))
            run = []
        run.append(seg)
    if run:
        branches.append(_branch(run))
    if len(branches) > max_pieces:
        raise BranchCapError(f"{len(branches)} branches exceed cap {max_pieces}")
    return branches


def _branch(run):
    return Branch(run[0].lo, run[-1].hi, 1 if run[-1].yhi > run[0].ylo else -1, tuple(run))


@dataclass(frozen=True)
class Lap:
    """A maximal monotone interval of the k-th iterate, with its images."""

    lo: float
    hi: float
    direction: int
    ylo: float
    yhi: float
    depth: int
    parent: "Lap | None" = None
    branch: Branch | None = None

    @property
    def interval(self) -> Interval:
        return Interval(self.lo, self.hi)

    @property
    def monotonicity(self) -> str:
        return "increasing" if self.direction > 0 else "decreasing"

    @property
    def image(self) -> tuple[float, float]:
        return (min(self.ylo, self.yhi), max(self.ylo, self.yhi))

    def invert(self, y: float) -> float:
        """The point of this lap that the iterate sends to y."""
        if self.parent is None:
            return min(max(y, self.lo), self.hi)
        return self.parent.invert(self.branch.invert(y))


def _refine(spec, lap: Lap, max_pieces) -> list[Lap]:
    u, v = lap.image
    out = []
    for br in monotone_branches(spec, u, v, max_pieces):
        if lap.direction > 0:
            x0 = lap.lo if br.lo == u else lap.invert(br.lo)
            x1 = lap.hi if br.hi == v else lap.invert(br.hi)
            y0, y1 = br.ylo, br.yhi
        else:
            x0 = lap.lo if br.hi == v else lap.invert(br.hi)
            x1 = lap.hi if br.lo == u else lap.invert(br.lo)
            y0, y1 = br.yhi, br.ylo
        if not x0 < x1:
            continue
        out.append(Lap(x0, x1, lap.direction * br.direction, y0, y1, lap.depth + 1, lap, br))
    if lap.direction < 0:
        out.reverse()
    return out


def iterate_laps(spec: IntervalMapSpec, region: Interval, k: int, cap: int = DEFAULT_CAP):
    """Yield the lap lists of spec^1 .. spec^k on region.

    Raises BranchCapError (with the last complete level attached as
    ``partial``) as soon as a level would exceed ``cap`` laps.
    """
    if k < 1:
        raise ValueError("iterate order must be >= 1")
    laps = [Lap(region.lo, region.hi, 1, region.lo, region.hi, 0)]
    for depth in range(1, k + 1):
        nxt = []
        for lap in laps:
            nxt.extend(_refine(spec, lap, cap))
            if len(nxt) > cap:
                raise BranchCapError(
                    f"iterate {depth} has more than {cap} laps on {region}", partial=laps)
        laps = nxt
        yield laps


def branch_decomposition(spec: IntervalMapSpec, region: Interval, k: int = 1,
                         cap: int = DEFAULT_CAP) -> list[Lap]:
    """Maximal monotone laps of spec^k on region, left to right."""
    laps = None
    for laps in iterate_laps(spec, region, k, cap):
        pass
    return laps


def lap_count(spec, region, k, cap=DEFAULT_CAP) -> int:
    return len(branch_decomposition(spec, region, k, cap))


def ulp_slack(*values) -> float:
    return 8 * max(math.ulp(abs(v)) for v in values)
