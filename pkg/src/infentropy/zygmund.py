"""The little-Zygmund interval map with infinite topological entropy.

On [1/2, 1] the map is the orientation-reversing homeomorphism
x -> (e/2) * phi((2/e)(1 - x)) with phi(u) = u log(1/u).  Around each point
x_n where its slope is -n sits a small interval I_n whose image I_n' is
sent back across I_n by a rescaled cosine horseshoe with n humps; the gaps
J_n' between consecutive I_n' are sent onto I_n u J_n by a smooth sigmoid.

All placement is done in the coordinate s = 1 - x, where the intervals
near x = 1 stay resolvable in binary64 long after 1 - s rounds to 1.
"""
from __future__ import annotations

import math
import threading
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .intervals import AffineMap, Interval
from .kernels import CosineHorseshoe, SigmoidCosine, XLogX
from .maps import BranchCapError, IntervalMapSpec, Piece

E = math.e
RATIO_TOL = 1e-9
MAX_BISECTIONS = 200
MIN_WIDTH = 1e-300


def base_s(s: float) -> float:
    """The base homeomorphism in the s = 1 - x coordinate (increasing in s)."""
    if s <= 0.0:
        return 0.0
    return s * math.log(E / (2.0 * s))


def critical_point(n: int) -> float:
    """x_n, where the base map has slope -n."""
    return 1.0 - 0.5 * math.exp(-n)


def critical_distance(n: int) -> float:
    """1 - x_n = e^-n / 2."""
    return 0.5 * math.exp(-n)


class ZygmundPlacementError(RuntimeError):
    pass


def _place(n: int, width_cap: float) -> tuple[float, float]:
    """s-coordinates (a, b) of I_n with mean |slope| exactly n."""
    s_n = critical_distance(n)
    gap = s_n - critical_distance(n + 1)
    w = min(gap / 4.0, width_cap)

    def excess(c):
        a, b = c - 0.5 * w, c + 0.5 * w
        return (base_s(b) - base_s(a)) / (b - a) - n

    # |slope| = log(1/(2s)) is convex and decreasing, so the centred interval
    # overshoots; shifting the centre towards 1/2 (larger s) lowers the mean.
    lo, hi = s_n, s_n + w
    if not (excess(lo) >= 0.0 >= excess(hi)):
        raise ZygmundPlacementError(f"cannot bracket I_{n}: excess {excess(lo)}, {excess(hi)}")
    best = None
    for _ in range(MAX_BISECTIONS):
        mid = 0.5 * (lo + hi)
        r = excess(mid)
        if best is None or abs(r) < abs(best[1]):
            best = (mid, r)
        if r == 0.0 or mid in (lo, hi):
            break
        if r > 0.0:
            lo = mid
        else:
            hi = mid
    c, r = best
    if abs(r) > RATIO_TOL * max(1.0, n) or not math.isfinite(r):
        raise ZygmundPlacementError(
            f"I_{n}: slope ratio misses {n} by {r:.3e} after {MAX_BISECTIONS} bisections")
    return c - 0.5 * w, c + 0.5 * w


@dataclass(frozen=True)
class ZygmundConstruction:
    """Solved geometry for n = 1..n_max (intervals in the x coordinate).

    ``J[0]`` is J_0 = [1/2, min I_1]; ``I[k]``, ``Ip[k]``... are indexed from
    n = 1 at position 0.
    """

    n_max: int
    x: tuple[float, ...]
    I: tuple[Interval, ...]
    J: tuple[Interval, ...]
    I_image: tuple[Interval, ...]
    J_image: tuple[Interval, ...]
    I_s: tuple[tuple[float, float], ...]
    K_empirical: float

    def slope_ratio(self, n: int) -> float:
        """|f(I_n)| / |I_n| computed from the s-geometry."""
        a, b = self.I_s[n - 1]
        return (base_s(b) - base_s(a)) / (b - a)

    def k_ratio(self, n: int) -> float:
        """(|I_n| + |J_n|) / |f(J_n)|."""
        a, b = self.I_s[n - 1]
        b_next = self.I_s[n][1]
        return ((b - a) + (a - b_next)) / (base_s(a) - base_s(b_next))


class ZygmundMap(IntervalMapSpec):
    """Piece table: index 0 is the base map on [1/2, 1]; 2n is I_n', 2n+1 is J_n'.

    Indices increase from right to left.  The table is extended on demand
    (publish-once under a lock) until a queried point is covered or the
    intervals become narrower than 1e-300; below that the limit value 1 is
    returned.
    """

    name = "zygmund"

    def __init__(self, n_max: int = 16, width_cap: float = math.inf):
        super().__init__({"n_max": int(n_max)})
        if int(n_max) != n_max or n_max < 1:
            raise ValueError("n_max must be a positive integer")
        self.width_cap = float(width_cap)
        self._lock = threading.Lock()
        self._s: list[tuple[float, float]] = []
        self._lowers: list[float] = [0.5]
        self._pieces: list[Piece] = [self._base_piece()]
        self._exhausted = False
        self._extend_to(int(n_max) + 1)

    # -- geometry ----------------------------------------------------------
    @staticmethod
    def _base_piece():
        # s = 1 - x is exact on [1/2, 1]; (e/2) phi(2s/e) = s log(e / 2s)
        return Piece(Interval(0.5, 1.0), XLogX(E / 2.0), AffineMap(-1.0, 1.0), label="base")

    def _extend_to(self, n_target: int):
        """Make sure I_1..I_{n_target} and the pieces through J_{n_target-1}' exist."""
        with self._lock:
            s = list(self._s)
            while len(s) < n_target and not self._exhausted:
                n = len(s) + 1
                a, b = _place(n, self.width_cap)
                if b - a < MIN_WIDTH or base_s(a) <= 0.0:
                    self._exhausted = True
                    break
                s.append((a, b))
            lowers = list(self._lowers)
            pieces = list(self._pieces)
            while len(pieces) < 2 * len(s):
                i = len(pieces)
                if i % 2 == 1:
                    piece = self._gap_piece((i - 1) // 2, s)
                else:
                    piece = self._hump_piece(i // 2, s)
                pieces.append(piece)
                lowers.append(piece.domain.lo)
            # publish: readers only see complete snapshots
            self._s, self._pieces, self._lowers = s, pieces, lowers
            self._lowers_arr = -np.array(lowers)

    def _hump_piece(self, n, s):
        a, b = s[n - 1]
        dom = Interval(base_s(a), base_s(b))
        post = AffineMap(n * (b - a), 1.0 - b)
        return Piece(dom, CosineHorseshoe(n), AffineMap.between(dom, (0.0, 1.0)), post,
                     label=f"I'_{n}")

    def _gap_piece(self, n, s):
        b_next = s[n][1]
        if n == 0:
            dom = Interval(base_s(b_next), 0.5)
            post = AffineMap(-(0.5 - b_next), 1.0 - b_next)
        else:
            a, b = s[n - 1]
            dom = Interval(base_s(b_next), base_s(a))
            post = AffineMap(-(b - b_next), 1.0 - b_next)
        return Piece(dom, SigmoidCosine(), AffineMap.between(dom, (0.0, 1.0)), post,
                     label=f"J'_{n}")

    def construction(self, n_max: int | None = None) -> ZygmundConstruction:
        n_max = int(n_max or self.params["n_max"])
        self._extend_to(n_max + 1)
        s = self._s
        if len(s) < n_max + 1:
            raise BranchCapError(f"only {len(s)} intervals are resolvable")
        x = tuple(self._solve_critical(n) for n in range(1, n_max + 1))
        I = tuple(Interval(1.0 - b, 1.0 - a) for a, b in s[:n_max])
        J = (Interval(0.5, 1.0 - s[0][1]),) + tuple(
            Interval(1.0 - s[n - 1][0], 1.0 - s[n][1]) for n in range(1, n_max + 1))
        Ip = tuple(self._pieces[2 * n].domain for n in range(1, n_max + 1))
        Jp = tuple(self._pieces[2 * n + 1].domain for n in range(0, n_max + 1))
        geo = ZygmundConstruction(n_max, x, I, J, Ip, Jp, tuple(s[:n_max + 1]), math.nan)
        K = max(geo.k_ratio(n) for n in range(1, n_max + 1))
        return ZygmundConstruction(n_max, x, I, J, Ip, Jp, tuple(s[:n_max + 1]), K)

    def _solve_critical(self, n: int) -> float:
        """x where the base piece has slope -n, by root finding on its derivative."""
        base = self._pieces[0]
        g = lambda s: -base.derivative(1.0 - s) - n
        s = optimize.brentq(g, 1e-300, 0.5, xtol=1e-300, rtol=4 * np.finfo(float).eps)
        return 1.0 - s

    def junction_residuals(self, n_max: int | None = None) -> list[float]:
        """|left value - right value| at every realized junction down to J_{n_max}'."""
        n_max = int(n_max or self.params["n_max"])
        self._extend_to(n_max + 1)
        out = []
        for i in range(min(2 * n_max + 2, len(self._pieces) - 1)):
            right, left = self._pieces[i], self._pieces[i + 1]
            j = right.domain.lo
            assert left.domain.hi == j
            out.append(abs(right.value(j) - left.value(j)))
        return out

    # -- piece table ---------------------------------------------------------
    def _cover(self, x):
        """Extend until some lower boundary lies below x; False if impossible."""
        while self._lowers[-1] >= x:
            if self._exhausted:
                return False
            self._extend_to(len(self._s) + 8)
        return True

    def special_value(self, x):
        if x == 0.0 or not self._cover(x):
            return 1.0
        return None

    def piece_index(self, x):
        if self.special_value(x) is not None:
            return -1
        return int(np.searchsorted(self._lowers_arr, -x, side="right"))

    def piece_indices(self, xs):
        pos = xs[xs > 0.0]
        if pos.size:
            self._cover(float(pos.min()))
        lowers = self._lowers_arr
        idx = np.searchsorted(lowers, -xs, side="right")
        return np.where((xs == 0.0) | (idx >= len(lowers)), -1, idx)

    def piece(self, index):
        return self._pieces[index]

    def indices_between(self, lo, hi, max_pieces=10**7):
        if lo <= 0.0 or not self._cover(lo):
            raise BranchCapError("the Zygmund map has infinitely many pieces accumulating at 0")
        i_lo = int(np.sum(-self._lowers_arr > lo))
        i_hi = self.piece_index(hi)
        if i_lo - i_hi + 1 > max_pieces:
            raise BranchCapError(f"{i_lo - i_hi + 1} pieces exceed cap {max_pieces}")
        return list(range(i_lo, i_hi - 1, -1))

    def junctions(self, n_max: int | None = None) -> list[float]:
        """All realized piece boundaries inside (0, 1) down to J_{n_max}'."""
        n_max = int(n_max or self.params["n_max"])
        self._extend_to(n_max + 1)
        return sorted(self._lowers[:2 * n_max + 2])


def make_zygmund_map(n_max: int = 16, width_cap: float = math.inf):
    """Build the map and return it together with its solved geometry."""
    spec = ZygmundMap(n_max, width_cap)
    return spec, spec.construction()
