"""Piecewise-analytic interval maps and the constructors for each family.

A map is a table of :class:`Piece` objects, each an affine rescaling of a
kernel: ``post o kernel o pre`` on its domain.  Tables are either finite or
lazily indexed (the dyadic families accumulate at 0), but every table answers
the same three questions: which piece holds ``x``, which pieces meet
``[lo, hi]`` (left to right), and what the piece with a given index is.
"""
from __future__ import annotations

import bisect
import math
import threading
from dataclasses import dataclass, field

import numpy as np

from .intervals import AffineMap, DyadicChart, Interval, gain
from .kernels import Identity, Kernel, Power, PowerConjTent, Tent, XLogX

UNIT = Interval(0.0, 1.0)


class BranchCapError(RuntimeError):
    """Raised when an enumeration of pieces or laps exceeds its configured cap."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


@dataclass(frozen=True, eq=False)
class Piece:
    domain: Interval
    kernel: Kernel
    pre: AffineMap = field(default_factory=AffineMap.identity)
    post: AffineMap = field(default_factory=AffineMap.identity)
    label: str = ""

    @property
    def piecewise_affine(self) -> bool:
        return self.kernel.piecewise_affine

    def value(self, x: float) -> float:
        return self.post(self.kernel.value(self.pre(x)))

    def values(self, xs: np.ndarray) -> np.ndarray:
        return self.post(self.kernel.values(self.pre(xs)))

    def derivative(self, x: float) -> float:
        return gain(self.post, self.pre) * self.kernel.derivative(self.pre(x))

    def _interior(self, kernel_points):
        pts = sorted(self.pre.invert(t) for t in kernel_points)
        return [p for p in pts if self.domain.lo < p < self.domain.hi]

    def turning_points(self) -> list[float]:
        return self._interior(self.kernel.turning_points())

    def kinks(self) -> list[float]:
        return self._interior(self.kernel.kinks())

    def turning_pairs(self) -> list[tuple[float, float]]:
        """(x, f(x)) at interior turning points, with f(x) from the exact kernel values."""
        k = self.kernel
        pairs = ((self.pre.invert(t), self.post(v)) for t, v in zip(k.turning_points(), k.turning_values()))
        return sorted(p for p in pairs if self.domain.lo < p[0] < self.domain.hi)


class IntervalMapSpec:
    """A continuous self-map of [0, 1] given by a table of pieces.

    Subclasses implement the piece table; evaluation, derivatives and
    break-point queries are shared.  Specs are immutable once built; lazy
    tables only ever grow behind a lock.
    """

    name = "map"
    fixed_points_at_zero_one = False

    def __init__(self, params: dict | None = None):
        self.params = dict(params or {})

    # -- piece table -----------------------------------------------------
    def piece_index(self, x: float):
        raise NotImplementedError

    def piece(self, index) -> Piece:
        raise NotImplementedError

    def piece_indices(self, xs: np.ndarray) -> np.ndarray:
        return np.array([self.piece_index(float(x)) for x in xs])

    def indices_between(self, lo: float, hi: float, max_pieces: int = 10**7) -> list:
        """Indices of pieces meeting [lo, hi] in a set of positive length, left to right."""
        raise NotImplementedError

    def special_value(self, x: float):
        """Value at a point no piece covers (e.g. an accumulation point), else None."""
        return None

    # -- evaluation -------------------------------------------------------
    def __call__(self, x):
        if isinstance(x, np.ndarray):
            return self.values(x)
        return self.value(x)

    def value(self, x: float) -> float:
        x = float(x)
        if not 0.0 <= x <= 1.0:
            raise ValueError(f"point {x!r} outside [0, 1]")
        special = self.special_value(x)
        if special is not None:
            return special
        return self.piece(self.piece_index(x)).value(x)

    def values(self, xs) -> np.ndarray:
        xs = np.asarray(xs, dtype=float)
        if xs.size and (xs.min() < 0.0 or xs.max() > 1.0):
            raise ValueError("points outside [0, 1]")
        flat = xs.ravel()
        out = np.empty_like(flat)
        idx = self.piece_indices(flat)
        special = idx < 0
        for i in np.flatnonzero(special):
            out[i] = self.value(flat[i])
        for k in np.unique(idx[~special]):
            sel = idx == k
            out[sel] = self.piece(int(k)).values(flat[sel])
        return out.reshape(xs.shape)

    def pieces_between(self, lo: float, hi: float, max_pieces: int = 10**7) -> list[Piece]:
        return [self.piece(i) for i in self.indices_between(lo, hi, max_pieces)]

    def break_points(self, lo: float = 0.0, hi: float = 1.0, max_pieces: int = 10**7) -> list[float]:
        """Piece boundaries, kinks and turning points strictly inside (lo, hi)."""
        pts = set()
        for p in self.pieces_between(lo, hi, max_pieces):
            pts.update((p.domain.lo, p.domain.hi))
            pts.update(p.turning_points())
            pts.update(p.kinks())
        return sorted(t for t in pts if lo < t < hi)

    def describe(self) -> dict:
        return {"family": self.name, **self.params}

    def __repr__(self):
        args = ", ".join(f"{k}={v!r}" for k, v in self.params.items())
        return f"<{self.name}({args})>"


class FiniteMap(IntervalMapSpec):
    """A finite, left-to-right ordered table of pieces covering [0, 1]."""

    def __init__(self, pieces, name="map", params=None, fixed_ends=False):
        super().__init__(params)
        self.name = name
        self.fixed_points_at_zero_one = fixed_ends
        self.pieces = tuple(sorted(pieces, key=lambda p: p.domain.lo))
        self._his = [p.domain.hi for p in self.pieces]
        self._his_arr = np.array(self._his)
        for left, right in zip(self.pieces, self.pieces[1:]):
            if left.domain.hi != right.domain.lo:
                raise ValueError("pieces must tile [0, 1] without gaps or overlaps")

    def piece_index(self, x):
        return min(bisect.bisect_left(self._his, x), len(self.pieces) - 1)

    def piece(self, index):
        return self.pieces[index]

    def piece_indices(self, xs):
        return np.minimum(np.searchsorted(self._his_arr, xs, side="left"), len(self.pieces) - 1)

    def indices_between(self, lo, hi, max_pieces=10**7):
        first = min(bisect.bisect_right(self._his, lo), len(self.pieces) - 1)
        last = self.piece_index(hi)
        return list(range(first, last + 1))


def dyadic_index(x: float) -> int:
    """The n with x in (2^-n, 2^-n+1], computed exactly."""
    m, e = math.frexp(x)
    return 2 - e if m == 0.5 else 1 - e


class DyadicMap(IntervalMapSpec):
    """A map acting on each block I_n = (2^-n, 2^-n+1] by its own rescaled kernel.

    Blocks below ``n_start`` are replaced by the identity on
    [2^-n_start+1, 1].  The value at 0 is 0.
    """

    fixed_points_at_zero_one = True

    def __init__(self, kernel_for_block, name, params, n_start: int = 1):
        super().__init__(params)
        if int(n_start) != n_start or n_start < 1:
            raise ValueError("n_start must be a positive integer")
        self.name = name
        self.n_start = int(n_start)
        self._kernel_for_block = kernel_for_block
        self._cache: dict[int, Piece] = {}
        self._lock = threading.Lock()
        self._identity_lo = math.ldexp(1.0, 1 - self.n_start)

    def special_value(self, x):
        return 0.0 if x == 0.0 else None

    def piece_index(self, x):
        if x == 0.0:
            return -1
        n = dyadic_index(x)
        return 0 if n < self.n_start else n

    def piece_indices(self, xs):
        m, e = np.frexp(xs)
        n = np.where(m == 0.5, 2 - e, 1 - e)
        n = np.where(n < self.n_start, 0, n)
        return np.where(xs == 0.0, -1, n)

    def piece(self, index):
        p = self._cache.get(index)
        if p is None:
            p = self._build(index)
            with self._lock:
                p = self._cache.setdefault(index, p)
        return p

    def _build(self, n):
        if n == 0:
            return Piece(Interval(self._identity_lo, 1.0), Identity(), label="identity")
        block = Interval.dyadic(n)
        chart = DyadicChart.to_unit(n)
        return Piece(block, self._kernel_for_block(n), chart, chart.inverse(), label=f"I_{n}")

    def block(self, n: int) -> Interval:
        return Interval.dyadic(n)

    def indices_between(self, lo, hi, max_pieces=10**7):
        if lo <= 0.0:
            raise BranchCapError(f"{self.name} has infinitely many pieces accumulating at 0")
        n_lo = 1 - math.frexp(lo)[1]
        n_hi = dyadic_index(hi)
        out = []
        top = max(n_hi, self.n_start)
        if n_lo - top + 1 > max_pieces:
            raise BranchCapError(f"{n_lo - top + 1} pieces in [{lo}, {hi}] exceed cap {max_pieces}")
        out.extend(range(n_lo, top - 1, -1))
        if self.n_start > 1 and hi > self._identity_lo:
            if lo >= self._identity_lo:
                out = []
            out.append(0)
        return out


# -- constructors ----------------------------------------------------------

def _check_a(a):
    if not 0.0 < a <= 1.0:
        raise ValueError(f"a must lie in (0, 1], got {a!r}")


def make_tent(b: int) -> FiniteMap:
    """The b-branch piecewise-affine sawtooth g_{1,b} on [0, 1]."""
    kernel = Tent(b)
    return FiniteMap([Piece(UNIT, kernel)], name="tent", params={"b": kernel.b}, fixed_ends=True)


def make_power_conj_tent(a: float, b: int) -> FiniteMap:
    """g_{a,b}(x) = g_{1,b}(x^{1/a})^a."""
    _check_a(a)
    kernel = PowerConjTent(a, b)
    return FiniteMap([Piece(UNIT, kernel)], name="gab", params={"a": float(a), "b": kernel.b},
                     fixed_ends=True)


def make_f(a: float) -> DyadicMap:
    """The infinite-entropy map f_a: a (2n+1)-branch rescaled g_{a,2n+1} on every I_n."""
    _check_a(a)
    return DyadicMap(lambda n: PowerConjTent(a, 2 * n + 1), "fa", {"a": float(a)})


def make_truncated_f(a: float, n_start: int) -> DyadicMap:
    """f_a on the blocks I_n, n >= n_start, and the identity on [2^-n_start+1, 1]."""
    _check_a(a)
    return DyadicMap(lambda n: PowerConjTent(a, 2 * n + 1), "fa_truncated",
                     {"a": float(a), "n_start": int(n_start)}, n_start=n_start)


def make_psi(a: float) -> tuple[DyadicMap, DyadicMap]:
    """The blockwise power conjugacy psi_a (x^a on each I_n chart) and its inverse."""
    _check_a(a)
    psi = DyadicMap(lambda n: Power(a), "psi", {"a": float(a)})
    psi_inv = DyadicMap(lambda n: Power(1.0 / a), "psi_inv", {"a": float(a)})
    return psi, psi_inv


def make_identity() -> FiniteMap:
    return FiniteMap([Piece(UNIT, Identity())], name="identity", fixed_ends=True)


def make_power(a: float) -> FiniteMap:
    """q_a(x) = x^a on [0, 1]."""
    return FiniteMap([Piece(UNIT, Power(a))], name="power", params={"a": float(a)}, fixed_ends=True)


def make_affine(scale: float, offset: float) -> FiniteMap:
    m = AffineMap(scale, offset)
    if not (0.0 <= m(0.0) <= 1.0 and 0.0 <= m(1.0) <= 1.0):
        raise ValueError("affine map does not send [0, 1] into itself")
    return FiniteMap([Piece(UNIT, Identity(), post=m)], name="affine",
                     params={"scale": float(scale), "offset": float(offset)})


def make_xlogx() -> FiniteMap:
    """x log(1/x) on [0, 1]."""
    return FiniteMap([Piece(UNIT, XLogX())], name="xlogx")


# -- pointwise queries -------------------------------------------------------

def evaluate(spec: IntervalMapSpec, x):
    return spec(x)


def derivative_ae(spec: IntervalMapSpec, x: float):
    """Analytic derivative of the active piece, or None at a break point."""
    x = float(x)
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"point {x!r} outside [0, 1]")
    if spec.special_value(x) is not None:
        return None
    piece = spec.piece(spec.piece_index(x))
    tol = 4 * math.ulp(max(x, 1e-300))
    if any(abs(x - k) <= tol for k in piece.kinks()):
        return None
    lo, hi = piece.domain.lo, piece.domain.hi
    if abs(x - lo) <= tol or abs(x - hi) <= tol:
        # a piece boundary: defined only if both one-sided derivatives agree
        edge = lo if abs(x - lo) <= tol else hi
        if edge in (0.0, 1.0):
            return piece.derivative(x)
        probe = edge - (hi - lo) * 1e-9 if edge == lo else edge + (hi - lo) * 1e-9
        if spec.special_value(probe) is not None:
            return None
        other = spec.piece(spec.piece_index(probe))
        d_here, d_there = piece.derivative(edge), other.derivative(edge)
        if math.isfinite(d_here) and abs(d_here - d_there) <= 1e-9 * max(1.0, abs(d_here)):
            return d_here
        return None
    return piece.derivative(x)
