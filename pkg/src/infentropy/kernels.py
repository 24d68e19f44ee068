"""Analytic model maps that pieces are built from.

Every kernel lives on a fixed domain (mostly [0, 1]) and is evaluated both on
scalars (hot loops: bisection, branch refinement) and on numpy arrays (graph
sampling, Bowen sweeps).  Turning points and kinks are exact metadata so that
branch counting never has to search for them numerically.
"""
from __future__ import annotations

import math

import numpy as np

TWO_PI = 2.0 * math.pi


class Kernel:
    lo = 0.0
    hi = 1.0
    #: affine between consecutive turning points
    piecewise_affine = False

    def value(self, u: float) -> float:
        raise NotImplementedError

    def values(self, u: np.ndarray) -> np.ndarray:
        return np.array([self.value(float(v)) for v in np.ravel(u)]).reshape(np.shape(u))

    def derivative(self, u: float) -> float:
        raise NotImplementedError

    def turning_points(self) -> tuple[float, ...]:
        """Interior points where monotonicity changes."""
        return ()

    def turning_values(self) -> tuple[float, ...]:
        """Exact values at the turning points (overridden where known in closed form)."""
        return tuple(self.value(t) for t in self.turning_points())

    def kinks(self) -> tuple[float, ...]:
        """Interior points where the derivative does not exist."""
        return ()

    def clip(self, u):
        return min(max(u, self.lo), self.hi)

    def describe(self) -> dict:
        return {"kind": type(self).__name__}


class Identity(Kernel):
    piecewise_affine = True

    def value(self, u):
        return self.clip(u)

    def values(self, u):
        return np.clip(u, self.lo, self.hi)

    def derivative(self, u):
        return 1.0


class Tent(Kernel):
    """The b-branch sawtooth: b*u - k on even blocks, k + 1 - b*u on odd ones."""

    piecewise_affine = True

    def __init__(self, b: int):
        if int(b) != b or b < 1:
            raise ValueError(f"branch count must be a positive integer, got {b!r}")
        self.b = int(b)

    def _block(self, u):
        return min(int(self.b * u), self.b - 1)

    def value(self, u):
        u = self.clip(u)
        k = self._block(u)
        if k % 2 == 0:
            return self.b * u - k
        return k + 1 - self.b * u

    def values(self, u):
        u = np.clip(u, 0.0, 1.0)
        k = np.minimum(np.floor(self.b * u), self.b - 1)
        return np.where(k % 2 == 0, self.b * u - k, k + 1 - self.b * u)

    def derivative(self, u):
        k = self._block(self.clip(u))
        return float(self.b) if k % 2 == 0 else -float(self.b)

    def turning_points(self):
        return tuple(k / self.b for k in range(1, self.b))

    def turning_values(self):
        return tuple(float(k % 2) for k in range(1, self.b))

    def kinks(self):
        return self.turning_points()

    def describe(self):
        return {"kind": "Tent", "b": self.b}


class Power(Kernel):
    """u -> u**exponent on [0, 1]."""

    def __init__(self, exponent: float):
        if not exponent > 0:
            raise ValueError("exponent must be positive")
        self.exponent = float(exponent)

    def value(self, u):
        return self.clip(u) ** self.exponent

    def values(self, u):
        return np.clip(u, 0.0, 1.0) ** self.exponent

    def derivative(self, u):
        u = self.clip(u)
        if u == 0.0:
            return math.inf if self.exponent < 1 else (1.0 if self.exponent == 1 else 0.0)
        return self.exponent * u ** (self.exponent - 1.0)

    def describe(self):
        return {"kind": "Power", "exponent": self.exponent}


class PowerConjTent(Kernel):
    """q_a o tent_b o q_a^-1, i.e. u -> tent_b(u**(1/a))**a."""

    def __init__(self, a: float, b: int):
        if not 0.0 < a <= 1.0:
            raise ValueError(f"order of singularity a must lie in (0, 1], got {a!r}")
        self.a = float(a)
        self.tent = Tent(b)
        self.b = self.tent.b
        self.piecewise_affine = self.a == 1.0

    def value(self, u):
        u = self.clip(u)
        if self.a == 1.0:
            return self.tent.value(u)
        return self.tent.value(u ** (1.0 / self.a)) ** self.a

    def values(self, u):
        u = np.clip(u, 0.0, 1.0)
        if self.a == 1.0:
            return self.tent.values(u)
        return self.tent.values(u ** (1.0 / self.a)) ** self.a

    def derivative(self, u):
        u = self.clip(u)
        if self.a == 1.0:
            return self.tent.derivative(u)
        v = u ** (1.0 / self.a)
        slope = self.tent.derivative(v)
        if v == 0.0:
            return slope * self.b ** (self.a - 1.0)
        t = self.tent.value(v)
        if t == 0.0:
            return math.copysign(math.inf, slope)
        return slope * (t / v) ** (self.a - 1.0)

    def turning_points(self):
        return tuple((k / self.b) ** self.a for k in range(1, self.b))

    def turning_values(self):
        return self.tent.turning_values()

    def kinks(self):
        return self.turning_points()

    def describe(self):
        return {"kind": "PowerConjTent", "a": self.a, "b": self.b}


class CosineHorseshoe(Kernel):
    """(1 - cos(2 pi n u)) / 2n: a 2n-to-1 smooth map of [0, 1] onto [0, 1/n]."""

    def __init__(self, n: int):
        if int(n) != n or n < 1:
            raise ValueError("horseshoe order must be a positive integer")
        self.n = int(n)

    def value(self, u):
        return (1.0 - math.cos(TWO_PI * self.n * self.clip(u))) / (2 * self.n)

    def values(self, u):
        return (1.0 - np.cos(TWO_PI * self.n * np.clip(u, 0.0, 1.0))) / (2 * self.n)

    def derivative(self, u):
        return math.pi * math.sin(TWO_PI * self.n * self.clip(u))

    def turning_points(self):
        return tuple(j / (2 * self.n) for j in range(1, 2 * self.n))

    def turning_values(self):
        return tuple(0.0 if j % 2 == 0 else 1.0 / self.n for j in range(1, 2 * self.n))

    def describe(self):
        return {"kind": "CosineHorseshoe", "n": self.n}


class SigmoidCosine(Kernel):
    """(1 - cos(pi u)) / 2: increasing homeomorphism with critical endpoints."""

    def value(self, u):
        return 0.5 * (1.0 - math.cos(math.pi * self.clip(u)))

    def values(self, u):
        return 0.5 * (1.0 - np.cos(math.pi * np.clip(u, 0.0, 1.0)))

    def derivative(self, u):
        return 0.5 * math.pi * math.sin(math.pi * self.clip(u))


class XLogX(Kernel):
    """s log(c/s) = c * phi(s/c) with phi(u) = u log(1/u), continuous at 0.

    With c = 1 this is phi itself on [0, 1], maximal at 1/e.
    """

    def __init__(self, c: float = 1.0):
        if not c > 0:
            raise ValueError("scale must be positive")
        self.c = float(c)
        self.hi = max(1.0, self.c)

    def value(self, u):
        u = self.clip(u)
        return 0.0 if u == 0.0 else u * math.log(self.c / u)

    def values(self, u):
        u = np.clip(u, 0.0, self.hi)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = u * np.log(self.c / u)
        return np.where(u == 0.0, 0.0, out)

    def derivative(self, u):
        u = self.clip(u)
        return math.inf if u == 0.0 else math.log(self.c / u) - 1.0

    def turning_points(self):
        t = self.c / math.e
        return (t,) if t < self.hi else ()

    def describe(self):
        return {"kind": "XLogX", "c": self.c}
