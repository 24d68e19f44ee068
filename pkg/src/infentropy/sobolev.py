"""W^{1,p} energies  int |f'|^p  of the maps, by series, quadrature and bounds.

All functions return the p-th power of the seminorm (the energy), since that
is the additive quantity across pieces.

On a branch of g_{a,b} the derivative blows up like w^{-(1-a)} where
w = g_{1,b}(t) -> 0, so |g'|^p carries the factor w^{-sigma} with
sigma = p(1 - a).  Integrals are taken in w, where the singular factor is
explicit: for sigma < 1 the substitution w = v^{1/(1-sigma)} removes it, for
sigma >= 1 the integral diverges and a refinement test confirms it.
"""
from __future__ import annotations

import math
from functools import lru_cache

from scipy import integrate

from .intervals import gain
from .kernels import Identity, PowerConjTent, Tent
from .maps import DyadicMap, IntervalMapSpec, Piece
from .reports import SeminormReport

QUAD_OPTS = dict(epsabs=0.0, epsrel=1e-12, limit=200)
DIVERGENCE_LEVEL = 12
DIVERGENCE_JUMP = 0.05


# -- the f_1 series ------------------------------------------------------------

def sobolev_seminorm_f1_series(p: float, tol: float = 1e-12) -> float:
    """sum_{n>=1} (2n+1)^p 2^-n, stopped once the ratio-test tail bound is below tol."""
    if p < 0:
        raise ValueError("p must be nonnegative")
    terms = []
    n = 1
    while True:
        term = (2 * n + 1) ** p * 2.0 ** -n
        terms.append(term)
        ratio = ((2 * n + 3) / (2 * n + 1)) ** p / 2.0
        if ratio < 1 and term * ratio / (1 - ratio) < tol:
            return math.fsum(terms)
        n += 1


# -- per-branch energies of g_{a,b} ------------------------------------------------

def _branch_integrand(a, p, b, k, shift):
    """G(w) with |g'|^p dx = w^-sigma G(w) dw on the k-th branch (k >= 1)."""
    sign = 1.0 if k % 2 == 0 else -1.0

    def g(w):
        t = (k + w) / b if k % 2 == 0 else (k + 1 - w) / b
        core = sign * b * t ** (1.0 - a) - shift * w ** (1.0 - a)
        return abs(core) ** p * a * t ** (a - 1.0) / b
    return g


def _singular_integral(g, sigma):
    """int_0^1 w^-sigma g(w) dw for sigma < 1, via w = v^(1/(1-sigma))."""
    if sigma == 0.0:
        return integrate.quad(g, 0.0, 1.0, **QUAD_OPTS)[0]
    e = 1.0 / (1.0 - sigma)
    return e * integrate.quad(lambda v: g(v ** e), 0.0, 1.0, **QUAD_OPTS)[0]


def _truncated_integral(g, sigma, level):
    """int_{2^-level}^1 w^-sigma g(w) dw, integrated in tau = -log w."""
    top = level * math.log(2.0)
    f = lambda tau: math.exp(tau * (sigma - 1.0)) * g(math.exp(-tau))
    return integrate.quad(f, 0.0, top, **QUAD_OPTS)[0]


def divergence_detected(g, sigma, start: int = DIVERGENCE_LEVEL, stop: int = 40) -> tuple[bool, float]:
    """Compare truncations at levels L and L+2 from L = start on.

    Returns (diverged, last partial value).  A relative jump above 5% at
    level >= start marks divergence.
    """
    prev = _truncated_integral(g, sigma, start)
    for level in range(start + 2, stop + 1, 2):
        cur = _truncated_integral(g, sigma, level)
        if abs(cur - prev) > DIVERGENCE_JUMP * abs(prev):
            return True, cur
        prev = cur
    return False, prev


def gab_energy(a: float, p: float, b: int, shift: float = 0.0) -> tuple[float, bool]:
    """int_0^1 |g_{a,b}'(u) - shift|^p du, and whether it diverges."""
    if a == 1.0:
        up, down = abs(b - shift) ** p, abs(-b - shift) ** p
        return (math.ceil(b / 2) * up + (b // 2) * down) / b, False
    sigma = p * (1.0 - a)
    parts = [abs(b ** a - shift) ** p * b ** -a]     # k = 0: g(u) = b^a u
    diverged = False
    for k in range(1, b):
        g = _branch_integrand(a, p, b, k, shift)
        if sigma < 1.0:
            parts.append(_singular_integral(g, sigma))
        else:
            hit, val = divergence_detected(g, sigma)
            diverged = diverged or hit
            parts.append(val)
    return math.fsum(parts), diverged


def _generic_kernel_energy(kernel, p, u0, u1, shift):
    cuts = sorted({u0, u1, *[t for t in kernel.turning_points() if u0 < t < u1]})
    f = lambda u: abs(kernel.derivative(u) - shift) ** p
    return math.fsum(integrate.quad(f, a, b, **QUAD_OPTS)[0] for a, b in zip(cuts, cuts[1:]))


def piece_energy(piece: Piece, p: float, shift: float = 0.0) -> tuple[float, bool]:
    """int over the piece domain of |f' - shift|^p, and a divergence flag."""
    scale = gain(piece.post, piece.pre)
    u0, u1 = sorted((piece.pre(piece.domain.lo), piece.pre(piece.domain.hi)))
    full = u0 == 0.0 and u1 == 1.0
    k = piece.kernel
    jac = 1.0 / abs(piece.pre.scale)
    rel = shift / scale
    if full and isinstance(k, Identity):
        return jac * abs(scale) ** p * abs(1.0 - rel) ** p, False
    if full and isinstance(k, Tent):
        e, div = gab_energy(1.0, p, k.b, rel)
        return jac * abs(scale) ** p * e, div
    if full and isinstance(k, PowerConjTent):
        e, div = gab_energy(k.a, p, k.b, rel)
        return jac * abs(scale) ** p * e, div
    return jac * abs(scale) ** p * _generic_kernel_energy(k, p, u0, u1, rel), False


# -- whole-map quadrature ---------------------------------------------------------------

def _piece_stream(spec: IntervalMapSpec, n_max: int):
    if isinstance(spec, DyadicMap):
        if spec.n_start > 1:
            yield spec.piece(0)
        for n in range(spec.n_start, n_max + 1):
            yield spec.piece(n)
    elif hasattr(spec, "pieces"):
        yield from spec.pieces
    else:
        i = 0
        while i <= n_max:
            yield spec.piece(i)
            i += 1


def sobolev_seminorm_quadrature(spec: IntervalMapSpec, p: float, n_max: int = 400,
                                tol: float = 1e-13, subtract_identity: bool = False,
                                bound="auto") -> SeminormReport:
    """Energy int_0^1 |f'|^p (or |f' - 1|^p) summed piece by piece.

    Pieces accumulating at 0 are summed until the terms drop below tol
    relative to the total; a geometric tail estimate is added.
    """
    if p < 1:
        raise ValueError("p must be >= 1")
    shift = 1.0 if subtract_identity else 0.0
    parts, diverged = [], False
    prev = None
    tail = 0.0
    used = 0
    for piece in _piece_stream(spec, n_max):
        e, div = piece_energy(piece, p, shift)
        diverged = diverged or div
        parts.append(e)
        used += 1
        if diverged:
            break
        total = math.fsum(parts)
        if prev is not None and 0 < e < prev and e < tol * max(total, 1.0) and used > 4:
            r = e / prev
            tail = e * r / (1 - r)
            break
        prev = e if e > 0 else prev
    emp = math.fsum(parts) + tail
    if bound == "auto":
        bound = default_sobolev_bound(spec, p, subtract_identity)
    grid = {"pieces": used, "tail_estimate": tail, "subtract_identity": subtract_identity}
    return SeminormReport.judged("sobolev", p, emp, bound, grid, 1e-9, diverged=diverged)


# -- analytic bounds ------------------------------------------------------------------

def aux_sobolev_terms(a: float, p: float, b: int) -> list[float]:
    """Per-branch energy bounds for g_{a,b}: k = 0 first, then k = 1..b-1.

    With sigma = p(1-a) and c_k = b^(p-1-sigma) a (b/k)^(1-a), the k-th
    bound is c_k (k^sigma/(1-sigma) + sigma k^(sigma-1)/(2-sigma)) for even k
    and c_k (k+1)^sigma/(1-sigma) for odd k.  Infinite once sigma >= 1.
    """
    if not 0.0 < a <= 1.0:
        raise ValueError("a must lie in (0, 1]")
    if b < 1 or int(b) != b:
        raise ValueError("b must be a positive integer")
    if p < 1:
        raise ValueError("p must be >= 1")
    sigma = p * (1.0 - a)
    out = [b ** (a * (p - 1.0))]
    if sigma >= 1.0:
        return out + [math.inf] * (b - 1)
    for k in range(1, b):
        c = b ** (p - 1.0 - sigma) * a * (b / k) ** (1.0 - a)
        if k % 2 == 0:
            out.append(c * (k ** sigma / (1.0 - sigma) + sigma * k ** (sigma - 1.0) / (2.0 - sigma)))
        else:
            out.append(c * (k + 1) ** sigma / (1.0 - sigma))
    return out


def _exact_sum(a, p, b):
    return math.fsum(aux_sobolev_terms(a, p, b))


@lru_cache(maxsize=None)
def sobolev_constant(a: float, p: float, b_max: int = 64) -> float:
    """K(a, p): sup over 2 <= b <= b_max of exact-sum / b^(p(1-a)+1)."""
    e = p * (1.0 - a) + 1.0
    return max(_exact_sum(a, p, b) / b ** e for b in range(2, b_max + 1))


def aux_sobolev_bound(a: float, p: float, b: int, mode: str = "exact") -> float:
    """Bound on [g_{a,b}]^p in W^{1,p}; +inf when p >= 1/(1-a)."""
    if a < 1.0 and p * (1.0 - a) >= 1.0:
        return math.inf
    if mode == "exact":
        return _exact_sum(a, p, b)
    if mode == "simplified":
        return sobolev_constant(float(a), float(p)) * b ** (p * (1.0 - a) + 1.0)
    raise ValueError(f"unknown mode {mode!r}")


def fa_sobolev_bound(a: float, p: float, mode: str = "exact", n_start: int = 1,
                     tol: float = 1e-15) -> float:
    """sum_n |I_n| aux_sobolev_bound(a, p, 2n+1) over the blocks of f_a."""
    if a < 1.0 and p * (1.0 - a) >= 1.0:
        return math.inf
    parts = []
    n = n_start
    while True:
        term = 2.0 ** -n * aux_sobolev_bound(a, p, 2 * n + 1, mode)
        parts.append(term)
        if n > n_start + 5 and term < tol * math.fsum(parts):
            break
        n += 1
    return math.fsum(parts)


def default_sobolev_bound(spec: IntervalMapSpec, p: float, subtract_identity: bool = False):
    if subtract_identity:
        return None
    prm = spec.params
    if spec.name == "fa":
        return fa_sobolev_bound(prm["a"], p)
    if spec.name == "gab":
        return aux_sobolev_bound(prm["a"], p, prm["b"])
    if spec.name == "tent":
        return aux_sobolev_bound(1.0, p, prm["b"])
    return None


__all__ = [
    "sobolev_seminorm_f1_series", "gab_energy", "piece_energy", "divergence_detected",
    "sobolev_seminorm_quadrature", "aux_sobolev_terms", "sobolev_constant",
    "aux_sobolev_bound", "fa_sobolev_bound", "default_sobolev_bound",
]
