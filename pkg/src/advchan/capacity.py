"""Capacity expressions for binary channels with an online adversary.

Four quantities are covered:

* erasure channel, open-loop encoding: (1-2p)(1-q)
* erasure channel with transmitter feedback: (1-p)(1-q)
* bit-flip upper bound: min over pbar in [0, p] of
      alpha * (1 - h2(pbar/alpha * q))   with alpha = 1 - 4(p - pbar),
  which collapses to a three-piece closed form with breakpoint p0
* bit-flip achievable rate: the q=0 closed form evaluated at p*q

Everything here is a pure function of its arguments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

GRID_POINTS = 10_000  # dense scan before local refinement
_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
_INV_PHI2 = (3.0 - math.sqrt(5.0)) / 2.0

REGIME_CONVEX = "convex_region"
REGIME_LINEAR = "linear_region"
REGIME_ZERO = "zero"


class DomainError(ValueError):
    """Argument outside the function's mathematical domain."""


class SolverError(RuntimeError):
    """Root bracketing or refinement failed."""


@dataclass(frozen=True)
class FlipBoundBreakdown:
    """Result of the bit-flip upper-bound minimization at one (p, q)."""

    p: float
    q: float
    value: float
    p_bar_star: float
    alpha: float
    p0: float
    regime: str


def h2(x):
    """Binary entropy in bits; endpoints defined as 0 by continuity."""
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"h2 argument must be in [0,1], got {x}")
    if x == 0.0 or x == 1.0:
        return 0.0
    return -x * math.log2(x) - (1.0 - x) * math.log2(1.0 - x)


def star(x, y):
    """Crossover probability of two cascaded symmetric channels: x(1-y)+y(1-x)."""
    if not (0.0 <= x <= 1.0 and 0.0 <= y <= 1.0):
        raise DomainError(f"star arguments must be in [0,1], got ({x}, {y})")
    return x * (1.0 - y) + y * (1.0 - x)


def _check_unit_square(p, q):
    if not (0.0 <= p <= 1.0 and 0.0 <= q <= 1.0):
        raise DomainError(f"(p, q) must lie in the unit square, got ({p}, {q})")


def capacity_erasure(p, q):
    """Capacity with adversarial + random erasures, open-loop encoding."""
    _check_unit_square(p, q)
    if p >= 0.5:
        return 0.0
    return (1.0 - 2.0 * p) * (1.0 - q)


def capacity_erasure_feedback(p, q):
    """Capacity with adversarial + random erasures and transmitter feedback."""
    _check_unit_square(p, q)
    return (1.0 - p) * (1.0 - q)


def p0_residual(p0, q):
    """Left side of the breakpoint equation; the root p0(q) makes this 0."""
    s = star(p0, q)
    return 4.0 + (1.0 + 2.0 * q) * math.log2(s) + (3.0 - 2.0 * q) * math.log2(1.0 - s)


def p0_solve(q, tol=1e-12):
    """Breakpoint p0(q) of the flip upper bound, by bisection in (0, 1/4).

    The breakpoint separates the entropy-curve region from the tangent-line
    region.  Raises SolverError if no sign change brackets a root.
    """
    if not 0.0 <= q < 0.5:
        raise DomainError(f"q must be in [0, 1/2), got {q}")
    if tol <= 0.0:
        raise DomainError("tol must be positive")
    lo, hi = 1e-15, 0.25 - 1e-15
    flo, fhi = p0_residual(lo, q), p0_residual(hi, q)
    if flo * fhi > 0.0:
        raise SolverError(f"no sign change for p0 equation on (0, 1/4) at q={q}")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        fmid = p0_residual(mid, q)
        if abs(fmid) < tol:
            return mid
        if flo * fmid < 0.0:
            hi = mid
        else:
            lo, flo = mid, fmid
    root = 0.5 * (lo + hi)
    if abs(p0_residual(root, q)) >= tol:
        raise SolverError(f"p0 bisection did not reach residual {tol} at q={q}")
    return root


def _flip_objective_vec(p_bar, p, q):
    """Vectorized alpha*(1 - h2(pbar/alpha * q)) over an array of pbar values."""
    p_bar = np.asarray(p_bar, dtype=float)
    alpha = 1.0 - 4.0 * (p - p_bar)
    r = np.where(alpha > 0.0, p_bar / np.where(alpha > 0.0, alpha, 1.0), 0.0)
    s = r * (1.0 - q) + q * (1.0 - r)
    with np.errstate(divide="ignore", invalid="ignore"):
        ent = -s * np.log2(s) - (1.0 - s) * np.log2(1.0 - s)
    ent = np.where((s <= 0.0) | (s >= 1.0), 0.0, np.nan_to_num(ent))
    return alpha * (1.0 - ent)


def _flip_objective(p_bar, p, q):
    alpha = 1.0 - 4.0 * (p - p_bar)
    return alpha * (1.0 - h2(star(p_bar / alpha, q)))


def upper_bound_flip_numeric(p, q, tol=1e-9):
    """Flip upper bound by direct minimization over pbar in [0, p].

    Dense grid scan followed by golden-section refinement of the bracketing
    interval; no unimodality assumption beyond the local bracket.
    """
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"p must be in [0,1], got {p}")
    if not 0.0 <= q <= 0.5:
        raise DomainError(f"q must be in [0, 1/2], got {q}")
    if tol <= 0.0:
        raise DomainError("tol must be positive")
    if p >= 0.25 or q == 0.5:
        p0 = p0_solve(q) if q < 0.5 else float("nan")
        return FlipBoundBreakdown(p, q, 0.0, 0.0, 1.0 - 4.0 * p, p0, REGIME_ZERO)

    p0 = p0_solve(q)
    if p == 0.0:
        return FlipBoundBreakdown(p, q, 1.0 - h2(q), 0.0, 1.0, p0, REGIME_CONVEX)

    grid = np.linspace(0.0, p, GRID_POINTS)
    vals = _flip_objective_vec(grid, p, q)
    i = int(np.argmin(vals))
    a = grid[max(i - 1, 0)]
    b = grid[min(i + 1, GRID_POINTS - 1)]

    # golden-section on the bracketing interval
    h = b - a
    c, d = a + _INV_PHI2 * h, a + _INV_PHI * h
    yc, yd = _flip_objective(c, p, q), _flip_objective(d, p, q)
    while h > tol:
        if yc < yd:
            b, d, yd = d, c, yc
            h = b - a
            c = a + _INV_PHI2 * h
            yc = _flip_objective(c, p, q)
        else:
            a, c, yc = c, d, yd
            h = b - a
            d = a + _INV_PHI * h
            yd = _flip_objective(d, p, q)
    p_bar_star = c if yc < yd else d
    # boundary candidates can beat the interior bracket
    candidates = [(float(_flip_objective(x, p, q)), float(x)) for x in (p_bar_star, 0.0, p)]
    value, p_bar_star = min(candidates)
    regime = REGIME_CONVEX if p <= p0 else REGIME_LINEAR
    alpha = 1.0 - 4.0 * (p - p_bar_star)
    return FlipBoundBreakdown(p, q, value, p_bar_star, alpha, p0, regime)


def upper_bound_flip_closed(p, q):
    """Flip upper bound via the three-piece closed form (curve / tangent / zero)."""
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"p must be in [0,1], got {p}")
    if not 0.0 <= q <= 0.5:
        raise DomainError(f"q must be in [0, 1/2], got {q}")
    if p >= 0.25 or q == 0.5:
        return 0.0
    p0 = p0_solve(q)
    if p <= p0:
        return 1.0 - h2(star(p, q))
    return (1.0 - 4.0 * p) / (1.0 - 4.0 * p0) * (1.0 - h2(star(p0, q)))


def achievable_flip(p, q):
    """Achievable flip rate: the q=0 closed form evaluated at effective flip rate p*q."""
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"p must be in [0,1], got {p}")
    if not 0.0 <= q <= 0.5:
        raise DomainError(f"q must be in [0, 1/2], got {q}")
    return upper_bound_flip_closed(min(star(p, q), 1.0), 0.0)
