"""One-dimensional threshold energies, exact on step functions.

The central object is the non-local energy

    E(u, D) = double integral of  delta^p / |y-x|^(1+p)
              over {(x, y) in D^2 : |u(y) - u(x)| > delta},

whose integrand depends on u only through the integration set.  On step
functions the double integral splits over pairs of constancy intervals
and each pair has an elementary antiderivative, so the energy is exact:
for bounded intervals (a1,b1), (a2,b2) with b1 < a2,

    p = 1:  delta * log[(a2-a1)(b2-b1) / ((a2-b1)(b2-a1))]
    p > 1:  delta^p/(p(p-1)) * [(a2-b1)^(1-p) - (a2-a1)^(1-p)
                                - (b2-b1)^(1-p) + (b2-a1)^(1-p)]

Unbounded tails are the analytic limits of these expressions (the terms
containing an infinite endpoint tend to 0), never truncations.  Touching
intervals whose values differ by more than delta make the energy +inf.

Interaction uses the strict inequality |u(y)-u(x)| > delta.  Jumps equal
to delta do NOT interact; that is what keeps staircases with consecutive
delta-multiple values at finite energy, and it is load-bearing for every
convergence experiment in this package.  Since values like k*delta carry
float rounding of about one ulp, the comparison applies a relative guard
of 1e-12: differences below delta*(1 + 1e-12) are treated as "equal to
delta", i.e. not interacting.  Inputs are expected to be exact multiples
of delta, for which the guard changes nothing mathematically.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import _quad
from .core import FULL_LINE, Interval, PiecewiseAffine1D, StepFunction1D, TailMode

INTERACTION_GUARD = 1e-12

INF = math.inf


class OverlappingIntervals(ValueError):
    """The two intervals of a pair energy have intersecting interiors."""


class DomainMismatch(ValueError):
    """Requested domain is not contained in the function's domain."""


class UnsupportedCombination(ValueError):
    """Energy not defined for this input type / exponent combination."""


class BreakpointQuery(ValueError):
    """Pointwise quantity requested exactly at a breakpoint."""


class NonUniformGrid(ValueError):
    """Samples are not on an equally spaced grid."""


class ToleranceNotReached(RuntimeError):
    """Adaptive refinement budget exhausted before reaching the tolerance."""

    def __init__(self, estimate: float, error_estimate: float):
        self.estimate = estimate
        self.error_estimate = error_estimate
        super().__init__(f"achieved {estimate} +- {error_estimate}")


@dataclass(frozen=True)
class EnergyParams:
    """Threshold delta > 0 and kernel exponent p >= 1."""

    delta: float
    p: float = 1.0

    def __post_init__(self):
        if not (self.delta > 0.0 and math.isfinite(self.delta)):
            raise ValueError(f"delta must be positive and finite, got {self.delta}")
        if not self.p >= 1.0:
            raise ValueError(f"p must be >= 1, got {self.p}")

    @property
    def threshold(self) -> float:
        """Effective strict-interaction threshold including the float guard."""
        return self.delta * (1.0 + INTERACTION_GUARD)


# ---------------------------------------------------------------------------
# pair energies
# ---------------------------------------------------------------------------

def pair_cell_energy(i1: Interval, i2: Interval, params: EnergyParams) -> float:
    """Exact kernel integral over i1 x i2 for disjoint intervals.

    Returns +inf when the intervals touch (shared endpoint), since the
    kernel is not integrable across the contact point for any p >= 1.
    """
    a1, b1, a2, b2 = i1.lo, i1.hi, i2.lo, i2.hi
    if (a2, b2) < (a1, b1):
        a1, b1, a2, b2 = a2, b2, a1, b1
    if b1 > a2:
        raise OverlappingIntervals(f"({a1}, {b1}) and ({a2}, {b2}) overlap")
    gap = a2 - b1
    if gap == 0.0:
        return INF
    len1 = b1 - a1
    len2 = b2 - a2
    delta, p = params.delta, params.p
    if p == 1.0:
        if len1 == INF and len2 == INF:
            return INF
        if len1 == INF:
            return delta * math.log1p(len2 / gap)
        if len2 == INF:
            return delta * math.log1p(len1 / gap)
        return delta * math.log1p(len1 * len2 / (gap * (gap + len1 + len2)))
    q = 1.0 - p
    coef = delta ** p / (p * (p - 1.0))
    # x ** q -> 0 for x = +inf, which drops exactly the vanishing limit terms
    brk = gap ** q - (gap + len1) ** q - (gap + len2) ** q + (gap + len1 + len2) ** q
    return coef * max(brk, 0.0)


def pair_cell_quadrature(i1: Interval, i2: Interval, params: EnergyParams,
                         rel_tol: float = 1e-9) -> float:
    """Adaptive tensor-quadrature oracle for :func:`pair_cell_energy`.

    Bounded pairs are integrated directly.  An unbounded side is truncated
    where the remaining tail (computed by 1D quadrature of the elementary
    inner antiderivative, not by the closed form under test) drops below
    the tolerance, and that tail value is added back.
    """
    a1, b1, a2, b2 = i1.lo, i1.hi, i2.lo, i2.hi
    if (a2, b2) < (a1, b1):
        a1, b1, a2, b2 = a2, b2, a1, b1
    if b1 > a2:
        raise OverlappingIntervals(f"({a1}, {b1}) and ({a2}, {b2}) overlap")
    if a2 - b1 == 0.0:
        return INF
    delta, p = params.delta, params.p
    if p == 1.0 and a1 == -INF and b2 == INF:
        return INF

    def kernel(xs, ys):
        return delta ** p * np.abs(ys - xs) ** (-1.0 - p)

    # inner antiderivative in y: integral over (Y, inf) of the kernel.
    def y_tail(x, cut):
        return delta ** p / p * (cut - x) ** (-p)

    def x_tail(y, cut):
        return delta ** p / p * (y - cut) ** (-p)

    span = (a2 - b1) + (b1 - a1 if math.isfinite(a1) else 0.0) \
        + (b2 - a2 if math.isfinite(b2) else 0.0) + 1.0
    tail = 0.0
    cut_lo, cut_hi = a1, b2
    # pilot scale from the bounded core (or a unit box ahead of the cuts)
    core_hi = b2 if math.isfinite(b2) else a2 + span
    core_lo = a1 if math.isfinite(a1) else b1 - span
    pilot = _quad._simpson_cell(kernel, core_lo, b1, a2, core_hi)
    abs_tol = max(rel_tol * abs(pilot), 1e-300)

    if b2 == INF:
        cut_hi = a2 + span
        while _quad.adaptive_simpson(lambda x: y_tail(x, cut_hi), core_lo, b1,
                                     abs_tol * 1e-3) > 0.05 * abs_tol:
            cut_hi = a2 + (cut_hi - a2) * 4.0
        tail += _quad.adaptive_simpson(lambda x: y_tail(x, cut_hi), core_lo, b1,
                                       abs_tol * 1e-3)
    if a1 == -INF:
        cut_lo = b1 - span
        while _quad.adaptive_simpson(lambda y: x_tail(y, cut_lo), a2, cut_hi,
                                     abs_tol * 1e-3) > 0.05 * abs_tol:
            cut_lo = b1 - (b1 - cut_lo) * 4.0
        tail += _quad.adaptive_simpson(lambda y: x_tail(y, cut_lo), a2, cut_hi,
                                       abs_tol * 1e-3)

    value, _ = _quad.adaptive_cells_2d(kernel, cut_lo, b1, a2, cut_hi, abs_tol)
    return value + tail


# ---------------------------------------------------------------------------
# step functions: cells and exact energy
# ---------------------------------------------------------------------------

def step_cells(u: StepFunction1D, domain: Interval) -> tuple[np.ndarray, np.ndarray]:
    """Constancy cells of ``u`` restricted to ``domain``.

    Returns ``(edges, values)`` with ``len(edges) == len(values) + 1``;
    the outer edges may be infinite for a compactly supported function on
    an unbounded domain.
    """
    if u.tail_mode is TailMode.DOMAIN_ONLY:
        if not u.support.contains(domain):
            raise DomainMismatch(
                f"domain ({domain.lo}, {domain.hi}) exceeds the function's "
                f"support ({u.breakpoints[0]}, {u.breakpoints[-1]})")
        pieces_bp = [(u.breakpoints[i], u.breakpoints[i + 1], v)
                     for i, v in enumerate(u.values)]
    else:
        pieces_bp = [(-INF, u.breakpoints[0], 0.0)]
        pieces_bp += [(u.breakpoints[i], u.breakpoints[i + 1], v)
                      for i, v in enumerate(u.values)]
        pieces_bp.append((u.breakpoints[-1], INF, 0.0))
    edges: list[float] = []
    vals: list[float] = []
    for a, b, v in pieces_bp:
        lo = max(a, domain.lo)
        hi = min(b, domain.hi)
        if lo < hi:
            if not edges:
                edges.append(lo)
            edges.append(hi)
            vals.append(v)
    return np.asarray(edges), np.asarray(vals)


def _gap_pair_energies(gap, len1, len2, delta, p):
    """Vectorized pair energy for arrays of bounded separated cells."""
    if p == 1.0:
        return delta * np.log1p(len1 * len2 / (gap * (gap + len1 + len2)))
    q = 1.0 - p
    coef = delta ** p / (p * (p - 1.0))
    brk = gap ** q - (gap + len1) ** q - (gap + len2) ** q + (gap + len1 + len2) ** q
    return coef * np.maximum(brk, 0.0)


def _interacts(level_diff: np.ndarray, thr: float) -> np.ndarray:
    return np.abs(level_diff) > thr


def _sum_core_general(edges, vals, interact_of_gap, params) -> list[float]:
    """Per-gap pair sums over bounded cells; returns partial sums.

    ``interact_of_gap(m)`` must return the boolean interaction mask for
    the pairs (i, i+m).
    """
    n = len(vals)
    de = np.diff(edges)
    parts = []
    for m in range(2, n):
        mask = interact_of_gap(m)
        if not mask.any():
            continue
        k = n - m
        gap = edges[m:n] - edges[1:k + 1]
        len1 = de[0:k]
        len2 = de[m:m + k]
        e = _gap_pair_energies(gap[mask], len1[mask], len2[mask],
                               params.delta, params.p)
        parts.append(float(np.sum(e)))
    return parts


def _sum_core_uniform(n, ell, step, params, thr) -> list[float]:
    """O(n) pair sum for a uniform partition with arithmetic values.

    ``ell`` is the common cell width, ``step`` the common value increment;
    the pair (i, i+m) then has gap (m-1)*ell and interacts iff
    m*|step| > thr, so contributions aggregate by the index gap m.
    """
    m = np.arange(2, n, dtype=float)
    mask = m * abs(step) > thr
    if not mask.any():
        return []
    m = m[mask]
    counts = n - m
    delta, p = params.delta, params.p
    if p == 1.0:
        e = delta * np.log1p(1.0 / (m * m - 1.0))
    else:
        q = 1.0 - p
        e = delta ** p / (p * (p - 1.0)) * ell ** q \
            * ((m - 1.0) ** q - 2.0 * m ** q + (m + 1.0) ** q)
    return [float(np.sum(counts * e))]


def _sum_unbounded_tail(edges, vals, side: str, params, thr) -> list[float]:
    """Pairs of one unbounded zero tail against every interacting bounded cell."""
    n = len(vals)
    delta, p = params.delta, params.p
    if side == "left":
        x0 = edges[1]
        idx = np.arange(2, n)          # skip the adjacent cell
        gap = edges[idx] - x0
        lens = edges[idx + 1] - edges[idx]
    else:
        xn = edges[-2]
        idx = np.arange(0, n - 2)
        gap = xn - edges[idx + 1]
        lens = edges[idx + 1] - edges[idx]
    if len(idx) == 0:
        return []
    mask = _interacts(vals[idx] - 0.0, thr) & np.isfinite(lens)
    if not mask.any():
        return []
    gap, lens = gap[mask], lens[mask]
    if p == 1.0:
        e = delta * np.log1p(lens / gap)
    else:
        q = 1.0 - p
        e = delta ** p / (p * (p - 1.0)) * np.maximum(gap ** q - (gap + lens) ** q, 0.0)
    return [float(np.sum(e))]


def step_energy(u: StepFunction1D, domain: Interval | None = None,
                params: EnergyParams = None) -> float:
    """Exact non-local energy of a step function on a domain.

    The sum runs over ordered pairs of distinct cells whose values differ
    by more than delta, so every unordered pair is counted twice, matching
    the symmetric double integral.  Returns +inf exactly when two touching
    cells interact.  Uses compensated accumulation (math.fsum over the
    per-gap partial sums), so the result does not depend on summation
    order beyond one rounding of the exact sum.
    """
    if params is None:
        raise TypeError("params is required")
    if domain is None:
        domain = u.domain
    edges, vals = step_cells(u, domain)
    n = len(vals)
    thr = params.threshold
    if n >= 2 and np.any(_interacts(np.diff(vals), thr)):
        return INF
    if n < 3:
        return 0.0

    c0 = 1 if edges[0] == -INF else 0
    c1 = n - 1 if edges[-1] == INF else n
    ce = edges[c0:c1 + 1]
    cv = vals[c0:c1]
    parts: list[float] = []
    ncore = len(cv)
    if ncore >= 3:
        de = np.diff(ce)
        ell = (ce[-1] - ce[0]) / ncore
        dv = np.diff(cv)
        # spacing/value differences carry the rounding of the endpoints, so
        # the detection tolerance scales with their magnitude, not the gap
        eps = np.finfo(float).eps
        tol_sp = 1e-12 * ell + 4.0 * eps * max(abs(ce[0]), abs(ce[-1]))
        tol_val = 1e-9 * params.delta + 4.0 * eps * float(np.max(np.abs(cv)))
        uniform = np.max(np.abs(de - ell)) <= tol_sp
        step = dv[0] if len(dv) else 0.0
        arithmetic = len(dv) == 0 or np.max(np.abs(dv - step)) <= tol_val
        if uniform and arithmetic:
            parts += _sum_core_uniform(ncore, ell, step, params, thr)
        else:
            parts += _sum_core_general(
                ce, cv, lambda m: _interacts(cv[m:] - cv[:-m], thr), params)
    if c0 == 1:
        parts += _sum_unbounded_tail(edges, vals, "left", params, thr)
    if c1 == n - 1:
        parts += _sum_unbounded_tail(edges, vals, "right", params, thr)

    with np.errstate(over="ignore"):
        total = 2.0 * math.fsum(parts)
    return total


def interaction_pairs(u: StepFunction1D, domain: Interval,
                      params: EnergyParams) -> list[tuple[int, int]]:
    """Index pairs (i < j) of interacting cells of ``u`` on ``domain``."""
    _, vals = step_cells(u, domain)
    thr = params.threshold
    out = []
    for i in range(len(vals)):
        for j in range(i + 1, len(vals)):
            if abs(vals[j] - vals[i]) > thr:
                out.append((i, j))
    return out


# ---------------------------------------------------------------------------
# Lipschitz functions: adaptive quadrature
# ---------------------------------------------------------------------------

def energy_quadrature(u: Callable[[float], float], lipschitz: float,
                      domain: Interval, params: EnergyParams, tol: float,
                      max_cells: int = 300_000) -> float:
    """Numerical energy of an L-Lipschitz function on a bounded domain.

    No pair closer than delta/L can interact, so integration runs only
    over {|y - x| >= delta/L}; cells entirely inside that excluded band
    are dropped without evaluating the (there singular) kernel.  The
    indicator |u(y)-u(x)| > delta is evaluated pointwise on the adaptive
    grid, and the refinement queue resolves its discontinuity curve.
    """
    if not domain.bounded:
        raise DomainMismatch("energy_quadrature needs a bounded domain")
    if not (lipschitz > 0.0 and math.isfinite(lipschitz)):
        raise ValueError(f"need a positive finite Lipschitz bound, got {lipschitz}")
    delta, p = params.delta, params.p
    r = delta / lipschitz
    try:
        probe = np.asarray(u(np.asarray([domain.lo, domain.hi])), dtype=float)
        uvec = u if probe.shape == (2,) else np.vectorize(u, otypes=[float])
    except Exception:
        uvec = np.vectorize(u, otypes=[float])

    def f(xs, ys):
        s = np.abs(ys - xs)
        far = s >= r
        out = np.zeros_like(s)
        if np.any(far):
            du = np.abs(uvec(ys[far]) - uvec(xs[far]))
            k = np.where(du > delta, delta ** p * s[far] ** (-1.0 - p), 0.0)
            out[far] = k
        return out

    def skip(cx0, cx1, cy0, cy1):
        return (cy1 - cx0 < r) & (cy0 - cx1 > -r)

    lo, hi = domain.lo, domain.hi
    try:
        value, _ = _quad.adaptive_cells_2d(
            f, lo, hi, lo, hi, tol, skip=skip, max_cells=max_cells,
            min_size=(hi - lo) * 1e-8, initial=8)
    except _quad.BudgetExhausted as exc:
        raise ToleranceNotReached(exc.value, exc.error_estimate) from None
    return value


# ---------------------------------------------------------------------------
# local limit energy
# ---------------------------------------------------------------------------

def local_energy(u: PiecewiseAffine1D | StepFunction1D, p: float,
                 extended: bool = False) -> float:
    """The local energy: integral of |u'|^p for p > 1, total variation for p = 1.

    Step functions have infinite local energy for p > 1 (they are not
    Sobolev); pass ``extended=True`` to get +inf instead of an error.
    """
    if not p >= 1.0:
        raise ValueError(f"p must be >= 1, got {p}")
    if isinstance(u, PiecewiseAffine1D):
        total = 0.0
        for (x0, y0), (x1, y1) in zip(u.nodes, u.nodes[1:]):
            slope = (y1 - y0) / (x1 - x0)
            total += abs(slope) ** p * (x1 - x0)
        return total
    if isinstance(u, StepFunction1D):
        if p > 1.0:
            if extended:
                return INF
            raise UnsupportedCombination(
                "step functions have infinite |u'|^p energy for p > 1; "
                "pass extended=True for the +inf convention")
        jumps = [abs(b - a) for a, b in zip(u.values, u.values[1:])]
        if u.tail_mode is TailMode.COMPACT_SUPPORT:
            jumps.append(abs(u.values[0]))
            jumps.append(abs(u.values[-1]))
        return math.fsum(jumps)
    raise UnsupportedCombination(f"unsupported input type {type(u).__name__}")


# ---------------------------------------------------------------------------
# pointwise hostility
# ---------------------------------------------------------------------------

def pointwise_hostility(u: StepFunction1D, x: float, params: EnergyParams) -> float:
    """Contribution of the single point x to the energy of u.

    Integrates the kernel over {y : |u(y) - u(x)| > delta}, exactly, via
    the one-dimensional antiderivative on each interacting cell.  The
    energy of u is the integral of this function over the domain.
    """
    domain = u.domain
    if u.tail_mode is TailMode.DOMAIN_ONLY and not (domain.lo < x < domain.hi):
        raise BreakpointQuery(f"x={x} outside the domain ({domain.lo}, {domain.hi})")
    if x in u.breakpoints:
        raise BreakpointQuery(f"x={x} is a breakpoint")
    edges, vals = step_cells(u, domain)
    i = bisect.bisect_right(edges.tolist(), x) - 1
    i = min(max(i, 0), len(vals) - 1)
    ux = vals[i]
    thr = params.threshold
    delta, p = params.delta, params.p
    parts = []
    for j, v in enumerate(vals):
        if j == i or not abs(v - ux) > thr:
            continue
        c, d = edges[j], edges[j + 1]
        if c >= x:
            lo_t = (c - x) ** -p
            hi_t = (d - x) ** -p if d != INF else 0.0
        else:
            lo_t = (x - d) ** -p
            hi_t = (x - c) ** -p if c != -INF else 0.0
        parts.append(delta ** p / p * (lo_t - hi_t))
    return math.fsum(parts)


def integrate_pointwise_hostility(u: StepFunction1D, params: EnergyParams,
                                  rel_tol: float = 1e-6) -> float:
    """Quadrature of the pointwise hostility over the whole domain.

    Used to check the identity "integral of the pointwise hostility equals
    the energy" against :func:`step_energy`; both sides are computed by
    entirely different code paths.  Breakpoints are nudged inward by a
    relative 1e-9 when sampled (the integrand is defined off a null set).
    """
    domain = u.domain
    edges, vals = step_cells(u, domain)
    scale = abs(step_energy(u, domain, params))
    if not math.isfinite(scale):
        raise UnsupportedCombination("divergent energy; the identity is +inf = +inf")
    n_pieces = len(vals)
    tol = max(scale, 1e-12) * rel_tol / max(n_pieces, 1)
    parts = []
    for j in range(len(vals)):
        a, b = edges[j], edges[j + 1]
        if a == -INF:
            x0 = edges[j + 1]

            def g(t, x0=x0):
                if t <= 0.0:
                    return 0.0
                x = x0 - (1.0 - t) / t
                return pointwise_hostility(u, x, params) / (t * t)

            parts.append(_quad.adaptive_simpson(g, 0.0, 1.0 - 1e-9, tol))
        elif b == INF:
            xn = edges[j]

            def g(t, xn=xn):
                if t <= 0.0:
                    return 0.0
                x = xn + (1.0 - t) / t
                return pointwise_hostility(u, x, params) / (t * t)

            parts.append(_quad.adaptive_simpson(g, 0.0, 1.0 - 1e-9, tol))
        else:
            eps = (b - a) * 1e-9
            parts.append(_quad.adaptive_simpson(
                lambda x: pointwise_hostility(u, x, params), a + eps, b - eps, tol))
    return math.fsum(parts)


# ---------------------------------------------------------------------------
# piecewise affine interpolation energy
# ---------------------------------------------------------------------------

def affine_interpolation_energy(samples: Sequence[tuple[float, float]],
                                p: float) -> float:
    """Local energy of the affine interpolant through equally spaced samples.

    For samples on a grid with spacing s the interpolant has energy
    sum |u(x_{i+1}) - u(x_i)|^p * s^(1-p); on dyadically refined grids
    this is nondecreasing and converges to the local energy of u.
    """
    if not p >= 1.0:
        raise ValueError(f"p must be >= 1, got {p}")
    if len(samples) < 2:
        raise NonUniformGrid("need at least two samples")
    xs = np.asarray([s[0] for s in samples], dtype=float)
    ys = np.asarray([s[1] for s in samples], dtype=float)
    dx = np.diff(xs)
    if np.any(dx <= 0.0):
        raise NonUniformGrid("grid points must be strictly increasing")
    s = (xs[-1] - xs[0]) / (len(xs) - 1)
    if np.max(np.abs(dx - s)) > 1e-9 * s:
        raise NonUniformGrid(f"spacing varies by more than 1e-9 relative: {dx}")
    return float(np.sum(np.abs(np.diff(ys)) ** p) * s ** (1.0 - p))
