"""Segmentation, truncation, rearrangement, and hostility functionals.

Two parallel settings share this module:

* the discrete one: ``n`` positions holding integer species, a symmetric
  enemy list saying which species interact, and a nonincreasing weight
  per position gap ("total hostility");
* the semi-discrete one: integer-valued step functions on an interval,
  with the singular kernel as the hostility weight.

The load-bearing facts, each of which has an exhaustive or randomized
test, are that sorting an arrangement never increases its total
hostility, and that vertical segmentation plus truncation never increase
the non-local energy.  The brute-force minimizer at the bottom is the
independent oracle for the sorting statements.
"""

from __future__ import annotations

import math
from typing import Callable, Iterable, Iterator, Sequence

import numpy as np

from .core import (DiscreteArrangement, EnemyList, HostilityWeights, Interval,
                   PiecewiseAffine1D, StepFunction1D, TailMode)
from .functional1d import EnergyParams, step_cells, _gap_pair_energies, INF


class WeightsTooShort(ValueError):
    """Weights do not cover every position gap that can occur."""


class TooShort(ValueError):
    """Operation needs an arrangement with at least two positions."""


class TooManyPermutations(ValueError):
    """Brute-force enumeration would exceed the safety bound."""


class ValuesNotOnGrid(ValueError):
    """Step function values are not integer multiples of delta."""


class BadBounds(ValueError):
    """Invalid truncation bounds."""


# ---------------------------------------------------------------------------
# vertical segmentation and truncation
# ---------------------------------------------------------------------------

def grid_floor_level(v: float, delta: float) -> int:
    """Largest integer k with k*delta <= v, robust to float rounding.

    Values within a relative 1e-12 of a grid level count as sitting on it
    (same guard as the interaction threshold), so functions with values
    intended to be exact multiples of delta are fixed points of the
    segmentation even when k*delta rounds.
    """
    k = round(v / delta)
    if abs(v - k * delta) <= 1e-12 * max(abs(v), delta):
        return k
    k = math.floor(v / delta)
    if (k + 1) * delta <= v:
        k += 1
    elif k * delta > v:
        k -= 1
    return k


def _merged_step(edges: Sequence[float], values: Sequence[float],
                 tail_mode: TailMode) -> StepFunction1D:
    """Step function from raw cells, merging equal-valued neighbours."""
    out_e = [edges[0]]
    out_v: list[float] = []
    for i, v in enumerate(values):
        if out_v and v == out_v[-1]:
            out_e[-1] = edges[i + 1]
        else:
            out_e.append(edges[i + 1])
            out_v.append(v)
    return StepFunction1D(tuple(out_e), tuple(out_v), tail_mode)


def _segment_pwa(u: PiecewiseAffine1D, delta: float) -> StepFunction1D:
    """Exact vertical segmentation of a piecewise affine function.

    Breakpoints are the solutions of u(x) = k*delta on each affine piece,
    so consecutive cell values differ by exactly delta across every
    crossing.
    """
    edges: list[float] = [u.nodes[0][0]]
    levels: list[int] = []
    cur: int | None = None

    def change_to(level: int, x: float):
        nonlocal cur
        if cur is None:
            cur = level
            return
        if level == cur:
            return
        if x > edges[-1]:
            edges.append(x)
            levels.append(cur)
        cur = level

    for (x0, y0), (x1, y1) in zip(u.nodes, u.nodes[1:]):
        slope = (y1 - y0) / (x1 - x0)
        k0 = grid_floor_level(y0, delta)
        on_level = abs(k0 * delta - y0) <= 1e-12 * max(abs(y0), delta)
        if slope < 0.0 and on_level:
            k0 -= 1  # just right of the node the function sits below the level
        change_to(k0, x0)
        if slope > 0.0:
            k = cur + 1
            while k * delta < y1:
                change_to(k, x0 + (k * delta - y0) / slope)
                k += 1
        elif slope < 0.0:
            k = cur
            while k * delta > y1:
                change_to(k - 1, x0 + (k * delta - y0) / slope)
                k -= 1
    edges.append(u.nodes[-1][0])
    levels.append(cur)

    values = [k * delta for k in levels]
    if not u.compact_support:
        return _merged_step(edges, values, TailMode.DOMAIN_ONLY)
    # compact support: fold the zero cells at both ends into the tails
    while len(values) > 1 and values[0] == 0.0:
        edges.pop(0)
        values.pop(0)
    while len(values) > 1 and values[-1] == 0.0:
        edges.pop()
        values.pop()
    return _merged_step(edges, values, TailMode.COMPACT_SUPPORT)


def vertical_segmentation(u, delta: float):
    """Round u down to the value grid delta*Z, pointwise.

    For a piecewise affine input the result is an exact
    :class:`StepFunction1D`; for a step function the values are floored
    in place; for a plain number or callable the floored number/callable
    is returned.
    """
    if not delta > 0.0:
        raise ValueError(f"delta must be positive, got {delta}")
    if isinstance(u, PiecewiseAffine1D):
        return _segment_pwa(u, delta)
    if isinstance(u, StepFunction1D):
        values = [grid_floor_level(v, delta) * delta for v in u.values]
        return _merged_step(u.breakpoints, values, u.tail_mode)
    if callable(u):
        return lambda x: grid_floor_level(u(x), delta) * delta
    return grid_floor_level(float(u), delta) * delta


def clamp_values(u: StepFunction1D, lo: float, hi: float) -> StepFunction1D:
    """Truncation: clamp the values of u into [lo, hi] pointwise.

    For a compactly supported function the bounds must bracket 0, since
    the zero tails are part of the function and must stay fixed under the
    clamp.
    """
    if lo > hi:
        raise BadBounds(f"need lo <= hi, got ({lo}, {hi})")
    if u.tail_mode is TailMode.COMPACT_SUPPORT and not lo <= 0.0 <= hi:
        raise BadBounds("bounds must bracket 0 for a compactly supported function")
    values = [min(max(v, lo), hi) for v in u.values]
    return _merged_step(u.breakpoints, values, u.tail_mode)


# ---------------------------------------------------------------------------
# monotone rearrangement
# ---------------------------------------------------------------------------

def monotone_rearrangement(u: DiscreteArrangement) -> DiscreteArrangement:
    """Nondecreasing rearrangement; level-set cardinalities are preserved."""
    return DiscreteArrangement(tuple(sorted(u.species)))


def monotone_rearrangement_step(u: StepFunction1D, domain: Interval) -> StepFunction1D:
    """Nondecreasing rearrangement of a step function on a bounded domain.

    Cells are sorted by value (stably) and laid out left to right with
    their lengths preserved, so every level set keeps its measure.
    """
    if not domain.bounded:
        raise ValueError("monotone rearrangement needs a bounded domain")
    edges, vals = step_cells(u, domain)
    lengths = np.diff(edges)
    order = np.argsort(vals, kind="stable")
    new_edges = [domain.lo]
    acc = domain.lo
    for i in order[:-1]:
        acc += float(lengths[i])
        new_edges.append(acc)
    new_edges.append(domain.hi)  # exact right endpoint, no accumulation drift
    return _merged_step(new_edges, [float(vals[i]) for i in order], TailMode.DOMAIN_ONLY)


# ---------------------------------------------------------------------------
# hostility functionals
# ---------------------------------------------------------------------------

def hostile_gap_counts(enemies: EnemyList, u: DiscreteArrangement) -> np.ndarray:
    """counts[d] = number of pairs x <= y with y - x = d and hostile species.

    The total hostility is the dot product of this vector with the
    weights, which lets property suites reuse one enumeration across many
    weight vectors.
    """
    spe = u.species
    n = len(spe)
    counts = np.zeros(n)
    for x in range(n):
        ux = spe[x]
        for y in range(x, n):
            if enemies.hostile(ux, spe[y]):
                counts[y - x] += 1.0
    return counts


def total_hostility(weights: HostilityWeights, enemies: EnemyList,
                    u: DiscreteArrangement) -> float:
    """Sum of h(y - x) over hostile pairs x <= y (self-pairs contribute h(0))."""
    n = len(u)
    if len(weights) < n:
        raise WeightsTooShort(f"need weights for gaps 0..{n - 1}, got {len(weights)}")
    counts = hostile_gap_counts(enemies, u)
    return float(np.dot(counts, np.asarray(weights.h[:n])))


def step_hostility(u: StepFunction1D, domain: Interval, k: int,
                   params: EnergyParams) -> float:
    """Semi-discrete total hostility of a delta-grid step function.

    The enemy list is "levels differing by at least k+1" and the weight
    is the singular kernel, so for k = 1 this coincides with the exact
    non-local energy (an identity the tests assert).  Counts both (x, y)
    and (y, x), like the symmetric double integral.
    """
    if not domain.bounded:
        raise ValueError("step hostility needs a bounded domain")
    if int(k) != k or k < 1:
        raise ValueError(f"k must be a positive integer, got {k!r}")
    delta = params.delta
    edges, vals = step_cells(u, domain)
    levels = np.round(vals / delta)
    bad = np.abs(vals - levels * delta) > 1e-9 * delta
    if np.any(bad):
        i = int(np.argmax(bad))
        raise ValuesNotOnGrid(f"value {vals[i]} at cell {i} is not a multiple of {delta}")
    levels = levels.astype(int)
    n = len(levels)
    if n >= 2 and np.any(np.abs(np.diff(levels)) >= k + 1):
        return INF
    parts = []
    for m in range(2, n):
        mask = np.abs(levels[m:] - levels[:-m]) >= k + 1
        if not mask.any():
            continue
        kk = n - m
        gap = edges[m:n] - edges[1:kk + 1]
        de = np.diff(edges)
        e = _gap_pair_energies(gap[mask], de[0:kk][mask], de[m:m + kk][mask],
                               params.delta, params.p)
        parts.append(float(np.sum(e)))
    return 2.0 * math.fsum(parts)


# ---------------------------------------------------------------------------
# reduction and gap formulas
# ---------------------------------------------------------------------------

def reduce_arrangement(u: DiscreteArrangement) -> tuple[DiscreteArrangement, int]:
    """Remove the rightmost occurrence of the highest species.

    Returns the shortened arrangement and the removed position (1-based,
    matching the gap formulas).  The rightmost tie-break is what makes
    reduction commute with monotone rearrangement.
    """
    spe = u.species
    if len(spe) < 2:
        raise TooShort("reduction needs at least two positions")
    mu = max(spe)
    m0 = len(spe) - 1 - spe[::-1].index(mu)
    return DiscreteArrangement(spe[:m0] + spe[m0 + 1:]), m0 + 1


def hostility_gap(weights: HostilityWeights, enemies: EnemyList,
                  u: DiscreteArrangement) -> float:
    """Hostility decrease caused by one reduction, by the direct formula.

    Equals total_hostility(u) - total_hostility(reduce(u)): the removed
    position drops all its own interactions, while hostile pairs that
    straddled it get one position closer.
    """
    spe = u.species
    n = len(spe)
    if n < 2:
        raise TooShort("hostility gap needs at least two positions")
    if len(weights) < n:
        raise WeightsTooShort(f"need weights for gaps 0..{n - 1}, got {len(weights)}")
    h = weights.h
    mu = max(spe)
    m0 = n - 1 - spe[::-1].index(mu)
    own = [h[abs(m0 - i)] for i in range(n) if enemies.hostile(spe[i], spe[m0])]
    squeeze = [h[j - i - 1] - h[j - i]
               for i in range(m0)
               for j in range(m0 + 1, n)
               if enemies.hostile(spe[i], spe[j])]
    return math.fsum(own) - math.fsum(squeeze)


def left_right_gap(weights: HostilityWeights, left: Iterable[int],
                   right: Iterable[int]) -> float:
    """Closed-form gap for positions of the top species block.

    With L and R the gaps to the same-block members on each side of the
    removed position, the value is
    h(0) + sum h(l) + sum h(r) - sum over LxR of [h(l+r-1) - h(l+r)],
    and it is bounded by the first |L|+|R|+1 weights (an inequality the
    acceptance suite checks exhaustively).
    """
    L = sorted(set(int(v) for v in left))
    R = sorted(set(int(v) for v in right))
    if any(v < 1 for v in L + R):
        raise ValueError("gap sets must contain positive integers")
    needed = max([0] + L + R + [(max(L) + max(R)) if L and R else 0])
    if needed > len(weights) - 1:
        raise WeightsTooShort(f"need weights up to gap {needed}, got {len(weights)}")
    h = weights.h
    total = h[0] + math.fsum(h[v] for v in L) + math.fsum(h[v] for v in R)
    cross = math.fsum(h[a + b - 1] - h[a + b] for a in L for b in R)
    return total - cross


# ---------------------------------------------------------------------------
# brute force oracle
# ---------------------------------------------------------------------------

def multiset_permutations(items: Iterable[int]) -> Iterator[tuple[int, ...]]:
    """Distinct permutations of a multiset, in lexicographic order."""
    seq = sorted(items)
    n = len(seq)
    while True:
        yield tuple(seq)
        i = n - 2
        while i >= 0 and seq[i] >= seq[i + 1]:
            i -= 1
        if i < 0:
            return
        j = n - 1
        while seq[j] <= seq[i]:
            j -= 1
        seq[i], seq[j] = seq[j], seq[i]
        seq[i + 1:] = reversed(seq[i + 1:])


def count_multiset_permutations(items: Sequence[int]) -> int:
    total = math.factorial(len(items))
    for v in set(items):
        total //= math.factorial(list(items).count(v))
    return total


def brute_force_min_hostility(weights: HostilityWeights, enemies: EnemyList,
                              multiset: Sequence[int],
                              guard: int = 1_000_000
                              ) -> tuple[float, DiscreteArrangement]:
    """Exact hostility minimum over all distinct orderings of a multiset.

    Enumerates lexicographically, so the returned witness is the
    lexicographically first minimizer regardless of evaluation order.
    """
    items = [int(v) for v in multiset]
    if len(items) < 1:
        raise TooShort("need at least one entry")
    if len(weights) < len(items):
        raise WeightsTooShort(f"need weights for gaps 0..{len(items) - 1}")
    n_perms = count_multiset_permutations(items)
    if n_perms > guard:
        raise TooManyPermutations(f"{n_perms} distinct permutations exceed the "
                                  f"guard of {guard}")
    h = weights.h
    hostile: dict[tuple[int, int], bool] = {}
    for a in set(items):
        for b in set(items):
            hostile[(a, b)] = enemies.hostile(a, b)
    best_val = math.inf
    best_perm: tuple[int, ...] | None = None
    n = len(items)
    for perm in multiset_permutations(items):
        acc = 0.0
        for x in range(n):
            px = perm[x]
            for y in range(x, n):
                if hostile[(px, perm[y])]:
                    acc += h[y - x]
        if acc < best_val:
            best_val = acc
            best_perm = perm
    return best_val, DiscreteArrangement(best_perm)
