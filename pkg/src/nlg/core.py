"""Domain types shared by every other module.

All types are immutable after construction and validate their invariants
eagerly, so a value that exists is a value that is well formed.  Energies
throughout the package are plain nonnegative floats where ``math.inf``
stands for a divergent integral; there is no wrapper type for that.

Conventions baked into the types:

* Step functions never store values *at* their breakpoints.  Every
  integral in the package treats the constancy intervals as open, so the
  breakpoint values are irrelevant (they form a null set).
* ``Interval`` endpoints may be infinite.  This makes the zero tails of a
  compactly supported step function first-class intervals, and full-line
  energies go through the same code path as bounded ones.
"""

from __future__ import annotations

import bisect
import enum
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence


class SchemaError(ValueError):
    """A serialized description violates the schema or an invariant."""


class NonMonotoneBreakpoints(SchemaError):
    def __init__(self, index: int):
        self.index = index
        super().__init__(f"breakpoints must be strictly increasing; violated at index {index}")


class NonSymmetricEnemyList(SchemaError):
    def __init__(self, index: int, pair: tuple[int, int]):
        self.index = index
        self.pair = pair
        super().__init__(f"explicit enemy list is not symmetric: pair {pair} at index {index} "
                         f"has no mirror")


class NonMonotoneWeights(SchemaError):
    def __init__(self, index: int):
        self.index = index
        super().__init__(f"hostility weights must be nonincreasing; violated at index {index}")


def _require_finite(values: Iterable[float], what: str) -> None:
    for i, v in enumerate(values):
        if not math.isfinite(v):
            raise SchemaError(f"{what} must be finite; got {v!r} at index {i}")


@dataclass(frozen=True)
class Interval:
    """Open interval (lo, hi); either endpoint may be infinite."""

    lo: float
    hi: float

    def __post_init__(self):
        if math.isnan(self.lo) or math.isnan(self.hi):
            raise SchemaError("interval endpoints must not be NaN")
        if not self.lo < self.hi:
            raise SchemaError(f"interval requires lo < hi, got ({self.lo}, {self.hi})")
        if self.lo == math.inf or self.hi == -math.inf:
            raise SchemaError("lo may only be -inf and hi may only be +inf")

    @staticmethod
    def full_line() -> "Interval":
        return Interval(-math.inf, math.inf)

    @property
    def bounded(self) -> bool:
        return math.isfinite(self.lo) and math.isfinite(self.hi)

    @property
    def length(self) -> float:
        return self.hi - self.lo

    def contains(self, other: "Interval") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi


FULL_LINE = Interval.full_line()


class TailMode(enum.Enum):
    """Behaviour of a step function outside its breakpoint range."""

    COMPACT_SUPPORT = "compact_support"   # value 0 on both unbounded tails
    DOMAIN_ONLY = "domain_only"           # undefined outside (x_0, x_n)


@dataclass(frozen=True)
class StepFunction1D:
    """Piecewise constant function on a finite partition.

    ``values[i]`` is the value on the open interval
    ``(breakpoints[i], breakpoints[i+1])``.  With
    ``TailMode.COMPACT_SUPPORT`` the function is 0 on the two unbounded
    tails; with ``TailMode.DOMAIN_ONLY`` it is only defined on
    ``(breakpoints[0], breakpoints[-1])``.
    """

    breakpoints: tuple[float, ...]
    values: tuple[float, ...]
    tail_mode: TailMode = TailMode.COMPACT_SUPPORT

    def __post_init__(self):
        object.__setattr__(self, "breakpoints", tuple(float(x) for x in self.breakpoints))
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        bp, vals = self.breakpoints, self.values
        if len(bp) < 2:
            raise SchemaError("a step function needs at least two breakpoints")
        if len(vals) != len(bp) - 1:
            raise SchemaError(f"expected {len(bp) - 1} values for {len(bp)} breakpoints, "
                              f"got {len(vals)}")
        _require_finite(bp, "breakpoints")
        _require_finite(vals, "values")
        for i in range(1, len(bp)):
            if not bp[i - 1] < bp[i]:
                raise NonMonotoneBreakpoints(i)
        if not isinstance(self.tail_mode, TailMode):
            raise SchemaError(f"bad tail_mode {self.tail_mode!r}")

    @property
    def support(self) -> Interval:
        return Interval(self.breakpoints[0], self.breakpoints[-1])

    @property
    def domain(self) -> Interval:
        """Largest interval on which the function is defined."""
        if self.tail_mode is TailMode.COMPACT_SUPPORT:
            return FULL_LINE
        return self.support

    def __call__(self, x: float) -> float:
        # Value at a breakpoint itself is a null-set convention: we return the
        # value of the cell to the right (left for the last breakpoint).
        bp = self.breakpoints
        if x < bp[0] or x > bp[-1]:
            if self.tail_mode is TailMode.COMPACT_SUPPORT:
                return 0.0
            raise ValueError(f"x={x} outside the domain of a domain-only step function")
        i = bisect.bisect_right(bp, x) - 1
        if i >= len(self.values):
            i = len(self.values) - 1
        return self.values[i]

    def to_json(self) -> dict:
        return {
            "breakpoints": list(self.breakpoints),
            "values": list(self.values),
            "tail_mode": self.tail_mode.value,
        }


@dataclass(frozen=True)
class PiecewiseAffine1D:
    """Continuous piecewise affine function given by its nodes.

    With ``compact_support=True`` the first and last node values must be 0
    and the function is 0 outside the node range; otherwise the function
    is only defined on the node range.
    """

    nodes: tuple[tuple[float, float], ...]
    compact_support: bool = True

    def __post_init__(self):
        object.__setattr__(
            self, "nodes", tuple((float(x), float(y)) for x, y in self.nodes))
        if len(self.nodes) < 2:
            raise SchemaError("a piecewise affine function needs at least two nodes")
        xs = [x for x, _ in self.nodes]
        ys = [y for _, y in self.nodes]
        _require_finite(xs, "node abscissae")
        _require_finite(ys, "node values")
        for i in range(1, len(xs)):
            if not xs[i - 1] < xs[i]:
                raise NonMonotoneBreakpoints(i)
        if self.compact_support and (ys[0] != 0.0 or ys[-1] != 0.0):
            raise SchemaError("compact support requires zero values at the first and last node")

    @property
    def lipschitz(self) -> float:
        """Largest slope magnitude; finite by construction."""
        best = 0.0
        for (x0, y0), (x1, y1) in zip(self.nodes, self.nodes[1:]):
            best = max(best, abs((y1 - y0) / (x1 - x0)))
        return best

    @property
    def support(self) -> Interval:
        return Interval(self.nodes[0][0], self.nodes[-1][0])

    def __call__(self, x: float) -> float:
        xs = [p[0] for p in self.nodes]
        if x <= xs[0] or x >= xs[-1]:
            if self.compact_support:
                return 0.0
            if x == xs[0]:
                return self.nodes[0][1]
            if x == xs[-1]:
                return self.nodes[-1][1]
            raise ValueError(f"x={x} outside the domain of a domain-only function")
        i = bisect.bisect_right(xs, x) - 1
        (x0, y0), (x1, y1) = self.nodes[i], self.nodes[i + 1]
        t = (x - x0) / (x1 - x0)
        return y0 + t * (y1 - y0)

    def to_json(self) -> dict:
        return {"nodes": [list(n) for n in self.nodes],
                "compact_support": self.compact_support}


@dataclass(frozen=True)
class DiscreteArrangement:
    """Finite sequence of integer species, positions 1..n."""

    species: tuple[int, ...]

    def __post_init__(self):
        if len(self.species) < 1:
            raise SchemaError("an arrangement needs at least one entry")
        spe = []
        for i, s in enumerate(self.species):
            if isinstance(s, bool) or int(s) != s:
                raise SchemaError(f"species must be integers; got {s!r} at index {i}")
            spe.append(int(s))
        object.__setattr__(self, "species", tuple(spe))

    def __len__(self) -> int:
        return len(self.species)

    def to_json(self) -> dict:
        return {"species": list(self.species)}


class _EnemyKind(enum.Enum):
    BAND_COMPLEMENT = "band_complement"
    BAND_SQUARE = "band_square"
    BAND_SQUARE_COMPLEMENT = "band_square_complement"
    EXPLICIT = "explicit"


@dataclass(frozen=True)
class EnemyList:
    """Symmetric subset of Z^2: which pairs of species are hostile.

    Construct through the classmethods; ``hostile(i, j)`` is the
    membership predicate.  ``band_complement(k)`` holds the pairs with
    ``|j - i| >= k + 1``; the two band-square variants hold a square
    block ``{lo..hi}^2`` or its complement; ``explicit`` holds a finite
    symmetric pair set.
    """

    kind: _EnemyKind
    a: int = 0
    b: int = 0
    pairs: frozenset[tuple[int, int]] = field(default_factory=frozenset)

    @classmethod
    def band_complement(cls, k: int) -> "EnemyList":
        if int(k) != k or k < 1:
            raise SchemaError(f"band_complement needs a positive integer, got {k!r}")
        return cls(_EnemyKind.BAND_COMPLEMENT, a=int(k))

    @classmethod
    def band_square(cls, lo: int, hi: int) -> "EnemyList":
        if lo > hi:
            raise SchemaError(f"band_square needs lo <= hi, got ({lo}, {hi})")
        return cls(_EnemyKind.BAND_SQUARE, a=int(lo), b=int(hi))

    @classmethod
    def band_square_complement(cls, lo: int, hi: int) -> "EnemyList":
        if lo > hi:
            raise SchemaError(f"band_square_complement needs lo <= hi, got ({lo}, {hi})")
        return cls(_EnemyKind.BAND_SQUARE_COMPLEMENT, a=int(lo), b=int(hi))

    @classmethod
    def explicit(cls, pairs: Iterable[Sequence[int]]) -> "EnemyList":
        seq = [(int(i), int(j)) for i, j in pairs]
        as_set = frozenset(seq)
        for idx, (i, j) in enumerate(seq):
            if (j, i) not in as_set:
                raise NonSymmetricEnemyList(idx, (i, j))
        return cls(_EnemyKind.EXPLICIT, pairs=as_set)

    def hostile(self, i: int, j: int) -> bool:
        if self.kind is _EnemyKind.BAND_COMPLEMENT:
            return abs(j - i) >= self.a + 1
        if self.kind is _EnemyKind.BAND_SQUARE:
            return self.a <= i <= self.b and self.a <= j <= self.b
        if self.kind is _EnemyKind.BAND_SQUARE_COMPLEMENT:
            return not (self.a <= i <= self.b and self.a <= j <= self.b)
        return (i, j) in self.pairs

    def to_json(self) -> dict:
        if self.kind is _EnemyKind.BAND_COMPLEMENT:
            return {"band_complement": self.a}
        if self.kind is _EnemyKind.BAND_SQUARE:
            return {"band_square": [self.a, self.b]}
        if self.kind is _EnemyKind.BAND_SQUARE_COMPLEMENT:
            return {"band_square_complement": [self.a, self.b]}
        return {"explicit": [list(p) for p in sorted(self.pairs)]}


@dataclass(frozen=True)
class HostilityWeights:
    """Nonincreasing weight per position gap, h(0), h(1), ..."""

    h: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "h", tuple(float(v) for v in self.h))
        if len(self.h) < 1:
            raise SchemaError("weights need at least one entry")
        _require_finite(self.h, "weights")
        for i in range(1, len(self.h)):
            if self.h[i] > self.h[i - 1]:
                raise NonMonotoneWeights(i)

    def __len__(self) -> int:
        return len(self.h)

    def to_json(self) -> dict:
        return {"h": list(self.h)}


def validate_and_build(raw: dict):
    """Build a validated domain value from its serialized description.

    Dispatches on the field names of the JSON schema.  Raises a
    :class:`SchemaError` subclass naming the violated invariant.
    """
    if not isinstance(raw, dict):
        raise SchemaError(f"expected a JSON object, got {type(raw).__name__}")
    keys = set(raw)
    if keys == {"breakpoints", "values", "tail_mode"}:
        try:
            mode = TailMode(raw["tail_mode"])
        except ValueError:
            raise SchemaError(f"unknown tail_mode {raw['tail_mode']!r}") from None
        return StepFunction1D(tuple(raw["breakpoints"]), tuple(raw["values"]), mode)
    if keys == {"nodes", "compact_support"}:
        return PiecewiseAffine1D(tuple(tuple(n) for n in raw["nodes"]),
                                 bool(raw["compact_support"]))
    if keys == {"species"}:
        return DiscreteArrangement(tuple(raw["species"]))
    if keys == {"band_complement"}:
        return EnemyList.band_complement(raw["band_complement"])
    if keys == {"band_square"}:
        return EnemyList.band_square(*raw["band_square"])
    if keys == {"band_square_complement"}:
        return EnemyList.band_square_complement(*raw["band_square_complement"])
    if keys == {"explicit"}:
        return EnemyList.explicit(raw["explicit"])
    if keys == {"h"}:
        return HostilityWeights(tuple(raw["h"]))
    raise SchemaError(f"unrecognized object with fields {sorted(keys)}")
