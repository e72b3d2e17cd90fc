import json
import math

import pytest
from hypothesis import given, strategies as st

from nlg import (DiscreteArrangement, EnemyList, HostilityWeights, Interval,
                 PiecewiseAffine1D, SchemaError, StepFunction1D, TailMode,
                 validate_and_build)
from nlg.core import (NonMonotoneBreakpoints, NonMonotoneWeights,
                      NonSymmetricEnemyList)


def test_interval_basics():
    full = Interval.full_line()
    assert not full.bounded
    assert Interval(0, 1).bounded
    assert Interval(-math.inf, 3.0).contains(Interval(0, 1))
    with pytest.raises(SchemaError):
        Interval(1.0, 1.0)
    with pytest.raises(SchemaError):
        Interval(2.0, 1.0)
    with pytest.raises(SchemaError):
        Interval(math.inf, 2.0)


def test_nonmonotone_breakpoints_names_index():
    with pytest.raises(NonMonotoneBreakpoints) as exc:
        validate_and_build({"breakpoints": [0, 1, 0.5], "values": [1.0, 2.0],
                            "tail_mode": "compact_support"})
    assert exc.value.index == 2


def test_weights_validation():
    assert validate_and_build({"h": [3, 2, 2, 1]}).h == (3.0, 2.0, 2.0, 1.0)
    with pytest.raises(NonMonotoneWeights) as exc:
        HostilityWeights((3.0, 2.0, 2.5))
    assert exc.value.index == 2


def test_explicit_enemy_list_symmetry():
    with pytest.raises(NonSymmetricEnemyList):
        EnemyList.explicit([(0, 2)])
    e = EnemyList.explicit([(0, 2), (2, 0)])
    assert e.hostile(0, 2) and e.hostile(2, 0) and not e.hostile(0, 1)


def test_band_lists():
    e1 = EnemyList.band_complement(1)
    assert e1.hostile(0, 2) and not e1.hostile(0, 1) and not e1.hostile(3, 3)
    sq = EnemyList.band_square(1, 3)
    sqc = EnemyList.band_square_complement(1, 3)
    for i in range(-2, 6):
        for j in range(-2, 6):
            assert sq.hostile(i, j) != sqc.hostile(i, j)
            assert sq.hostile(i, j) == sq.hostile(j, i)


def test_step_function_validation():
    with pytest.raises(SchemaError):
        StepFunction1D((0.0,), ())
    with pytest.raises(SchemaError):
        StepFunction1D((0.0, 1.0), (math.nan,))
    u = StepFunction1D((0.0, 1.0, 2.0), (3.0, 4.0))
    assert u(0.5) == 3.0 and u(1.5) == 4.0
    assert u(-1.0) == 0.0  # compact support tail
    dom = StepFunction1D((0.0, 1.0), (3.0,), TailMode.DOMAIN_ONLY)
    with pytest.raises(ValueError):
        dom(2.0)


def test_pwa_validation_and_eval():
    with pytest.raises(SchemaError):
        PiecewiseAffine1D(((0.0, 0.0), (1.0, 1.0)), compact_support=True)
    tent = PiecewiseAffine1D(((0.0, 0.0), (1.0, 2.0), (2.0, 0.0)))
    assert tent.lipschitz == 2.0
    assert tent(0.5) == 1.0
    assert tent(5.0) == 0.0


def test_validate_and_build_dispatch_errors():
    with pytest.raises(SchemaError):
        validate_and_build({"foo": 1})
    with pytest.raises(SchemaError):
        validate_and_build([1, 2])
    with pytest.raises(SchemaError):
        validate_and_build({"breakpoints": [0, 1], "values": [0.0],
                            "tail_mode": "bogus"})


FINITE = st.floats(-1e6, 1e6, allow_nan=False, allow_infinity=False)


@given(st.lists(FINITE, min_size=2, max_size=8, unique=True),
       st.sampled_from(["compact_support", "domain_only"]))
def test_step_roundtrip(points, mode):
    bp = sorted(points)
    values = list(range(len(bp) - 1))
    raw = {"breakpoints": bp, "values": values, "tail_mode": mode}
    u = validate_and_build(raw)
    again = validate_and_build(json.loads(json.dumps(u.to_json())))
    assert again == u
    assert again.to_json() == u.to_json()


@given(st.lists(st.integers(-50, 50), min_size=1, max_size=10))
def test_arrangement_roundtrip(species):
    u = DiscreteArrangement(tuple(species))
    assert validate_and_build(u.to_json()) == u


@given(st.lists(st.tuples(st.integers(-5, 5), st.integers(-5, 5)),
                min_size=0, max_size=8))
def test_enemy_roundtrip(pairs):
    sym = set()
    for i, j in pairs:
        sym.add((i, j))
        sym.add((j, i))
    e = EnemyList.explicit(sym)
    assert validate_and_build(e.to_json()) == e


@given(st.lists(st.floats(0, 100, allow_nan=False), min_size=1, max_size=10))
def test_weights_roundtrip(raw):
    h = HostilityWeights(tuple(sorted(raw, reverse=True)))
    assert validate_and_build(h.to_json()) == h
    assert all(a >= b for a, b in zip(h.h, h.h[1:]))
