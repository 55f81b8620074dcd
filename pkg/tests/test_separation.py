import math

import numpy as np
import pytest
from conftest import planar_nets
from hypothesis import given, settings
from hypothesis import strategies as st

from coarsemetric import families
from coarsemetric.errors import EmptySide
from coarsemetric.expand import GrowthFunction, amplify
from coarsemetric.separation import (
    INCONCLUSIVE,
    NOT_SEPARATED,
    SEPARATED,
    higson_per_band,
    higson_separated,
    slowly_oscillating_check,
    smirnov_separated,
)
from coarsemetric.space import ClosedSetPair, DiscreteSpace, build_exhaustion, set_distance


def test_discrete_evens_and_odds():
    space = families.discrete(40)
    pair = families.named_pair("parity", space)
    v = smirnov_separated(space, pair)
    assert v.detail["distance"] == 1.0
    assert v.verdict == SEPARATED


def test_shrinking_gaps_not_separated():
    xs = [float(n) for n in range(50)] + [n + 1 / (n + 1) for n in range(1, 50)]
    space = DiscreteSpace(tuple(f"p{i}" for i in range(len(xs))), coords=xs)
    exh = build_exhaustion(space, [5.0 * k for k in range(1, 10)], cap=True)
    A = frozenset(range(50))
    B = frozenset(range(50, len(xs)))
    v = smirnov_separated(space, ClosedSetPair(A, B), eps=0.1, exh=exh)
    assert v.detail["distance"] == pytest.approx(1 / 50, abs=1e-12)
    assert v.verdict == NOT_SEPARATED
    tails = [val for _, val in v.per_band]
    assert tails == sorted(tails, reverse=True)
    assert tails[-1] == pytest.approx(1 / 50, abs=1e-12)


def test_singletons_measure_one_distance():
    space = families.halfline(10, 1.0)
    v = smirnov_separated(space, ClosedSetPair(frozenset({2}), frozenset({7})))
    assert v.detail["distance"] == 5.0


def test_edge_decay_is_inconclusive():
    # gaps between paired points shrink along the line and are smallest at the edge
    xs = []
    for k in range(1, 12):
        xs += [10.0 * k, 10.0 * k + 1.0 / k]
    space = DiscreteSpace(tuple(f"p{i}" for i in range(len(xs))), coords=xs)
    exh = build_exhaustion(space, [10.0 * k + 5 for k in range(1, 11)], cap=True)
    pair = ClosedSetPair(frozenset(range(0, len(xs), 2)), frozenset(range(1, len(xs), 2)))
    assert smirnov_separated(space, pair, eps=1e-3, exh=exh).verdict == INCONCLUSIVE
    assert smirnov_separated(space, pair, eps=1e-3).verdict == SEPARATED


def test_empty_side_rejected():
    space = families.discrete(4)
    with pytest.raises(EmptySide):
        smirnov_separated(space, ClosedSetPair(frozenset(), frozenset({1})))
    exh = families.standard_exhaustion("discrete:4", space, 3)
    with pytest.raises(EmptySide):
        higson_separated(space, exh, ClosedSetPair(frozenset({0}), frozenset()))


def brute_higson_bands(x, A, B, levels):
    """min over points outside each level of the summed distances, from raw coordinates."""
    out = []
    for n, lv in enumerate(levels):
        vals = [min(abs(p - a) for a in A) + min(abs(p - b) for b in B) for i, p in enumerate(x) if i not in lv]
        if vals:
            out.append((n, min(vals)))
    return out


def test_growing_gap_pair_is_higson_separated(halfline):
    space, exh = halfline
    pair = families.named_pair("squares-n", space)
    x = space.coords[:, 0].tolist()
    A = [x[i] for i in pair.A]
    B = [x[i] for i in pair.B]
    assert sorted(A)[:3] == [1.0, 4.0, 9.0] and sorted(B)[:3] == [2.0, 6.0, 12.0]
    want = brute_higson_bands(x, A, B, exh.levels)
    got = higson_per_band(space, exh, pair)
    assert [n for n, _ in got] == [n for n, _ in want]
    assert np.allclose([v for _, v in got], [v for _, v in want], rtol=0, atol=1e-12)
    # the band minima here only reach about sqrt(radius); test the witnessable grid
    top = max(v for _, v in want)
    grid = [R for R in range(1, 18) if R < top]
    v = higson_separated(space, exh, pair, R_grid=grid)
    assert v.verdict == SEPARATED
    for R, n in v.detail["witness"].items():
        assert n == next(k for k, val in want if val > R)


def test_bounded_sum_fails():
    space = families.halfline(200, 0.5)
    exh = families.standard_exhaustion("halfline:200:0.5", space, 20)
    pair = families.named_pair("mod4", space)
    v = higson_separated(space, exh, pair)
    assert v.verdict == NOT_SEPARATED
    assert 5 in v.detail["failed"]
    assert v.detail["witness"][5] is None
    assert all(val <= 4 for _, val in v.per_band)


def test_default_grid():
    space = families.halfline(200, 0.5)
    exh = families.standard_exhaustion("halfline:200:0.5", space, 20)
    v = higson_separated(space, exh, families.named_pair("mod4", space))
    assert v.threshold == list(range(1, exh.depth - 2))


def test_constant_function_oscillates_nowhere(halfline):
    space, exh = halfline
    assert slowly_oscillating_check(space, exh, np.full(space.size, 3.0), None, 1.0, 1e-9) == 0


def test_square_step_function_oscillates(halfline_bundle, halfline):
    space, exh = halfline
    assert slowly_oscillating_check(space, exh, halfline_bundle.delta.values, None, 1.0, 0.5) is None


def test_logarithm_oscillates_slowly(halfline):
    space, exh = halfline
    x = space.coords[:, 0]
    vals = np.log1p(x)
    N = slowly_oscillating_check(space, exh, vals, None, 1.0, 0.1)
    top = x.max()
    diam = [math.log1p(min(xi + 0.5, top)) - math.log1p(max(xi - 0.5, 0.0)) for xi in x]
    worst = max(xi for xi, dv in zip(x, diam) if dv >= 0.1)
    outside = [{float(x[i]) for i in range(space.size) if i not in lv} for lv in exh.levels]
    assert N == next(n for n, out in enumerate(outside) if all(p > worst for p in out))
    assert N == 8


def test_oscillation_rejects_bad_radius(halfline):
    space, exh = halfline
    with pytest.raises(ValueError):
        slowly_oscillating_check(space, exh, np.zeros(space.size), None, 0.0, 1.0)


def _random_pair(data, n):
    idx = data.draw(st.permutations(range(n)))
    a = data.draw(st.integers(1, n - 1))
    b = data.draw(st.integers(1, n - a))
    return ClosedSetPair(frozenset(idx[:a]), frozenset(idx[a:a + b]))


@settings(max_examples=40, deadline=None)
@given(planar_nets(), st.data())
def test_band_minima_are_ordered(net, data):
    space, exh = net
    pair = _random_pair(data, space.size)
    bands = higson_per_band(space, exh, pair)
    vals = [v for _, v in bands]
    assert all(v >= 0 for v in vals)
    assert vals == sorted(vals)
    dAB = set_distance(space.metric, pair.A, pair.B)
    assert all(v >= dAB - 1e-12 for v in vals)
    s = smirnov_separated(space, pair, exh=exh)
    assert all(v >= 0 for _, v in s.per_band)


@settings(max_examples=40, deadline=None)
@given(planar_nets(), st.data())
def test_enlarging_sides_never_increases(net, data):
    space, exh = net
    pair = _random_pair(data, space.size)
    rest = sorted(set(range(space.size)) - pair.A - pair.B)
    extra = frozenset(data.draw(st.lists(st.sampled_from(rest), unique=True))) if rest else frozenset()
    bigger = ClosedSetPair(pair.A | extra, pair.B)
    d0 = smirnov_separated(space, pair).detail["distance"]
    d1 = smirnov_separated(space, bigger).detail["distance"]
    assert d1 <= d0
    for (_, v0), (_, v1) in zip(higson_per_band(space, exh, pair), higson_per_band(space, exh, bigger)):
        assert v1 <= v0 + 1e-12


@settings(max_examples=20, deadline=None)
@given(planar_nets(max_points=18), st.data())
def test_amplified_metric_raises_band_minima(net, data):
    space, exh = net
    pair = _random_pair(data, space.size)
    am = amplify(space, exh, GrowthFunction.parse("poly2"))
    base = higson_per_band(space, exh, pair)
    big = higson_per_band(space, exh, pair, am.d_g)
    assert all(v1 >= v0 - 1e-9 for (_, v0), (_, v1) in zip(base, big))
