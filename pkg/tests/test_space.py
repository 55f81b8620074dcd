import itertools

import numpy as np
import pytest
from conftest import planar_nets
from hypothesis import given, settings

from coarsemetric.errors import DepthTooSmall, EmptyLevel, EmptySide, NoCollar, SpaceError
from coarsemetric.space import (
    ClosedSetPair,
    DiscreteSpace,
    Exhaustion,
    LimitTags,
    bands,
    build_exhaustion,
    collar,
    exhaustion_from_levels,
    validate_space,
)


def line(values):
    values = np.asarray(values, dtype=float)
    return DiscreteSpace(tuple(f"x{i}" for i in range(len(values))), coords=values)


def test_single_point_is_valid():
    assert validate_space(DiscreteSpace(("p",), matrix=[[0.0]])).ok


def test_triangle_violation_reported():
    m = [[0, 1, 5], [1, 0, 1], [5, 1, 0]]
    report = validate_space(DiscreteSpace(("a", "b", "c"), matrix=m))
    tri = [v for v in report.violations if v.kind == "triangle"]
    assert [v.where for v in tri] == [(0, 1, 2)]
    assert tri[0].excess == pytest.approx(3.0)


def test_scaled_index_metric_valid():
    idx = np.arange(200)
    m = np.abs(idx[:, None] - idx[None, :]) * 0.5
    assert validate_space(DiscreteSpace(tuple(map(str, idx)), matrix=m)).ok
    # independent triple loop on a slice
    sub = m[:30, :30]
    assert all(sub[i, j] <= sub[i, k] + sub[k, j] for i, j, k in itertools.product(range(30), repeat=3))


def test_other_axiom_violations():
    m = np.array([[0.5, 1, 2], [1, 0, 0], [2.5, 0, 0]])
    kinds = {v.kind for v in validate_space(DiscreteSpace(("a", "b", "c"), matrix=m)).violations}
    assert {"diagonal", "symmetry", "positivity"} <= kinds


def test_limit_sequences_must_approach():
    sp = DiscreteSpace(("a", "b", "c"), coords=[0.0, 1.0, 0.5],
                       limits=LimitTags(("limit", "isolated", "isolated"), {0: (2, 1)}))
    kinds = [v.kind for v in validate_space(sp).violations]
    assert kinds == ["limit-sequence"]
    fixed = DiscreteSpace(sp.points, coords=sp.coords, limits=LimitTags(sp.limits.tags, {0: (1, 2)}))
    assert validate_space(fixed).ok


def test_ball_exhaustion_on_halfline():
    sp = line(np.arange(201) * 0.5)
    exh = build_exhaustion(sp, range(1, 101), center=0)
    x = sp.coords[:, 0]
    for n in range(100):
        assert exh.levels[n] == frozenset(i for i in range(201) if x[i] <= n + 1)


def test_single_level_exhaustion():
    sp = line([0.0, 1.0, 2.0])
    exh = build_exhaustion(sp, [5.0], center=0)
    assert exh.depth == 1 and exh.levels[0] == frozenset({0, 1, 2})


def test_duplicate_radius_is_empty_level():
    with pytest.raises(EmptyLevel):
        build_exhaustion(line([0.0, 1.0, 2.0]), [1.0, 1.0, 2.0])


def test_uncovering_radii_rejected_without_cap():
    sp = line([0.0, 1.0, 2.0])
    with pytest.raises(SpaceError):
        build_exhaustion(sp, [1.0])
    capped = build_exhaustion(sp, [1.0], cap=True)
    assert capped.depth == 2 and len(capped.levels[-1]) == 3


def test_zero_collar_rejected():
    m = np.array([[0, 0, 1], [0, 0, 1], [1, 1, 0]], dtype=float)
    sp = DiscreteSpace(("a", "b", "c"), matrix=m)
    with pytest.raises(NoCollar):
        exhaustion_from_levels(sp, [[0], [0, 2], [0, 1, 2]])


def test_bands_depth_three():
    sp = line([0, 1, 2, 3, 4])
    exh = exhaustion_from_levels(sp, [[0], [0, 1, 2], [0, 1, 2, 3, 4]])
    nonneg = [b for b in bands(exh) if b.n >= 0]
    assert [(b.n, b.points) for b in nonneg] == [(0, frozenset({1, 2, 3, 4}))]
    neg = {b.n: b.points for b in bands(exh) if b.n < 0}
    assert neg == {-2: exh.level(0), -1: exh.level(1)}


def test_halfline_bands_are_annuli():
    sp = line(np.arange(201) * 0.5)
    exh = build_exhaustion(sp, range(1, 101), center=0)
    x = sp.coords[:, 0]
    for b in bands(exh):
        if b.n >= 0:
            assert b.points == frozenset(i for i in range(201) if b.n + 1 < x[i] <= b.n + 3)


def test_flat_levels_fail_before_bands():
    sp = line([0, 1, 2, 3])
    with pytest.raises(EmptyLevel):
        exhaustion_from_levels(sp, [[0, 1], [0, 1], [0, 1, 2, 3]])
    with pytest.raises(DepthTooSmall):
        bands(exhaustion_from_levels(sp, [[0, 1], [0, 1, 2, 3]]))


def test_pair_must_be_disjoint():
    with pytest.raises(SpaceError):
        ClosedSetPair(frozenset({1, 2}), frozenset({2}))
    with pytest.raises(EmptySide):
        ClosedSetPair(frozenset(), frozenset({2})).require_nonempty()


def test_exhaustion_index_conventions():
    exh = Exhaustion((frozenset({0}), frozenset({0, 1, 2})), 3)
    assert exh.level(-1) == exh.level(-2) == frozenset()
    assert exh.level(5) == frozenset({0, 1, 2})
    assert exh.rank.tolist() == [0, 1, 1]


@settings(max_examples=40, deadline=None)
@given(planar_nets())
def test_generated_nets_are_valid(net):
    space, exh = net
    assert validate_space(space).ok
    for n in range(exh.depth - 1):
        inner = sorted(exh.level(n))
        outer = sorted(set(range(space.size)) - exh.level(n + 1))
        if not outer:
            assert collar(space, exh, n) == float("inf")
            continue
        brute = min(space.metric[i, j] for i in inner for j in outer)
        assert collar(space, exh, n) == brute > 0


@settings(max_examples=40, deadline=None)
@given(planar_nets(min_depth=3))
def test_even_bands_cover(net):
    space, exh = net
    covered = set(exh.level(0))
    for b in bands(exh, extended=True):
        assert not b.points & exh.level(b.n - 1)
        if b.n >= 0 and b.n % 2 == 0:
            covered |= b.points
    assert covered == set(range(space.size))
