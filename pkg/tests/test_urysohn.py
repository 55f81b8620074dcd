import numpy as np
import pytest
from conftest import planar_nets
from hypothesis import given, settings
from hypothesis import strategies as st

from coarsemetric.errors import ZeroGap
from coarsemetric.space import DiscreteSpace, Exhaustion, build_exhaustion
from coarsemetric.urysohn import StepFunctionSpec, lipschitz_bound, plateau, step_function


def halfline_levels(n_points=41, spacing=0.5, depth=10):
    sp = DiscreteSpace(tuple(f"x{i}" for i in range(n_points)), coords=np.arange(n_points) * spacing)
    return sp, build_exhaustion(sp, [k + 1.0 for k in range(depth)], cap=True)


def brute_plateau(x, levels, targets, n):
    """φ_n at coordinate x on a line, from explicit level coordinate sets."""
    def level(k):
        if k < 0:
            return []
        return levels[k] if k < len(levels) else levels[-1]

    lower, inner = level(n - 2), level(n - 1)
    everything = levels[-1]
    outer = [p for p in everything if p not in inner]
    if not outer:
        return 0.0
    if not lower:
        return targets[n]
    gap = min(abs(a - b) for a in lower for b in outer)
    return targets[n] * min(1.0, min(abs(x - a) for a in lower) / gap)


def test_plateau_zero_is_constant():
    sp, exh = halfline_levels()
    spec = StepFunctionSpec(sp, exh, tuple(range(exh.depth + 1)))
    assert np.all(plateau(spec, 0) == 0.0)
    spec = StepFunctionSpec(sp, exh, tuple(float(3 + k) for k in range(exh.depth + 1)))
    assert np.all(plateau(spec, 0) == 3.0)


def test_plateau_ramp_on_halfline():
    sp, exh = halfline_levels()
    spec = StepFunctionSpec(sp, exh, tuple(float(k) for k in range(exh.depth + 1)))
    phi2 = plateau(spec, 2)
    x = sp.coords[:, 0]
    # C_0 = [0,1], C_1 = [0,2]; collar d(C_0, X∖C_1) = 2.5 - 1 = 1.5
    assert np.all(phi2[x <= 1] == 0)
    assert phi2[x == 1.5][0] == pytest.approx(2 * 0.5 / 1.5, abs=1e-15)
    assert phi2[x == 2.0][0] == pytest.approx(2 * 1.0 / 1.5, abs=1e-15)
    assert np.all(phi2[x > 2] == 2.0)


def test_plateau_zero_on_lower_level():
    sp, exh = halfline_levels()
    spec = StepFunctionSpec(sp, exh, tuple(float(k * k) for k in range(exh.depth + 1)))
    for n in range(2, exh.depth + 1):
        assert np.all(plateau(spec, n)[exh.mask(n - 2)] == 0.0)


def test_zero_targets_give_zero():
    sp, exh = halfline_levels()
    phi = step_function(StepFunctionSpec(sp, exh, (0.0,) * (exh.depth + 1)))
    assert np.all(phi.values == 0.0)


def test_single_level_keeps_bottom_target():
    sp = DiscreteSpace(("a", "b", "c"), coords=[0.0, 1.0, 3.0])
    exh = Exhaustion((frozenset({0, 1, 2}),), 3)
    phi = step_function(StepFunctionSpec(sp, exh, (2.0, 7.0)))
    assert np.all(phi.values == 2.0)


def test_square_targets_match_brute_force():
    sp, exh = halfline_levels()
    targets = tuple(float(k * k) for k in range(exh.depth + 1))
    phi = step_function(StepFunctionSpec(sp, exh, targets))
    x = sp.coords[:, 0]
    levels = [[float(x[i]) for i in sorted(lv)] for lv in exh.levels]
    for i, xi in enumerate(x):
        want = max(brute_plateau(xi, levels, targets, n) for n in range(len(levels) + 1))
        assert phi.values[i] == pytest.approx(want, abs=1e-12)


def test_zero_gap_raised_on_unchecked_levels():
    m = np.array([[0, 0, 1], [0, 0, 1], [1, 1, 0]], dtype=float)
    sp = DiscreteSpace(("a", "b", "c"), matrix=m)
    exh = Exhaustion((frozenset({0}), frozenset({0, 2}), frozenset({0, 1, 2})), 3)
    spec = StepFunctionSpec(sp, exh, (0.0, 1.0, 2.0, 3.0))
    with pytest.raises(ZeroGap):
        plateau(spec, 2)


def test_targets_must_be_nondecreasing():
    sp, exh = halfline_levels()
    with pytest.raises(ValueError):
        StepFunctionSpec(sp, exh, (1.0, 0.0) + (2.0,) * (exh.depth - 1))


targets_strategy = st.lists(st.floats(0, 50, allow_nan=False), min_size=8, max_size=8).map(sorted)


@settings(max_examples=60, deadline=None)
@given(planar_nets(max_depth=7), targets_strategy)
def test_band_containment_and_localization(net, raw):
    space, exh = net
    targets = tuple(raw[: exh.depth + 1])
    phi = step_function(StepFunctionSpec(space, exh, targets))
    for n in range(exh.depth):
        band = exh.mask(n) & ~exh.mask(n - 1)
        assert np.all(phi.values[band] >= targets[n] - 1e-9)
        assert np.all(phi.values[band] <= targets[n + 1] + 1e-9)
    for m in range(exh.depth):
        inside = exh.mask(m)
        for n in range(m + 2, exh.depth + 1):
            assert np.all(phi.components[n][inside] == 0.0)
    assert np.array_equal(phi.values, np.max(np.vstack(phi.components), axis=0))


@settings(max_examples=40, deadline=None)
@given(planar_nets(max_depth=7), targets_strategy, st.floats(0, 10))
def test_common_shift_moves_values_by_at_most_shift(net, raw, shift):
    space, exh = net
    targets = tuple(raw[: exh.depth + 1])
    base = step_function(StepFunctionSpec(space, exh, targets)).values
    moved = step_function(StepFunctionSpec(space, exh, tuple(t + shift for t in targets))).values
    assert np.max(np.abs(moved - base)) <= shift + 1e-9


@settings(max_examples=40, deadline=None)
@given(planar_nets(max_depth=7), targets_strategy)
def test_lipschitz_bound(net, raw):
    space, exh = net
    spec = StepFunctionSpec(space, exh, tuple(raw[: exh.depth + 1]))
    v = step_function(spec).values
    L = lipschitz_bound(spec)
    assert np.all(np.abs(v[:, None] - v[None, :]) <= L * space.metric + 1e-9)
