"""Continuous step functions with prescribed values on nested bands.

Given levels ``C_0 ⊊ C_1 ⊊ …`` and nondecreasing targets ``r_n``, the
plateau ``φ_n`` vanishes on ``C_{n-2}``, equals ``r_n`` off ``C_{n-1}`` and
ramps linearly in ``d(x, C_{n-2})`` across the collar between them.  The
pointwise maximum ``φ`` takes values in ``[r_n, r_{n+1}]`` on
``C_n ∖ C_{n-1}``.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from .errors import ZeroGap
from .space import DiscreteSpace, Exhaustion


@dataclass(frozen=True, eq=False)
class StepFunctionSpec:
    space: DiscreteSpace
    levels: Exhaustion
    targets: tuple[float, ...]

    def __post_init__(self):
        t = tuple(float(r) for r in self.targets)
        object.__setattr__(self, "targets", t)
        if len(t) != self.levels.depth + 1:
            raise ValueError(f"need {self.levels.depth + 1} targets (one per level plus a top bound), got {len(t)}")
        if any(r < 0 for r in t):
            raise ValueError("targets must be nonnegative")
        if any(b < a for a, b in zip(t, t[1:])):
            raise ValueError("targets must be nondecreasing")


@dataclass(frozen=True, eq=False)
class StepFunction:
    values: np.ndarray
    components: tuple[np.ndarray, ...]


def plateau_gap(spec: StepFunctionSpec, n: int) -> float:
    """``d(C_{n-2}, X∖C_{n-1})``, infinite when either side is empty."""
    lower = np.flatnonzero(spec.levels.mask(n - 2))
    outer = np.flatnonzero(~spec.levels.mask(n - 1))
    if lower.size == 0 or outer.size == 0:
        return float("inf")
    return float(spec.space.dist(lower, outer).min())


def plateau(spec: StepFunctionSpec, n: int) -> np.ndarray:
    if n < 0:
        raise ValueError("plateau index must be nonnegative")
    if n > spec.levels.depth:
        return np.zeros(spec.space.size)
    r = spec.targets[n]
    lower = np.flatnonzero(spec.levels.mask(n - 2))
    outer = ~spec.levels.mask(n - 1)
    if not outer.any():
        # top of a finite net: nothing is forced up to r_n
        return np.zeros(spec.space.size)
    if lower.size == 0:
        return np.full(spec.space.size, r)
    gap = plateau_gap(spec, n)
    if gap <= 0:
        raise ZeroGap(f"zero collar below level {n - 1}")
    to_lower = spec.space.dist(range(spec.space.size), lower).min(axis=1)
    return r * np.minimum(1.0, to_lower / gap)


def step_function(spec: StepFunctionSpec) -> StepFunction:
    comps = tuple(plateau(spec, n) for n in range(spec.levels.depth + 1))
    values = np.max(np.vstack(comps), axis=0)
    return StepFunction(values, comps)


def lipschitz_bound(spec: StepFunctionSpec) -> float:
    """Upper bound ``max_n r_n / gap_n`` on the Lipschitz constant of the step function."""
    best = 0.0
    for n in range(spec.levels.depth + 1):
        gap = plateau_gap(spec, n)
        if np.isfinite(gap):
            best = max(best, spec.targets[n] / gap)
    return best


def step_function_on(space: DiscreteSpace, levels: Exhaustion, targets: Sequence[float]) -> StepFunction:
    return step_function(StepFunctionSpec(space, levels, tuple(targets)))
