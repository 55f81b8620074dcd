"""Smirnov and Higson separation on truncated nets, and slow oscillation.

Two disjoint closed sets are separated in the Smirnov compactification iff
``d(A, B) > 0`` and in the Higson compactification iff
``d(x, A) + d(x, B) → ∞`` off compact sets.  On a finite net neither can be
decided outright; verdicts are "up to depth" and carry per-band witnesses.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from .space import ClosedSetPair, DiscreteSpace, Exhaustion, band_set, distance_to_set, set_distance

SEPARATED = "separated_up_to_depth"
NOT_SEPARATED = "not_separated"
INCONCLUSIVE = "inconclusive"

DEFAULT_EPS = 1e-6


@dataclass
class SeparationVerdict:
    kind: str
    per_band: list[tuple[int, float]]
    verdict: str
    threshold: float | list[float]
    detail: dict = field(default_factory=dict)


def _tail_levels(exh: Exhaustion) -> list[int]:
    """Levels ``n`` whose complement ``X∖K_n`` is nonempty."""
    return [n for n in range(exh.depth) if not exh.mask(n).all()]


def smirnov_separated(space: DiscreteSpace, pair: ClosedSetPair, metric: np.ndarray | None = None,
                      eps: float = DEFAULT_EPS, exh: Exhaustion | None = None) -> SeparationVerdict:
    """Decide ``d(A, B) >= eps``.

    With an exhaustion the verdict also reports, per level ``n``, the
    infimum over pairs outside ``K_n`` and the band-local distance
    ``d(A∩Δ_n, B∩Δ_n)``.  When the band-local distances fall strictly over
    the last three distinct populated-band values and bottom out at the truncation edge,
    the ambient infimum may be smaller still and the verdict is
    ``inconclusive`` instead of separated.
    """
    pair.require_nonempty()
    m = space.metric if metric is None else metric
    dist = set_distance(m, pair.A, pair.B)
    per_band: list[tuple[int, float]] = []
    local: list[tuple[int, float]] = []
    if exh is not None:
        for n in _tail_levels(exh):
            out = exh.level(n)
            per_band.append((n, set_distance(m, pair.A - out, pair.B - out)))
        for n in range(exh.depth - 1):
            band = band_set(exh, n)
            v = set_distance(m, pair.A & band, pair.B & band)
            if np.isfinite(v):
                local.append((n, v))
    if dist < eps:
        verdict = NOT_SEPARATED
    elif _edge_decay([v for _, v in local]):
        verdict = INCONCLUSIVE
    else:
        verdict = SEPARATED
    return SeparationVerdict("smirnov", per_band, verdict, eps, {"distance": dist, "band_local": local})


def _edge_decay(vals: Sequence[float]) -> bool:
    # overlapping bands can share their closest pair; repeats carry no trend
    runs = [v for i, v in enumerate(vals) if i == 0 or v != vals[i - 1]]
    if len(runs) < 3:
        return False
    tail = runs[-3:]
    return tail[0] > tail[1] > tail[2] and tail[2] <= min(vals)


def higson_per_band(space: DiscreteSpace, exh: Exhaustion, pair: ClosedSetPair,
                    metric: np.ndarray | None = None) -> list[tuple[int, float]]:
    """``min_{x ∉ K_n} d(x, A) + d(x, B)`` for every level with a nonempty complement."""
    m = space.metric if metric is None else metric
    total = distance_to_set(m, pair.A) + distance_to_set(m, pair.B)
    return [(n, float(total[~exh.mask(n)].min())) for n in _tail_levels(exh)]


def higson_separated(space: DiscreteSpace, exh: Exhaustion, pair: ClosedSetPair,
                     metric: np.ndarray | None = None, R_grid: Sequence[float] | None = None) -> SeparationVerdict:
    """For each ``R`` find the least level ``n(R)`` with ``d(x,A) + d(x,B) > R`` off ``K_{n(R)}``."""
    pair.require_nonempty()
    if R_grid is None:
        R_grid = list(range(1, exh.depth - 2))
    per_band = higson_per_band(space, exh, pair, metric)
    witness: dict[float, int | None] = {}
    for R in R_grid:
        witness[R] = next((n for n, v in per_band if v > R), None)
    if not R_grid:
        verdict = INCONCLUSIVE
    elif all(v is not None for v in witness.values()):
        verdict = SEPARATED
    else:
        verdict = NOT_SEPARATED
    failed = [R for R, n in witness.items() if n is None]
    return SeparationVerdict("higson", per_band, verdict, list(R_grid), {"witness": witness, "failed": failed})


def oscillation(values: np.ndarray, metric: np.ndarray, r: float) -> np.ndarray:
    """Diameter of ``values`` over each open ball ``B(x, r)``."""
    v = np.asarray(values, dtype=float)
    inside = metric < r
    hi = np.where(inside, v[None, :], -np.inf).max(axis=1)
    lo = np.where(inside, v[None, :], np.inf).min(axis=1)
    return hi - lo


def slowly_oscillating_check(space: DiscreteSpace, exh: Exhaustion, values, metric: np.ndarray | None,
                             r: float, eps: float) -> int | None:
    """Least level ``N`` beyond which every ``r``-ball has value diameter ``< eps``; ``None`` if none."""
    if r <= 0 or eps <= 0:
        raise ValueError("r and eps must be positive")
    m = space.metric if metric is None else metric
    bad = oscillation(values, m, r) >= eps
    for n in _tail_levels(exh):
        if not bad[~exh.mask(n)].any():
            return n
    return None
