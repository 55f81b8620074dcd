"""Finite nets standing in for proper metric spaces.

A :class:`DiscreteSpace` is a finite list of points with a base metric,
given either as a dense matrix or implicitly as Euclidean distance between
coordinates.  An :class:`Exhaustion` is a nested sequence of index sets
``K_0 ⊊ K_1 ⊊ … ⊊ K_{depth-1} = X``; on a finite net the interior of a
level is the level itself, and the condition ``K_n ⊆ int K_{n+1}`` is
replaced by a strictly positive collar ``d(K_n, X∖K_{n+1}) > 0``.

Index conventions: ``K_n = ∅`` for ``n < 0`` and ``K_n = X`` for
``n >= depth``.  Distance to an empty set is ``+inf``.
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import DepthTooSmall, EmptyLevel, EmptySide, NoCollar, SpaceError

INEQ_TOL = 1e-9
EQ_TOL = 1e-12

# Exhaustive triple scans beyond this size are skipped for coordinate-backed
# spaces, whose Euclidean metric satisfies the axioms by construction.
EUCLIDEAN_SCAN_LIMIT = 800

ISOLATED = "isolated"
LIMIT = "limit"


def _frozen_array(a, dtype=float) -> np.ndarray:
    arr = np.array(a, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class LimitTags:
    """Declared limit structure of a net.

    ``sequences`` maps a limit point to the net points declared to converge
    to it, listed in order of strictly decreasing distance.
    ``derivative_bounded`` declares whether the set of limit points of the
    ambient space is compact; finite data cannot decide this.
    """

    tags: tuple[str, ...]
    sequences: Mapping[int, tuple[int, ...]] = field(default_factory=dict)
    derivative_bounded: bool | None = None

    def derivative(self) -> tuple[int, ...]:
        return tuple(i for i, t in enumerate(self.tags) if t == LIMIT)


@dataclass(frozen=True, eq=False)
class DiscreteSpace:
    points: tuple[str, ...]
    matrix: np.ndarray | None = None
    coords: np.ndarray | None = None
    limits: LimitTags | None = None

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(str(p) for p in self.points))
        n = len(self.points)
        if n == 0:
            raise SpaceError("a space needs at least one point")
        if len(set(self.points)) != n:
            raise SpaceError("point identifiers must be unique")
        if self.matrix is None and self.coords is None:
            raise SpaceError("either a metric matrix or coordinates are required")
        if self.matrix is not None:
            m = _frozen_array(self.matrix)
            if m.shape != (n, n):
                raise SpaceError(f"metric matrix has shape {m.shape}, expected {(n, n)}")
            object.__setattr__(self, "matrix", m)
        if self.coords is not None:
            c = _frozen_array(self.coords)
            if c.ndim == 1:
                c = _frozen_array(c.reshape(-1, 1))
            if c.shape[0] != n:
                raise SpaceError("one coordinate row per point is required")
            object.__setattr__(self, "coords", c)
        if self.limits is not None and len(self.limits.tags) != n:
            raise SpaceError("one limit tag per point is required")

    @property
    def size(self) -> int:
        return len(self.points)

    @property
    def euclidean(self) -> bool:
        return self.matrix is None

    @cached_property
    def metric(self) -> np.ndarray:
        if self.matrix is not None:
            return self.matrix
        return _frozen_array(self.dist(range(self.size), range(self.size)))

    def dist(self, rows: Iterable[int], cols: Iterable[int]) -> np.ndarray:
        """Distance block between two index lists, without materialising the full metric."""
        rows = np.fromiter(rows, dtype=int)
        cols = np.fromiter(cols, dtype=int)
        if self.matrix is not None:
            return self.matrix[np.ix_(rows, cols)]
        diff = self.coords[rows][:, None, :] - self.coords[cols][None, :, :]
        if diff.shape[-1] == 1:
            return np.abs(diff[..., 0])
        if diff.shape[-1] == 2:
            return np.hypot(diff[..., 0], diff[..., 1])
        return np.sqrt(np.sum(diff * diff, axis=-1))

    def index(self, point: str | int) -> int:
        if isinstance(point, (int, np.integer)):
            if not 0 <= point < self.size:
                raise SpaceError(f"point index {point} out of range")
            return int(point)
        try:
            return self._positions[str(point)]
        except KeyError:
            raise SpaceError(f"unknown point {point!r}") from None

    @cached_property
    def _positions(self) -> dict[str, int]:
        return {p: i for i, p in enumerate(self.points)}

    def with_metric(self, matrix: np.ndarray) -> DiscreteSpace:
        """Same points and limit structure under another metric."""
        return DiscreteSpace(self.points, matrix=matrix, coords=self.coords, limits=self.limits)


@dataclass(frozen=True)
class Violation:
    kind: str
    where: tuple[int, ...]
    excess: float = 0.0


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)
    counts: dict[str, int] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, v: Violation, max_records: int):
        self.counts[v.kind] = self.counts.get(v.kind, 0) + 1
        if self.counts[v.kind] <= max_records:
            self.violations.append(v)


def metric_violations(
    m: np.ndarray,
    tol: float = INEQ_TOL,
    eq_tol: float = EQ_TOL,
    max_records: int = 50,
    check_triangle: bool = True,
    report: ValidationReport | None = None,
) -> ValidationReport:
    """Scan a dense matrix for metric-axiom failures.

    Triangle triples are reported as ``(i, k, j)`` with ``i < j`` meaning
    ``m[i, j] > m[i, k] + m[k, j] + tol``.
    """
    report = report if report is not None else ValidationReport()
    m = np.asarray(m, dtype=float)
    n = m.shape[0]
    if m.ndim != 2 or m.shape != (n, n):
        report.add(Violation("shape", m.shape), max_records)
        return report
    for i, j in zip(*np.nonzero(~np.isfinite(m))):
        report.add(Violation("nonfinite", (int(i), int(j))), max_records)
    if report.counts.get("nonfinite"):
        return report
    for i in np.flatnonzero(np.abs(np.diag(m)) > eq_tol):
        report.add(Violation("diagonal", (int(i),), float(abs(m[i, i]))), max_records)
    asym = np.abs(m - m.T)
    for i, j in zip(*np.nonzero(np.triu(asym > eq_tol, 1))):
        report.add(Violation("symmetry", (int(i), int(j)), float(asym[i, j])), max_records)
    off = ~np.eye(n, dtype=bool)
    for i, j in zip(*np.nonzero(np.triu((m <= 0) & off, 1))):
        report.add(Violation("positivity", (int(i), int(j)), float(-m[i, j])), max_records)
    if check_triangle:
        for k in range(n):
            excess = m - (m[:, k, None] + m[None, k, :])
            bad = np.triu(excess > tol, 1)
            if bad.any():
                for i, j in zip(*np.nonzero(bad)):
                    report.add(Violation("triangle", (int(i), k, int(j)), float(excess[i, j])), max_records)
    return report


def validate_space(space: DiscreteSpace, tol: float = INEQ_TOL, max_records: int = 50) -> ValidationReport:
    """Every violated invariant of ``space``; an empty report means the net is valid."""
    report = ValidationReport()
    if space.euclidean:
        _, counts = np.unique(space.coords, axis=0, return_counts=True)
        if (counts > 1).any():
            report.add(Violation("positivity", ()), max_records)
        if space.size <= EUCLIDEAN_SCAN_LIMIT:
            metric_violations(space.metric, tol, max_records=max_records, report=report)
        else:
            report.notes.append("euclidean metric: triangle scan skipped, axioms hold by construction")
    else:
        metric_violations(space.matrix, tol, max_records=max_records, report=report)

    limits = space.limits
    if limits is not None:
        for i, t in enumerate(limits.tags):
            if t not in (ISOLATED, LIMIT):
                report.add(Violation("limit-tag", (i,)), max_records)
        for a, seq in limits.sequences.items():
            if limits.tags[a] != LIMIT:
                report.add(Violation("limit-tag", (a,)), max_records)
            if not seq:
                continue
            d = space.dist([a], seq)[0]
            for k in np.flatnonzero(np.diff(d) >= 0):
                report.add(Violation("limit-sequence", (a, seq[k], seq[k + 1]), float(d[k + 1] - d[k])), max_records)
    return report


def set_distance(m: np.ndarray, a: Iterable[int], b: Iterable[int]) -> float:
    a, b = list(a), list(b)
    if not a or not b:
        return float("inf")
    return float(m[np.ix_(a, b)].min())


def distance_to_set(m: np.ndarray, a: Iterable[int]) -> np.ndarray:
    """``d(x, A)`` for every point ``x``; ``+inf`` when ``A`` is empty."""
    a = list(a)
    if not a:
        return np.full(m.shape[0], np.inf)
    return m[:, a].min(axis=1)


@dataclass(frozen=True)
class Exhaustion:
    levels: tuple[frozenset[int], ...]
    n_points: int

    @property
    def depth(self) -> int:
        return len(self.levels)

    def level(self, n: int) -> frozenset[int]:
        if n < 0:
            return frozenset()
        if n >= self.depth:
            return frozenset(range(self.n_points))
        return self.levels[n]

    def mask(self, n: int) -> np.ndarray:
        """Boolean membership vector of ``K_n``."""
        return self.rank <= n

    @cached_property
    def rank(self) -> np.ndarray:
        """Least ``n`` with ``x ∈ K_n``, per point (``depth`` if uncovered)."""
        r = np.full(self.n_points, self.depth, dtype=int)
        for n in reversed(range(self.depth)):
            r[list(self.levels[n])] = n
        r.setflags(write=False)
        return r


def collar(space: DiscreteSpace, exh: Exhaustion, n: int) -> float:
    """``d(K_n, X∖K_{n+1})``."""
    inner = np.flatnonzero(exh.mask(n))
    outer = np.flatnonzero(~exh.mask(n + 1))
    if inner.size == 0 or outer.size == 0:
        return float("inf")
    return float(space.dist(inner, outer).min())


def check_exhaustion(space: DiscreteSpace, exh: Exhaustion) -> None:
    if exh.n_points != space.size:
        raise SpaceError("exhaustion and space disagree on the number of points")
    if exh.depth == 0:
        raise SpaceError("an exhaustion needs at least one level")
    for n in range(exh.depth - 1):
        if not exh.levels[n] < exh.levels[n + 1]:
            raise EmptyLevel(f"K_{n} is not a proper subset of K_{n + 1}")
    if len(exh.levels[-1]) != space.size:
        raise SpaceError("the last level must cover every point")
    for n in range(exh.depth - 1):
        if collar(space, exh, n) <= 0:
            raise NoCollar(f"d(K_{n}, X∖K_{n + 1}) = 0")


def exhaustion_from_levels(space: DiscreteSpace, levels: Sequence[Iterable[int]]) -> Exhaustion:
    exh = Exhaustion(tuple(frozenset(int(i) for i in lv) for lv in levels), space.size)
    check_exhaustion(space, exh)
    return exh


def build_exhaustion(
    space: DiscreteSpace,
    radii: Sequence[float],
    center: str | int = 0,
    cap: bool = False,
) -> Exhaustion:
    """Closed balls ``K_n = {x : d(center, x) <= radii[n]}``.

    With ``cap=True`` a final level equal to the whole net is appended when
    the largest ball does not already cover it.
    """
    radii = [float(r) for r in radii]
    if not radii:
        raise SpaceError("at least one radius is required")
    if any(b <= a for a, b in zip(radii, radii[1:])):
        if any(b == a for a, b in zip(radii, radii[1:])):
            raise EmptyLevel("duplicate radius gives two equal levels")
        raise SpaceError("radii must be strictly increasing")
    c = space.index(center)
    d = space.dist([c], range(space.size))[0]
    levels = [frozenset(np.flatnonzero(d <= r + EQ_TOL).tolist()) for r in radii]
    if len(levels[-1]) < space.size:
        if not cap:
            raise SpaceError(f"ball of radius {radii[-1]} does not cover the net")
        levels.append(frozenset(range(space.size)))
    exh = Exhaustion(tuple(levels), space.size)
    check_exhaustion(space, exh)
    return exh


@dataclass(frozen=True)
class Band:
    n: int
    points: frozenset[int]


def band_set(exh: Exhaustion, n: int) -> frozenset[int]:
    """``Δ_n = K_{n+2} ∖ K_n`` under the index conventions."""
    return exh.level(n + 2) - exh.level(n)


def bands(exh: Exhaustion, extended: bool = False) -> list[Band]:
    """Bands ``Δ_{-2} … Δ_{depth-3}``.

    ``extended`` adds ``Δ_{depth-2} = X∖K_{depth-2}`` so that the even bands
    together with ``K_0`` cover the whole net for every depth.
    """
    if exh.depth < 3:
        raise DepthTooSmall(f"bands need depth >= 3, got {exh.depth}")
    top = exh.depth - 2 if extended else exh.depth - 3
    return [Band(n, band_set(exh, n)) for n in range(-2, top + 1)]


@dataclass(frozen=True)
class ClosedSetPair:
    A: frozenset[int]
    B: frozenset[int]

    def __post_init__(self):
        object.__setattr__(self, "A", frozenset(int(i) for i in self.A))
        object.__setattr__(self, "B", frozenset(int(i) for i in self.B))
        if self.A & self.B:
            raise SpaceError(f"pair sides intersect at {sorted(self.A & self.B)}")

    def require_nonempty(self):
        if not self.A or not self.B:
            raise EmptySide("both sides of the pair must be nonempty")
