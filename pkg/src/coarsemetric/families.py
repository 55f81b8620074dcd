"""Built-in benchmark nets, their standard exhaustions, and named set pairs.

Descriptors:

``halfline:N[:spacing]``
    ``N`` points ``i·spacing`` of ``[0, ∞)``; every point is a limit point.
``lattice:W:H[:spacing]``
    ``W × H`` grid in ``[0, ∞)²``; every point is a limit point.
``discrete:N``
    ``N`` points at mutual distance 1, all isolated (a truncation of ``ω``).
``sequence:N``
    one limit point ``0`` and ``N-1`` points ``1/k`` converging to it
    (a truncation of ``ω+1``).
``comb:N:teeth[:decay]``
    planar comb with ``N`` spine points, see :func:`coarsemetric.diagonal.comb_space`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .diagonal import CombSpace, comb_space
from .expand import GrowthFunction
from .space import (
    EQ_TOL,
    ISOLATED,
    LIMIT,
    ClosedSetPair,
    DiscreteSpace,
    Exhaustion,
    LimitTags,
    build_exhaustion,
    exhaustion_from_levels,
)

KINDS = ("halfline", "lattice", "discrete", "sequence", "comb")


@dataclass(frozen=True)
class Family:
    kind: str
    params: tuple

    @property
    def descriptor(self) -> str:
        return ":".join([self.kind, *map(str, self.params)])


def parse_family(text: str) -> Family:
    parts = text.strip().split(":")
    kind, args = parts[0], parts[1:]
    try:
        if kind == "halfline":
            params = (int(args[0]), float(args[1]) if len(args) > 1 else 1.0)
        elif kind == "lattice":
            params = (int(args[0]), int(args[1]), float(args[2]) if len(args) > 2 else 1.0)
        elif kind in ("discrete", "sequence"):
            params = (int(args[0]),)
        elif kind == "comb":
            params = (int(args[0]), int(args[1]), args[2] if len(args) > 2 else "harmonic")
        else:
            raise ValueError(f"unknown space family {kind!r}; expected one of {KINDS}")
    except (IndexError, ValueError) as exc:
        raise ValueError(f"bad space descriptor {text!r}: {exc}") from None
    if any(isinstance(p, (int, float)) and p <= 0 for p in params):
        raise ValueError(f"bad space descriptor {text!r}: sizes and spacings must be positive")
    return Family(kind, params)


def halfline(n: int, spacing: float = 1.0) -> DiscreteSpace:
    coords = np.arange(n, dtype=float) * spacing
    limits = LimitTags((LIMIT,) * n, {}, derivative_bounded=False)
    return DiscreteSpace(tuple(f"x{i}" for i in range(n)), coords=coords, limits=limits)


def lattice(w: int, h: int, spacing: float = 1.0) -> DiscreteSpace:
    coords = np.array([(i * spacing, j * spacing) for j in range(h) for i in range(w)], dtype=float)
    limits = LimitTags((LIMIT,) * (w * h), {}, derivative_bounded=False)
    return DiscreteSpace(tuple(f"p{i}_{j}" for j in range(h) for i in range(w)), coords=coords, limits=limits)


def discrete(n: int) -> DiscreteSpace:
    limits = LimitTags((ISOLATED,) * n, {}, derivative_bounded=True)
    return DiscreteSpace(tuple(f"n{i}" for i in range(n)), matrix=np.ones((n, n)) - np.eye(n), limits=limits)


def convergent_sequence(n: int) -> DiscreteSpace:
    coords = np.array([0.0] + [1.0 / k for k in range(1, n)])
    tags = (LIMIT,) + (ISOLATED,) * (n - 1)
    limits = LimitTags(tags, {0: tuple(range(1, n))} if n > 1 else {}, derivative_bounded=True)
    return DiscreteSpace(tuple(f"s{i}" for i in range(n)), coords=coords, limits=limits)


def build(family: Family | str) -> DiscreteSpace:
    return build_comb_or_space(family)[0]


def build_comb_or_space(family: Family | str) -> tuple[DiscreteSpace, CombSpace | None]:
    fam = parse_family(family) if isinstance(family, str) else family
    if fam.kind == "halfline":
        return halfline(*fam.params), None
    if fam.kind == "lattice":
        return lattice(*fam.params), None
    if fam.kind == "discrete":
        return discrete(*fam.params), None
    if fam.kind == "sequence":
        return convergent_sequence(*fam.params), None
    comb = comb_space(*fam.params)
    return comb.space, comb


def _index_levels(space: DiscreteSpace, depth: int) -> Exhaustion:
    n = space.size
    depth = max(1, min(depth, n))
    cuts = [math.ceil((k + 1) * n / depth) for k in range(depth)]
    return exhaustion_from_levels(space, [range(c) for c in cuts])


def _ball_levels(space: DiscreteSpace, center: int, radii: list[float]) -> Exhaustion:
    reach = float(space.dist([center], range(space.size))[0].max())
    kept = []
    for r in radii:
        kept.append(r)
        if r >= reach - EQ_TOL:
            break
    return build_exhaustion(space, kept, center, cap=True)


def standard_exhaustion(family: Family | str, space: DiscreteSpace, depth: int) -> Exhaustion:
    """Default exhaustion with ``depth`` proper levels plus a covering cap when needed.

    Line and lattice nets use balls of radius ``1, 2, …, depth`` (times the
    spacing for lattices) about the first point; combs use balls of radius
    ``spacing·(n + 1/2)`` about ``a_0``, one spine per level; discrete and
    sequence nets use index prefixes.
    """
    fam = parse_family(family) if isinstance(family, str) else family
    if depth < 1:
        raise ValueError("depth must be >= 1")
    if fam.kind == "halfline":
        return _ball_levels(space, 0, [float(k) for k in range(1, depth + 1)])
    if fam.kind == "lattice":
        return _ball_levels(space, 0, [fam.params[2] * k for k in range(1, depth + 1)])
    if fam.kind == "comb":
        spacing = 10.0
        return _ball_levels(space, 0, [spacing * (k + 0.5) for k in range(depth)])
    return _index_levels(space, depth)


def values_pair(space: DiscreteSpace, a_values, b_values) -> ClosedSetPair:
    """Pair of net points sitting at the given coordinates of a line net."""
    if space.coords is None or space.coords.shape[1] != 1:
        raise ValueError("value pairs need a one-dimensional coordinate net")
    x = space.coords[:, 0]

    def pick(values):
        out = set()
        for v in values:
            hit = np.flatnonzero(np.abs(x - v) <= 1e-9)
            out.update(hit.tolist())
        return out

    return ClosedSetPair(frozenset(pick(a_values)), frozenset(pick(b_values)))


PAIRS = ("squares", "squares-n", "mod4", "parity")


def named_pair(name: str, space: DiscreteSpace) -> ClosedSetPair:
    """Built-in pairs; value-based pairs start at ``k = 1`` so the sides stay disjoint.

    ``squares``: ``{k²}`` vs ``{k² + 1}``; ``squares-n``: ``{k²}`` vs ``{k² + k}``;
    ``mod4``: ``{4k}`` vs ``{4k + 2}``; ``parity``: even vs odd point indices.
    """
    if name == "parity":
        return ClosedSetPair(frozenset(range(0, space.size, 2)), frozenset(range(1, space.size, 2)))
    if space.coords is None:
        raise ValueError(f"pair {name!r} needs a line net")
    top = int(math.isqrt(int(space.coords.max()) + 1)) + 2
    ks = range(1, top)
    if name == "squares":
        return values_pair(space, [k * k for k in ks], [k * k + 1 for k in ks])
    if name == "squares-n":
        return values_pair(space, [k * k for k in ks], [k * k + k for k in ks])
    if name == "mod4":
        m = int(space.coords.max()) // 4 + 1
        return values_pair(space, [4 * k for k in range(m)], [4 * k + 2 for k in range(m)])
    raise ValueError(f"unknown pair {name!r}; expected one of {PAIRS}")


def dominating_growth(demand, floor=lambda n: n * n) -> GrowthFunction:
    """Growth values ``max(h(n), floor(n)) + 1``."""
    return GrowthFunction(prefix=tuple(max(h, floor(n)) + 1 for n, h in enumerate(demand)),
                          tail="poly", degree=2, offset=1)
