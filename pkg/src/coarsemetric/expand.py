"""Amplified metrics ``d_g``.

From a base metric ``d``, an exhaustion ``⟨K_n⟩`` and a growth function
``g`` the layers are

* ``c``: step function with targets ``R_n = max(n, diam K_n)``;
* ``f``: nondecreasing piecewise-linear speed with ``f(n/2) >= g(n)``,
  and its exact antiderivative ``F``;
* ``ρ(x, y) = max(|c(x) - c(y)|, d(x, y))``;
* ``ρ'_g(x, y) = f(max(c(x), c(y))) · ρ(x, y)``;
* ``ρ_g``: chain infimum (shortest-path closure) of ``ρ'_g``;
* ``δ``: step function with targets ``n²``;
* ``d_g(x, y) = max(|δ(x) - δ(y)|, ρ_g(x, y))``.

The result satisfies ``d_g >= g(n)·d`` off ``K_{n-1}`` and
``d_g(K_{n-1}, X∖K_n) >= n``; :func:`amplify` verifies both before
returning.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import AsymmetricInput, GuaranteeViolation, NegativeArgument
from .space import EQ_TOL, INEQ_TOL, DiscreteSpace, Exhaustion, check_exhaustion
from .urysohn import StepFunction, StepFunctionSpec, step_function

KNOT_SPACING = 0.5


@dataclass(frozen=True)
class GrowthFunction:
    """An element of ``ω^ω``: a finite prefix followed by a tail rule.

    Tail rules: ``"constant"`` repeats the last prefix value (0 if the
    prefix is empty), ``"poly"`` is ``n**degree + offset`` and ``"exp"`` is
    ``base**n``.
    """

    prefix: tuple[int, ...] = ()
    tail: str = "constant"
    degree: int = 2
    offset: int = 1
    base: int = 2

    def __post_init__(self):
        object.__setattr__(self, "prefix", tuple(int(v) for v in self.prefix))
        if any(v < 0 for v in self.prefix):
            raise ValueError("growth values must be nonnegative")
        if self.tail not in ("constant", "poly", "exp"):
            raise ValueError(f"unknown tail rule {self.tail!r}")

    def __call__(self, n: int) -> int:
        if n < 0:
            raise ValueError("growth functions are indexed by n >= 0")
        if n < len(self.prefix):
            return self.prefix[n]
        if self.tail == "poly":
            return n**self.degree + self.offset
        if self.tail == "exp":
            return self.base**n
        return self.prefix[-1] if self.prefix else 0

    def values(self, count: int) -> list[int]:
        return [self(n) for n in range(count)]

    def normalized(self, n: int) -> int:
        """``max(1, g(0), …, g(n))``: the increasing majorant with ``g(0) >= 1``."""
        return max([1, *self.values(n + 1)])

    @classmethod
    def from_values(cls, values) -> GrowthFunction:
        return cls(prefix=tuple(values), tail="constant")

    @classmethod
    def parse(cls, text: str) -> GrowthFunction:
        """Parse ``poly2``, ``poly3``, ``exp``, ``exp3``, ``const:5`` or ``list:1,2,5``."""
        text = text.strip()
        if m := re.fullmatch(r"poly(\d+)", text):
            return cls(tail="poly", degree=int(m.group(1)))
        if m := re.fullmatch(r"exp(\d*)", text):
            return cls(tail="exp", base=int(m.group(1) or 2))
        if m := re.fullmatch(r"const:(\d+)", text):
            return cls(prefix=(int(m.group(1)),))
        if m := re.fullmatch(r"list:([\d,\s]+)", text):
            return cls.from_values(int(v) for v in m.group(1).split(",") if v.strip())
        raise ValueError(f"cannot parse growth function {text!r}")

    def describe(self) -> str:
        if self.tail == "poly":
            rule = f"n^{self.degree}+{self.offset}"
        elif self.tail == "exp":
            rule = f"{self.base}^n"
        else:
            rule = "constant"
        return f"prefix={list(self.prefix)} tail={rule}"


@dataclass(frozen=True, eq=False)
class SpeedFunction:
    """Piecewise-linear ``f`` with knots at ``k/2``; constant past the last knot."""

    knots: tuple[float, ...]

    @cached_property
    def positions(self) -> np.ndarray:
        return np.arange(len(self.knots)) * KNOT_SPACING

    @cached_property
    def _values(self) -> np.ndarray:
        return np.asarray(self.knots, dtype=float)

    @cached_property
    def cumulative(self) -> np.ndarray:
        """``F`` at each knot."""
        v = self._values
        areas = (v[1:] + v[:-1]) * (KNOT_SPACING / 2)
        return np.concatenate([[0.0], np.cumsum(areas)])

    def __call__(self, s):
        return np.interp(s, self.positions, self._values)


def make_speed_function(g: GrowthFunction, depth: int) -> SpeedFunction:
    if depth < 1:
        raise ValueError("depth must be >= 1")
    return SpeedFunction(tuple(float(g.normalized(k)) for k in range(2 * depth + 1)))


def integrate(f: SpeedFunction, s):
    """``F(s) = ∫_0^s f(t) dt``, exact for the piecewise-linear ``f``."""
    s_arr = np.asarray(s, dtype=float)
    if np.any(s_arr < 0):
        raise NegativeArgument("F is defined on [0, inf)")
    last = len(f.knots) - 1
    k = np.minimum(np.floor(s_arr / KNOT_SPACING).astype(int), last)
    x_k = k * KNOT_SPACING
    f_k = f._values[k]
    out = f.cumulative[k] + (s_arr - x_k) * (f_k + f(s_arr)) / 2
    return float(out) if np.ndim(out) == 0 else out


def chain_infimum(rho_prime: np.ndarray) -> np.ndarray:
    """Infimum over finite chains of summed ``rho_prime`` steps.

    On a finite net this is the all-pairs shortest-path closure.  Relaxation
    sweeps repeat until none changes an entry, so the result satisfies the
    triangle inequality exactly in floating point and re-closing it is the
    identity.
    """
    m = np.array(rho_prime, dtype=float)
    n = m.shape[0]
    if m.ndim != 2 or m.shape != (n, n):
        raise ValueError("closure needs a square matrix")
    if np.any(np.abs(m - m.T) > EQ_TOL):
        raise AsymmetricInput("chain infimum needs a symmetric matrix")
    if np.any(m < 0) or np.any(np.diag(m) != 0):
        raise ValueError("chain infimum needs nonnegative entries and a zero diagonal")
    m = np.minimum(m, m.T)
    while True:
        before = m.copy()
        for k in range(n):
            np.minimum(m, m[:, k, None] + m[None, k, :], out=m)
        if np.array_equal(before, m):
            return m


def single_source_closure(rho_prime: np.ndarray, source: int) -> np.ndarray:
    """One row of the chain-infimum closure by dense Dijkstra relaxation."""
    m = np.asarray(rho_prime, dtype=float)
    n = m.shape[0]
    dist = np.full(n, np.inf)
    dist[source] = 0.0
    done = np.zeros(n, dtype=bool)
    for _ in range(n):
        u = int(np.argmin(np.where(done, np.inf, dist)))
        if done[u] or not np.isfinite(dist[u]):
            break
        done[u] = True
        np.minimum(dist, dist[u] + m[u], out=dist)
    return dist


@dataclass(frozen=True, eq=False)
class AmplifiedMetric:
    space: DiscreteSpace
    exhaustion: Exhaustion
    growth: GrowthFunction
    R: tuple[float, ...]
    c: StepFunction
    f: SpeedFunction
    rho: np.ndarray
    rho_prime: np.ndarray
    rho_g: np.ndarray
    delta: StepFunction
    d_g: np.ndarray
    provenance: dict[str, str] = field(default_factory=dict)

    def F(self, s):
        return integrate(self.f, s)


def _layers(space: DiscreteSpace, exh: Exhaustion, g: GrowthFunction) -> dict:
    d = space.metric
    depth = exh.depth
    R = []
    for n in range(depth + 1):
        idx = np.flatnonzero(exh.mask(n))
        diam = float(d[np.ix_(idx, idx)].max()) if idx.size else 0.0
        R.append(max(float(n), diam))
    c = step_function(StepFunctionSpec(space, exh, tuple(R)))
    f = make_speed_function(g, depth)
    cv = c.values
    rho = np.maximum(np.abs(cv[:, None] - cv[None, :]), d)
    rho_prime = f(np.maximum(cv[:, None], cv[None, :])) * rho
    rho_g = chain_infimum(rho_prime)
    delta = step_function(StepFunctionSpec(space, exh, tuple(float(n * n) for n in range(depth + 1))))
    dv = delta.values
    d_g = np.maximum(np.abs(dv[:, None] - dv[None, :]), rho_g)
    return dict(R=tuple(R), c=c, f=f, rho=rho, rho_prime=rho_prime, rho_g=rho_g, delta=delta, d_g=d_g)


def amplify(space: DiscreteSpace, exh: Exhaustion, g: GrowthFunction, tol: float = INEQ_TOL) -> AmplifiedMetric:
    check_exhaustion(space, exh)
    layers = _layers(space, exh, g)
    provenance = {
        "c": "step function over K_n with targets R_n = max(n, diam K_n)",
        "f": f"running max of g at half-integer knots, {len(layers['f'].knots)} knots, constant tail",
        "rho": "max(|c(x)-c(y)|, d(x,y))",
        "rho_prime": "f(max(c(x), c(y))) * rho(x,y)",
        "rho_g": "shortest-path closure of rho_prime",
        "delta": "step function over K_n with targets n^2",
        "d_g": "max(|delta(x)-delta(y)|, rho_g(x,y))",
    }
    am = AmplifiedMetric(space=space, exhaustion=exh, growth=g, provenance=provenance, **layers)
    for row in growth_guarantee(am):
        if row.slack < -tol:
            raise GuaranteeViolation(f"d_g < g({row.n})·d off K_{row.n - 1}", (row.n, *row.witness))
    for row in collar_guarantee(am):
        if row.slack < -tol:
            raise GuaranteeViolation(f"d_g(K_{row.n - 1}, X∖K_{row.n}) < {row.n}", (row.n, *row.witness))
    return am


@dataclass(frozen=True)
class GuaranteeRow:
    n: int
    bound: float
    value: float
    slack: float
    witness: tuple[int, int]


def growth_guarantee(am: AmplifiedMetric) -> list[GuaranteeRow]:
    """Per level ``n``: the smallest ``d_g(x,y) - g(n)·d(x,y)`` over ``x, y ∉ K_{n-1}``."""
    d = am.space.metric
    rows = []
    for n in range(am.exhaustion.depth):
        idx = np.flatnonzero(~am.exhaustion.mask(n - 1))
        if idx.size < 2:
            continue
        gn = float(am.growth.normalized(n))
        block = np.ix_(idx, idx)
        slack = am.d_g[block] - gn * d[block]
        i, j = np.unravel_index(np.argmin(slack), slack.shape)
        rows.append(GuaranteeRow(n, gn, float(am.d_g[idx[i], idx[j]]), float(slack[i, j]), (int(idx[i]), int(idx[j]))))
    return rows


def collar_guarantee(am: AmplifiedMetric) -> list[GuaranteeRow]:
    """Per level ``n``: ``d_g(K_{n-1}, X∖K_n) - n``."""
    rows = []
    for n in range(1, am.exhaustion.depth):
        inner = np.flatnonzero(am.exhaustion.mask(n - 1))
        outer = np.flatnonzero(~am.exhaustion.mask(n))
        if inner.size == 0 or outer.size == 0:
            continue
        block = am.d_g[np.ix_(inner, outer)]
        i, j = np.unravel_index(np.argmin(block), block.shape)
        v = float(block[i, j])
        rows.append(GuaranteeRow(n, float(n), v, v - n, (int(inner[i]), int(outer[j]))))
    return rows


def optimal_chain(rho_prime: np.ndarray, closure: np.ndarray, x: int, y: int) -> list[int]:
    """A chain from ``x`` to ``y`` realising ``closure[x, y]``."""
    chain = [x]
    cur = x
    for _ in range(closure.shape[0]):
        if cur == y:
            break
        vals = rho_prime[cur] + closure[:, y]
        vals[cur] = np.inf
        best = vals.min()
        cur = y if vals[y] <= best + EQ_TOL * max(1.0, best) else int(np.argmin(vals))
        chain.append(cur)
    return chain


@dataclass(frozen=True)
class BandCheck:
    n: int
    speed: float
    growth: int
    ratio: float
    witness: tuple[int, int]
    chain: tuple[int, ...]
    case: int
    violations: int


@dataclass
class CheckReport:
    bands: list[BandCheck]
    violations: list[tuple[int, int, int, float]]

    @property
    def ok(self) -> bool:
        return not self.violations


def magnification_check(am: AmplifiedMetric, exh: Exhaustion | None = None, tol: float = INEQ_TOL,
                        max_records: int = 50) -> CheckReport:
    """Check ``ρ_g(x,y) >= f(n/2)·d(x,y)`` for all ``x, y ∉ K_{n-1}``.

    For each level the tightest pair is reported together with an optimal
    chain and which of two regimes it falls in: case 1 when every relay
    point has ``c > s/2`` (``s`` the smaller endpoint value of ``c``),
    case 2 when the chain dips to ``c <= s/2``.
    """
    exh = exh if exh is not None else am.exhaustion
    d = am.space.metric
    cv = am.c.values
    bands: list[BandCheck] = []
    violations: list[tuple[int, int, int, float]] = []
    for n in range(exh.depth):
        idx = np.flatnonzero(~exh.mask(n - 1))
        if idx.size < 2:
            continue
        speed = float(am.f(n / 2))
        block = np.ix_(idx, idx)
        lhs = am.rho_g[block]
        rhs = speed * d[block]
        off = ~np.eye(idx.size, dtype=bool)
        ratio = np.where(off, lhs / np.where(off, rhs, 1.0), np.inf)
        i, j = np.unravel_index(np.argmin(ratio), ratio.shape)
        x, y = int(idx[i]), int(idx[j])
        chain = optimal_chain(am.rho_prime, am.rho_g, x, y)
        s = min(cv[x], cv[y])
        case = 1 if all(cv[z] > s / 2 for z in chain[1:-1]) else 2
        bad = np.argwhere(np.triu(lhs < rhs - tol, 1))
        for a, b in bad:
            if len(violations) < max_records:
                violations.append((n, int(idx[a]), int(idx[b]), float(lhs[a, b] - rhs[a, b])))
        bands.append(BandCheck(n, speed, am.growth.normalized(n), float(ratio[i, j]), (x, y), tuple(chain), case, len(bad)))
    return CheckReport(bands, violations)


def f_potential_slack(am: AmplifiedMetric) -> float:
    """Smallest ``ρ_g(x,y) - |F(c(x)) - F(c(y))|`` over all pairs."""
    Fc = am.F(am.c.values)
    return float((am.rho_g - np.abs(Fc[:, None] - Fc[None, :])).min())
