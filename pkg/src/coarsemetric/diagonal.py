"""Dominating-function machinery on comb spaces, and the dichotomy classifier.

A comb is a closed discrete spine ``a_0, a_1, …`` where each ``a_n`` carries
a tooth sequence ``b_{n,i} → a_n``.  For a metric ``d`` the modulus
``g_d(n)`` is the first tooth index from which every later tooth lies within
``1/(n+1)`` of ``a_n``.  A function ``f`` escaping every family modulus
``g_F`` picks teeth ``B_f = {b_{n,f(n)}}`` that stay arbitrarily close to
the spine under every metric of the family, so no uniformly continuous
function can separate the spine from ``B_f``.

The other half is the separation demand ``h_{A,B}(n) = ⌈n / d(A∩Δ_n, B∩Δ_n)⌉``:
any growth function dominating it yields an amplified metric under which
``d_g(x, A) + d_g(x, B)`` grows without bound.
"""

from __future__ import annotations

import itertools
import math
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyFamily, MissingLimitTags, PreconditionFailed, SpaceError
from .expand import AmplifiedMetric, GrowthFunction, amplify
from .space import (
    INEQ_TOL,
    LIMIT,
    ClosedSetPair,
    DiscreteSpace,
    Exhaustion,
    LimitTags,
    band_set,
    distance_to_set,
    set_distance,
    validate_space,
)

DECAYS = {
    "harmonic": lambda i: 1.0 / (i + 1),
    "geometric": lambda i: 2.0**-i,
}

ONE = "ONE"
DOMINATING = "D"


@dataclass(frozen=True, eq=False)
class CombSpace:
    space: DiscreteSpace
    spine: tuple[int, ...]
    teeth: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if len(self.spine) != len(self.teeth):
            raise SpaceError("one tooth sequence per spine point is required")
        if len(self.spine) < 2:
            raise SpaceError("a comb needs at least two spine points")

    @property
    def n_spines(self) -> int:
        return len(self.spine)

    @property
    def n_teeth(self) -> int:
        return min(len(t) for t in self.teeth)

    def radii(self) -> np.ndarray:
        """``δ_n = ρ(a_n, A∖{a_n}) / 3`` under the base metric."""
        sd = self.space.dist(self.spine, self.spine).copy()
        np.fill_diagonal(sd, np.inf)
        return sd.min(axis=1) / 3

    def tooth_distances(self, metric: DiscreteSpace | np.ndarray) -> np.ndarray:
        """``d(a_n, b_{n,i})`` as an ``n_spines × n_teeth`` array."""
        k = self.n_teeth
        if isinstance(metric, np.ndarray):
            return np.array([metric[a, list(t[:k])] for a, t in zip(self.spine, self.teeth)])
        return np.array([metric.dist([a], t[:k])[0] for a, t in zip(self.spine, self.teeth)])

    def issues(self) -> list[str]:
        """Violations of the neighbourhood structure; empty when the comb is sound."""
        out = []
        delta = self.radii()
        if np.any(delta <= 0):
            out.append("spine points coincide")
        sd = self.space.dist(self.spine, self.spine)
        for n, m in itertools.combinations(range(self.n_spines), 2):
            if sd[n, m] < delta[n] + delta[m]:
                out.append(f"balls around spine {n} and {m} overlap")
        tooth = self.tooth_distances(self.space)
        for n in range(self.n_spines):
            if np.any(tooth[n] <= 0) or np.any(tooth[n] >= delta[n]):
                out.append(f"teeth of spine {n} leave B(a_{n}, δ_{n})")
        return out


def comb_space(
    n_spines: int,
    n_teeth: int,
    decay: str = "harmonic",
    spacing: float = 10.0,
) -> CombSpace:
    """Planar comb: spine ``a_n = (spacing·n, 0)``, teeth ``b_{n,i} = (spacing·n, t_i)``."""
    try:
        t = DECAYS[decay]
    except KeyError:
        raise ValueError(f"unknown decay {decay!r}; expected one of {sorted(DECAYS)}") from None
    if spacing <= 3 * t(0):
        # teeth must sit inside B(a_n, spacing/3)
        raise ValueError(f"spacing must exceed {3 * t(0)} for {decay} teeth")
    points, coords, tags = [], [], []
    spine, teeth = [], []
    for n in range(n_spines):
        spine.append(len(points))
        points.append(f"a{n}")
        coords.append((spacing * n, 0.0))
        tags.append(LIMIT)
        row = []
        for i in range(n_teeth):
            row.append(len(points))
            points.append(f"b{n}_{i}")
            coords.append((spacing * n, t(i)))
            tags.append("isolated")
        teeth.append(tuple(row))
    limits = LimitTags(tuple(tags), {a: tb for a, tb in zip(spine, teeth)}, derivative_bounded=False)
    space = DiscreteSpace(tuple(points), coords=np.array(coords), limits=limits)
    return CombSpace(space, tuple(spine), tuple(teeth))


@dataclass(frozen=True, eq=False)
class MetricFamily:
    members: tuple[tuple[str, DiscreteSpace], ...]

    def __post_init__(self):
        if not self.members:
            raise EmptyFamily("a metric family needs at least one member")
        pts = self.members[0][1].points
        for name, sp in self.members:
            if sp.points != pts:
                raise SpaceError(f"member {name!r} lives on a different point set")
            report = validate_space(sp)
            if not report.ok:
                raise SpaceError(f"member {name!r} is not a metric: {report.violations[:3]}")

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.members)


def scaled(space: DiscreteSpace, factor: float) -> DiscreteSpace:
    if space.euclidean:
        return DiscreteSpace(space.points, coords=space.coords * factor, limits=space.limits)
    return space.with_metric(space.matrix * factor)


def tooth_warped(comb: CombSpace, warp: float) -> DiscreteSpace:
    """Pull back the Euclidean metric after stretching the teeth of odd spines by ``warp``."""
    sp = comb.space
    if not sp.euclidean:
        raise SpaceError("tooth warping needs a coordinate-backed comb")
    coords = np.array(sp.coords)
    for n in range(1, comb.n_spines, 2):
        a = coords[comb.spine[n]]
        idx = list(comb.teeth[n])
        coords[idx] = a + warp * (coords[idx] - a)
    return DiscreteSpace(sp.points, coords=coords, limits=sp.limits)


def standard_family(comb: CombSpace, scale: float = 2.0, warp: float = 1.5) -> MetricFamily:
    """``{base, scale × base, tooth-warped}``."""
    return MetricFamily((
        ("base", comb.space),
        ("scaled", scaled(comb.space, scale)),
        ("warped", tooth_warped(comb, warp)),
    ))


def modulus(comb: CombSpace, metric: DiscreteSpace | np.ndarray) -> list[int | None]:
    """``g_d(n) = min{m : ∀ i >= m, d(a_n, b_{n,i}) < 1/(n+1)}`` within the truncation.

    Entries are ``None`` where the tooth distances are not strictly
    decreasing or the last tooth is still too far.
    """
    table = comb.tooth_distances(metric)
    out: list[int | None] = []
    for n, row in enumerate(table):
        close = row < 1.0 / (n + 1)
        if np.any(np.diff(row) >= 0) or not close[-1]:
            out.append(None)
            continue
        far = np.flatnonzero(~close)
        out.append(int(far[-1]) + 1 if far.size else 0)
    return out


def family_modulus(certs: Sequence[Sequence[int | None]]) -> list[int | None]:
    """Pointwise maximum; an undefined entry anywhere makes the result undefined there."""
    if not certs:
        raise EmptyFamily("family modulus of an empty family")
    out = []
    for col in zip(*certs):
        out.append(None if any(v is None for v in col) else max(col))
    return out


@dataclass(frozen=True)
class EscapeFragment:
    f: tuple[int | None, ...]
    index_set: tuple[int, ...]
    teeth_exhausted: tuple[int, ...]
    undefined: tuple[int, ...]


def escape(g_F: Sequence[int | None], I_max: int) -> EscapeFragment:
    """The minimal pointwise escape ``f = g_F + 1``, clipped to the last tooth."""
    f, index, exhausted, undefined = [], [], [], []
    for n, g in enumerate(g_F):
        if g is None:
            f.append(None)
            undefined.append(n)
        elif g + 1 >= I_max:
            f.append(I_max - 1)
            exhausted.append(n)
        else:
            f.append(g + 1)
            index.append(n)
    return EscapeFragment(tuple(f), tuple(index), tuple(exhausted), tuple(undefined))


@dataclass(frozen=True)
class EscapeCertificate:
    moduli: dict[str, tuple[int | None, ...]]
    g_F: tuple[int | None, ...]
    f: tuple[int | None, ...]
    index_set: tuple[int, ...]
    B_f: tuple[int, ...]
    closeness: tuple[float, ...]
    teeth_exhausted: tuple[int, ...] = ()
    undefined: tuple[int, ...] = ()

    @property
    def sound(self) -> bool:
        return all(v < 1.0 / (n + 1) for n, v in zip(self.index_set, self.closeness))


def certify(comb: CombSpace, family: MetricFamily) -> EscapeCertificate:
    tables = {name: comb.tooth_distances(sp) for name, sp in family.members}
    moduli = {name: tuple(modulus(comb, sp)) for name, sp in family.members}
    g_F = family_modulus(list(moduli.values()))
    frag = escape(g_F, comb.n_teeth)
    B_f = tuple(comb.teeth[n][frag.f[n]] for n in frag.index_set)
    closeness = tuple(max(float(t[n, frag.f[n]]) for t in tables.values()) for n in frag.index_set)
    return EscapeCertificate(moduli, tuple(g_F), frag.f, frag.index_set, B_f, closeness,
                             frag.teeth_exhausted, frag.undefined)


@dataclass
class SubfamilyWitness:
    members: tuple[str, ...]
    index_set: tuple[int, ...]
    sequences: dict[str, tuple[float, ...]]
    failures: list[tuple[str, int, float]]


@dataclass
class WitnessReport:
    checked: tuple[int, ...]
    subfamilies: list[SubfamilyWitness]
    warnings: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(not s.failures for s in self.subfamilies)


def nonseparation_witness(comb: CombSpace, family: MetricFamily, cert: EscapeCertificate) -> WitnessReport:
    """Check ``d(a_n, b_{n,f(n)}) < 1/(n+1)`` for every metric of every nonempty subfamily.

    The indices checked are those the certificate claims; each subfamily
    also reports its own ``I_F = {n : g_F(n) < f(n)}``, which contains them.
    """
    tables = {name: comb.tooth_distances(sp) for name, sp in family.members}
    moduli = {name: modulus(comb, sp) for name, sp in family.members}
    checked = tuple(cert.index_set)
    report = WitnessReport(checked, [])
    if not checked:
        report.warnings.append("empty index set: non-separation holds vacuously on this truncation")
    names = family.names
    for r in range(1, len(names) + 1):
        for sub in itertools.combinations(names, r):
            g_F = family_modulus([moduli[nm] for nm in sub])
            own = tuple(n for n, (g, fn) in enumerate(zip(g_F, cert.f))
                        if g is not None and fn is not None and g < fn)
            seqs, failures = {}, []
            for nm in sub:
                vals = tuple(float(tables[nm][n, cert.f[n]]) for n in checked)
                seqs[nm] = vals
                failures += [(nm, n, v) for n, v in zip(checked, vals) if not v < 1.0 / (n + 1)]
            report.subfamilies.append(SubfamilyWitness(sub, own, seqs, failures))
    return report


def separation_demand(space: DiscreteSpace, exh: Exhaustion, pair: ClosedSetPair,
                      metric: np.ndarray | None = None) -> list[int]:
    """``h_{A,B}(n) = ⌈n / d(A∩Δ_n, B∩Δ_n)⌉`` for ``n < depth``; 0 where a side misses the band."""
    m = space.metric if metric is None else metric
    out = []
    for n in range(exh.depth):
        band = band_set(exh, n)
        dist = set_distance(m, pair.A & band, pair.B & band)
        if not math.isfinite(dist):
            out.append(0)
            continue
        q = n / dist
        k = math.ceil(q)
        # absorb rounding such as 3/0.1 = 30.000000000000004
        if k - 1 >= q * (1 - 1e-12):
            k -= 1
        out.append(k)
    return out


@dataclass(frozen=True)
class EndgameRow:
    M: int
    minimum: float
    witness: int
    case1: int
    case2: int
    violations: int


@dataclass
class EndgameReport:
    N: int
    demand: list[int]
    growth: list[int]
    rows: list[EndgameRow]
    failures: list[tuple[int, int, float]]

    @property
    def ok(self) -> bool:
        return not self.failures


def endgame_check(space: DiscreteSpace, exh: Exhaustion, pair: ClosedSetPair, g: GrowthFunction, N: int,
                  am: AmplifiedMetric | None = None, tol: float = INEQ_TOL) -> EndgameReport:
    """Check ``d_g(x, A) + d_g(x, B) >= M`` for ``N <= M <= depth-2`` and ``x ∉ K_{M+1}``.

    Each ``x`` is attributed to case 1 when its nearest ``A`` or ``B`` point
    sits in ``K_M`` (the collar bound applies) and case 2 otherwise (the
    band bound through ``h_{A,B}`` applies).
    """
    pair.require_nonempty()
    h = separation_demand(space, exh, pair)
    gv = g.values(exh.depth)
    short = [n for n in range(max(N, 0), exh.depth) if gv[n] < h[n]]
    if short:
        raise PreconditionFailed(f"g does not dominate h_(A,B) from N={N}: fails at n={short[:10]}")
    if am is None:
        am = amplify(space, exh, g, tol)
    A, B = sorted(pair.A), sorted(pair.B)
    dA = distance_to_set(am.d_g, A)
    dB = distance_to_set(am.d_g, B)
    nearA = np.asarray(A)[np.argmin(am.d_g[:, A], axis=1)]
    nearB = np.asarray(B)[np.argmin(am.d_g[:, B], axis=1)]
    level = np.minimum(exh.rank[nearA], exh.rank[nearB])
    total = dA + dB
    rows, failures = [], []
    for M in range(N, exh.depth - 1):
        outside = np.flatnonzero(~exh.mask(M + 1))
        if outside.size == 0:
            continue
        vals = total[outside]
        bad = outside[vals < M - tol]
        failures += [(M, int(x), float(total[x])) for x in bad]
        case1 = int(np.sum(level[outside] <= M))
        k = int(np.argmin(vals))
        rows.append(EndgameRow(M, float(vals[k]), int(outside[k]), case1, outside.size - case1, int(bad.size)))
    return EndgameReport(N, h, gv, rows, failures)


def classify(space: DiscreteSpace) -> str:
    """``ONE`` when the set of limit points is compact, ``D`` otherwise.

    Compactness of a nonempty derivative is read from the declared
    ``derivative_bounded`` flag.
    """
    limits = space.limits
    if limits is None:
        raise MissingLimitTags("classification needs declared limit structure")
    if not limits.derivative():
        return ONE
    if limits.derivative_bounded is None:
        raise MissingLimitTags("nonempty derivative without a derivative_bounded flag")
    return ONE if limits.derivative_bounded else DOMINATING


def select_spine(space: DiscreteSpace, k: int, min_teeth: int = 1) -> list[int]:
    """Greedy farthest-point choice among limit points with enough declared teeth."""
    if space.limits is None:
        raise MissingLimitTags("spine selection needs declared limit structure")
    cands = [a for a, seq in sorted(space.limits.sequences.items()) if len(seq) >= min_teeth]
    if len(cands) < k:
        raise SpaceError(f"only {len(cands)} limit points with {min_teeth} declared teeth; need {k}")
    chosen = [cands[0]]
    reach = space.dist([cands[0]], cands)[0]
    while len(chosen) < k:
        nxt = cands[int(np.argmax(reach))]
        chosen.append(nxt)
        reach = np.minimum(reach, space.dist([nxt], cands)[0])
    return chosen


def comb_from_space(space: DiscreteSpace, k: int, teeth: int) -> CombSpace:
    spine = select_spine(space, k, teeth)
    return CombSpace(space, tuple(spine), tuple(tuple(space.limits.sequences[a][:teeth]) for a in spine))
