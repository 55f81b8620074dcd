"""Command-line front end.

    coarsemetric validate --space halfline:200:0.5
    coarsemetric expand   --space halfline:200:0.5 --growth poly2 --depth 20 --dump bundle.csv
    coarsemetric separate --space halfline:200:0.5 --pair squares --metric amplified --R 1..17
    coarsemetric diagonal --space comb:50:100:harmonic --warp 1.5
    coarsemetric classify --space discrete:100
    coarsemetric oracle   --points 8 --trials 50 --seed 7

Exit status: 0 when every requested check passes, 1 when a check fails,
2 on a parse or configuration error.  ``COARSEMETRIC_TOL`` overrides the
default inequality tolerance.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import families, io, report
from .diagonal import (
    CombSpace,
    certify,
    classify,
    comb_from_space,
    endgame_check,
    nonseparation_witness,
    separation_demand,
    standard_family,
)
from .errors import CoarseMetricError, GuaranteeViolation, MissingLimitTags, PreconditionFailed
from .expand import GrowthFunction, amplify, collar_guarantee, f_potential_slack, growth_guarantee, magnification_check
from .oracle import oracle_suite
from .separation import SEPARATED, higson_separated, smirnov_separated
from .space import INEQ_TOL, ClosedSetPair, metric_violations, validate_space

COMMANDS = ("validate", "expand", "separate", "diagonal", "classify", "oracle")
TOL_ENV = "COARSEMETRIC_TOL"


class ConfigError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    space: str | None = None
    space_file: str | None = None
    out: str | None = None
    tol: float = INEQ_TOL
    seed: int = 0
    depth: int = 20
    growth: str | None = None
    dump: str | None = None
    pair: str | None = None
    pair_file: str | None = None
    metric: str = "base"
    eps: float = 1e-6
    R_grid: list[float] | None = None
    N: int = 1
    scale: float = 2.0
    warp: float = 1.5
    min_coverage: int = 0
    points: int = 10
    trials: int = 50
    require_separated: bool = False
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if not self.tol > 0:
            raise ConfigError("tolerance must be positive")


def _default_tol() -> float:
    raw = os.environ.get(TOL_ENV)
    if raw is None:
        return INEQ_TOL
    try:
        return float(raw)
    except ValueError:
        raise ConfigError(f"{TOL_ENV}={raw!r} is not a number") from None


def _parse_grid(text: str) -> list[float]:
    if ".." in text:
        lo, hi = text.split("..")
        return [float(r) for r in range(int(lo), int(hi) + 1)]
    return [float(v) for v in text.split(",") if v.strip()]


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="coarsemetric", description=__doc__.split("\n\n")[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, needs_space=True):
        if needs_space:
            g = sp.add_mutually_exclusive_group(required=True)
            g.add_argument("--space", help="built-in family, e.g. halfline:200:0.5")
            g.add_argument("--space-file", help="JSON space description")
            sp.add_argument("--depth", type=int, default=20, help="number of ball levels in the standard exhaustion")
        sp.add_argument("--out", help="report path (default: stdout)")
        sp.add_argument("--tol", type=float, default=None, help="inequality tolerance")
        sp.add_argument("--seed", type=int, default=0)

    common(sub.add_parser("validate", help="check metric axioms and limit structure"))

    sp = sub.add_parser("expand", help="build the amplified metric and verify its guarantees")
    common(sp)
    sp.add_argument("--growth", default="poly2", help="poly2, poly3, exp, const:K, list:a,b,c")
    sp.add_argument("--dump", help="write c, delta, f knots and the four matrices as CSV blocks")

    sp = sub.add_parser("separate", help="Smirnov/Higson separation of a closed-set pair")
    common(sp)
    g = sp.add_mutually_exclusive_group(required=True)
    g.add_argument("--pair", choices=families.PAIRS)
    g.add_argument("--pair-file", help='JSON {"A": [ids], "B": [ids]}')
    sp.add_argument("--metric", choices=("base", "amplified"), default="base")
    sp.add_argument("--growth", default=None, help="growth for the amplified metric (default: dominate h_AB)")
    sp.add_argument("--eps", type=float, default=1e-6)
    sp.add_argument("--R", dest="R_grid", type=_parse_grid, default=None, help="e.g. 1..17 or 1,2,5")
    sp.add_argument("--N", type=int, default=1, help="start of the endgame range")
    sp.add_argument("--require-separated", action="store_true", help="exit 1 unless Higson separation holds")

    sp = sub.add_parser("diagonal", help="escape certificate on a comb space")
    common(sp)
    sp.add_argument("--scale", type=float, default=2.0, help="scale factor of the second family member")
    sp.add_argument("--warp", type=float, default=1.5, help="tooth stretch on odd spines for the third member")
    sp.add_argument("--min-coverage", type=int, default=0, help="minimum size of the escape index set")

    common(sub.add_parser("classify", help="dichotomy class ONE or D"))

    sp = sub.add_parser("oracle", help="closure vs brute-force chain enumeration")
    common(sp, needs_space=False)
    sp.add_argument("--points", type=int, default=10)
    sp.add_argument("--trials", type=int, default=50)
    return p


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    d = {k: v for k, v in vars(ns).items() if v is not None}
    d.setdefault("tol", _default_tol())
    return RunConfig(**d)


def _load(cfg: RunConfig):
    if cfg.space_file:
        space, exh = io.load(cfg.space_file)
        return space, exh, None
    fam = families.parse_family(cfg.space)
    space, comb = families.build_comb_or_space(fam)
    exh = families.standard_exhaustion(fam, space, cfg.depth) if cfg.command in ("expand", "separate", "validate") else None
    return space, exh, comb


def _require_exh(exh):
    if exh is None:
        raise ConfigError("this command needs an exhaustion; add one to the space file")
    return exh


def _axioms(m, tol) -> dict:
    r = metric_violations(m, tol, max_records=5)
    return {"ok": r.ok, "counts": r.counts, "first": r.violations}


def cmd_validate(cfg: RunConfig):
    space, exh, _ = _load(cfg)
    r = validate_space(space, cfg.tol)
    payload = {"points": space.size, "violations": r.violations, "counts": r.counts, "notes": r.notes}
    if exh is not None:
        payload["exhaustion_depth"] = exh.depth
    return payload, r.ok


def cmd_expand(cfg: RunConfig):
    space, exh, _ = _load(cfg)
    exh = _require_exh(exh)
    g = GrowthFunction.parse(cfg.growth or "poly2")
    try:
        am = amplify(space, exh, g, cfg.tol)
    except GuaranteeViolation as exc:
        return {"error": str(exc), "witness": exc.witness}, False
    mag = magnification_check(am, exh, cfg.tol)
    axioms = {name: _axioms(getattr(am, name), cfg.tol) for name in ("rho", "rho_g", "d_g")}
    growth_rows = growth_guarantee(am)
    collar_rows = collar_guarantee(am)
    fslack = f_potential_slack(am)
    ok = (mag.ok and all(a["ok"] for a in axioms.values()) and fslack >= -cfg.tol
          and all(r.slack >= -cfg.tol for r in growth_rows + collar_rows))
    payload = {
        "space": cfg.space or cfg.space_file,
        "points": space.size,
        "depth": exh.depth,
        "growth": g.describe(),
        "R": am.R,
        "f_knots": am.f.knots,
        "guarantee_growth": growth_rows,
        "guarantee_collar": collar_rows,
        "f_potential_slack": fslack,
        "magnification": {"ok": mag.ok, "bands": mag.bands, "violations": mag.violations},
        "axioms": axioms,
        "provenance": am.provenance,
    }
    if cfg.dump:
        pts = list(space.points)
        blocks = [
            ("c", ["point", "c"], [[p, float(v)] for p, v in zip(pts, am.c.values)]),
            ("delta", ["point", "delta"], [[p, float(v)] for p, v in zip(pts, am.delta.values)]),
            ("f_knots", ["s", "f"], [[k * 0.5, v] for k, v in enumerate(am.f.knots)]),
            report.matrix_block("rho", pts, am.rho),
            report.matrix_block("rho_prime", pts, am.rho_prime),
            report.matrix_block("rho_g", pts, am.rho_g),
            report.matrix_block("d_g", pts, am.d_g),
        ]
        Path(cfg.dump).write_text(report.csv_blocks(blocks), encoding="utf-8")
    return payload, ok


def _pair(cfg: RunConfig, space) -> ClosedSetPair:
    if cfg.pair_file:
        doc = json.loads(Path(cfg.pair_file).read_text(encoding="utf-8"))
        return ClosedSetPair(frozenset(space.index(p) for p in doc["A"]), frozenset(space.index(p) for p in doc["B"]))
    return families.named_pair(cfg.pair, space)


def cmd_separate(cfg: RunConfig):
    space, exh, _ = _load(cfg)
    exh = _require_exh(exh)
    pair = _pair(cfg, space)
    pair.require_nonempty()
    payload: dict = {"A": sorted(space.points[i] for i in pair.A), "B": sorted(space.points[i] for i in pair.B)}
    ok = True
    metric = space.metric
    if cfg.metric == "amplified":
        h = separation_demand(space, exh, pair)
        g = GrowthFunction.parse(cfg.growth) if cfg.growth else families.dominating_growth(h)
        payload["demand"] = h
        payload["growth"] = g.values(exh.depth)
        am = amplify(space, exh, g, cfg.tol)
        metric = am.d_g
        try:
            end = endgame_check(space, exh, pair, g, cfg.N, am=am, tol=cfg.tol)
            payload["endgame"] = {"ok": end.ok, "rows": end.rows, "failures": end.failures[:20]}
            ok &= end.ok
        except PreconditionFailed as exc:
            payload["endgame"] = {"ok": False, "precondition": str(exc)}
            ok = False
    payload["smirnov"] = smirnov_separated(space, pair, metric, cfg.eps, exh)
    hig = higson_separated(space, exh, pair, metric, cfg.R_grid)
    payload["higson"] = hig
    if cfg.require_separated:
        ok &= hig.verdict == SEPARATED
    return payload, ok


def cmd_diagonal(cfg: RunConfig):
    space, _, comb = _load(cfg)
    if comb is None:
        if space.limits is None:
            raise ConfigError("diagonal needs a comb descriptor or declared limit sequences")
        seqs = space.limits.sequences
        teeth = min(len(s) for s in seqs.values()) if seqs else 0
        comb = comb_from_space(space, len(seqs), teeth)
    assert isinstance(comb, CombSpace)
    fam = standard_family(comb, cfg.scale, cfg.warp)
    cert = certify(comb, fam)
    wit = nonseparation_witness(comb, fam, cert)
    coverage = len(cert.index_set)
    ok = cert.sound and wit.ok and coverage >= cfg.min_coverage and not comb.issues()
    payload = {
        "spines": comb.n_spines,
        "teeth": comb.n_teeth,
        "comb_issues": comb.issues(),
        "family": list(fam.names),
        "certificate": cert,
        "coverage": coverage,
        "witness": {"ok": wit.ok, "warnings": wit.warnings,
                    "subfamilies": [{"members": s.members, "own_index_set": len(s.index_set),
                                     "failures": s.failures} for s in wit.subfamilies]},
    }
    return payload, ok


def cmd_classify(cfg: RunConfig):
    space, _, _ = _load(cfg)
    label = classify(space)
    limits = space.limits
    return {"class": label, "derivative_size": len(limits.derivative()),
            "derivative_bounded": limits.derivative_bounded}, True


def cmd_oracle(cfg: RunConfig):
    ok, rows = oracle_suite(cfg.trials, cfg.points, cfg.seed)
    worst = max((r.max_abs_diff for r in rows), default=0.0)
    return {"trials": cfg.trials, "max_points": cfg.points, "worst_abs_diff": worst, "rows": rows}, ok


HANDLERS = {
    "validate": cmd_validate,
    "expand": cmd_expand,
    "separate": cmd_separate,
    "diagonal": cmd_diagonal,
    "classify": cmd_classify,
    "oracle": cmd_oracle,
}


def run(cfg: RunConfig) -> int:
    try:
        payload, ok = HANDLERS[cfg.command](cfg)
    except (ConfigError, CoarseMetricError, ValueError, OSError, KeyError) as exc:
        if isinstance(exc, MissingLimitTags) or not isinstance(exc, CoarseMetricError) or _is_config(exc):
            print(f"error: {exc}", file=sys.stderr)
            return 2
        print(f"check failed: {exc}", file=sys.stderr)
        return 1
    text = report.render(cfg.command, {"config": _config_summary(cfg), **payload}, seed=cfg.seed, ok=ok)
    if cfg.out:
        Path(cfg.out).write_text(text, encoding="utf-8")
    if cfg.command == "classify":
        print(payload["class"])
    elif not cfg.out:
        sys.stdout.write(text)
    return 0 if ok else 1


def _is_config(exc: Exception) -> bool:
    from .errors import DepthTooSmall, EmptyLevel, EmptySide, NoCollar, SpaceError

    return isinstance(exc, (SpaceError, EmptyLevel, NoCollar, EmptySide, DepthTooSmall))


def _config_summary(cfg: RunConfig) -> dict:
    skip = {"out", "dump", "extra"}
    return {k: v for k, v in vars(cfg).items() if k not in skip and v is not None}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        cfg = config_from_args(ns)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
