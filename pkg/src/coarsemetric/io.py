"""Space-description files (JSON).

Example::

    {
      "points": [{"id": "x0", "coords": [0.0]}, {"id": "x1", "coords": [0.5]}],
      "metric": {"matrix": [["0", "0.5"], ["0.5", "0"]]},
      "limits": {"tags": ["limit", "isolated"], "sequences": {"x0": ["x1"]},
                 "derivative_bounded": true},
      "exhaustion": {"radii": [0.25, 1.0], "center": "x0"}
    }

``metric`` is either ``{"matrix": rows}`` (numbers or decimal strings) or
``{"euclidean": true}`` (distances from ``coords``).  ``exhaustion`` is
either ``{"radii": [...], "center": id, "cap": bool}`` or
``{"levels": [[ids], ...]}``.  Matrices are written as shortest
round-trip decimal strings, so ``load(dump(space))`` reproduces every
entry bit for bit.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import SpaceError
from .space import DiscreteSpace, Exhaustion, LimitTags, build_exhaustion, exhaustion_from_levels


def _num(v) -> float:
    if isinstance(v, bool):
        raise SpaceError(f"not a number: {v!r}")
    try:
        return float(v)
    except (TypeError, ValueError):
        raise SpaceError(f"not a number: {v!r}") from None


def space_from_dict(doc: dict) -> tuple[DiscreteSpace, Exhaustion | None]:
    try:
        raw_points = doc["points"]
        metric = doc["metric"]
    except KeyError as exc:
        raise SpaceError(f"space description lacks {exc}") from None
    ids, coords = [], []
    for p in raw_points:
        if isinstance(p, dict):
            ids.append(str(p["id"]))
            coords.append(p.get("coords"))
        else:
            ids.append(str(p))
            coords.append(None)
    have_coords = all(c is not None for c in coords)
    if any(c is not None for c in coords) and not have_coords:
        raise SpaceError("either every point or no point carries coordinates")
    coord_arr = np.array([[_num(x) for x in c] for c in coords]) if have_coords else None

    matrix = None
    if "matrix" in metric:
        matrix = np.array([[_num(x) for x in row] for row in metric["matrix"]], dtype=float)
    elif not metric.get("euclidean"):
        raise SpaceError("metric must give a matrix or set euclidean")
    elif coord_arr is None:
        raise SpaceError("euclidean metric needs coordinates on every point")

    pos = {p: i for i, p in enumerate(ids)}

    def idx(p) -> int:
        try:
            return pos[str(p)]
        except KeyError:
            raise SpaceError(f"unknown point {p!r}") from None

    limits = None
    if "limits" in doc:
        lim = doc["limits"]
        tags = tuple(lim.get("tags", ["isolated"] * len(ids)))
        seqs = {idx(a): tuple(idx(b) for b in seq) for a, seq in lim.get("sequences", {}).items()}
        limits = LimitTags(tags, seqs, lim.get("derivative_bounded"))

    space = DiscreteSpace(tuple(ids), matrix=matrix, coords=coord_arr, limits=limits)

    exh = None
    if "exhaustion" in doc:
        e = doc["exhaustion"]
        if "levels" in e:
            exh = exhaustion_from_levels(space, [[idx(p) for p in lv] for lv in e["levels"]])
        else:
            exh = build_exhaustion(space, [_num(r) for r in e["radii"]], idx(e.get("center", ids[0])),
                                   cap=bool(e.get("cap", False)))
    return space, exh


def space_to_dict(space: DiscreteSpace, exh: Exhaustion | None = None) -> dict:
    if space.coords is not None:
        points = [{"id": p, "coords": [float(x) for x in row]} for p, row in zip(space.points, space.coords)]
    else:
        points = list(space.points)
    doc: dict = {"points": points}
    if space.matrix is not None:
        doc["metric"] = {"matrix": [[repr(float(x)) for x in row] for row in space.matrix]}
    else:
        doc["metric"] = {"euclidean": True}
    if space.limits is not None:
        lim = space.limits
        doc["limits"] = {
            "tags": list(lim.tags),
            "sequences": {space.points[a]: [space.points[b] for b in seq] for a, seq in sorted(lim.sequences.items())},
            "derivative_bounded": lim.derivative_bounded,
        }
    if exh is not None:
        doc["exhaustion"] = {"levels": [[space.points[i] for i in sorted(lv)] for lv in exh.levels]}
    return doc


def dumps(space: DiscreteSpace, exh: Exhaustion | None = None) -> str:
    return json.dumps(space_to_dict(space, exh), indent=1)


def loads(text: str) -> tuple[DiscreteSpace, Exhaustion | None]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpaceError(f"invalid JSON: {exc}") from None
    return space_from_dict(doc)


def load(path: str | Path) -> tuple[DiscreteSpace, Exhaustion | None]:
    return loads(Path(path).read_text(encoding="utf-8"))


def dump(space: DiscreteSpace, path: str | Path, exh: Exhaustion | None = None) -> None:
    Path(path).write_text(dumps(space, exh), encoding="utf-8")


def same_space(a: DiscreteSpace, b: DiscreteSpace) -> bool:
    """Bit-exact equality of points, metric data and limit structure."""
    if a.points != b.points or a.limits != b.limits:
        return False
    for x, y in ((a.matrix, b.matrix), (a.coords, b.coords)):
        if (x is None) != (y is None):
            return False
        if x is not None and (x.shape != y.shape or x.tobytes() != y.tobytes()):
            return False
    return True
