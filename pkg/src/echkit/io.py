"""Text interchange formats: complexes, orbit catalogs, tower exports and lattice CSVs.

Complex files are JSON objects::

    {"generators": [{"id": "g1", "grading": 2, "action": "1/1", "class": null}, ...],
     "differential": [["source_id", "target_id"], ...],
     "umap": [["source_id", "target_id"], ...],        # optional
     "complete_through": 10}                           # optional

Actions are exact rationals written ``"p/q"``.  Reading and writing are
inverse to each other, including generator order.
"""

from __future__ import annotations

import csv
import io
import json
import os
from fractions import Fraction
from pathlib import Path

from .ech_core import ELLIPTIC, FilteredTower, Orbit
from .homalg import ClassLabel, Generator, GradedComplex

__all__ = [
    "FormatError",
    "complex_to_json",
    "complex_from_json",
    "dumps_complex",
    "loads_complex",
    "write_complex",
    "read_complex",
    "orbits_to_json",
    "orbits_from_json",
    "export_tower",
    "read_tower_index",
    "lattice_csv",
]


class FormatError(ValueError):
    """Input text does not follow the interchange format."""


def _frac_str(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def _parse_frac(s, where: str) -> Fraction:
    if isinstance(s, bool) or not isinstance(s, (str, int)):
        raise FormatError(f"{where}: expected a 'p/q' string, got {s!r}")
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError):
        raise FormatError(f"{where}: cannot parse rational {s!r}") from None


def _parse_label(obj, where: str) -> ClassLabel:
    if obj is not None and not isinstance(obj, dict):
        raise FormatError(f"{where}: class must be null or an object")
    try:
        return ClassLabel.from_json(obj)
    except (ValueError, TypeError) as exc:
        raise FormatError(f"{where}: bad class label ({exc})") from None


def complex_to_json(c: GradedComplex) -> dict:
    out = {
        "generators": [
            {"id": g.id, "grading": g.grading, "action": _frac_str(g.action), "class": g.h1class.to_json()}
            for g in c.generators
        ],
        "differential": [list(p) for p in c.pairs("differential")],
    }
    if c.umap is not None:
        out["umap"] = [list(p) for p in c.pairs("umap")]
    if c.complete_through is not None:
        out["complete_through"] = c.complete_through
    return out


def complex_from_json(obj) -> GradedComplex:
    if not isinstance(obj, dict) or "generators" not in obj:
        raise FormatError("complex file must be an object with a 'generators' array")
    gens = []
    for k, g in enumerate(obj["generators"]):
        where = f"generator #{k}"
        if not isinstance(g, dict):
            raise FormatError(f"{where}: expected an object")
        try:
            gid, grading, action = g["id"], g["grading"], g["action"]
        except KeyError as exc:
            raise FormatError(f"{where}: missing field {exc}") from None
        if not isinstance(gid, str):
            raise FormatError(f"{where}: id must be a string")
        if isinstance(grading, bool) or not isinstance(grading, int):
            raise FormatError(f"{where} ({gid}): grading must be an integer")
        gens.append(Generator(gid, grading, _parse_frac(action, f"{where} ({gid})"), _parse_label(g.get("class"), where)))

    def pairs(key):
        raw = obj.get(key, [])
        if not isinstance(raw, list):
            raise FormatError(f"'{key}' must be an array of [source, target] pairs")
        out = []
        for p in raw:
            if not (isinstance(p, list) and len(p) == 2 and all(isinstance(x, str) for x in p)):
                raise FormatError(f"'{key}': bad pair {p!r}")
            out.append(tuple(p))
        return out

    ct = obj.get("complete_through")
    if ct is not None and (isinstance(ct, bool) or not isinstance(ct, int)):
        raise FormatError("'complete_through' must be an integer or null")
    try:
        return GradedComplex.from_pairs(
            gens,
            pairs("differential"),
            pairs("umap") if "umap" in obj and obj["umap"] is not None else None,
            ct,
        )
    except KeyError as exc:
        raise FormatError(str(exc.args[0])) from None
    except ValueError as exc:
        raise FormatError(str(exc)) from None


def dumps_complex(c: GradedComplex) -> str:
    return json.dumps(complex_to_json(c), indent=1) + "\n"


def loads_complex(text: str) -> GradedComplex:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"not valid JSON: {exc}") from None
    return complex_from_json(obj)


def write_complex(c: GradedComplex, path: str | os.PathLike) -> None:
    Path(path).write_text(dumps_complex(c))


def read_complex(path: str | os.PathLike) -> GradedComplex:
    return loads_complex(Path(path).read_text())


def orbits_to_json(orbits) -> list:
    out = []
    for o in orbits:
        rw = _frac_str(o.rotation) if o.kind == ELLIPTIC else int(o.rotation)
        out.append({
            "id": o.id,
            "kind": o.kind,
            "rotation_or_winding": rw,
            "action": _frac_str(o.action),
            "class": o.h1class.to_json(),
        })
    return out


def orbits_from_json(arr) -> list[Orbit]:
    if not isinstance(arr, list):
        raise FormatError("orbit catalog must be an array")
    out = []
    for k, o in enumerate(arr):
        where = f"orbit #{k}"
        try:
            out.append(Orbit(
                o["id"],
                o["kind"],
                _parse_frac(o["rotation_or_winding"], where),
                _parse_frac(o["action"], where),
                _parse_label(o.get("class"), where),
            ))
        except KeyError as exc:
            raise FormatError(f"{where}: missing field {exc}") from None
        except (TypeError, ValueError) as exc:
            if isinstance(exc, FormatError):
                raise
            raise FormatError(f"{where}: {exc}") from None
    return out


def export_tower(tower: FilteredTower, directory: str | os.PathLike) -> Path:
    """Write one complex file per threshold plus ``index.json``; returns the index path."""
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    files = []
    for i, c in enumerate(tower.truncations):
        name = f"level_{i:03d}.json"
        write_complex(c, d / name)
        files.append(name)
    index = {
        "thresholds": [_frac_str(t) for t in tower.thresholds],
        "files": files,
        "base": "base.json",
    }
    write_complex(tower.base, d / "base.json")
    path = d / "index.json"
    path.write_text(json.dumps(index, indent=1) + "\n")
    return path


def read_tower_index(path: str | os.PathLike) -> FilteredTower:
    path = Path(path)
    try:
        index = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise FormatError(f"not valid JSON: {exc}") from None
    base = read_complex(path.parent / index["base"])
    return FilteredTower(base, tuple(_parse_frac(t, "threshold") for t in index["thresholds"]))


def lattice_csv(rows) -> str:
    """CSV with columns ``m, n, action, grading`` (action as ``p/q``)."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["m", "n", "action", "grading"])
    for m, n, a, g in rows:
        w.writerow([m, n, _frac_str(a), g])
    return buf.getvalue()
