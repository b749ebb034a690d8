"""JSON-lines result rows, CSV export, and the partition manifest used for
resumable runs.

Rationals are written as "num/den" in lowest terms (integers without a
denominator, infinity as "inf").  Reals are JSON numbers written with
Python's shortest round-trip repr, so parse(serialize(row)) is exact.
"""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from fractions import Fraction
from pathlib import Path
from typing import Iterable

from .arith import DomainError
from .poly_search import PolyRecord
from .rat_search import RatRecord, TripleParam

POLY_SCHEMA = "quaddyn.poly-record/1"
RAT_SCHEMA = "quaddyn.rat-record/1"
VERIFY_SCHEMA = "quaddyn.verify-result/1"
MANIFEST_SCHEMA = "quaddyn.manifest/1"
REAL_FORMAT = "float64, shortest round-trip decimal"


def rational_to_str(x) -> str:
    if x is None:
        return None
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def rational_from_str(s: str) -> Fraction:
    out = Fraction(s)
    if rational_to_str(out) != s:
        raise DomainError(f"{s!r} is not a rational in lowest terms")
    return out


def poly_row(rec: PolyRecord) -> dict:
    return {
        "schema": POLY_SCHEMA,
        "n": rec.n,
        "m": rec.m,
        "k": rec.k,
        "x": rational_to_str(rec.x),
        "c": rational_to_str(rec.c),
        "kind": rec.kind,
        "estimate": rec.estimate,
        "canonical_height": rec.canonical_height,
        "ratio": rec.ratio,
        "error": rec.error,
        "tail": rec.tail,
        "period": rec.period,
    }


def rat_row(rec: RatRecord) -> dict:
    return {
        "schema": RAT_SCHEMA,
        "triple": [rational_to_str(v) for v in (rec.triple.x3, rec.triple.x4, rec.triple.x5)],
        "F": list(rec.F),
        "G": list(rec.G),
        "kind": rec.kind,
        "estimate": rec.estimate,
        "canonical_height": rec.canonical_height,
        "ratio": rec.ratio,
        "map_height": rec.map_height,
        "error": rec.error,
        "tail": rec.tail,
        "period": rec.period,
    }


def verify_row(target: str, check: str, passed: bool, detail: str = "") -> dict:
    return {"schema": VERIFY_SCHEMA, "target": target, "check": check, "passed": bool(passed), "detail": detail}


def to_row(obj) -> dict:
    if isinstance(obj, PolyRecord):
        return poly_row(obj)
    if isinstance(obj, RatRecord):
        return rat_row(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def serialize(obj) -> str:
    row = obj if isinstance(obj, dict) else to_row(obj)
    return json.dumps(row, separators=(",", ":"))


def parse(line: str | dict):
    row = json.loads(line) if isinstance(line, str) else line
    schema = row.get("schema")
    if schema == POLY_SCHEMA:
        return PolyRecord(
            row["m"], row["n"], row["k"], rational_from_str(row["x"]), rational_from_str(row["c"]),
            row["estimate"], row["canonical_height"], row["ratio"], row["kind"],
            row["tail"], row["period"], row["error"],
        )
    if schema == RAT_SCHEMA:
        return RatRecord(
            TripleParam(*(rational_from_str(v) for v in row["triple"])), tuple(row["F"]), tuple(row["G"]),
            row["kind"], row["estimate"], row["canonical_height"], row["ratio"], row["map_height"],
            row["tail"], row["period"], row["error"],
        )
    if schema == VERIFY_SCHEMA:
        return row
    raise DomainError(f"unknown row schema {schema!r}")


def read_rows(path) -> list:
    with open(path) as fh:
        return [parse(line) for line in fh if line.strip()]


# --- CSV export in the published column layout ----------------------------------

POLY_CSV_COLUMNS = ("c", "x", "canonical_height", "ratio", "orbit")
RAT_CSV_COLUMNS = ("map", "canonical_height", "ratio", "orbit", "tail", "period")


def csv_text(records: Iterable, orbit_terms: int = 7) -> str:
    from .arith import INFINITY
    from .dynamics import QuadRatMap, detect_orbit

    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    header = None
    for rec in records:
        if isinstance(rec, PolyRecord):
            if header is None:
                header = POLY_CSV_COLUMNS
                w.writerow(header)
            pts, y = [], rec.x
            for _ in range(orbit_terms):
                y = y * y + rec.c
                pts.append(rational_to_str(y))
            w.writerow([rational_to_str(rec.c), rational_to_str(rec.x), f"{rec.canonical_height:.5f}",
                        f"{rec.ratio:.5f}", " ".join(pts)])
        else:
            if header is None:
                header = RAT_CSV_COLUMNS
                w.writerow(header)
            phi = QuadRatMap(rec.F, rec.G)
            orb = detect_orbit(phi, INFINITY, orbit_terms + 3)
            w.writerow([str(phi), f"{rec.canonical_height:.5f}", f"{rec.ratio:.6f}",
                        " ".join(str(p) for p in orb.iterates[3:]), rec.tail if rec.tail is not None else "",
                        rec.period if rec.period is not None else ""])
    return buf.getvalue()


# --- manifest and partition files ----------------------------------------------------


def _atomic_write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".")
    with os.fdopen(fd, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


class RunManifest:
    """Tracks which partitions of a run are complete.

    Each finished partition's rows live in ``<out>.parts/<key>.jsonl``; the
    final output is the deterministic merge of those files, so a resumed run
    produces the same bytes as an uninterrupted one."""

    def __init__(self, out: Path, command: str, config: dict, partitions: list[str], version: str):
        self.out = Path(out)
        self.path = self.out.with_name(self.out.name + ".manifest.json")
        self.parts_dir = self.out.with_name(self.out.name + ".parts")
        self.data = {
            "schema": MANIFEST_SCHEMA,
            "command": command,
            "config": config,
            "version": version,
            "real_format": REAL_FORMAT,
            "partitions": {k: {"done": False, "records": 0} for k in partitions},
            "record_counts": {},
            "complete": False,
        }

    @classmethod
    def open(cls, out, command, config, partitions, version, resume: bool) -> "RunManifest":
        m = cls(out, command, config, partitions, version)
        if resume and m.path.exists():
            old = json.loads(m.path.read_text())
            if old.get("command") != command or old.get("config") != config:
                raise DomainError("manifest belongs to a different command or configuration")
            for k, st in old.get("partitions", {}).items():
                if k in m.data["partitions"] and st.get("done") and m.part_path(k).exists():
                    m.data["partitions"][k] = st
        m.save()
        return m

    def part_path(self, key: str) -> Path:
        return self.parts_dir / f"{key.replace('/', '_over_')}.jsonl"

    def pending(self) -> list[str]:
        return [k for k, st in self.data["partitions"].items() if not st["done"]]

    def complete_partition(self, key: str, rows: list[dict]):
        _atomic_write(self.part_path(key), "".join(serialize(r) + "\n" for r in rows))
        self.data["partitions"][key] = {"done": True, "records": len(rows)}
        self.save()

    def partition_rows(self, key: str) -> list[dict]:
        with open(self.part_path(key)) as fh:
            return [json.loads(line) for line in fh if line.strip()]

    def finish(self, counts: dict):
        self.data["record_counts"] = counts
        self.data["complete"] = True
        self.save()

    def save(self):
        _atomic_write(self.path, json.dumps(self.data, indent=1, sort_keys=True) + "\n")


__all__ = [
    "POLY_SCHEMA",
    "RAT_SCHEMA",
    "VERIFY_SCHEMA",
    "rational_to_str",
    "rational_from_str",
    "poly_row",
    "rat_row",
    "verify_row",
    "serialize",
    "parse",
    "read_rows",
    "csv_text",
    "RunManifest",
]
