import io
import json
import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from quaddyn.arith import DomainError
from quaddyn.cli import main, parse_height_bound
from quaddyn.poly_search import PolyRecord
from quaddyn.rat_search import RatRecord, TripleParam
from quaddyn.records import (
    RunManifest,
    csv_text,
    parse,
    rational_from_str,
    rational_to_str,
    serialize,
    verify_row,
)


def run(argv):
    out = io.StringIO()
    code = main(argv, out)
    return code, out.getvalue()


# --- serialization ---------------------------------------------------------------


def test_rational_strings():
    assert rational_to_str(Fraction(-7, 6)) == "-7/6"
    assert rational_to_str(Fraction(3)) == "3"
    assert rational_from_str("-181/144") == Fraction(-181, 144)
    with pytest.raises(DomainError):
        rational_from_str("2/4")


reals = st.floats(allow_nan=False, allow_infinity=False, width=64)
rats = st.fractions(max_denominator=10**12)


@given(st.integers(1, 10**6), st.integers(1, 10**6), st.integers(-10**9, -1), rats, rats, reals, reals, reals,
       st.sampled_from(["preperiodic", "small-height"]), st.one_of(st.none(), st.integers(0, 9)), reals)
def test_poly_roundtrip(m, n, k, x, c, est, h, r, kind, tail, err):
    rec = PolyRecord(m, n, k, x, c, est, h, r, kind, tail, None if tail is None else 2, err)
    assert parse(serialize(rec)) == rec


nz = st.fractions(min_value=-50, max_value=50, max_denominator=50).filter(lambda v: v not in (0, 1))


@given(nz, nz, nz, reals, reals, reals, st.one_of(st.none(), st.integers(0, 9)))
def test_rat_roundtrip(x3, x4, x5, est, h, err, tail):
    if len({x3, x4, x5}) < 3:
        return
    rec = RatRecord(TripleParam(x3, x4, x5), (1, 2, 3), (4, 5, 6), "small-height", est, h, h / 7, 7.0,
                    tail, None if tail is None else 1, err)
    assert parse(serialize(rec)) == rec


def test_verify_row_roundtrip():
    row = verify_row("sigma", "identity", True, "ok")
    assert parse(serialize(row)) == row
    with pytest.raises(DomainError):
        parse('{"schema": "nope"}')


def test_csv_layout():
    rec = PolyRecord(7, 12, -181, Fraction(7, 12), Fraction(-181, 144), 0.03, 0.03433, 0.0066, "small-height")
    lines = csv_text([rec]).splitlines()
    assert lines[0] == "c,x,canonical_height,ratio,orbit"
    assert lines[1].startswith("-181/144,7/12,0.03433,0.00660,-11/12 ")


# --- command line ----------------------------------------------------------------


def test_height_bound_parsing():
    assert parse_height_bound("log20") == pytest.approx(math.log(20))
    assert parse_height_bound("log(1000)") == pytest.approx(math.log(1000))
    assert parse_height_bound("2.5") == 2.5


def test_usage_errors(capsys):
    assert run(["poly-search", "--n-max", "0"])[0] == 2
    assert run(["verify", "nonsense"])[0] == 2
    assert run(["rat-search", "--height-bound", "-1"])[0] == 2
    assert run(["poly-search", "--n-max", "4", "--resume"])[0] == 2
    assert run([])[0] == 2
    assert "usage error" in capsys.readouterr().err


def test_poly_search_to_stdout():
    code, text = run(["poly-search", "--n-max", "12"])
    assert code == 0
    rows = [json.loads(line) for line in text.splitlines()]
    hit = [r for r in rows if r["c"] == "-181/144" and r["x"] == "7/12"]
    assert hit and hit[0]["ratio"] == pytest.approx(0.00660, abs=1e-4)
    assert [(r["n"], r["m"], r["k"]) for r in rows] == sorted((r["n"], r["m"], r["k"]) for r in rows)


def test_rat_search_to_stdout():
    code, text = run(["rat-search", "--height-bound", "log3"])
    assert code == 0
    rows = [parse(line) for line in text.splitlines()]
    assert rows and all(max(r.triple.heights()) <= 3 for r in rows)


def test_verify_report():
    code, text = run(["verify", "sigma", "x42"])
    assert code == 0
    assert text.splitlines()[-1] == "3/3 checks passed"
    assert all(line.startswith("PASS") for line in text.splitlines()[:-1])


def test_resume_matches_fresh_run(tmp_path):
    fresh = tmp_path / "fresh.jsonl"
    assert run(["poly-search", "--n-max", "30", "--out", str(fresh)])[0] == 0
    # simulate an interrupted run: mark half the partitions as not done
    part = tmp_path / "part.jsonl"
    assert run(["poly-search", "--n-max", "30", "--out", str(part)])[0] == 0
    mpath = tmp_path / "part.jsonl.manifest.json"
    data = json.loads(mpath.read_text())
    for key in list(data["partitions"])[::2]:
        data["partitions"][key] = {"done": False, "records": 0}
    data["complete"] = False
    mpath.write_text(json.dumps(data))
    part.unlink()
    assert run(["poly-search", "--n-max", "30", "--out", str(part), "--resume"])[0] == 0
    assert part.read_bytes() == fresh.read_bytes()
    manifest = json.loads(mpath.read_text())
    assert manifest["complete"] and all(st["done"] for st in manifest["partitions"].values())
    assert manifest["config"]["n_max"] == 30


def test_resume_rejects_other_config(tmp_path):
    out = tmp_path / "r.jsonl"
    assert run(["poly-search", "--n-max", "6", "--out", str(out)])[0] == 0
    assert run(["poly-search", "--n-max", "7", "--out", str(out), "--resume"])[0] == 2


def test_worker_count_independence(tmp_path, monkeypatch):
    one, many = tmp_path / "one.jsonl", tmp_path / "many.jsonl"
    assert run(["rat-search", "--height-bound", "log4", "--out", str(one), "--workers", "1"])[0] == 0
    monkeypatch.setenv("QUADDYN_WORKERS", "3")
    assert run(["rat-search", "--height-bound", "log4", "--out", str(many), "--workers", "1"])[0] == 0
    assert one.read_bytes() == many.read_bytes()
    assert one.read_bytes()


def test_csv_export(tmp_path):
    out, table = tmp_path / "p.jsonl", tmp_path / "p.csv"
    assert run(["poly-search", "--n-max", "12", "--out", str(out), "--csv", str(table)])[0] == 0
    text = table.read_text()
    assert text.startswith("c,x,canonical_height,ratio,orbit\n") and "-181/144,7/12" in text


def test_manifest_partition_files(tmp_path):
    m = RunManifest.open(tmp_path / "o.jsonl", "rat-search", {"a": 1}, ["-1/3", "2"], "0", resume=False)
    assert m.pending() == ["-1/3", "2"]
    m.complete_partition("-1/3", [verify_row("t", "c", True)])
    assert m.part_path("-1/3").name == "-1_over_3.jsonl"
    assert m.pending() == ["2"]
    assert m.partition_rows("-1/3")[0]["check"] == "c"
