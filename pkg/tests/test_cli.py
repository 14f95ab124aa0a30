"""Command-line front end: schemas, exit codes, determinism."""

from __future__ import annotations

import io
import json

import numpy as np
import pytest

from apnlab.cli import main
from apnlab.families import build_from_descriptor
from apnlab.invariants import parse_code_export
from apnlab.vbf import write_lut


def run(capsys, *argv) -> tuple[int, dict, str]:
    code = main(list(argv))
    captured = capsys.readouterr()
    payload = json.loads(captured.out) if captured.out.strip() else {}
    return code, payload, captured.err


# ---------------------------------------------------------------------------
# check
# ---------------------------------------------------------------------------

def test_check_reports_apn(capsys):
    code, out, err = run(capsys, "check", "--family", '{tag:"Gold", n:6, i:1}')
    assert code == 0
    assert out["schema"] == "apnlab/check/v1"
    assert out["apn"] is True and out["delta"] == 2
    assert out["method"] == "ddt"
    assert "elapsed_seconds=" in err


def test_check_quadratic_shortcut(capsys):
    code, out, _ = run(capsys, "check", "--family", '{tag:"Gold", n:7, i:2}',
                       "--quadratic-shortcut")
    assert code == 0
    assert out["method"] == "quadratic-shortcut"
    assert out["apn"] is True


def test_check_precondition_failure_exits_2(capsys):
    code, out, err = run(capsys, "check", "--family", '{tag:"Gold", n:8, i:2}')
    assert code == 2
    assert out["schema"] == "apnlab/error/v1"
    assert out["status"] == "precondition-failed"
    assert "gcd(i,n)=1" in out["error"]
    assert "gcd(i,n)=1" in err


def test_check_descriptor_from_file(tmp_path, capsys):
    p = tmp_path / "desc.json"
    p.write_text('{tag:"Welch", n:5}')
    code, out, _ = run(capsys, "check", "--family", f"@{p}")
    assert code == 0 and out["apn"] is True


# ---------------------------------------------------------------------------
# ddt
# ---------------------------------------------------------------------------

def test_ddt_family(capsys):
    code, out, _ = run(capsys, "ddt", "--family", '{tag:"Inverse", n:5}')
    assert code == 0
    assert out["schema"] == "apnlab/ddt/v1"
    assert out["delta"] == 2
    assert sum(int(k) * v for k, v in out["histogram"].items()) == 31 * 32


def test_ddt_lut_file(tmp_path, capsys):
    inst = build_from_descriptor('{tag:"Gold", n:5, i:1}')
    p = tmp_path / "gold5.lut"
    with open(p, "w") as fh:
        write_lut(inst.table, fh)
    code, out, _ = run(capsys, "ddt", "--lut", str(p))
    assert code == 0 and out["delta"] == 2
    assert out["n"] == 5


# ---------------------------------------------------------------------------
# gamma-rank and table
# ---------------------------------------------------------------------------

def test_gamma_rank_command(capsys):
    code, out, _ = run(capsys, "gamma-rank", "--family",
                       '{tag:"Gold", n:6, i:1}')
    assert code == 0
    assert out["schema"] == "apnlab/gamma-rank/v1"
    assert out["gamma_rank"] == 1102
    assert out["matrix_dims"] == [4096, 4096]


def test_gamma_rank_memory_budget_exits_3(capsys, monkeypatch):
    monkeypatch.setenv("APNLAB_MEM_BUDGET_GIB", "0.0001")
    code, out, _ = run(capsys, "gamma-rank", "--family",
                       '{tag:"Gold", n:6, i:1}')
    assert code == 3
    assert out["status"] == "resource-limit"


def test_table_single_row(capsys):
    code, out, _ = run(capsys, "table", "--paper-table", "4", "--rows", "1")
    assert code == 0
    assert out["schema"] == "apnlab/table/v1"
    assert out["n"] == 8
    row = out["rows"][0]
    assert row["gamma_rank"] == 11818 and row["match"] is True
    assert out["all_match"] is True


def test_table_rejects_bad_rows(capsys):
    code, out, _ = run(capsys, "table", "--paper-table", "4", "--rows", "0,13")
    assert code == 2


# ---------------------------------------------------------------------------
# search and verify
# ---------------------------------------------------------------------------

def test_search_trinomial(capsys):
    code, out, _ = run(capsys, "search", "--trinomial", "--m", "2")
    assert code == 0
    assert out["schema"] == "apnlab/search/v1"
    assert out["count"] == 24
    assert {p["s"] for p in out["params"]} == {3, 5}
    for p in out["params"]:
        assert p["mu_exponents"] == sorted(p["mu_exponents"])


def test_verify_cubic(capsys):
    code, out, _ = run(capsys, "verify", "--lemma", "cubic", "--m", "3")
    assert code == 0
    assert out["ok"] is True and out["cases"] == 49
    assert out["mismatches"] == []


def test_verify_resultant(capsys):
    code, out, _ = run(capsys, "verify", "--lemma", "resultant", "--m", "2")
    assert code == 0
    assert out["ok"] is True and out["identity_holds"] is True


def test_verify_key_with_pinned_s(capsys):
    code, out, _ = run(capsys, "verify", "--lemma", "key", "--m", "2",
                       "--s", "3")
    assert code == 0
    assert out["ok"] is True
    assert out["points_per_tuple"] == 63
    assert out["tuples_checked"] == 36  # 12 mu values x 3 subfield v


def test_verify_key_rejects_empty_s(capsys):
    code, out, _ = run(capsys, "verify", "--lemma", "key", "--m", "2",
                       "--s", "1")
    assert code == 2


# ---------------------------------------------------------------------------
# export-code
# ---------------------------------------------------------------------------

def test_export_code_round_trip(tmp_path, capsys):
    out_path = tmp_path / "code.txt"
    code, out, _ = run(capsys, "export-code", "--family",
                       '{tag:"Gold", n:5, i:1}', "--format", "plain-bits",
                       "--out", str(out_path))
    assert code == 0
    assert out["rows"] == 11 and out["cols"] == 32
    fld, mat = parse_code_export(out_path.read_text())
    assert fld.n == 5 and mat.rows == 11


def test_export_code_script(tmp_path, capsys):
    out_path = tmp_path / "code.m"
    code, out, _ = run(capsys, "export-code", "--family",
                       '{tag:"Gold", n:4, i:1}', "--format", "script",
                       "--out", str(out_path))
    assert code == 0
    assert out_path.read_text().startswith("//")


# ---------------------------------------------------------------------------
# determinism
# ---------------------------------------------------------------------------

def test_stdout_is_byte_identical_across_runs(capsys):
    argv = ["ddt", "--family", '{tag:"Kasami", n:7, i:2}']
    main(list(argv))
    first = capsys.readouterr().out
    main(list(argv))
    second = capsys.readouterr().out
    assert first == second and first.strip()
