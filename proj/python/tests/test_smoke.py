from fractions import Fraction
from pathlib import Path

import pytest

import sheafdb

DATA = Path(__file__).resolve().parents[2] / "tests" / "data"


def test_missing_data_summaries():
    table = sheafdb.bell_missing_table()
    relation, skipped = table.restrict(["A", "B"]).summarize()
    assert skipped == 8
    assert relation.cells() == {("0", "0"): 4, ("1", "1"): 4}
    a, skipped_a = table.restrict(["A"]).summarize()
    assert a.cells() == {("0",): 6, ("1",): 6}
    assert skipped_a == 4


def test_csv_table_matches_embedded():
    table = sheafdb.Table.load(DATA / "missing_data.csv", kind="boolean")
    assert len(table) == 16
    relation, _ = table.restrict(["A'", "B'"]).summarize()
    assert relation.cells() == {("0", "0"): 1, ("0", "1"): 3, ("1", "0"): 3, ("1", "1"): 1}


def test_bell_family_is_contextual():
    family = sheafdb.bell_family()
    assert family.is_compatible()
    report = family.check()
    assert report["verdict"] == "contextual"
    assert report["natural"]["status"] == "Contextual"
    assert report["rational"]["certificate"]["type"] == "farkas"
    assert family.chsh() == Fraction(5, 2)


def test_family_files():
    uniform = sheafdb.Family.load(DATA / "uniform_family.json")
    assert uniform.check()["verdict"] == "noncontextual"
    bad = sheafdb.Family.load(DATA / "incompatible_family.json")
    assert not bad.is_compatible()
    assert bad.check()["verdict"] == "incompatible family"
    normalized = sheafdb.bell_family().normalized()
    assert normalized.sections[0].total() == Fraction(1)


def test_demos():
    assert sheafdb.demo("bell-missing")["ok"]
    versioned = sheafdb.demo("bell-versioned")
    assert versioned["ok"] and versioned["verdict"] == "contextual"
    single = sheafdb.demo("bell-versioned", omega="C_AB=1,C_A'B=1,C_AB'=1,C_A'B'=1")
    assert single["verdict"] == "noncontextual"


def test_snapshot_script():
    out = sheafdb.snapshot(DATA / "bell_edits.json")
    assert out["pi_compatible"]
    assert out["views"][0].render().startswith("version index | A B\n1 1 | 0 0\n")
    assert out["family"].check()["verdict"] == "contextual"


def test_patch():
    patch = sheafdb.Patch.load(DATA / "tree_patch.json")
    assert sorted(patch.covers()) == [("1", "2"), ("1", "3"), ("1", "4"), ("2", "5")]
    assert patch.past("5") == ["1", "2", "5"]
    assert patch.is_antichain(["2", "3", "4"])


def test_errors():
    with pytest.raises(sheafdb.SheafdbError):
        sheafdb.Family.load(DATA / "boolean_family.json").check()
    with pytest.raises(sheafdb.ParseError):
        sheafdb.demo("nope")
    with pytest.raises(sheafdb.SheafdbError):
        sheafdb.Patch.load(DATA / "bad_patch.json")
