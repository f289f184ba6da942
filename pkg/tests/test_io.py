import json
import math

import numpy as np
import pytest

from cubelsi.cube import CubeFunction
from cubelsi.errors import ArgumentError
from cubelsi.inequalities import InequalityId, evaluate
from cubelsi.io import (load_function, load_perm_function, load_relation, relation_pairs,
                        report_record, save_function, save_perm_function, save_relation, to_json,
                        write_csv)
from cubelsi.quotient import antipodal_relation, random_relation
from cubelsi.symgroup import PermFunction


@pytest.mark.parametrize("encoding", ["inline", "binary"])
def test_function_roundtrip(tmp_path, rng, encoding):
    f = CubeFunction(5, rng.normal(size=(32, 3)))
    path = save_function(f, tmp_path / "f.json", encoding=encoding)
    g = load_function(path)
    assert g.n == 5 and g.d == 3
    assert np.array_equal(f.values, g.values)
    header = json.loads(path.read_text())
    assert header["encoding"] == encoding
    if encoding == "binary":
        assert (tmp_path / header["blob"]).stat().st_size == 32 * 3 * 8


def test_binary_is_little_endian(tmp_path):
    f = CubeFunction(1, [1.0, 2.0])
    save_function(f, tmp_path / "f.json", encoding="binary")
    raw = (tmp_path / "f.bin").read_bytes()
    assert raw == np.array([1.0, 2.0], dtype="<f8").tobytes()


def test_bad_blob(tmp_path):
    f = CubeFunction(2, np.arange(4.0))
    save_function(f, tmp_path / "f.json", encoding="binary")
    (tmp_path / "f.bin").write_bytes(b"\0" * 8)
    with pytest.raises(ArgumentError):
        load_function(tmp_path / "f.json")
    with pytest.raises(ArgumentError):
        save_function(f, tmp_path / "g.json", encoding="hex")


def test_perm_roundtrip(tmp_path, rng):
    f = PermFunction(4, rng.normal(size=(24, 2)))
    for enc in ("inline", "binary"):
        p = save_perm_function(f, tmp_path / f"p_{enc}.json", encoding=enc)
        assert np.array_equal(load_perm_function(p).values, f.values)


def test_relation_roundtrip(tmp_path, rng):
    for rel in (antipodal_relation(3), random_relation(rng, 5)):
        save_relation(rel, tmp_path / "r.json")
        back = load_relation(tmp_path / "r.json")
        assert np.array_equal(back.class_of, rel.class_of)
        assert len(relation_pairs(rel)) == (1 << rel.n) - rel.m


def test_to_json_plain():
    text = to_json({"b": np.float64(1.5), "a": [np.int64(2), np.bool_(True)], "c": math.inf,
                    "d": math.nan, "e": InequalityId.Beckner, "f": np.arange(2)})
    data = json.loads(text)
    assert list(data) == ["a", "b", "c", "d", "e", "f"]
    assert data == {"a": [2, True], "b": 1.5, "c": "inf", "d": "nan", "e": "beckner", "f": [0, 1]}
    assert text.endswith("\n")


def test_report_record_and_csv(tmp_path, rng):
    rep = evaluate("poincare-lp", CubeFunction(3, rng.normal(size=8)))
    rec = report_record(rep, seed=4, witness_path=tmp_path / "w.json")
    assert set(rec) == {"id", "params", "lhs", "rhs_unit", "ratio", "seed", "witness_path"}
    assert rec["id"] == "poincare-lp" and rec["seed"] == 4
    write_csv(tmp_path / "out.csv", [{"n": 2, "ratio": 0.5}, {"n": 3, "ratio": np.float64(0.25)}])
    assert (tmp_path / "out.csv").read_text() == "n,ratio\n2,0.5\n3,0.25\n"
