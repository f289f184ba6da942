import json
import math
import subprocess
import sys

import numpy as np
import pytest

from cubelsi import __version__
from cubelsi.cli import main
from cubelsi.cube import CubeFunction, walsh_function
from cubelsi.inequalities import evaluate
from cubelsi.io import save_function, save_perm_function, save_relation
from cubelsi.norms import OrliczGauge, orlicz_norm
from cubelsi.quotient import antipodal_relation
from cubelsi.symgroup import sign_function


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv, "--no-timestamp")
    return code, json.loads(out)


def test_header(capsys):
    code, doc = run_json(capsys, "norm", "--n", "3", "--seed", "5")
    assert code == 0
    h = doc["header"]
    assert h == {"command": "norm", "version": __version__, "seed": 5, "params": h["params"]}
    assert h["params"]["n"] == 3 and "timestamp" not in h
    code, out, _ = run(capsys, "norm", "--n", "3")
    assert "timestamp" in json.loads(out)["header"]


def test_norm_matches_library(capsys, tmp_path, rng):
    f = CubeFunction(4, rng.normal(size=(16, 2)))
    path = save_function(f, tmp_path / "f.json")
    code, doc = run_json(capsys, "norm", "--function", str(path), "--p", "2", "--alpha", "1")
    assert code == 0
    assert doc["result"]["orlicz_norm"] == orlicz_norm(f, OrliczGauge(2, 1), tol=1e-12)


def test_verify_with_function_matches_evaluate(capsys, tmp_path, rng):
    f = CubeFunction(4, rng.normal(size=(16, 3)))
    path = save_function(f, tmp_path / "f.json", encoding="binary")
    code, doc = run_json(capsys, "verify", "--ineq", "main-lsi", "--function", str(path))
    assert code == 0
    assert doc["result"]["max_ratio"] == evaluate("main-lsi", f).ratio
    assert doc["result"]["count"] == 1


def test_verify_random_proven(capsys):
    code, doc = run_json(capsys, "verify", "--ineq", "poincare-lp", "--n", "5", "--random", "50")
    assert code == 0
    res = doc["result"]
    assert res["proven_unit_constant"] and res["violations"] == 0 and res["max_ratio"] <= 1 + 1e-9


def test_verify_deterministic_and_thread_independent(capsys):
    args = ("verify", "--ineq", "type-lsi", "--n", "4", "--d", "2", "--random", "20", "--seed", "9")
    _, a, _ = run(capsys, *args, "--no-timestamp", "--threads", "1")
    _, b, _ = run(capsys, *args, "--no-timestamp", "--threads", "4")
    assert a == b


def test_verify_csv(capsys, tmp_path):
    out = tmp_path / "v.csv"
    code, _, _ = run(capsys, "verify", "--ineq", "poincare-lp", "--random", "5", "--format", "csv",
                     "--output", str(out))
    assert code == 0
    lines = out.read_text().splitlines()
    assert len(lines) == 6 and "ratio" in lines[0].split(",")


def test_csv_rejected_for_single_results(capsys):
    code, _, err = run(capsys, "norm", "--format", "csv")
    assert code == 2 and "csv" in err


def test_gradient(capsys, tmp_path):
    path = save_function(walsh_function(3, [1]) + walsh_function(3, [2]), tmp_path / "f.json")
    code, doc = run_json(capsys, "gradient", "--function", str(path))
    assert code == 0 and doc["result"]["G_p"] == pytest.approx(math.sqrt(2))
    code, doc = run_json(capsys, "gradient", "--n", "6", "--mode", "monte-carlo", "--samples", "500")
    assert code == 0 and doc["result"]["stderr"] > 0


def test_entropy_command(capsys):
    code, doc = run_json(capsys, "entropy", "--n", "5", "--d", "2", "--p", "1", "--alpha", "2")
    assert code == 0 and doc["result"]["holds"] is True
    assert doc["result"]["constants"]["c_alpha"] >= 1


def test_exit_codes(capsys):
    assert run(capsys, "verify", "--ineq", "no-such")[0] == 2
    assert run(capsys, "gradient", "--n", "16")[0] == 3
    assert run(capsys, "norm", "--function", "/nonexistent.json")[0] == 2
    assert run(capsys, "verify", "--ineq", "poincare-lp", "--random", "0")[0] == 2
    assert run(capsys, "quotient", "--n", "8", "--mode", "product")[0] == 3
    assert run(capsys, "symgroup", "--n", "9")[0] == 2
    assert run(capsys, "frobnicate")[0] == 2
    assert run(capsys)[0] == 2


def test_version(capsys):
    with pytest.raises(SystemExit) as ex:
        main(["--version"])
    assert ex.value.code == 0
    assert __version__ in capsys.readouterr().out


def test_quotient_commands(capsys, tmp_path):
    code, doc = run_json(capsys, "quotient", "--relation", "diag", "--n", "1", "--p", "1", "--alpha", "0")
    assert code == 0 and doc["result"]["bound_without_c"] == 1.0
    code, doc = run_json(capsys, "quotient", "--relation", "coord", "--coords", "1", "2", "--n", "3")
    assert doc["result"]["classes"] == 2 and doc["header"]["params"]["coords"] == [1, 2]
    save_relation(antipodal_relation(3), tmp_path / "r.json")
    code, doc = run_json(capsys, "quotient", "--relation", str(tmp_path / "r.json"), "--n", "3")
    assert code == 0 and doc["result"]["classes"] == 4
    assert run(capsys, "quotient", "--relation", "bogus")[0] == 2


def test_symgroup_command(capsys, tmp_path):
    code, doc = run_json(capsys, "symgroup", "--n", "4", "--random", "20")
    assert code == 0 and doc["result"]["violations"] == 0
    path = save_perm_function(sign_function(3), tmp_path / "s.json")
    code, doc = run_json(capsys, "symgroup", "--function", str(path))
    assert code == 0 and doc["result"]["max"]["dsc"] == 0.0


def test_semigroup_command(capsys):
    code, doc = run_json(capsys, "semigroup", "--n", "6", "--t", "0.5", "1")
    assert code == 0
    for row in doc["result"]:
        assert row["power_iteration"] == pytest.approx(row["closed_form"], rel=0.01)


def test_extremize_command(capsys, tmp_path):
    wdir = tmp_path / "w"
    code, doc = run_json(capsys, "extremize", "--ineq", "poincare-lp", "--n", "2", "3", "--budget", "300",
                         "--witness-dir", str(wdir))
    assert code == 0
    ratios = [r["ratio"] for r in doc["result"]]
    assert ratios[1] >= ratios[0] * (1 - 1e-9) and ratios[1] >= 0.99
    assert sorted(p.name for p in wdir.iterdir()) == ["poincare-lp-n2-s0.json", "poincare-lp-n3-s0.json"]


def test_suite_only(capsys):
    code, doc = run_json(capsys, "suite", "--quick", "--only", "exactness", "identities")
    assert code == 0 and doc["result"]["ok"]
    assert len(doc["result"]["checks"]) == 2


def test_console_script():
    proc = subprocess.run([sys.executable, "-m", "cubelsi.cli", "norm", "--n", "2", "--no-timestamp"],
                          capture_output=True, text=True, check=True)
    assert json.loads(proc.stdout)["header"]["command"] == "norm"
