import json
import subprocess
import sys

import pytest

from milnor_galois.cli import main
from milnor_galois.galmodules import regular_module
from milnor_galois.grouprings import PrimeParams


def run(tmp_path, *args, name="out.json"):
    out = tmp_path / name
    code = main([*args, "--output", str(out)])
    report = json.loads(out.read_text()) if out.exists() else None
    return code, report, out


def test_ideal_lemma(tmp_path):
    code, rep, _ = run(tmp_path, "ideal-lemma", "--p", "2", "--s", "2", "--i", "1", "--exhaustive")
    assert code == 0 and rep["verified"] and rep["checked"] == 15


def test_ideal_lemma_fuzz(tmp_path):
    code, rep, _ = run(tmp_path, "ideal-lemma", "--p", "3", "--s", "3", "--i", "2", "--fuzz", "50", "--seed", "4")
    assert code == 0 and rep["mode"] == "sampled" and rep["seed"] == 4


def test_reports_are_byte_identical(tmp_path):
    args = ["condition-star", "--p", "2", "--n", "2", "--ell", "5", "--trials", "30", "--seed", "9"]
    _, _, a = run(tmp_path, *args, name="a.json")
    _, _, b = run(tmp_path, *args, name="b.json")
    assert a.read_bytes() == b.read_bytes()


def test_decompose_module_file(tmp_path):
    mf = tmp_path / "module.json"
    mf.write_text(json.dumps(regular_module(PrimeParams(2, 3, 1), 2).to_dict()))
    code, rep, _ = run(tmp_path, "decompose", "--module-file", str(mf), "--tower-depth", "3")
    assert code == 0
    assert rep["stage_ranks"] == [[0, 2]] * 3
    assert rep["tower_compatible"]


def test_decompose_failure_exit_code(tmp_path):
    mf = tmp_path / "module.json"
    mf.write_text(json.dumps({"p": 3, "s": 1, "n": 1, "rank": 2, "action": [0, 2, 1, 2]}))
    code, rep, _ = run(tmp_path, "decompose", "--module-file", str(mf))
    assert code == 1
    assert rep["report"]["failure_reason"] == "NotTheoremShape"


def test_decompose_with_given_certificate(tmp_path):
    mf = tmp_path / "module.json"
    mf.write_text(json.dumps(regular_module(PrimeParams(2, 2, 1)).to_dict()))
    cf = tmp_path / "cert.json"
    cf.write_text(json.dumps({"generators": [{"coords": [1, 0], "level": 0}]}))
    code, rep, _ = run(tmp_path, "decompose", "--module-file", str(mf), "--certificate-file", str(cf))
    assert code == 1
    assert rep["given_certificate"]["failure_reason"] == "spanning"


def test_missing_module_file_is_usage_error(tmp_path):
    code, rep, _ = run(tmp_path, "decompose", "--module-file", str(tmp_path / "nope.json"))
    assert code == 2 and rep is None


def test_invalid_prime_is_usage_error(tmp_path):
    code, _, _ = run(tmp_path, "as-instance", "--p", "4", "--s", "1", "--dF", "1")
    assert code == 2


def test_bad_flags_exit_2():
    with pytest.raises(SystemExit) as exc:
        main(["symbols", "--p", "2"])
    assert exc.value.code == 2


def test_as_instance(tmp_path):
    code, rep, _ = run(tmp_path, "as-instance", "--p", "2", "--s", "2", "--dF", "3")
    assert code == 0 and rep["ranks"] == [3, 2] and rep["seed"] == 0


def test_symbols_membership(tmp_path):
    code, rep, _ = run(tmp_path, "symbols", "--p", "2", "--s", "1", "--m", "2", "--check", "membership", "--x", "t", "--dF", "1")
    assert code == 0 and rep["verdict"] == "Member" and rep["replay_ok"]
    code, rep, _ = run(tmp_path, "symbols", "--p", "2", "--s", "1", "--m", "2", "--check", "membership", "--x", "t+1", "--dF", "1")
    assert code == 0 and rep["verdict"] == "NonMember"


def test_symbols_membership_unknown_is_not_verified(tmp_path):
    code, rep, _ = run(
        tmp_path, "symbols", "--p", "2", "--s", "1", "--m", "2", "--check", "membership", "--x", "t^3+t+1", "--dF", "1"
    )
    assert code == 1 and rep["verdict"] == "Unknown"


def test_symbols_membership_needs_x(tmp_path):
    code, _, _ = run(tmp_path, "symbols", "--p", "2", "--s", "1", "--m", "2", "--check", "membership")
    assert code == 2


def test_symbols_diagram(tmp_path):
    code, rep, _ = run(tmp_path, "symbols", "--p", "3", "--s", "1", "--m", "3", "--check", "diagram", "--trials", "20")
    assert code == 0 and rep["failures"] == []


def test_module_entry_point(tmp_path):
    out = tmp_path / "r.json"
    proc = subprocess.run(
        [sys.executable, "-m", "milnor_galois", "ideal-lemma", "--p", "2", "--s", "1", "--i", "2", "--output", str(out)],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert json.loads(out.read_text())["command"] == "ideal-lemma"
