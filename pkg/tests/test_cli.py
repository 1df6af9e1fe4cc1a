import json
import shutil

import pytest

from k3lab import cli
from k3lab.etaprod import data_dir
from k3lab.recover import operator_path


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_derive_36_writes_tabulated_file(capsys, tmp_path):
    target = tmp_path / "36.pfo"
    code, out, _ = run(capsys, "derive", "36", "-o", str(target))
    assert code == 0
    assert target.read_text() == operator_path("36A").read_text()
    assert "matches the tabulated operator" in out


def test_derive_4(capsys):
    code, out, _ = run(capsys, "derive", "4")
    assert code == 0
    assert "x^1 : -8 -48 -96 -64" in out


def test_derive_7_needs_data(capsys):
    code, _, err = run(capsys, "derive", "7")
    assert code == 2
    assert "no eta product; supply q-expansion data" in err


def test_verify_file(capsys):
    code, out, _ = run(capsys, "verify", str(operator_path("36A")))
    assert code == 0
    line = next(ln for ln in out.splitlines() if ln.startswith("36A"))
    assert line.split()[2:5] == ["PASS", "PASS", "4/4"] and " 2 " in line


def test_verify_corrupted(capsys, tmp_path):
    text = operator_path("36A").read_text().replace("x^3 : 0 398 810 568", "x^3 : 0 398 810 569")
    bad = tmp_path / "corrupted.pfo"
    bad.write_text(text)
    code, out, _ = run(capsys, "verify", str(bad))
    assert code == 1
    assert "FAIL (q^" in out


def test_verify_all_json(capsys):
    code, out, _ = run(capsys, "--format", "json", "verify", "--all", "--jobs", "2")
    assert code == 0
    rep = json.loads(out)
    assert len(rep["reports"]) == 65 and rep["failed"] == 0
    assert all(r["identity"] == "PASS" for r in rep["reports"])
    assert [(r["n"], r["label"]) for r in rep["reports"]] == sorted((r["n"], r["label"]) for r in rep["reports"])


def test_pscheme_36A(capsys):
    code, out, _ = run(capsys, "pscheme", str(operator_path("36A")))
    assert code == 0
    header = out.splitlines()[0].split()
    assert len(header) == 6 and header[-1] == "inf"


def test_cusp(capsys):
    code, out, _ = run(capsys, "cusp", "1 2 5 10")
    assert code == 0 and out.startswith("cusp form, weight 2")
    code, _, _ = run(capsys, "cusp", "1 / 2")
    assert code == 1
    code, _, err = run(capsys, "cusp", "1 / 2 / 3")
    assert code == 2 and err.startswith("error:")


def test_bcov(capsys):
    code, out, _ = run(capsys, "bcov", "10")
    assert code == 0 and "verified" in out
    code, out, _ = run(capsys, "bcov", "25")
    assert code == 0 and "not found within bounds" in out
    code, _, _ = run(capsys, "bcov", "1000")
    assert code == 2


def test_gkz(capsys):
    code, out, _ = run(capsys, "gkz", "verify", "--degree", "10")
    assert code == 0 and "all 5 operators annihilate w0 (exact)" in out
    code, out, _ = run(capsys, "gkz", "orbifold")
    assert code == 0 and "T9: rho=(5/12, 1/3, 1/3) -> a=(-1/12, -1/6, -1/2)" in out


def test_reduced_elliptic_lattice(capsys):
    assert run(capsys, "reduced", "check", "--bidegree", "3")[0] == 0
    code, out, _ = run(capsys, "elliptic", "check", "--order", "12")
    assert code == 0 and out.count("PASS") == 5
    assert run(capsys, "lattice", "check", "--instances", "10")[0] == 0


def test_json_round_trip_and_determinism(capsys):
    _, a, _ = run(capsys, "--format", "json", "elliptic", "check", "--order", "10")
    _, b, _ = run(capsys, "--format", "json", "elliptic", "check", "--order", "10")
    assert a == b
    rep = json.loads(a)
    assert json.loads(json.dumps(rep, indent=2, sort_keys=True)) == rep
    assert json.dumps(rep, indent=2, sort_keys=True) == a.rstrip("\n")


def test_bad_data_dir(capsys, tmp_path):
    code, _, err = run(capsys, "--data", str(tmp_path), "cusp", "1")
    assert code == 2 and "groups.tsv" in err


def test_env_data_dir(capsys, tmp_path, monkeypatch):
    copy = tmp_path / "data"
    shutil.copytree(data_dir(), copy)
    (copy / "operators" / "36A.pfo").unlink()
    monkeypatch.setenv("K3LAB_DATA", str(copy))
    code, _, err = run(capsys, "pscheme", "36A")
    assert code == 2 and "36A" in err


def test_bad_config(capsys):
    assert run(capsys, "--guard", "-1", "cusp", "1")[0] == 2
    with pytest.raises(SystemExit):
        cli.main(["nosuchcommand"])
