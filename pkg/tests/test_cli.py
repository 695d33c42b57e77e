import json

import pytest

from gca.cli import run


def _run(capsys, *argv):
    code = run(list(argv))
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


def test_validate_algebra(capsys):
    code, doc = _run(capsys, "validate-algebra", "su3", "--roots")
    assert code == 0 and doc["verdicts"]["jacobi"] and "roots" in doc["report"]


def test_normal_form_deterministic(capsys):
    a = _run(capsys, "normal-form", "--n", "3", "--k", "1", "--seed", "5")
    b = _run(capsys, "normal-form", "--n", "3", "--k", "1", "--seed", "5")
    assert a == b and a[0] == 0


def test_normal_form_q1_fails(capsys):
    code, doc = _run(capsys, "normal-form", "--n", "5", "--k", "1", "--p", "1", "--q", "1")
    assert code == 1 and doc["verdicts"] == {"cartanSplit": False}


def test_tampered_field(tmp_path, capsys):
    code, doc = _run(capsys, "normal-form", "--n", "5", "--k", "1")
    body = doc["report"]["instance"]
    key = next(iter(body["body"]["eps"]["coeffs"]))
    body["body"]["eps"]["coeffs"][key].append({"exponents": [0, 0, 0, 0, 1], "coeff": "i"})
    path = tmp_path / "f.json"
    path.write_text(json.dumps(body))
    code, doc = _run(capsys, "check", str(path), "--grid", "2")
    assert code == 1 and "integrability:condE" in doc["witnesses"]


def test_adapted_basis_file(tmp_path, capsys):
    path = tmp_path / "d.json"
    path.write_text(json.dumps({"algebraRef": "su2x2",
                                "D": [[1, 0, 0, 1, 0, 0], [0, 1, 0, 0, 1, 0], [0, 0, 1, 0, 0, 1]]}))
    code, doc = _run(capsys, "adapted-basis", str(path))
    assert code == 0 and doc["report"]["adaptedBasis"]["p"] == 3


def test_lagrangian(capsys):
    code, doc = _run(capsys, "lagrangian", "--S", "1", "--phases", "i,-i")
    assert code == 0 and doc["report"]["weakRegular"]
    code, doc = _run(capsys, "lagrangian", "--S", "1", "--phases", "i,i")
    assert code == 1 and "admissible" in doc["witnesses"]


def test_index_zero_engineered(capsys):
    code, doc = _run(capsys, "index-zero", "--V", "3", "--engineered", "positive", "--seed", "2")
    assert code == 0 and doc["verdicts"]["oracleAgrees"]


def test_usage_errors(tmp_path, capsys):
    assert run(["frobnicate"]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{nope")
    assert run(["check", str(bad)]) == 2
    capsys.readouterr()


def test_degree_cap(tmp_path, capsys, monkeypatch):
    code, doc = _run(capsys, "normal-form", "--n", "3", "--k", "1")
    path = tmp_path / "f.json"
    body = doc["report"]["instance"]
    body["body"]["eps"]["coeffs"]["1,2"] = [{"exponents": [2, 0, 0], "coeff": "1"}]
    path.write_text(json.dumps(body))
    monkeypatch.setenv("GCA_MAX_DEGREE", "1")
    assert run(["check", str(path), "--quiet"]) == 2


def test_untwist_and_axioms(tmp_path, capsys):
    from gca.courant import CourantData
    from gca.extcalc import Form, GForm
    from gca.liealg import get_algebra
    g = get_algebra("su2x2")
    A = GForm.from_terms(g, 2, 1, {(0,): [0, 0, 0, 1, 0, 0], (1,): [1, 0, 0, 0, 0, 0]})
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"kind": "courant", "body": CourantData.from_connection(g, A).to_json(),
                                "meta": {}}))
    code, doc = _run(capsys, "untwist", str(path))
    assert code == 0 and doc["verdicts"]["untwisted"]
    code, doc = _run(capsys, "check-axioms", str(path), "--count", "2", "--degree", "1")
    assert code == 0


@pytest.mark.parametrize("alg,code", [("su3x3", 0), ("su2x2", 1)])
def test_wang(capsys, alg, code):
    assert _run(capsys, "wang", "--algebra", alg, "--grid", "2")[0] == code


def test_out_quiet_and_report_as_input(tmp_path, capsys):
    path = tmp_path / "nf.json"
    assert run(["normal-form", "--n", "3", "--k", "1", "--out", str(path), "--quiet"]) == 0
    assert capsys.readouterr().out == ""
    assert json.loads(path.read_text())["command"] == "normal-form"
    code, doc = _run(capsys, "check", str(path), "--grid", "2")
    assert code == 0 and doc["ok"]
