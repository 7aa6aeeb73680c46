from __future__ import annotations

import json

import pytest

from coxlog.certify import Certificate, load_certificates
from coxlog.cli import main


def _generate(tmp_path, capsys, *args):
    out = tmp_path / "fam.json"
    assert main(["generate", *args, "--out", str(out)]) == 0
    return json.loads(out.read_text())


def test_generate_a1(tmp_path, capsys):
    doc = _generate(tmp_path, capsys, "--type", "A1", "--k-min", "-1", "--k-max", "1")
    thetas = {f["k"]: f["theta"] for f in doc["families"]}
    assert thetas == {-1: [["1/3*x^3"]], 0: [["x"]], 1: [["(1)/(x)"]]}
    assert doc["datum"]["Q"] == "x"


def test_generate_products_and_degrees(tmp_path, capsys):
    doc = _generate(tmp_path, capsys, "--type", "A1xA1", "--k-min", "0", "--k-max", "1")
    assert sum(len(f["theta"]) for f in doc["families"]) == 4
    doc = _generate(tmp_path, capsys, "--type", "B2", "--k-min", "-1", "--k-max", "2")
    assert sum(len(f["theta"]) for f in doc["families"]) == 8
    assert {f["k"]: f["degrees"] for f in doc["families"]} == {-1: [5, 7], 0: [1, 3], 1: [-3, -1], 2: [-7, -5]}


@pytest.mark.parametrize("args", [["generate", "--type", "E8"], ["generate", "--type", "A2", "--k-min", "2",
                                                                   "--k-max", "1"],
                                  ["frobnicate"], ["verify", "--type", "A1", "--k-min", "-9", "--k-max", "9"],
                                  ["verify", "--type", "A1", "--multiplicity", "weird:1"]])
def test_usage_errors_exit_2(args, capsys):
    assert main(args) == 2


def test_verify_a1_defaults_and_report(tmp_path, capsys):
    out = tmp_path / "certs.json"
    assert main(["verify", "--type", "A1", "--out", str(out)]) == 0
    certs, timing = load_certificates(str(out))
    assert len(certs) >= 6 and all(c.passed for c in certs)
    assert timing
    assert main(["report", "--certs", str(out)]) == 0
    text = capsys.readouterr().out
    assert "| A1, k=1, constant=1 | forms | const:1 | pass |" in text
    assert main(["report", "--certs", str(out), "--format", "tsv"]) == 0
    assert "A1, k=1, constant=1\tforms" in capsys.readouterr().out
    assert main(["verify", "--recheck", str(out)]) == 0


def test_verify_product_type(tmp_path, capsys):
    assert main(["verify", "--type", "A1xB2", "--k-min", "0", "--k-max", "1", "--samples", "2"]) == 0


def test_verify_is_deterministic_and_job_independent(tmp_path, capsys):
    paths = []
    for jobs in ("1", "2", "1"):
        p = tmp_path / f"c{len(paths)}.json"
        assert main(["verify", "--type", "A2", "--k-min", "0", "--k-max", "1", "--samples", "3",
                     "--jobs", jobs, "--out", str(p)]) == 0
        paths.append(p)
    docs = [json.loads(p.read_text()) for p in paths]
    assert docs[0]["certificates"] == docs[1]["certificates"] == docs[2]["certificates"]


def test_report_on_empty_and_mixed(tmp_path, capsys):
    empty = tmp_path / "empty.json"
    empty.write_text(json.dumps({"schema": 1, "certificates": []}))
    assert main(["report", "--certs", str(empty)]) == 0
    assert "## Failures" in capsys.readouterr().out

    good = Certificate("A1/jacobian", "jacobian", "jacobian", "A1", None, {}, True, {"constant": "1"}, 42, "")
    bad = Certificate("A1/ord-lemma", "ord-lemma", "ord-lemma", "A1", None, {}, False,
                      {"error": "boom"}, 42, "")
    mixed = tmp_path / "mixed.json"
    mixed.write_text(json.dumps({"schema": 1, "certificates": [good.to_json(), bad.to_json()]}))
    assert main(["report", "--certs", str(mixed), "--format", "tsv"]) == 0
    lines = capsys.readouterr().out.splitlines()
    summary = [ln for ln in lines if ln.startswith("A1/")]
    assert summary and summary[0].startswith("A1/ord-lemma")
    assert main(["verify", "--recheck", str(mixed)]) == 1


def test_report_rejects_malformed_input(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["report", "--certs", str(bad)]) == 2
    assert main(["report", "--certs", str(tmp_path / "missing.json")]) == 2


def test_families_file_with_corruption_names_hyperplane(tmp_path, capsys):
    doc = _generate(tmp_path, capsys, "--type", "A1", "--k-min", "0", "--k-max", "1")
    fam = next(f for f in doc["families"] if f["k"] == 1)
    fam["theta"][0] = ["(1)/(x^2)"]
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(doc))
    assert main(["verify", "--families", str(path)]) == 1
    assert "ord along x = 2 > 1" in capsys.readouterr().err
