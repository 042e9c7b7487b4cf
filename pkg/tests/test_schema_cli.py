import importlib.util
import json
import subprocess
import sys
from pathlib import Path

import pytest

from algentropy.cli import EXIT_BUDGET, EXIT_INPUT, EXIT_OK, main
from algentropy.schema import validate_group, validate_job

HERE = Path(__file__).resolve().parent
DATA = HERE / "data"
GOLDEN = HERE / "golden"

_spec = importlib.util.spec_from_file_location("regenerate", GOLDEN / "regenerate.py")
regen = importlib.util.module_from_spec(_spec)
_spec.loader.exec_module(regen)


# -- schema --------------------------------------------------------------------

def test_valid_group_descriptors():
    for name in ("sum_z2", "q8_z2_z3", "iwasawa_sum_z9", "s3"):
        assert validate_group(json.loads((DATA / f"{name}.json").read_text())) == []


def test_iwasawa_violations_listed_together():
    errs = validate_group(json.loads((DATA / "bad_iwasawa.json").read_text()))
    assert errs[0][0] == "/s" and "p = 2" in errs[0][1]
    assert len(errs) >= 2


def test_job_collects_every_structural_problem():
    errs = validate_job(json.loads((DATA / "bad_job.json").read_text()))
    paths = {p for p, _ in errs}
    assert {"/group/n", "/extra", "/endomorphism/offset"} <= paths


def test_empty_document():
    assert validate_job({}) == [("/kind", "missing required field")]


@pytest.mark.parametrize("doc, path", [
    ({"kind": "product", "factors": "x"}, "/factors"),
    ({"kind": "restricted_sum"}, "/component"),
    ({"kind": "cyclic", "n": True}, "/n"),
    ({"kind": "quotient", "base": {"kind": "q8"}, "exponent": 2}, "/"),
])
def test_group_errors(doc, path):
    errs = validate_group(doc)
    assert errs and any(p.startswith(path) for p, _ in errs)


def test_job_semantic_error_non_homomorphism():
    doc = {"group": {"kind": "q8"}, "endomorphism": {"kind": "component_map", "images": [["i", "i"], ["j", "i"]]}}
    errs = validate_job(doc)
    assert errs and errs[0][0].startswith("/endomorphism")


def test_job_with_subgroup_and_bases():
    doc = {"group": {"kind": "restricted_sum", "component": {"kind": "cyclic", "n": 6}},
           "endomorphism": {"kind": "shift", "offset": 1}, "subgroup": {"kind": "primary", "p": 2},
           "bases": "coordinate-blocks:2"}
    assert validate_job(doc) == []
    doc["bases"] = "sideways"
    assert validate_job(doc)


# -- golden reports ------------------------------------------------------------

@pytest.mark.parametrize("case", sorted(regen.CASES))
def test_cli_matches_golden(case):
    code, doc = regen.run(case)
    expected = json.loads((GOLDEN / f"{case}.json").read_text())
    assert code == expected["exit_code"]
    assert doc == expected["report"]


@pytest.mark.parametrize("case", ["entropy_sum_z2", "structure_iwasawa_sum_z9", "decompose_sum_z30"])
def test_cli_reports_are_deterministic(case, capsys):
    outs = []
    for _ in range(2):
        main(regen.argv_for(case))
        doc = json.loads(capsys.readouterr().out)
        assert set(doc["timing"]) == {"seconds", "backend"}
        doc.pop("timing")
        outs.append(json.dumps(doc, sort_keys=True))
    assert outs[0] == outs[1]


# -- exit codes and text output ---------------------------------------------------

def test_text_output_marks_log_as_display(capsys):
    code = main(["entropy", "--group", str(DATA / "sum_z2.json"), "--endo", str(DATA / "shift1.json")])
    out = capsys.readouterr().out
    assert code == EXIT_OK
    assert "beta = 2" in out and "display only" in out and "lower bound" in out


def test_strict_budget_exit(capsys):
    args = ["entropy", "--group", str(DATA / "sum_z2.json"), "--endo", str(DATA / "shift1.json"),
            "--size-budget", "16", "--window", "8"]
    assert main(args) == EXIT_OK
    assert main(args + ["--strict"]) == EXIT_BUDGET
    capsys.readouterr()


@pytest.mark.parametrize("argv", [
    ["entropy", "--group", str(DATA / "broken.json"), "--endo", str(DATA / "shift1.json")],
    ["entropy", "--group", str(DATA / "sum_z2.json")],
    ["entropy", "--group", str(DATA / "missing.json"), "--endo", str(DATA / "shift1.json")],
    ["structure"],
    ["entropy", "--group", str(DATA / "bad_iwasawa.json"), "--endo", str(DATA / "shift1.json")],
])
def test_input_errors_exit_1(argv, capsys):
    assert main(argv) == EXIT_INPUT
    assert "algentropy:" in capsys.readouterr().err


def test_out_file(tmp_path, capsys):
    dest = tmp_path / "r.json"
    main(["structure", "--group", str(DATA / "s3.json"), "--format", "json", "--out", str(dest)])
    assert capsys.readouterr().out == ""
    doc = json.loads(dest.read_text())
    assert doc["results"]["classification"]["quasihamiltonian"] is False


def test_console_entry_point_runs():
    out = subprocess.run([sys.executable, "-m", "algentropy", "validate", str(DATA / "s3.json")],
                         capture_output=True, text=True)
    assert out.returncode == 0 and "valid" in out.stdout
