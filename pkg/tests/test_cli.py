import json
import subprocess
import sys
from importlib import resources

import jsonschema
import pytest

from omlkit import __version__
from omlkit.cli import main

SCHEMA = json.loads(resources.files("omlkit").joinpath("schema/report.schema.json").read_text())


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv, "--format", "json")
    report = json.loads(out)
    jsonschema.validate(report, SCHEMA)
    return code, report


def test_ks_cabello_json(capsys):
    code, rep = run_json(capsys, "ks", "catalog:cabello18")
    assert code == 0
    assert rep["results"]["outcome"] == "UNSAT"
    assert rep["results"]["parity_certificate"] is True
    assert rep["version"] == __version__
    assert len(rep["inputs"][0]["sha256"]) == 64


def test_reconstruct_mo2(capsys):
    code, out, _ = run(capsys, "reconstruct", "catalog:mo2")
    assert code == 0 and "status: isomorphic" in out


def test_validate_o6(capsys, tmp_path):
    code, out, _ = run(capsys, "validate", "catalog:o6")
    assert code == 1 and "witness: [a, b]" in out
    f = tmp_path / "o6.lattice"
    f.write_text("elements 0 a b b* a* 1\nleq 0 a\nleq a b\nleq b 1\nleq 0 b*\nleq b* a*\nleq a* 1\ncomp 0 1\ncomp a a*\ncomp b b*\n")
    code, rep = run_json(capsys, "validate", str(f))
    assert code == 1 and rep["results"]["orthomodular"]["witness"] == ["a", "b"]


def test_validate_non_involutive(capsys, tmp_path):
    f = tmp_path / "bad.lattice"
    f.write_text("elements 0 a a* b b* 1\nleq 0 a\nleq 0 a*\nleq 0 b\nleq 0 b*\nleq a 1\nleq a* 1\nleq b 1\nleq b* 1\n"
                 "comp 0 1\ncomp 1 0\ncomp a a*\ncomp a* a\ncomp b b*\ncomp b* a\n")
    code, rep = run_json(capsys, "validate", str(f))
    assert code == 1
    axioms = {v["axiom"]: v["witness"] for v in rep["results"]["ortholattice"]["violations"]}
    assert axioms["involution"] == ["b"]


@pytest.mark.parametrize(
    "argv",
    [
        ("validate", "catalog:mo2"),
        ("blocks", "catalog:twoblocks"),
        ("frames", "catalog:mo2", "--probe", "3"),
        ("glue", "catalog:mo3"),
        ("ks", "catalog:twoblocks", "--all"),
        ("ks", "catalog:peres33"),
        ("paste", "catalog:twoblocks"),
        ("reconstruct", "catalog:b8"),
        ("adjoint", "catalog:mo2"),
        ("adjoint", "catalog:mo2", "--probe", "2"),
    ],
)
def test_success_and_schema(capsys, argv):
    code, rep = run_json(capsys, *argv)
    assert code == 0
    assert rep["command"] == argv[0]


def test_catalog(capsys):
    code, rep = run_json(capsys, "catalog", "list")
    assert code == 0
    names = [e["name"] for e in rep["results"]["entries"]]
    assert {"mo2", "b8", "o6", "twoblocks", "cabello18", "peres33"} <= set(names)
    code, out, _ = run(capsys, "catalog", "show", "mo2")
    assert code == 0 and "block a a'" in out
    code, _, err = run(capsys, "catalog", "show", "nope")
    assert code == 2 and "unknown catalog entry" in err


def test_frames_probe_file(capsys, tmp_path):
    f = tmp_path / "probe.blocks"
    f.write_text("atoms p q\nblock p q\n")
    code, rep = run_json(capsys, "frames", "catalog:mo2", "--probe", str(f))
    assert code == 0 and rep["results"]["frame_count"] == 6 and rep["results"]["injective_count"] == 4


def test_exit_codes(capsys, tmp_path):
    assert run(capsys, "ks", "catalog:peres33", "--expect", "sat")[0] == 1
    assert run(capsys, "ks", "catalog:peres33", "--expect", "unsat")[0] == 0
    assert run(capsys, "ks", "catalog:peres33", "--max-nodes", "2")[0] == 3
    assert run(capsys, "ks", "catalog:twoblocks", "--all", "--cap", "2")[0] == 3
    assert run(capsys, "paste", "catalog:cabello18")[0] == 1
    code, _, err = run(capsys, "validate", str(tmp_path / "missing.rays"))
    assert code == 2 and "missing.rays" in err


def test_input_error_names_line(capsys, tmp_path):
    f = tmp_path / "bad.rays"
    f.write_text("dim 4\nray a = (1,0,0,0)\nray b = (0,1,0,0)\nray c = (0,0,1,0)\ncontext a b c\n")
    code, _, err = run(capsys, "ks", str(f))
    assert code == 2
    assert f"{f}:5:" in err and "context of wrong size" in err


def test_json_round_trips(capsys):
    _, out, _ = run(capsys, "glue", "catalog:twoblocks", "--format", "json")
    assert json.dumps(json.loads(out), indent=2) + "\n" == out


def test_text_renders_same_payload(capsys):
    _, rep = run_json(capsys, "ks", "catalog:twoblocks", "--all")
    _, out, _ = run(capsys, "ks", "catalog:twoblocks", "--all")
    assert f"solution_count: {rep['results']['solution_count']}" in out
    assert f"nodes: {rep['stats']['nodes']}" in out


@pytest.mark.parametrize("fmt", ["text", "json"])
def test_byte_identical_across_processes(fmt):
    cmd = [sys.executable, "-m", "omlkit.cli", "ks", "catalog:cabello18", "--format", fmt]
    a = subprocess.run(cmd, capture_output=True, check=True).stdout
    b = subprocess.run(cmd, capture_output=True, check=True).stdout
    assert a == b and a
