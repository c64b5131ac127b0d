import json
import subprocess
import sys

import pytest

from hilbmod import cli
from hilbmod.fixtures import load_fixture

SCHEMA = {"command", "inputs", "verdicts", "residuals", "witnesses", "results", "seed", "ok"}


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def structured(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--format", "structured")
    return code, json.loads(out)


def test_kol17_text(capsys):
    code, out, _ = run(capsys, "classify-ideal", "--scene", "kol17")
    assert code == 0
    assert out.splitlines()[0] == "submodule: yes; ternary ideal: no; ideal submodule: no; linking ideal: no"


def test_kol17_structured(capsys):
    code, rep = structured(capsys, "classify-ideal", "--scene", "kol17")
    assert code == 0 and SCHEMA <= set(rep)
    assert rep["verdicts"]["submodule"] and not rep["verdicts"]["ternary_ideal"]
    assert "ternary_ideal" in rep["witnesses"]


def test_quotient_fixture_d(capsys):
    code, rep = structured(capsys, "quotient", "--scene", "fixture-d", "--subspace", "K")
    assert code == 0
    assert rep["results"]["canonical"]["quotient_base"] == [2]
    assert rep["results"]["canonical"]["quotient_multiplicities"] == [1]


def test_quotient_refusal_exits_one(capsys):
    code, rep = structured(capsys, "quotient", "--scene", "kol17")
    assert code == 1 and not rep["ok"] and "refusal" in rep["results"]


def test_split_fixture_d(capsys):
    code, rep = structured(capsys, "split", "--scene", "fixture-d")
    assert code == 0
    assert rep["residuals"]["u_s_minus_id"] < 1e-9
    assert len(rep["results"]["s"]) == load_fixture("fixture-d").modules["E"].dim


@pytest.mark.parametrize("argv", [
    ("correspondences", "--scene", "fixture-b"),
    ("correspondences", "--scene", "fixture-c"),
    ("check-hom", "--scene", "fixture-d", "--map", "u"),
    ("extend-hom", "--scene", "fixture-d", "--map", "v"),
    ("extend-hom", "--scene", "fixture-b", "--full"),
    ("check-extension", "--scene", "fixture-d"),
    ("check-blockwise", "--scene", "rotated-automorphism"),
    ("search-hereditary", "--count", "20", "--bounds", "2,2,2"),
    ("search-q1", "--count", "20"),
])
def test_commands_are_schema_stable(capsys, argv):
    code, rep = structured(capsys, *argv)
    assert code == 0 and SCHEMA <= set(rep)
    assert rep["command"] == argv[0]


def test_rotation_verdict(capsys):
    _, rep = structured(capsys, "check-blockwise", "--scene", "rotated-automorphism")
    assert rep["verdicts"]["blockwise"] is False
    assert rep["witnesses"]["corner"]["leak"] == pytest.approx(0.5)


def test_non_full_full_extension_is_refused(capsys):
    code, _, err = run(capsys, "extend-hom", "--scene", "fixture-c", "--full")
    assert code == 1 and "full" in err


@pytest.mark.parametrize("argv", [
    ("classify-ideal",),
    ("classify-ideal", "--scene", "/nonexistent/scene.json"),
    ("classify-ideal", "--scene", "kol17", "--subspace", "nope"),
    ("frobnicate", "--scene", "kol17"),
    ("search-hereditary", "--bounds", "2,x,2"),
    ("classify-ideal", "--scene", "kol17", "--tol", "-1"),
])
def test_input_errors_exit_two(capsys, argv):
    code, _, _ = run(capsys, *argv)
    assert code == 2


def test_broken_scene_exits_two(capsys, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"modules": {"E": {"base": "B", "multiplicities": [1]}}}')
    code, _, err = run(capsys, "correspondences", "--scene", str(path))
    assert code == 2 and "modules.E.base" in err


def test_disagreement_exits_one(capsys, monkeypatch):
    import hilbmod.ideals as ideals

    monkeypatch.setattr(ideals, "is_linking_ideal", lambda k, tol=None: ideals.Check(True, 0.0))
    code, rep = structured(capsys, "classify-ideal", "--scene", "kol17")
    assert code == 1 and rep["verdicts"]["agreement"] is False


def test_run_command_rejects_unknown():
    args = cli.build_parser().parse_args(["classify-ideal", "--scene", "kol17"])
    with pytest.raises(cli.InputError):
        cli.run_command(load_fixture("kol17"), "bogus", args)


def test_structured_search_is_byte_identical(capsys):
    argv = ("search-hereditary", "--count", "60", "--seed", "11", "--format", "structured")
    cli.main(list(argv))
    first = capsys.readouterr().out
    cli.main(list(argv))
    assert capsys.readouterr().out == first


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "hilbmod.cli", "classify-ideal", "--scene", "kol17"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.startswith("submodule: yes")
