import json
from importlib import resources

import jsonschema
import pytest

from goursat.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def schema(name):
    return json.loads(resources.files("goursat").joinpath("schemas", f"{name}.json").read_text())


@pytest.mark.parametrize(
    "argv, expected",
    [
        (["sigtype", "--word", "R0.S"], "a0.a1"),
        (["growth", "--sigtype", "a0.a1.a2", "--dim", "6"], "2,3,4,5,5,5,6"),
        (["jacquard", "--count", "3"], "5"),
        (["growth", "--word", "R0.S"], "2,3,4,4,5"),
        (["sigtype", "--growth", "2,3,4,4,5"], "a0.a1"),
        (["trailer", "sigtype", "--angles", "0 0 0.3 0.5 2.0707963267948966"], "a0.a1"),
    ],
)
def test_examples(capsys, argv, expected):
    code, out, _ = run(capsys, *argv)
    assert code == 0
    assert out.strip() == expected


def test_jacquard_listing(capsys):
    code, out, _ = run(capsys, "jacquard", "--list", "2")
    assert code == 0
    assert out.split() == ["a0.a0", "a0.a1"]


def test_abnormal_text(capsys):
    code, out, _ = run(capsys, "abnormal", "--word", "R0.S.S.R0", "--level", "0")
    assert code == 0
    assert out.splitlines() == ["A^(0) = (d/dx7) U (d/dx5)", "K_0 = {x6x5=0}", "L_0 = {x7=x6=0}"]


def test_rigid_exit_codes(capsys):
    assert run(capsys, "rigid", "--word", "R0.S", "--direction", "0,0,0,1,0", "--expect-rigid")[0] == 0
    code, out, _ = run(capsys, "rigid", "--word", "R0.R0", "--direction", "1,0,0,0,0", "--expect-rigid")
    assert code == 1 and out.startswith("not rigid")


@pytest.mark.parametrize(
    "argv",
    [
        ["sigtype", "--word", "R0.Q"],
        ["growth", "--word", "R1/0"],
        ["growth", "--sigtype", "a0.a1"],
        ["jacquard"],
        ["contact", "r9", "--base", "scaling:0"],
        ["contact", "certify", "--map", "dim 3; x1 +; x2; x3"],
    ],
)
def test_usage_errors_exit_2(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2
    assert "--word" in err  # the grammar help is printed


def test_unknown_subcommand_exits_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2


@pytest.mark.parametrize(
    "argv",
    [
        ["sigtype", "--growth", "2,3,5"],
        ["growth", "--word", "R0", "--point", "0,0"],
        ["contact", "certify", "--map", "dim 3; x1; x2 + x1; x3"],
        ["abnormal", "--word", "R0.S", "--level", "9"],
    ],
)
def test_domain_errors_exit_1(capsys, argv):
    assert run(capsys, *argv)[0] == 1


def test_contact_text(capsys):
    code, out, _ = run(capsys, "contact", "certify", "--map", "dim 3; x3; x1*x3 - x2; x1")
    assert code == 0
    assert out.strip() == "(nu, lambda, eta, mu)(0) = (0, 1, 1, 0)"
    code, out, _ = run(capsys, "contact", "r11", "--c11", "3/2")
    assert code == 0
    assert out.splitlines() == ["c~7 = 0, c~8 = 0, c~9 = 1, c~10 = 1, c~11 = 3/2", "PASS"]


@pytest.mark.parametrize(
    "argv, name",
    [
        (["growth", "--word", "R0.S.R1", "--point", "0,0,0,0,1,0"], "growth"),
        (["abnormal", "--word", "R0.S.S.R0", "--level", "1"], "abnormal"),
        (["abnormal", "--word", "R0.S.S.R1", "--level", "5"], "abnormal"),
        (["trailer", "verify", "--angles", "0.1 -0.2 0.3 0.5 0.7"], "trailer_verify"),
        (["trailer", "verify", "--angles", "0 0 0.3 0.5 2.0707963267948966"], "trailer_verify"),
        (["contact", "prolong", "--base", "scaling:2,3", "--word", "R1.S"], "contact_prolong"),
        (["contact", "r9", "--base", "shear:-1"], "contact_moduli"),
        (["contact", "r11", "--c11", "-2"], "contact_moduli"),
        (["suite", "abnormal"], "suite"),
        (["suite", "catalog"], "suite"),
    ],
)
def test_json_validates(capsys, argv, name):
    code, out, _ = run(capsys, *argv, "--json")
    assert code == 0
    jsonschema.validate(json.loads(out), schema(name))


def test_kr_commands(capsys):
    code, out, _ = run(capsys, "kr", "build", "--word", "R0", "--json")
    assert code == 0 and json.loads(out)
    code, out, _ = run(capsys, "kr", "catalog", "--dim", "6")
    assert code == 0 and len(out.splitlines()) == 5
    code, out, _ = run(capsys, "kr", "explicit", "--word", "S.R1")
    assert code == 0 and "normalized from S.R1" in out


def test_trailer_round_trip(capsys):
    code, out, _ = run(capsys, "trailer", "from-kr", "--word", "R0.S")
    assert code == 0
    code, word, _ = run(capsys, "trailer", "to-kr", "--angles", out.strip())
    assert code == 0 and word.strip() == "R0.S"


def test_output_is_deterministic(capsys):
    argv = ["trailer", "verify", "--angles", "0.1 -0.2 0.3 0.5 0.7", "--seed", "4", "--json"]
    assert run(capsys, *argv)[1] == run(capsys, *argv)[1]


def test_catalog_suite_passes(capsys):
    code, out, _ = run(capsys, "suite", "catalog", "--json")
    payload = json.loads(out)
    assert code == 0 and payload["pass"] and len(payload["checks"]) == 9
