import json
from fractions import Fraction

import pytest

from g2scale.main import EXIT_FAILED, EXIT_OK, EXIT_USAGE, parse_scalar, parse_vector, run
from g2scale.errors import InputError
from g2scale.scalars import ExactScalar

pytestmark = pytest.mark.usefixtures("fresh_config")

E1 = "1,0,0,0,0,0,0"
E7 = "0,0,0,0,0,0,1"


def _json(capsys):
    return json.loads(capsys.readouterr().out)


def test_gallery_list(capsys):
    assert run(["gallery", "list"]) == EXIT_OK
    assert _json(capsys)["examples"] == ["dirichlet", "rolling", "rolling-para", "submaximal"]


def test_selftest_scalars(capsys):
    assert run(["--seed", "3", "selftest", "--suite", "scalars", "--scale", "0.05"]) == EXIT_OK
    report = _json(capsys)
    assert report["overall"] is True
    assert report["seed"] == 3
    assert all(r["pass"] for r in report["suites"]["scalars"])


def test_classify(capsys):
    assert run(["classify", "--s", E1, "--x", E7]) == EXIT_OK
    report = _json(capsys)
    assert report["label"] == "M5+"
    assert report["eps"] == 0
    assert run(["classify", "--s", E1, "--x=-1,0,0,0,0,0,0"]) == EXIT_OK
    assert _json(capsys)["label"] == "M0-"


@pytest.mark.parametrize("eps,param,abar", [
    ("1", "hyperbolic:5/4,3/4", "-1/4"),
    ("-1", "circle:3/5,4/5", "-2/5"),
])
def test_family_then_recover(tmp_path, capsys, eps, param, abar):
    path = tmp_path / "family.json"
    assert run(["--out", str(path), "family", "--eps", eps, "--param", param]) == EXIT_OK
    family = json.loads(path.read_text())
    assert family["eps"] == int(eps)
    assert run(["recover", "--phi", str(path), "--phi-prime", str(path)]) == EXIT_OK
    report = _json(capsys)
    assert report["eps"] == int(eps)
    assert report["abar"] == abar
    assert report["residual"] == 0


def test_float_family(capsys):
    assert run(["--backend", "float", "family", "--eps", "1", "--param", "parameter:0.7"]) == EXIT_OK
    report = _json(capsys)
    assert report["backend"] == "float"
    assert report["param"]["variant"] == "hyperbolic"


def test_recover_identical_forms_fails(tmp_path, capsys):
    path = tmp_path / "family.json"
    assert run(["--out", str(path), "family", "--eps", "0", "--param", "parabolic:0"]) == EXIT_OK
    assert run(["recover", "--phi", str(path), "--phi-prime", str(path)]) == EXIT_FAILED
    report = _json(capsys)
    assert report["branch"] == "identical"
    assert "error" in report


def test_config_file_and_log_file(tmp_path, capsys):
    config = tmp_path / "g2scale.conf"
    config.write_text("# settings\nbackend = float\nlog_level = DEBUG\n")
    log = tmp_path / "run.log"
    assert run(["--config", str(config), "--log-file", str(log), "classify", "--s", E1, "--x", E7]) == EXIT_OK
    assert _json(capsys)["backend"] == "float"
    assert "command classify" in log.read_text()


@pytest.mark.parametrize("argv", [
    ["classify", "--s", "1,0,0", "--x", E7],
    ["classify", "--s", E1, "--x", "0,0,0,0,0,0,0.5"],
    ["classify", "--s", E1, "--x", E1.replace("1", "x")],
    ["classify", "--s", E1, "--x", "0,0,0,0,0,0,0"],
    ["family", "--eps", "0", "--param", "angle:1"],
    ["family", "--eps", "1", "--param", "circle:1,0"],
    ["family", "--eps", "1", "--param", "spiral:1"],
    ["family", "--eps", "1", "--s", E1, "--param", "raw:0,0"],
    ["recover", "--phi", "/nonexistent/phi.json", "--phi-prime", "/nonexistent/phi.json"],
    ["gallery", "verify", "sphere"],
    ["--backend", "complex", "gallery", "list"],
    ["--config", "/nonexistent/g2scale.conf", "gallery", "list"],
    ["teleport"],
    [],
])
def test_bad_input_exits_with_usage(argv, capsys):
    assert run(argv) == EXIT_USAGE
    assert capsys.readouterr().out == ""


def test_malformed_form_file_names_the_field(tmp_path, capsys):
    path = tmp_path / "phi.json"
    path.write_text(json.dumps({"degree": 3, "terms": [{"indices": [1, 2, 9], "coeff": "1"}]}))
    assert run(["recover", "--phi", str(path), "--phi-prime", str(path)]) == EXIT_USAGE
    assert "terms[0].indices" in capsys.readouterr().err


def test_scalar_parsing():
    assert parse_scalar("1/2+sqrt2", "exact", "x") == ExactScalar(Fraction(1, 2), 1)
    assert parse_scalar("1/4", "float", "x") == 0.25
    assert parse_scalar("sqrt2", "float", "x") == pytest.approx(2 ** 0.5)
    with pytest.raises(InputError) as info:
        parse_scalar("0.5", "exact", "s")
    assert info.value.field == "s"
    with pytest.raises(InputError):
        parse_vector("1,2", "exact", "x")
