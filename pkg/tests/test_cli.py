import json

import pytest

from fgl_lab.cli import RunConfig, main, parse_config, rerun, run
from fgl_lab.fgl import honda_log, make_builtin
from fgl_lab.power import candidate


def call(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def body(out):
    return json.loads(out)["body"]


def test_defaults_filled():
    cfg = parse_config(["ando-check", "--fgl", "multiplicative", "--p", "3", "--psi", "adams"], environ={})
    assert (cfg.order, cfg.precision, cfg.format) == (16, 8, "json")


def test_flag_beats_config_beats_env(tmp_path):
    conf = tmp_path / "run.json"
    conf.write_text(json.dumps({"order": 24, "precision": 5}))
    cfg = parse_config(["pseries", "--p", "3", "--config", str(conf), "--order", "12"],
                       environ={"FGL_LAB_DEFAULT_PRECISION": "7"})
    assert (cfg.order, cfg.precision) == (12, 5)
    cfg = parse_config(["pseries", "--p", "3"], environ={"FGL_LAB_DEFAULT_PRECISION": "7"})
    assert cfg.precision == 7


@pytest.mark.parametrize("argv,code", [
    (["pseries", "--p", "4"], 12),
    (["pseries", "--p", "3", "--bogus"], 10),
    ([], 10),
    (["ando-check", "--p", "3"], 10),
    (["pseries", "--p", "3", "--order", "65"], 14),
    (["pseries", "--p", "3", "--precision", "0"], 14),
    (["pseries", "--p", "3", "--fgl", "missing.json"], 13),
    (["invariants", "--fgl", "additive", "--p", "3"], 15),
    (["tower", "--localization", "K(1)@4"], 12),
    (["tower", "--localization", "nonsense"], 10),
])
def test_exit_codes(capsys, argv, code):
    assert call(capsys, *argv)[0] == code


def test_malformed_series_file(capsys, tmp_path):
    bad = tmp_path / "law.json"
    bad.write_text('{"vars": ["x"], "order": 4, "ring": {"tag": "ExactInt"}, "terms": [{"exp": [1]}]}')
    assert call(capsys, "pseries", "--p", "3", "--fgl", str(bad))[0] == 11
    bad.write_text("{not json")
    assert call(capsys, "pseries", "--p", "3", "--fgl", str(bad))[0] == 11


def test_ando_commands(capsys):
    code, out, _ = call(capsys, "ando-check", "--fgl", "multiplicative", "--p", "3", "--psi", "adams")
    assert code == 0 and body(out)["result"]["verdict"]["status"] == "Satisfied"
    code, out, _ = call(capsys, "ando-check", "--fgl", "multiplicative", "--p", "3",
                        "--psi", "identity-control")
    assert code == 1 and body(out)["result"]["verdict"]["witness"]["monomial"] == "x"
    code, out, _ = call(capsys, "ando-check", "--p", "3", "--psi", "adams", "--order", "4")
    assert code == 2


def test_tower_command(capsys):
    code, out, _ = call(capsys, "tower", "--localization", "E(1)@3", "--max", "100")
    assert code == 0 and body(out)["result"]["obstruction_stages"] == [1, 3]
    code, out, _ = call(capsys, "tower", "--localization", "(2)", "--max", "5", "--format", "text")
    assert "m=3  Equivalence" in out


def test_other_commands(capsys):
    code, out, _ = call(capsys, "fgl-info", "--fgl", "honda:2", "--p", "2", "--order", "10")
    assert code == 0 and body(out)["result"]["height"] == {"weierstrass_degree": 4, "height": 2}
    code, out, _ = call(capsys, "pseries", "--fgl", "multiplicative", "--p", "2", "--format", "text")
    assert out.startswith("[2](x) = 2*x + x^2")
    code, out, _ = call(capsys, "quotient", "--fgl", "additive", "--p", "3")
    assert code == 0 and body(out)["result"]["transfer"]["backend"]["tag"] == "ConstantQuotient"
    code, out, _ = call(capsys, "invariants", "--p", "3")
    assert code == 0 and body(out)["result"]["rank"] == 2


def test_file_inputs_are_embedded(capsys, tmp_path):
    log = tmp_path / "log.json"
    log.write_text(honda_log(3, 1, 10).dumps())
    psi = tmp_path / "psi.json"
    psi.write_text(json.dumps(candidate("adams", make_builtin("multiplicative", 16), 3).to_json()))
    code, out, _ = call(capsys, "ando-check", "--p", "3", "--psi", str(psi))
    assert code == 0
    report = json.loads(out)
    assert "psi_data" in report["body"]["inputs"]
    code, out, _ = call(capsys, "pseries", "--p", "3", "--fgl", str(log))
    report = json.loads(out)
    log.unlink()
    assert rerun(report)["body"] == report["body"]


COMMANDS = [
    ["fgl-info", "--fgl", "multiplicative", "--order", "12"],
    ["pseries", "--fgl", "honda:1", "--p", "3"],
    ["quotient", "--fgl", "multiplicative", "--p", "5"],
    ["invariants", "--fgl", "multiplicative", "--p", "3"],
    ["ando-check", "--fgl", "multiplicative", "--p", "2", "--psi", "adams"],
    ["tower", "--localization", "K(2)@2", "--max", "50"],
]


@pytest.mark.parametrize("argv", COMMANDS, ids=lambda a: a[0])
def test_reports_are_deterministic_and_rerun(capsys, argv):
    _, first, _ = call(capsys, *argv)
    _, second, _ = call(capsys, *argv)
    a, b = json.loads(first), json.loads(second)
    assert json.dumps(a["body"], sort_keys=True) == json.dumps(b["body"], sort_keys=True)
    assert "timestamp" in a["metadata"]
    assert rerun(a)["body"] == a["body"]


def test_output_file(capsys, tmp_path):
    target = tmp_path / "report.json"
    code, out, _ = call(capsys, "tower", "--localization", "Q", "--max", "3", "--output", str(target))
    assert code == 0 and out == ""
    assert json.loads(target.read_text())["body"]["result"]["obstruction_stages"] == [1]
    assert [p.name for p in tmp_path.iterdir()] == ["report.json"]


def test_run_returns_report():
    code, report, text = run(RunConfig("tower", localization="Q", max=2))
    assert code == 0 and "body" in report and "Equivalence" in text
