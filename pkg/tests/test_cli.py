import csv
import json
import os

import pytest

from crlab.cli import builtin_names, csv_text, emit_report, load_builtin, main, parse_config_text
from crlab.errors import ConfigError
from crlab.scenarios import ScenarioReport


def run_cli(args, tmp_path):
    return main(list(args) + ["--out", str(tmp_path)])


def test_list(capsys):
    assert main(["list"]) == 0
    out = capsys.readouterr().out
    assert "scenario  bishop-quadratic" in out
    assert "command   torus-verify" in out


def test_hilbert_writes_reports(tmp_path, capsys):
    assert run_cli(["hilbert"], tmp_path) == 0
    files = sorted(os.listdir(tmp_path))
    assert "hilbert-identity.json" in files and "hilbert-identity_checks.csv" in files
    data = json.loads((tmp_path / "hilbert-identity.json").read_text())
    assert data["passed"] is True and data["scenario"] == "hilbert-identity"
    assert "hilbert-identity_checks.csv" in data["files"]
    with open(tmp_path / "hilbert-identity_checks.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["check", "passed", "value", "relation", "threshold"]
    assert all(r[1] == "1" for r in rows[1:])
    assert "PASS" in capsys.readouterr().out


def test_failed_check_exit_code(tmp_path):
    assert run_cli(["hilbert", "--tol", "1e-20"], tmp_path) == 1


def test_nonconvergence_exit_code(tmp_path, capsys):
    h = '[{"terms": [[3.0, [1, 0]]]}, {"terms": [[3.0, [0, 1]]]}]'
    assert run_cli(["bishop", "--param", "c=1e-12", "--param", f"h={h}"], tmp_path) == 3
    assert "nonconvergence" in capsys.readouterr().err


@pytest.mark.parametrize(
    "args",
    [
        ["hilbert", "--param", "bogus=1"],
        ["hilbert", "--grid", "100"],
        ["hilbert", "--jobs", "0"],
        ["hilbert", "--seed", "-1"],
        ["check-condition", "--grid", "64"],
        ["run"],
        ["run", "--scenario", "no-such-scenario"],
        ["no-such-command"],
    ],
)
def test_usage_errors(args, tmp_path):
    assert run_cli(args, tmp_path) == 2


def test_malformed_json_reports_position(tmp_path, capsys):
    cfg = tmp_path / "bad.json"
    cfg.write_text('{"schema": 1\n "op": {"id": "gauss"}}\n')
    assert main(["run", "--config", str(cfg), "--out", str(tmp_path)]) == 2
    err = capsys.readouterr().err
    assert "bad.json:2:2: malformed JSON" in err


@pytest.mark.parametrize(
    "text, field",
    [
        ('{"schema": 2, "op": {"id": "gauss"}}', "schema"),
        ('{"schema": 1, "op": {"id": "gauss"}, "extra": 1}', "extra"),
        ('{"schema": 1, "op": {"id": "nope"}}', "op.id"),
        ('{"schema": 1, "seed": -3, "op": {"id": "gauss"}}', "seed"),
        ('{"schema": 1, "op": {"id": "gauss"}, "output": {"formats": ["xml"]}}', "output.formats"),
        ('{"schema": 1, "model": {"builtin": "quadratic-h"}, "op": {"id": "gauss"}}', "model.builtin"),
        ('{"schema": 1, "op": {"id": "gauss", "params": {"tol": 1, "nope": 2}}}', "op.params"),
    ],
)
def test_config_validation_names_field(text, field):
    with pytest.raises(ConfigError, match=f"field '{field}'"):
        parse_config_text(text)


def test_config_command_mismatch(tmp_path):
    cfg = tmp_path / "g.json"
    cfg.write_text(json.dumps({"schema": 1, "op": {"id": "gauss"}}))
    assert main(["hilbert", "--config", str(cfg), "--out", str(tmp_path)]) == 2


def test_builtin_configs_validate():
    names = builtin_names()
    assert {"hilbert-identity", "two-saddles", "torus", "torus-verify"} <= set(names)
    for name in names:
        cfg = load_builtin(name)
        assert cfg["name"] == name


def test_empty_table_gives_header_only_csv(tmp_path):
    rep = ScenarioReport("demo", {}, 0)
    rep.table("empty", ["a", "b"])
    emit_report(rep, str(tmp_path), "demo")
    assert (tmp_path / "demo_empty.csv").read_text() == "a,b\n"
    data = json.loads((tmp_path / "demo.json").read_text())
    assert data["tables"]["empty"] == {"header": ["a", "b"], "rows": 0}


def test_table_filter_and_format_selection(tmp_path):
    rep = ScenarioReport("demo", {}, 0)
    rep.table("kept", ["x"]).rows.append([1.0])
    rep.table("dropped", ["y"])
    written = emit_report(rep, str(tmp_path), "demo", formats=["csv"], tables=["kept"])
    assert sorted(os.path.basename(w) for w in written) == ["demo_checks.csv", "demo_kept.csv"]


def test_csv_number_formatting():
    text = csv_text(["v"], [[0.1 + 0.2], [float("nan")], [True], [3]])
    assert text.splitlines() == ["v", "0.3", "nan", "1", "3"]


def test_rerun_is_byte_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["run", "--scenario", "hartogs", "--out", str(a)]) == 0
    assert main(["run", "--scenario", "hartogs", "--out", str(b)]) == 0
    names = sorted(os.listdir(a))
    assert names == sorted(os.listdir(b))
    for n in names:
        assert (a / n).read_bytes() == (b / n).read_bytes()
