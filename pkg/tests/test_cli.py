import csv
import io
import json
import math

import pytest

from stripwindow import cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_bad_modes_is_usage_error_and_writes_nothing(capsys, tmp_path):
    out = tmp_path / "t.csv"
    code, _, err = run(capsys, "thresholds", "--modes", "0", "--out", str(out))
    assert code == cli.EXIT_USAGE
    assert "modes" in err
    assert not out.exists()


def test_argparse_errors_exit_with_usage_code(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["spectrum"])
    assert exc.value.code == cli.EXIT_USAGE


def test_mu_rejects_n0(capsys):
    code, _, _ = run(capsys, "mu", "--n", "0")
    assert code == cli.EXIT_USAGE


def test_negative_width_rejected(capsys):
    assert run(capsys, "spectrum", "--a", "1", "--d", "-1")[0] == cli.EXIT_USAGE


def test_thresholds_table(capsys):
    code, out, _ = run(capsys, "thresholds", "--max-n", "3")
    assert code == 0
    table = rows(out)
    assert [int(r["n"]) for r in table] == [0, 1, 2, 3]
    assert [r["parity"] for r in table] == ["even", "odd", "even", "odd"]
    assert out.count("\n") == 5
    a = [float(r["a_n"]) for r in table]
    assert a[1] == pytest.approx(2.2729985, abs=2e-6)
    for r in table[1:]:
        assert float(r["bracket_lo"]) < float(r["a_n"]) < float(r["bracket_hi"])


def test_thresholds_n0_only(capsys):
    code, out, _ = run(capsys, "thresholds", "--max-n", "0")
    assert code == 0
    table = rows(out)
    assert len(table) == 1 and float(table[0]["a_n"]) == 0.0


def test_spectrum_single_state_and_empty(capsys):
    code, out, _ = run(capsys, "spectrum", "--a", "1")
    assert code == 0
    table = rows(out)
    assert len(table) == 1 and table[0]["parity"] == "even"
    code, out, _ = run(capsys, "spectrum", "--a", "0")
    assert code == 0
    assert rows(out) == [] and out.startswith("index,")


def test_spectrum_scales_with_strip_width(capsys):
    _, ref, _ = run(capsys, "spectrum", "--a", "2", "--modes", "64")
    _, wide, _ = run(capsys, "spectrum", "--a", "4", "--d", str(2 * math.pi), "--modes", "64")
    r, w = rows(ref)[0], rows(wide)[0]
    assert float(w["gap_normalized"]) == pytest.approx(float(r["gap_normalized"]), rel=1e-12)
    assert float(w["lambda"]) == pytest.approx(float(r["lambda"]) / 4, rel=1e-12)
    assert float(w["m"]) == pytest.approx(float(r["m"]) / 2, rel=1e-12)


def test_json_table_matches_schema(capsys):
    code, out, _ = run(capsys, "spectrum", "--a", "3", "--modes", "64", "--format", "json")
    assert code == 0
    payload = json.loads(out)
    cli.validate(payload, "table")
    assert payload["command"] == "spectrum"
    assert [r["index"] for r in payload["records"]] == [0, 1]


def test_manifest_written_and_valid(capsys, tmp_path):
    out = tmp_path / "s.csv"
    code, _, _ = run(capsys, "spectrum", "--a", "1", "--modes", "64", "--out", str(out))
    assert code == 0
    man = json.loads((tmp_path / "s.csv.manifest.json").read_text())
    cli.validate(man, "manifest")
    assert man["outputs"] == ["s.csv"]
    assert man["parameters"]["modes"] == 64
    assert "timestamp" in man


def test_repeat_runs_byte_identical(capsys, tmp_path):
    outs = []
    for i in range(2):
        out = tmp_path / f"f{i}.csv"
        assert run(capsys, "field", "--nx1", "12", "--nx2", "6", "--out", str(out))[0] == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]


def test_field_vanishes_on_top_wall(capsys):
    code, out, _ = run(capsys, "field", "--n", "1", "--nx1", "15", "--nx2", "5")
    assert code == 0
    table = rows(out)
    assert len(table) == 75
    top = [r for r in table if float(r["x2"]) == pytest.approx(math.pi)]
    assert len(top) == 15
    assert max(abs(float(r["psi"])) for r in top) < 1e-10


def test_field_bad_range(capsys):
    assert run(capsys, "field", "--x2", "0", "5")[0] == cli.EXIT_USAGE


def test_verify_popov_reports_criterion_failure(capsys, tmp_path):
    out = tmp_path / "p.json"
    code, stdout, _ = run(capsys, "verify", "popov", "--out", str(out))
    payload = json.loads(out.read_text())
    cli.validate(payload, "verify")
    assert code == (cli.EXIT_OK if payload["passed"] else cli.EXIT_CRITERION)
    assert "popov.limit" in stdout


def test_verify_oracle_needs_a(capsys):
    assert run(capsys, "verify", "oracle")[0] == cli.EXIT_USAGE


def test_mu_json(capsys):
    code, out, _ = run(capsys, "mu", "--n", "1", "--modes", "128")
    assert code == 0
    payload = json.loads(out)
    cli.validate(payload, "mu")
    assert payload["mu_integral"] == pytest.approx(0.7573953, rel=1e-4)


def test_figure_flag_writes_image(capsys, tmp_path):
    fig = tmp_path / "spec.png"
    out = tmp_path / "spec.csv"
    code, _, _ = run(capsys, "spectrum", "--a", "3", "--modes", "64", "--out", str(out), "--figure", str(fig))
    assert code == 0
    assert fig.stat().st_size > 0
    plain = tmp_path / "plain.csv"
    run(capsys, "spectrum", "--a", "3", "--modes", "64", "--out", str(plain))
    assert plain.read_bytes() == out.read_bytes()
