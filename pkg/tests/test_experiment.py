import csv
import io
import json
import math
import subprocess
import sys
from dataclasses import replace

import numpy as np
import pytest

from kljnloop.cli import main
from kljnloop.defense import DefenseAction
from kljnloop.errors import ConfigError
from kljnloop.experiment import (
    DEFAULT_TEMPS,
    REPORT_FIELDS,
    ExperimentConfig,
    ReportRow,
    SweepReport,
    emit_report,
    load_report,
    parse_config,
    run_experiment,
)
from kljnloop.physics import SystemParams


@pytest.fixture(scope="module")
def sweep_report():
    config = parse_config(json.dumps({"temp_sweep": [float(t) for t in np.logspace(10, 16, 10)]}))
    return run_experiment(config)


@pytest.mark.parametrize("source", ["", "{}", "  \n"])
def test_defaults(source):
    c = parse_config(source)
    assert c.base == SystemParams(r_low=1e3, r_high=1e4, bandwidth=1e6, samples_per_bit=500,
                                  key_length=700, master_seed=0)
    assert c.delta_u_values == (0.1, 0.2)
    assert c.temp_sweep == DEFAULT_TEMPS and len(DEFAULT_TEMPS) == 12
    assert DEFAULT_TEMPS[0] == pytest.approx(1e10) and DEFAULT_TEMPS[-1] == pytest.approx(1e17)
    assert c.replicate_count == 1 and c.defenses == () and c.output_path is None


def test_two_families():
    c = parse_config('{"delta_u_values": [0.1, 0.2], "temp_sweep": [1e12]}')
    assert c.delta_u_values == (0.1, 0.2)


@pytest.mark.parametrize(
    "doc, path",
    [
        ({"base": {"r_low": 1e4, "r_high": 1e3}}, "base"),
        ({"base": {"r_low": "big"}}, "base.r_low"),
        ({"base": {"key_length": 2.5}}, "base.key_length"),
        ({"base": {"colour": 1}}, "base.colour"),
        ({"temp_sweep": []}, "temp_sweep"),
        ({"temp_sweep": [1e12, "hot"]}, "temp_sweep[1]"),
        ({"temp_sweep": [-1.0]}, "temp_sweep[0]"),
        ({"delta_u_values": 0.1}, "delta_u_values"),
        ({"defenses": [{"kind": "moat"}]}, "defenses[0]"),
        ({"defenses": [{"parameter": 1}]}, "defenses[0]"),
        ({"replicate_count": 0}, "replicate_count"),
        ({"output_path": 5}, "output_path"),
        ({"surprise": 1}, "surprise"),
    ],
)
def test_config_errors(doc, path):
    with pytest.raises(ConfigError) as info:
        parse_config(json.dumps(doc))
    assert info.value.path == path


def test_invalid_json():
    with pytest.raises(ConfigError):
        parse_config("{not json")


def test_sweep_agrees_with_analytic(sweep_report):
    assert len(sweep_report) == 20
    for row in sweep_report.rows:
        assert abs(row.p_mc - row.p_analytic) <= 3 * row.p_mc_stderr


def test_compensated_rows_are_secure():
    config = parse_config(json.dumps({
        "temp_sweep": [1e10, 1e12, 1e14],
        "defenses": [{"kind": "compensate_single"}],
    }))
    report = run_experiment(config)
    comp = [r for r in report.rows if r.defense == "compensate_single"]
    assert len(comp) == 6
    for r in comp:
        assert abs(r.p_mc - 0.5) <= 3 * math.sqrt(0.25 / r.n_tot)


def test_grid_completeness():
    config = parse_config(json.dumps({
        "base": {"key_length": 60},
        "temp_sweep": [1e11, 1e13],
        "delta_u_values": [0.1, 0.2, 0.3],
        "defenses": [{"kind": "none"}, {"kind": "dc_block", "parameter": "bob"},
                     {"kind": "scale_noise", "parameter": 10}],
        "replicate_count": 2,
    }))
    report = run_experiment(config)
    assert len(report) == 2 * 3 * 3 * 2
    keys = {(r.temp_k, r.delta_u_v, r.defense, r.seed) for r in report.rows}
    assert len(keys) == len(report)


def test_determinism_and_parallelism(tmp_path):
    config = parse_config(json.dumps({"base": {"key_length": 80}, "temp_sweep": [1e11, 1e13, 1e15],
                                      "replicate_count": 2}))
    a = emit_report(run_experiment(config))
    b = emit_report(run_experiment(config))
    c = emit_report(run_experiment(config, workers=2))
    assert a == b == c


def test_dc_offset_does_not_change_report():
    doc = {"base": {"key_length": 120}, "temp_sweep": [1e12, 1e13]}
    a = run_experiment(parse_config(json.dumps(doc)))
    b = run_experiment(parse_config(json.dumps({**doc, "dc_offset": 7.0})))
    for x, y in zip(a.rows, b.rows):
        # the Monte Carlo columns are exactly equal; the analytic one up to rounding
        assert replace(x, p_analytic=0.0) == replace(y, p_analytic=0.0)
        assert x.p_analytic == pytest.approx(y.p_analytic, abs=1e-12)


def test_seed_column_tracks_master_seed():
    doc = {"base": {"key_length": 60}, "temp_sweep": [1e12]}
    a = run_experiment(parse_config(json.dumps(doc)))
    b = run_experiment(parse_config(json.dumps({"base": {"key_length": 60, "master_seed": 1},
                                                "temp_sweep": [1e12]})))
    assert a.rows[0].seed != b.rows[0].seed


def test_empty_report_csv():
    assert emit_report(SweepReport()) == ",".join(REPORT_FIELDS) + "\n"
    assert REPORT_FIELDS == ("temp_k", "delta_u_v", "defense", "p_mc", "p_mc_stderr",
                             "p_analytic", "n_undetermined", "n_tot", "seed")


@pytest.mark.parametrize("fmt", ["csv", "json"])
def test_round_trip(fmt):
    row = ReportRow(1.2345678901234567e13, 0.1, "dc_block:bob", 0.5714285714285714,
                    0.026645152704133014, 0.5333333333333333, 3, 347, 4021166297)
    report = SweepReport((row,))
    assert load_report(emit_report(report, fmt), fmt) == report


def test_csv_schema(sweep_report):
    text = emit_report(sweep_report)
    assert "\r" not in text
    rows = list(csv.reader(io.StringIO(text)))
    assert len(rows) == 21
    assert all(len(r) == 9 for r in rows)
    float(rows[1][3])


def test_json_schema(sweep_report):
    records = json.loads(emit_report(sweep_report, "json"))
    assert len(records) == 20
    assert list(records[0]) == list(REPORT_FIELDS)


def test_emit_writes_file(tmp_path, sweep_report):
    path = tmp_path / "r.csv"
    text = emit_report(sweep_report, path=str(path))
    assert path.read_text() == text


def test_emit_unwritable(sweep_report, tmp_path):
    with pytest.raises(OSError):
        emit_report(sweep_report, path=str(tmp_path / "missing" / "r.csv"))


def test_cli_run(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"base": {"key_length": 100}, "temp_sweep": [1e12]}))
    out = tmp_path / "r.json"
    assert main(["run", str(cfg), "--seed", "3", "--format", "json", "--out", str(out)]) == 0
    records = json.loads(out.read_text())
    assert len(records) == 2
    assert main(["run", str(cfg), "--seed", "3"]) == 0
    text = capsys.readouterr().out
    assert text.startswith("temp_k,delta_u_v,defense,")


def test_cli_predict(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"temp_sweep": [1e10, 1e17]}))
    assert main(["predict", str(cfg)]) == 0
    rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
    assert len(rows) == 4
    assert float(rows[0]["p_analytic"]) == pytest.approx(1.0)


def test_cli_exit_codes(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"base": {"r_low": 5e4}}')
    assert main(["run", str(bad)]) == 1
    assert main(["run", str(tmp_path / "nope.json")]) == 1
    starved = tmp_path / "starved.json"
    starved.write_text(json.dumps({"base": {"key_length": 1}, "temp_sweep": [1e12],
                                   "delta_u_values": [0.1]}))
    assert main(["run", str(starved)]) == 2


def test_cli_selftest(capsys):
    assert main(["selftest"]) == 0
    assert "FAIL" not in capsys.readouterr().out


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "kljnloop", "selftest"], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
