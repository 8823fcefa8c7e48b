import json

import pytest

from xxzbands import __version__
from xxzbands.cli import main


def test_bands_csv_contains_three_particle_row(capsys):
    assert main(["bands", "--delta", "2.0", "--nmax", "3",
                 "--format", "csv"]) == 0
    out = capsys.readouterr().out
    assert f"# version={__version__}" in out
    row = next(line for line in out.splitlines() if line.startswith("3,1,"))
    _, _, lo, hi = row.split(",")
    assert float(lo) == pytest.approx(5.0 / 6.0, abs=1e-6)
    assert float(hi) == pytest.approx(0.9, abs=1e-6)


def test_bands_json_embeds_params_and_metadata(capsys):
    assert main(["bands", "--delta", "4.0", "--nmax", "2"]) == 0
    record = json.loads(capsys.readouterr().out)
    assert record["params"]["delta"] == 4.0
    assert record["params"]["version"] == __version__
    assert "timestamp" in record["metadata"]
    assert record["gap_report"]["droplet_gap_nonempty"] is True


def test_fiber_dispersion_row(capsys):
    assert main(["fiber", "--delta", "2.0", "--n", "2",
                 "--theta-points", "4", "--gap-cap", "60"]) == 0
    record = json.loads(capsys.readouterr().out)
    row = next(r for r in record["rows"] if abs(r["theta"]) < 1e-12)
    assert row["analytic_energy"] == pytest.approx(0.75, abs=1e-12)
    assert abs(row["lowest_minus_analytic"]) <= 1e-8


def test_spectrum_with_field_file(tmp_path, capsys):
    field = tmp_path / "field.txt"
    field.write_text("# site value\n1 0.5\n3 0.25\n")
    assert main(["spectrum", "--delta", "2.0", "--n", "1", "--window", "6",
                 "--field-file", str(field)]) == 0
    record = json.loads(capsys.readouterr().out)
    assert len(record["rows"]) == 6
    assert record["solver"]["method"] == "dense"


def test_spectrum_over_cap_directs_to_extremal(capsys):
    assert main(["spectrum", "--delta", "2.0", "--n", "2",
                 "--window", "200"]) == 2
    assert "extremal" in capsys.readouterr().err


def test_gap_check_exit_status(capsys):
    assert main(["gap-check", "--delta", "4.0", "--n", "2",
                 "--gap-cap", "20", "--theta-points", "4"]) == 0
    record = json.loads(capsys.readouterr().out)
    assert record["all_certified"] is True
    assert all(r["below_threshold_count"] == 1 for r in record["rows"])


def test_gap_check_below_validity_is_diagnostic(capsys):
    assert main(["gap-check", "--delta", "1.5", "--n", "2",
                 "--gap-cap", "15", "--theta-points", "2"]) == 0
    record = json.loads(capsys.readouterr().out)
    assert record["diagnostic_only"] is True


def test_hvz_check_monotone(capsys):
    assert main(["hvz-check", "--delta", "2.0", "--n", "2", "--split", "1",
                 "--windows", "6,12"]) == 0
    record = json.loads(capsys.readouterr().out)
    assert record["residuals_monotone"] is True


def test_ensemble_roundtrip(tmp_path):
    out = tmp_path / "ens.json"
    assert main(["ensemble", "--delta", "2.0", "--n", "1", "--window", "20",
                 "--samples", "4", "--seed", "7", "--nu-max", "0.5",
                 "--output", str(out)]) == 0
    record = json.loads(out.read_text())
    assert record["aggregates"]["all_passed"] is True
    assert record["params"]["master_seed"] == 7
    assert len(record["rows"]) == 4


def test_config_file_supplies_flags(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# comment\ndelta=2.0\nnmax=2\nformat=csv\n")
    assert main(["bands", "--config", str(cfg)]) == 0
    from_config = capsys.readouterr().out
    assert main(["bands", "--delta", "2.0", "--nmax", "2",
                 "--format", "csv"]) == 0
    assert from_config == capsys.readouterr().out


def test_outdir_env_var(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("XXZBANDS_OUTDIR", str(tmp_path))
    assert main(["bands", "--delta", "2.0", "--nmax", "2",
                 "--format", "csv", "--output", "bands.csv"]) == 0
    assert (tmp_path / "bands.csv").exists()


def test_invalid_parameter_reports_error(capsys):
    assert main(["bands", "--delta", "0.5", "--nmax", "2"]) == 2
    assert "error" in capsys.readouterr().err


def test_unknown_flag_exits_nonzero():
    with pytest.raises(SystemExit) as exc:
        main(["bands", "--delta", "2.0", "--bogus"])
    assert exc.value.code != 0
