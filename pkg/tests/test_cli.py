import json

import pytest

from xydopo.cli import main
from xydopo.sweep import CSV_HEADER


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_critical_xy(capsys):
    code, out, _ = run_cli(capsys, "critical", "--jx", "2", "--jy", "1")
    assert code == 0
    assert "h_c = +3" in out and "anisotropic" in out


def test_critical_dopo_json(capsys):
    code, out, _ = run_cli(capsys, "critical", "--j", "2", "--d2", "0", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert doc["delta_c"] == -4.0


def test_map_forward(capsys):
    code, out, _ = run_cli(capsys, "map", "--jx", "2", "--jy", "1", "--h", "3",
                           "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert doc["dopo"]["j"] == pytest.approx(2.8284271247461903)
    assert doc["physical"] is True


def test_map_invert(capsys):
    code, out, _ = run_cli(capsys, "map", "--invert", "--j", "2", "--delta", "-2",
                           "--d2", "0", "--h", "1", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert doc["xy"]["jx"] == pytest.approx(1.0)


def test_map_invert_no_solution(capsys):
    code, out, _ = run_cli(capsys, "map", "--invert", "--j", "2", "--delta", "-5",
                           "--d2", "-1", "--h", "1")
    assert code == 1
    assert "no-solution" in out


def test_map_missing_arguments(capsys):
    code, _, err = run_cli(capsys, "map", "--jx", "2")
    assert code == 2
    assert "config error" in err


def test_spectrum_csv_schema(capsys):
    code, out, _ = run_cli(capsys, "spectrum", "--model", "xy", "--jx", "1", "--jy", "0",
                           "--h", "1", "--n", "8")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "k,value"
    assert len(lines) == 9


def test_spectrum_dopo(capsys):
    code, out, _ = run_cli(capsys, "spectrum", "--model", "dopo", "--j", "2",
                           "--delta", "-3", "--d2", "4", "--n", "8")
    assert code == 0
    values = [float(line.split(",")[1]) for line in out.splitlines()[1:]]
    assert any(v < 0 for v in values)  # signed squared spectrum


def test_sweep_preset_to_file(tmp_path, capsys):
    target = tmp_path / "sweep.csv"
    code, _, _ = run_cli(capsys, "sweep", "--preset", "fig2-tfi", "--steps", "5",
                         "--outputs", "e_g,phase", "--workers", "1",
                         "--out", str(target))
    assert code == 0
    lines = target.read_text().splitlines()
    assert lines[0] == CSV_HEADER
    assert len(lines) == 6


def test_sweep_config_file_and_flag_precedence(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({
        "model": "xy", "jx": 1.0, "jy": 0.0,
        "start": 0.0, "stop": 1.0, "steps": 5, "outputs": "phase",
    }))
    code, out, _ = run_cli(capsys, "sweep", "--config", str(cfg), "--steps", "7",
                           "--workers", "1")
    assert code == 0
    assert len(out.splitlines()) == 8  # header + 7 records: flag wins over file


def test_sweep_bad_config_exit_code(capsys):
    code, _, err = run_cli(capsys, "sweep", "--model", "xy", "--jx", "1", "--jy", "0",
                           "--start", "0", "--stop", "1", "--steps", "1")
    assert code == 2
    assert "steps" in err


def test_sweep_numerical_error_exit_code(capsys):
    # tolerance unreachable within the node budget on a kinked integrand
    code, _, err = run_cli(capsys, "sweep", "--model", "xy", "--jx", "1", "--jy", "1",
                           "--start", "0.5", "--stop", "1.0", "--steps", "2",
                           "--outputs", "e_g", "--tol", "1e-15", "--workers", "1")
    assert code == 3
    assert "numerical" in err


def test_validate_quick_exit_zero(capsys):
    code, out, _ = run_cli(capsys, "validate", "--level", "quick")
    assert code == 0
    assert "all checks passed" in out


def test_validate_corrupted_build_exits_nonzero(capsys, monkeypatch):
    import xydopo.sweep as sweep_mod

    monkeypatch.setattr(sweep_mod, "verify_spectral_match", lambda *a, **k: 1.0)
    code, out, _ = run_cli(capsys, "validate", "--level", "quick")
    assert code == 1
    assert "FAIL" in out


def test_validate_json(capsys):
    code, out, _ = run_cli(capsys, "validate", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert doc["passed"] is True
    assert doc["checks"]
