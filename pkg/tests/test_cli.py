"""Command line: exit codes, file layout, determinism and report regeneration."""

import csv
import json
import math

import pytest

from sphereplate.cli import main
from sphereplate.report import parse_csv
from sphereplate.runner import CORE_COLUMNS

from conftest import dipole_closed_form

BASE = ["--eps-substrate", "3.13", "--r-nm", "50"]


def run(argv, capsys=None):
    code = main(argv)
    out = capsys.readouterr().out if capsys is not None else ""
    return code, out


def read_rows(path):
    with open(path) as fh:
        return list(csv.reader(fh))


def test_missing_substrate_is_config_error(tmp_path, capsys):
    assert main(["sweep", "--out-dir", str(tmp_path)]) == 2
    assert "eps_substrate" in capsys.readouterr().err


def test_bad_flag_value_is_config_error(tmp_path):
    assert main(["sweep", *BASE, "--points", "zero", "--out-dir", str(tmp_path)]) == 2
    assert main(["point", *BASE, "--force-method", "spline", "--z-over-r", "1"]) == 2


def test_missing_config_file_is_config_error(tmp_path):
    assert main(["sweep", "--config", str(tmp_path / "nope.cfg")]) == 2


def test_empty_sweep(tmp_path, capsys):
    code, _ = run(["sweep", *BASE, "--z-over-r-list", "", "--out-dir", str(tmp_path)], capsys)
    assert code == 0
    rows = read_rows(tmp_path / "results.csv")
    assert rows == [list(CORE_COLUMNS)]
    assert not (tmp_path / "results.csv.partial").exists()


def sweep(tmp_path, name, *extra):
    out = tmp_path / name
    code = main(["sweep", *BASE, "--z-over-r-list", "7,10,14", "--truncations", "1,full",
                 "--out-dir", str(out), *extra])
    return code, out


def test_sweep_outputs(tmp_path, capsys):
    code, out = sweep(tmp_path, "a", "--baselines", "pt_ideal,roughness",
                      "--roughness-a-r-nm", "2", "--force-method", "both", "--report-damped", "1")
    assert code == 0
    rows = read_rows(out / "results.csv")
    header = rows[0]
    assert header[:len(CORE_COLUMNS)] == list(CORE_COLUMNS)
    assert header[len(CORE_COLUMNS):] == ["force_fd_eV_per_nm", "energy_damped_hbar_wp",
                                          "pt_ideal_force_eV_per_nm",
                                          "pt_ideal_roughness_force_eV_per_nm"]
    assert len(rows) == 1 + 6
    samples, _ = parse_csv((out / "results.csv").read_text())
    for s in samples:
        assert s.status == "ok"
        assert s.energy_eV == s.energy_hbar_wp * 15.80
        assert s.force_eV_per_nm < 0
        assert s.extras["force_fd_eV_per_nm"] == pytest.approx(s.force_eV_per_nm, rel=1e-6)
        if s.truncation == "1":
            x = 1 / (2 * (s.z_over_R + 1))
            assert s.energy_hbar_wp == pytest.approx(dipole_closed_form(x, -2.13 / 4.13), rel=1e-12)
    # 17 significant digits
    assert len(rows[1][4].lstrip("-").replace(".", "").split("e")[0].lstrip("0")) >= 16
    for name in ("plot.gp", "run.cfg", "manifest.json", "energy.png", "force.png", "slope.png"):
        assert (out / name).stat().st_size > 0
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["rows"] == 6 and manifest["failed_rows"] == 0
    assert "numpy" in manifest["versions"]
    assert not (out / "results.csv.partial").exists()
    assert "E_full/E_dip" in capsys.readouterr().out


def test_config_file_and_flag_precedence(tmp_path, monkeypatch):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("eps_substrate = 3.13\nz_over_R_list = 9\ntruncations = 1\nfigures = false\n"
                   "workers = 1\n")
    monkeypatch.setenv("SPHEREPLATE_WORKERS", "2")
    out = tmp_path / "o"
    assert main(["sweep", "--config", str(cfg), "--out-dir", str(out)]) == 0
    assert "workers = 2" in (out / "run.cfg").read_text()
    assert main(["sweep", "--config", str(cfg), "--out-dir", str(out), "--workers", "3"]) == 0
    assert "workers = 3" in (out / "run.cfg").read_text()
    assert not (out / "energy.png").exists()


def test_deterministic_across_workers(tmp_path):
    _, a = sweep(tmp_path, "w1", "--workers", "1", "--figures", "false", "--z-over-r-list", "0.3,2")
    _, b = sweep(tmp_path, "w3", "--workers", "3", "--figures", "false", "--z-over-r-list", "0.3,2")
    _, c = sweep(tmp_path, "w1b", "--workers", "1", "--figures", "false", "--z-over-r-list", "0.3,2")
    text = (a / "results.csv").read_bytes()
    assert text == (b / "results.csv").read_bytes() == (c / "results.csv").read_bytes()


def test_partial_failure_exit_code(tmp_path):
    code, out = sweep(tmp_path, "f", "--rel-tol", "1e-14", "--l-cap", "4", "--figures", "0")
    assert code == 1
    samples, _ = parse_csv((out / "results.csv").read_text())
    assert {s.status for s in samples if s.truncation == "full"} == {"not_converged"}
    assert {s.status for s in samples if s.truncation == "1"} == {"ok"}


def test_report_regenerates_identically(tmp_path, capsys):
    code, out = sweep(tmp_path, "r", "--baselines", "pt_ideal", "--figures", "false")
    assert code == 0
    original = {n: (out / n).read_bytes() for n in ("results.csv", "plot.gp", "run.cfg")}
    regen = tmp_path / "regen"
    assert main(["report", "--input", str(out / "results.csv"), "--out-dir", str(regen)]) == 0
    for name, data in original.items():
        assert (regen / name).read_bytes() == data
    assert "slopes recomputed" in capsys.readouterr().out
    assert main(["report", "--input", str(tmp_path / "missing.csv")]) == 1


def test_report_detects_tampered_slopes(tmp_path):
    _, out = sweep(tmp_path, "t", "--figures", "false")
    rows = read_rows(out / "results.csv")
    idx = rows[0].index("slope_local")
    for r in rows[1:]:
        if r[idx] != "nan":
            r[idx] = repr(float(r[idx]) + 1e-6)
            break
    with open(out / "results.csv", "w", newline="") as fh:
        csv.writer(fh, lineterminator="\n").writerows(rows)
    with pytest.raises(ValueError):
        main(["report", "--input", str(out / "results.csv"), "--no-figures"])


def test_point_and_block_dump(tmp_path, capsys):
    dump = tmp_path / "blocks"
    code, out = run(["point", *BASE, "--z-over-r", "0.5", "--truncations", "2",
                     "--dump-blocks", str(dump)], capsys)
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0].split(",") == list(CORE_COLUMNS)
    assert len(lines) == 2 and lines[1].split(",")[3] == "2"
    assert sorted(p.name for p in dump.iterdir()) == [
        "block_2_L2_m0.txt", "block_2_L2_m1.txt", "block_2_L2_m2.txt"]


def test_bench_command(capsys):
    code, out = run(["bench", "--sizes", "1,16,32", "--repeats", "2"], capsys)
    assert code == 0
    rows = list(csv.DictReader(out.splitlines()))
    assert [int(r["size"]) for r in rows] == [1, 16, 32]
    assert math.isnan(float(rows[0]["ratio_to_prev"]))
