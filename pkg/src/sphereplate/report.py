"""Persistence of sweep results: CSV table, gnuplot script, run manifest, figures."""

from __future__ import annotations

import csv
import io
import json
import math
import platform
from pathlib import Path

from .config import RunConfig
from .force import CurveSample
from .runner import CORE_COLUMNS, apply_slopes, extra_columns

CSV_NAME = "results.csv"
PLOT_SCRIPT_NAME = "plot.gp"
MANIFEST_NAME = "manifest.json"
CONFIG_NAME = "run.cfg"

_STR_COLUMNS = {"truncation", "force_method", "status"}
_INT_COLUMNS = {"L_used"}


class ReportError(OSError):
    pass


def _fmt(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, int) and not isinstance(value, bool):
        return str(value)
    v = float(value)
    if math.isnan(v):
        return "nan"
    return format(v, ".17g")


def sample_row(s: CurveSample) -> dict:
    row = {c: getattr(s, c) for c in CORE_COLUMNS}
    row.update(s.extras)
    return row


def table_columns(samples: list[CurveSample], cfg: RunConfig | None = None) -> list[str]:
    if cfg is not None:
        return list(CORE_COLUMNS) + extra_columns(cfg)
    extras: list[str] = []
    for s in samples:
        extras.extend(k for k in s.extras if k not in extras)
    return list(CORE_COLUMNS) + extras


def format_csv(samples: list[CurveSample], columns: list[str]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for s in samples:
        row = sample_row(s)
        w.writerow([_fmt(row[c]) for c in columns])
    return buf.getvalue()


def parse_csv(text: str) -> tuple[list[CurveSample], list[str]]:
    reader = csv.reader(io.StringIO(text))
    try:
        columns = next(reader)
    except StopIteration:
        raise ValueError("empty results table (no header)") from None
    missing = [c for c in CORE_COLUMNS if c not in columns]
    if missing or columns[:len(CORE_COLUMNS)] != list(CORE_COLUMNS):
        raise ValueError(f"unexpected column layout: {columns}")
    samples = []
    for raw in reader:
        if not raw:
            continue
        vals = {}
        for c, v in zip(columns, raw):
            if c in _STR_COLUMNS:
                vals[c] = v
            elif c in _INT_COLUMNS:
                vals[c] = int(v)
            else:
                vals[c] = float(v)
        core = {c: vals[c] for c in CORE_COLUMNS}
        extras = {c: vals[c] for c in columns[len(CORE_COLUMNS):]}
        samples.append(CurveSample(**core, extras=extras))
    return samples, columns


def write_csv(path: Path, samples: list[CurveSample], columns: list[str]) -> None:
    try:
        Path(path).write_text(format_csv(samples, columns))
    except OSError as exc:
        raise ReportError(f"cannot write {path}: {exc}") from exc


def read_csv(path: Path) -> tuple[list[CurveSample], list[str]]:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ReportError(f"cannot read {path}: {exc}") from exc
    return parse_csv(text)


def recheck_slopes(samples: list[CurveSample], tol: float = 1e-12) -> float:
    """Recompute slopes from the energies; returns the largest deviation from stored values."""
    stored = [s.slope_local for s in samples]
    apply_slopes(samples)
    worst = 0.0
    for old, s in zip(stored, samples):
        new = s.slope_local
        if math.isnan(old) and math.isnan(new):
            continue
        if math.isnan(old) != math.isnan(new):
            return math.inf
        worst = max(worst, abs(old - new) / max(1.0, abs(old)))
    if worst > tol:
        raise ValueError(f"stored slopes deviate from recomputed ones by {worst:g}")
    return worst


def plot_script(csv_name: str = CSV_NAME, truncations=("1", "2", "full"),
                extra: list[str] | None = None) -> str:
    """gnuplot script drawing |E| against z/R and |F| against z from the CSV."""
    labels = {"1": "dipole (L=1)", "2": "quadrupole (L=2)", "full": "all multipoles"}
    lines = [
        "# gnuplot -c plot.gp",
        'set datafile separator ","',
        "set key autotitle columnhead",
        "set logscale xy",
        "set format y '10^{%L}'",
        "set terminal pngcairo size 900,650",
        "",
        "set output 'energy_gnuplot.png'",
        "set xlabel 'z/R'",
        "set ylabel '|E| (eV)'",
    ]
    curves = [f"'{csv_name}' using 1:(strcol(3) eq '{t}' ? abs($6) : 1/0) "
              f"with linespoints title '{labels[t]}'" for t in truncations]
    lines.append("plot " + ", \\\n     ".join(curves))
    lines += ["", "set output 'force_gnuplot.png'", "set xlabel 'z (nm)'",
              "set ylabel '|F| (eV/nm)'"]
    curves = [f"'{csv_name}' using 2:(strcol(3) eq '{t}' ? abs($7) : 1/0) "
              f"with linespoints title '{labels[t]}'" for t in truncations]
    for i, col in enumerate(extra or []):
        if col.startswith("pt_"):
            idx = len(CORE_COLUMNS) + i + 1
            curves.append(f"'{csv_name}' using 2:(strcol(3) eq '{truncations[0]}' ? "
                          f"abs(${idx}) : 1/0) with lines title '{col}'")
    lines.append("plot " + ", \\\n     ".join(curves))
    lines += ["", "set output 'slope_gnuplot.png'", "unset logscale y", "set format y '%g'",
              "set xlabel 'z/R'", "set ylabel 'd ln|E| / d ln(z/R)'"]
    curves = [f"'{csv_name}' using 1:(strcol(3) eq '{t}' ? $9 : 1/0) "
              f"with linespoints title '{labels[t]}'" for t in truncations]
    lines.append("plot " + ", \\\n     ".join(curves))
    return "\n".join(lines) + "\n"


def versions() -> dict:
    import numba
    import numpy
    import scipy

    from . import __version__
    return {"sphereplate": __version__, "python": platform.python_version(),
            "numpy": numpy.__version__, "scipy": scipy.__version__, "numba": numba.__version__}


def emit_report(samples: list[CurveSample], cfg: RunConfig, out_dir, timings: dict | None = None,
                columns: list[str] | None = None) -> list[Path]:
    """Write the CSV, plot script, manifest and (optionally) figures; returns written paths."""
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ReportError(f"cannot create {out}: {exc}") from exc
    columns = columns or table_columns(samples, cfg)
    written = []
    csv_path = out / CSV_NAME
    write_csv(csv_path, samples, columns)
    written.append(csv_path)
    present = [t for t in ("1", "2", "full") if any(s.truncation == t for s in samples)]
    script = plot_script(CSV_NAME, tuple(present or cfg.truncations), columns[len(CORE_COLUMNS):])
    cfg_text = cfg.to_text()
    manifest = {
        "config": cfg_text,
        "versions": versions(),
        "timings_s": timings or {},
        "rows": len(samples),
        "failed_rows": sum(s.status != "ok" for s in samples),
        "columns": columns,
    }
    for name, text in ((PLOT_SCRIPT_NAME, script), (CONFIG_NAME, cfg_text),
                       (MANIFEST_NAME, json.dumps(manifest, indent=2, sort_keys=True) + "\n")):
        path = out / name
        try:
            path.write_text(text)
        except OSError as exc:
            raise ReportError(f"cannot write {path}: {exc}") from exc
        written.append(path)
    if cfg.figures and samples:
        from .plotting import render_figures
        written.extend(render_figures(samples, cfg, out))
    return written


def summary_lines(samples: list[CurveSample]) -> list[str]:
    """Full-versus-dipole ratios per gap, for the terminal."""
    by_z: dict[float, dict[str, CurveSample]] = {}
    for s in samples:
        by_z.setdefault(s.z_over_R, {})[s.truncation] = s
    lines = []
    for z in sorted(by_z):
        rows = by_z[z]
        full, dip = rows.get("full"), rows.get("1")
        if full is None or dip is None or not dip.energy_eV:
            continue
        lines.append(f"z/R={z:<10.4g} L={full.L_used:<5d} E_full/E_dip={full.energy_eV / dip.energy_eV:<10.4g}"
                     f" F_full/F_dip={full.force_eV_per_nm / dip.force_eV_per_nm:.4g}")
    return lines
