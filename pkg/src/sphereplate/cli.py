"""Command-line interface: ``sphereplate {sweep,point,bench,report}``.

Exit codes: 0 success, 1 some samples failed, 2 invalid configuration.
"""

from __future__ import annotations

import argparse
import csv
import logging
import os
import sys
from dataclasses import fields
from pathlib import Path

from .config import ConfigError, RunConfig

EXIT_OK, EXIT_PARTIAL, EXIT_CONFIG = 0, 1, 2
WORKERS_ENV = "SPHEREPLATE_WORKERS"


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="flat 'key = value' run configuration file")
    g = p.add_argument_group("run configuration (override the config file)")
    for f in fields(RunConfig):
        flag = "--" + f.name.replace("_", "-").lower()
        g.add_argument(flag, dest="cfg_" + f.name, metavar="VALUE", default=None)


def _load_config(args) -> RunConfig:
    cfg = RunConfig()
    if args.config is not None:
        try:
            cfg = RunConfig.from_text(args.config.read_text())
        except OSError as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
    env = os.environ.get(WORKERS_ENV)
    if env:
        cfg.set("workers", env)
    for f in fields(RunConfig):
        value = getattr(args, "cfg_" + f.name, None)
        if value is not None:
            cfg.set(f.name, value)
    return cfg.validate()


def cmd_sweep(args) -> int:
    from .report import CSV_NAME, emit_report, format_csv, summary_lines, table_columns
    from .runner import exit_status, run_sweep

    cfg = _load_config(args)
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    partial = out / (CSV_NAME + ".partial")
    columns = table_columns([], cfg)
    with open(partial, "w") as fh:
        fh.write(format_csv([], columns))

        def flush(rows):
            text = format_csv(rows, columns)
            fh.write(text.split("\n", 1)[1])
            fh.flush()

        samples, timings = run_sweep(cfg, on_point=flush)
    paths = emit_report(samples, cfg, out, timings, columns)
    partial.unlink()
    for line in summary_lines(samples):
        print(line)
    print(f"wrote {', '.join(str(p) for p in paths)}")
    return exit_status(samples)


def cmd_point(args) -> int:
    from .coupling import SpherePlateGeometry, build_block, dump_block
    from .physics import contrast_factor
    from .report import format_csv, table_columns
    from .runner import apply_slopes, evaluate_sample, exit_status

    cfg = _load_config(args)
    samples = [evaluate_sample(cfg, args.z_over_r, t) for t in cfg.truncations]
    apply_slopes(samples)
    sys.stdout.write(format_csv(samples, table_columns(samples, cfg)))
    if args.dump_blocks is not None:
        args.dump_blocks.mkdir(parents=True, exist_ok=True)
        geom = SpherePlateGeometry.from_ratio(args.z_over_r, cfg.R_nm)
        f_c = contrast_factor(cfg.substrate)
        for s in samples:
            if s.L_used < 1:
                continue
            for m in range(s.L_used + 1):
                path = args.dump_blocks / f"block_{s.truncation}_L{s.L_used}_m{m}.txt"
                with open(path, "w") as fh:
                    dump_block(build_block(m, s.L_used, geom, f_c), fh)
    return exit_status(samples)


def cmd_bench(args) -> int:
    from .bench import bench

    sizes = [int(s) for s in args.sizes.split(",") if s.strip()]
    rows = bench(sizes, repeats=args.repeats, z_over_R=args.z_over_r,
                 want_vectors=args.vectors)
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["size", "best_s", "mean_s", "spread", "gflops", "ratio_to_prev"])
    for r in rows:
        w.writerow([r["size"]] + [format(r[k], ".6g") for k in
                                  ("best_s", "mean_s", "spread", "gflops", "ratio_to_prev")])
    return EXIT_OK


def cmd_report(args) -> int:
    from .report import CONFIG_NAME, emit_report, read_csv, recheck_slopes, summary_lines

    samples, columns = read_csv(args.input)
    cfg_path = args.config or args.input.parent / CONFIG_NAME
    try:
        cfg = RunConfig.from_text(Path(cfg_path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config {cfg_path}: {exc}") from exc
    if args.no_figures:
        cfg.figures = False
    worst = recheck_slopes(samples)
    out = args.out_dir or args.input.parent
    paths = emit_report(samples, cfg, out, columns=columns)
    for line in summary_lines(samples):
        print(line)
    print(f"slopes recomputed, max deviation {worst:.3g}")
    print(f"wrote {', '.join(str(p) for p in paths)}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sphereplate",
        description="Non-retarded sphere/substrate dispersion energy and force from the "
                    "full multipolar mode spectrum.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep", help="energy/force curve over a range of gaps")
    _add_config_flags(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("point", help="one gap, rows printed as CSV")
    _add_config_flags(p)
    p.add_argument("--z-over-r", type=float, required=True)
    p.add_argument("--dump-blocks", type=Path, default=None,
                   help="directory for plain-text dumps of every coupling block")
    p.set_defaults(func=cmd_point)

    p = sub.add_parser("bench", help="eigensolver timing against block size")
    p.add_argument("--sizes", default="64,128,256,512")
    p.add_argument("--repeats", type=int, default=3)
    p.add_argument("--z-over-r", type=float, default=0.1)
    p.add_argument("--vectors", action="store_true", help="time the eigenvector path")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("report", help="regenerate report files from a persisted table")
    p.add_argument("--input", type=Path, required=True)
    p.add_argument("--config", type=Path, default=None)
    p.add_argument("--out-dir", type=Path, default=None)
    p.add_argument("--no-figures", action="store_true")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARTIAL


if __name__ == "__main__":
    sys.exit(main())
