"""Command-line experiment runner.

Subcommands:
  run      simulate -> sense -> estimate -> report for one configuration
  replay   re-run sensing + estimation over a recorded frames file
  compare  run the filter and the model-based baseline across velocities

Exit codes: 0 ok, 2 configuration/parse error, 3 runtime numerical error.
"""
from __future__ import annotations

import argparse
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path

from . import runner
from .config import load_config
from .errors import ConfigError, FbgShapeError, FrameParseError
from .fiber import read_frames
from .metrics import write_report

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3


def cmd_run(config_path, out_dir, seed=None) -> int:
    setup = load_config(config_path, seed_override=seed)
    frames, truths = runner.run_simulation(setup)
    est = runner.run_estimation(frames, setup)
    reports = runner.build_reports(est, truths, setup.label)
    runner.write_run_outputs(Path(out_dir), frames, truths, est, reports)
    for rep in reports:
        print(
            f"{rep.task} {rep.method}: length mean {rep.length.mean:.3f} mm, "
            f"endpoint mean {rep.endpoint.mean:.3f} mm, shape mean {rep.shape.mean:.3f} deg"
        )
    return EXIT_OK


def cmd_replay(frames_path, config_path, out_dir, seed=None) -> int:
    setup = load_config(config_path, seed_override=seed)
    frames = read_frames(frames_path)
    if not frames:
        raise FrameParseError("frames file contains no data rows", line=1)
    est = runner.run_estimation(frames, setup)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    runner.write_estimate_csv(est.records, out / "estimate.csv")
    print(f"replayed {len(frames)} frames -> {out / 'estimate.csv'}")
    return EXIT_OK


def _one_velocity(config_path, velocity, out_dir, seed):
    """Worker for compare: one velocity, own output directory."""
    setup = load_config(config_path, seed_override=seed)
    label = f"{setup.label}-v{velocity:g}"
    setup = replace(
        setup,
        traj=replace(setup.traj, velocity=velocity),
        label=label,
    )
    frames, truths = runner.run_simulation(setup)
    est = runner.run_estimation(frames, setup)
    reports = runner.build_reports(est, truths, label)
    runner.write_run_outputs(Path(out_dir), frames, truths, est, reports)
    return reports


def cmd_compare(config_path, out_dir, seed=None, jobs=1) -> int:
    setup = load_config(config_path, seed_override=seed)
    out = Path(out_dir)
    tasks = [
        (config_path, v, out / f"vel_{v:g}", seed) for v in setup.velocities
    ]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            all_reports = list(pool.map(_one_velocity, *zip(*tasks)))
    else:
        all_reports = [_one_velocity(*t) for t in tasks]
    flat = [rep for reps in all_reports for rep in reps]
    out.mkdir(parents=True, exist_ok=True)
    write_report(flat, out / "report.csv")
    print(f"{'task':<16} {'method':<12} {'len mean':>9} {'len max':>9} {'pos mean':>9} {'shape mean':>10}")
    for rep in flat:
        print(
            f"{rep.task:<16} {rep.method:<12} {rep.length.mean:>9.3f} {rep.length.max:>9.3f} "
            f"{rep.endpoint.mean:>9.3f} {rep.shape.mean:>10.3f}"
        )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fbgshape", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="simulate and estimate one configured task")
    run.add_argument("--config", required=True)
    run.add_argument("--out-dir", required=True)
    run.add_argument("--seed", type=int, default=None, help="override the config seed")

    rep = sub.add_parser("replay", help="re-estimate over a recorded frames file")
    rep.add_argument("--frames", required=True)
    rep.add_argument("--config", required=True)
    rep.add_argument("--out-dir", required=True)
    rep.add_argument("--seed", type=int, default=None)

    cmp_ = sub.add_parser("compare", help="filter vs model-based across velocities")
    cmp_.add_argument("--config", required=True)
    cmp_.add_argument("--out-dir", required=True)
    cmp_.add_argument("--seed", type=int, default=None)
    cmp_.add_argument("--jobs", type=int, default=1)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return cmd_run(args.config, args.out_dir, seed=args.seed)
        if args.command == "replay":
            return cmd_replay(args.frames, args.config, args.out_dir, seed=args.seed)
        return cmd_compare(args.config, args.out_dir, seed=args.seed, jobs=args.jobs)
    except (ConfigError, FrameParseError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FbgShapeError as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
