"""Command-line entry point: ``remn synth``, ``remn run`` and ``remn eval``.

Exit codes: 0 on success, 2 on argument errors, 3 on state errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from remn.benchmark import apply_policy, run_benchmark_full
from remn.config import ScenarioSpec, load_config, parse_size
from remn.errors import ArgumentError, StateError
from remn.imageio import frame_name, read_sequence, write_pgm, write_sequence
from remn.metrics import metric_f, metric_j
from remn.synthetic import generate_synthetic_video

EXIT_ARGUMENT = 2
EXIT_STATE = 3


def _cmd_synth(args) -> int:
    spec = ScenarioSpec(args.scenario, frames=args.frames, size=parse_size(args.size),
                        replay_factor=args.replay, seed=args.seed)
    frames, masks = generate_synthetic_video(spec)
    write_sequence(args.out, frames, masks)
    print(f"wrote {len(frames)} frames to {args.out}")
    return 0


def _cmd_run(args) -> int:
    cfg, scenario = load_config(args.config)
    cfg = apply_policy(cfg, args.policy)
    if args.no_frm:
        cfg = cfg.replace(frm__enabled=False)
    if args.no_asm:
        cfg = cfg.replace(asm__enabled=False)
    if args.no_rrm:
        cfg = cfg.replace(rrm__enabled=False)
    run = run_benchmark_full(scenario, cfg, policy=None)
    run.report.config["policy"] = args.policy
    text = run.report.to_json() if args.report == "json" else run.report.to_csv()
    if args.out is None:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
        return 0
    out = Path(args.out)
    pred_dir = out / "pred"
    pred_dir.mkdir(parents=True, exist_ok=True)
    for i, r in enumerate(run.results):
        write_pgm(pred_dir / frame_name(i, "pgm"), r.mask)
    (out / f"report.{args.report}").write_text(text)
    r = run.report
    print(f"J {r.j_mean:.4f}  F {r.f_mean:.4f}  J&F {r.jf_mean:.4f}  FPS {r.fps:.1f}  peak bank {r.peak_bank}")
    return 0


def _cmd_eval(args) -> int:
    pred = read_sequence(args.pred, "pgm")
    gt = read_sequence(args.gt, "pgm")
    j, f = metric_j(pred, gt), metric_f(pred, gt)
    print(json.dumps({"j_mean": j, "f_mean": f, "jf_mean": (j + f) / 2}, sort_keys=True))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="remn", description="Memory-based video object segmentation on synthetic data.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="write a synthetic scenario as PPM frames and PGM masks")
    p.add_argument("--scenario", required=True, choices=["plain", "distractor", "deform", "long"])
    p.add_argument("--frames", type=int, default=60)
    p.add_argument("--size", default="128x128", help="H0xW0, both divisible by 16")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--replay", type=int, default=1, help="replay factor for the long scenario")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("run", help="segment the configured scenario and report metrics")
    p.add_argument("--config", required=True, help="flat key=value config file")
    p.add_argument("--policy", default="dynamic", help="dynamic, unbounded or interval:k")
    p.add_argument("--no-frm", action="store_true")
    p.add_argument("--no-asm", action="store_true")
    p.add_argument("--no-rrm", action="store_true")
    p.add_argument("--report", choices=["json", "csv"], default="json")
    p.add_argument("--out", help="directory for report.<fmt> and pred/ masks; stdout if omitted")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("eval", help="score predicted PGM masks against ground truth")
    p.add_argument("--pred", required=True)
    p.add_argument("--gt", required=True)
    p.set_defaults(func=_cmd_eval)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except ArgumentError as exc:
        print(f"remn: error: {exc}", file=sys.stderr)
        return EXIT_ARGUMENT
    except OSError as exc:
        print(f"remn: error: {exc}", file=sys.stderr)
        return EXIT_ARGUMENT
    except StateError as exc:
        print(f"remn: state error: {exc}", file=sys.stderr)
        return EXIT_STATE


if __name__ == "__main__":
    sys.exit(main())
