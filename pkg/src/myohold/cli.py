"""Command line entry point.

Subcommands:
  simulate   run a scenario, write the per-tick record CSV (+ summary JSON)
  evaluate   run a scenario, print/write the summary metrics only
  calibrate  build a calibration profile from the scripted protocol
  serve      start the live simulation WebSocket service
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from .dynamics import CONTROL_TICK
from .params import PRESET_NAMES
from .scenarios import (
    Scenario,
    bundled_scenarios,
    calibrate_from_trace,
    load_trace,
    run_scenario,
    save_trace,
    synth_calibration_trace,
)


def _resolve_scenario(args: argparse.Namespace) -> Scenario:
    bundled = bundled_scenarios()
    if args.scenario in bundled:
        scenario = bundled[args.scenario]
    elif Path(args.scenario).exists():
        scenario = Scenario(name=Path(args.scenario).stem, source=args.scenario)
    else:
        names = ", ".join(sorted(bundled))
        raise SystemExit(
            f"unknown scenario {args.scenario!r}: expected one of {names} or a trace CSV path"
        )
    overrides = {"preset_name": args.preset, "seed": args.seed}
    if args.tick is not None:
        overrides["tick"] = args.tick
    if getattr(args, "noise", None) is not None:
        overrides["noise"] = args.noise
    return dataclasses.replace(scenario, **overrides)


def _cmd_simulate(args: argparse.Namespace) -> int:
    result = run_scenario(_resolve_scenario(args))
    out = Path(args.output)
    result.record.to_csv(out)
    print(f"wrote {len(result.record)} rows to {out}")
    if args.summary:
        Path(args.summary).write_text(
            json.dumps(result.summary, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
        print(f"wrote summary to {args.summary}")
    return 0


def _cmd_evaluate(args: argparse.Namespace) -> int:
    result = run_scenario(_resolve_scenario(args))
    text = json.dumps(result.summary, indent=2, sort_keys=True)
    if args.output:
        Path(args.output).write_text(text + "\n", encoding="utf-8")
        print(f"wrote summary to {args.output}")
    else:
        print(text)
    return 0


def _cmd_calibrate(args: argparse.Namespace) -> int:
    if args.trace:
        frames = load_trace(args.trace)
    else:
        frames = synth_calibration_trace(seed=args.seed, noise=args.noise)
        if args.save_trace:
            save_trace(frames, args.save_trace)
            print(f"wrote protocol trace to {args.save_trace}")
    profile = calibrate_from_trace(frames)
    profile.save(args.output)
    print(f"wrote calibration profile to {args.output}")
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    from .server import run_server  # lazy: keeps batch commands free of websockets

    run_server(
        host=args.host,
        port=args.port,
        preset_name=args.preset,
        tick=args.tick if args.tick is not None else CONTROL_TICK,
        scenario=args.autoplay,
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="myohold",
        description="Biomimetic prosthetic joint control: simulate, evaluate, calibrate, serve.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_run_flags(p: argparse.ArgumentParser) -> None:
        p.add_argument("scenario", help="bundled scenario name or trace CSV path")
        p.add_argument("--preset", default="wrist", choices=PRESET_NAMES)
        p.add_argument("--seed", type=int, default=0, help="RNG seed for synthetic EMG")
        p.add_argument("--noise", type=float, default=None, help="synthetic EMG noise amplitude")
        p.add_argument("--tick", type=float, default=None, help="control period override [s]")

    p_sim = sub.add_parser("simulate", help="run a scenario and write the per-tick CSV")
    add_run_flags(p_sim)
    p_sim.add_argument("-o", "--output", default="record.csv", help="record CSV path")
    p_sim.add_argument("--summary", default=None, help="also write summary JSON here")
    p_sim.set_defaults(func=_cmd_simulate)

    p_eval = sub.add_parser("evaluate", help="run a scenario and report summary metrics")
    add_run_flags(p_eval)
    p_eval.add_argument("-o", "--output", default=None, help="summary JSON path (default: stdout)")
    p_eval.set_defaults(func=_cmd_evaluate)

    p_cal = sub.add_parser("calibrate", help="build a calibration profile JSON")
    p_cal.add_argument("-o", "--output", default="calibration.json")
    p_cal.add_argument("--trace", default=None, help="recorded protocol trace CSV (default: synthesize)")
    p_cal.add_argument("--seed", type=int, default=0)
    p_cal.add_argument("--noise", type=float, default=0.0)
    p_cal.add_argument("--save-trace", default=None, help="also save the synthesized trace CSV")
    p_cal.set_defaults(func=_cmd_calibrate)

    p_srv = sub.add_parser("serve", help="start the live WebSocket simulation service")
    p_srv.add_argument("--host", default="127.0.0.1")
    p_srv.add_argument("--port", type=int, default=8765)
    p_srv.add_argument("--preset", default="wrist", choices=PRESET_NAMES)
    p_srv.add_argument("--tick", type=float, default=None, help="control period override [s]")
    p_srv.add_argument("--autoplay", default=None, help="scenario to start playing immediately")
    p_srv.set_defaults(func=_cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
