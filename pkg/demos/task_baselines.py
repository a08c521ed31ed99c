"""Compare the gated controller against the baselines on the two tasks.

Task 1: reach a flexed posture, then relax and keep it.
Task 2: flex, relax, extend through the held posture, relax again.

Synthetic EMG drives all stages through the same signal pipeline. The
plain impedance baseline drops the posture as soon as the effort stops;
the proportional mapping can only hold by keeping the muscle tensed; the
PI servo tracks well but needs an explicit angle reference the user
cannot produce. The gated controller holds with zero effort.

Usage:
    python3 demos/task_baselines.py [--task 1|2] [--seed N] [--noise A]
"""

import argparse
import dataclasses

from myohold import bundled_scenarios, run_scenario


def report(name: str, summary: dict) -> None:
    print(f"=== {name} ===")
    print("  planned plateau efforts:")
    for label, value in summary["efforts"].items():
        print(f"    {label}: {value:.4f}")
    print("  RMSE vs target [rad]:")
    header = f"    {'stage':<14}{'overall':>10}{'active':>10}{'relaxation':>12}"
    print(header)
    for stage in ("proposed", "impedance", "proportional", "servo"):
        r = summary["rmse"][stage]
        print(f"    {stage:<14}{r['overall']:10.4f}{r['active']:10.4f}"
              f"{r['relaxation']:12.4f}")
    relax_ratio = summary["rmse"]["impedance"]["relaxation"] / max(
        summary["rmse"]["proposed"]["relaxation"], 1e-12
    )
    print(f"  relaxation-phase advantage over plain impedance: {relax_ratio:.0f}x\n")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--task", type=int, default=0, help="run only task 1 or 2 (default both)")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--noise", type=float, default=0.0, help="synthetic EMG noise amplitude")
    args = ap.parse_args()

    names = [f"task{args.task}"] if args.task else ["task1", "task2"]
    scenarios = bundled_scenarios()
    for name in names:
        scenario = dataclasses.replace(scenarios[name], seed=args.seed, noise=args.noise)
        result = run_scenario(scenario)
        report(name, result.summary)


if __name__ == "__main__":
    main()
