"""Demonstrate the two signature behaviors of the gated controller.

1. Hold: when the muscles relax, the commanded equilibrium freezes at its
   last value instead of decaying to zero, so the joint keeps its posture
   without continuous effort.
2. Continuity: when the active direction flips, the equilibrium command
   is blended so it never jumps, even mid-movement.

Runs the two bundled scripted inputs and prints window statistics.

Usage:
    python3 demos/hold_and_continuity.py
"""

import numpy as np

from myohold import bundled_scenarios, run_scenario, window_mask


def main() -> None:
    scenarios = bundled_scenarios()

    print("=== input1: ramp, relax, antagonist ramp, relax, ramp again ===")
    result = run_scenario(scenarios["input1"])
    rec = result.record
    t = rec.column("t")
    theta_eq = rec.column("theta_eq")
    theta = rec.column("theta")

    for lo, hi in ((5.0, 10.0), (15.0, 20.0)):
        # judge the hold only after the mechanical transient settles
        settled = window_mask(t, [(lo, hi)]) & (np.abs(rec.column("theta_dot")) < 1e-6)
        span_eq = np.ptp(theta_eq[settled])
        span_th = np.ptp(theta[settled])
        print(f"  relaxed window [{lo:4.1f}, {hi:4.1f}] s: "
              f"held θ_eq = {theta_eq[settled][-1]:+.6f} rad, "
              f"drift(θ_eq) = {span_eq:.2e}, drift(θ) = {span_th:.2e}")

    print("\n=== input2: overlapping sinusoid bursts, six direction flips ===")
    result = run_scenario(scenarios["input2"])
    rec = result.record
    motion = rec.column("motion")
    theta_eq = rec.column("theta_eq")

    switches = np.nonzero(motion[1:] != motion[:-1])[0] + 1
    print(f"  {len(switches)} classification changes")
    worst = 0.0
    for k in switches:
        jump = abs(theta_eq[k] - theta_eq[k - 1])
        worst = max(worst, jump)
        print(f"  t = {rec.column('t')[k]:6.3f} s  "
              f"{motion[k - 1]:>9} -> {motion[k]:<9}  |Δθ_eq| = {jump:.3e}")
    print(f"  worst equilibrium jump across all switches: {worst:.3e} rad")


if __name__ == "__main__":
    main()
