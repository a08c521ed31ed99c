"""Show how joint stiffness, viscosity and equilibrium scale with effort.

Walks the activation range for each preset and prints the resulting
stiffness/viscosity curves, then demonstrates the torque split and the
equilibrium angle for a few co-contraction patterns.

Usage:
    python3 demos/impedance_curves.py [--preset wrist]
"""

import argparse

import numpy as np

from myohold import equilibrium_angle, preset, stiffness, viscosity


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--preset", default="wrist", choices=("wrist", "finger", "hand"))
    args = ap.parse_args()

    params = preset(args.preset)[0]
    print(f"preset: {args.preset}")
    print(f"  inertia {params.inertia} kg·m², torque ceilings "
          f"flex {params.tau_max_flex} / ext {params.tau_max_ext} N·m\n")

    print("effort level -> stiffness [N·m/rad], viscosity [N·m·s/rad]")
    for alpha in np.linspace(0.0, 1.0, 11):
        k = stiffness(params, alpha)
        b = viscosity(params, alpha)
        print(f"  α = {alpha:4.1f}   K = {k:8.4f}   B = {b:7.4f}")

    # The equilibrium depends on the torque *difference*; the stiffness
    # scales with the effort level. Balanced pulls shift nothing at any
    # stiffness.
    print("\nbalanced pulls: net torque cancels at any effort level")
    for level in (0.2, 0.5, 0.8):
        tau = level * params.tau_max_flex
        theta_eq = equilibrium_angle(params, level, tau, tau, theta0=0.0)
        print(f"  α_f = α_e = {level}: θ_eq = {theta_eq:+.6f} rad, "
              f"K(α) = {stiffness(params, level):.3f}")

    print("\nunbalanced pull: equilibrium shifts toward the stronger muscle")
    for flex, ext in ((0.5, 0.0), (0.0, 0.5), (0.6, 0.2)):
        tau_f = flex * params.tau_max_flex
        tau_e = ext * params.tau_max_ext
        level = max(flex, ext)
        theta_eq = equilibrium_angle(params, level, tau_f, tau_e, theta0=0.0)
        side = "flexion" if theta_eq < 0 else "extension"
        print(f"  α_f = {flex}, α_e = {ext}: θ_eq = {theta_eq:+.6f} rad ({side})")


if __name__ == "__main__":
    main()
