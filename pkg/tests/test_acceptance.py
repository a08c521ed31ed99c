"""Acceptance gate: every primary behavioral guarantee, one per test.

Each test prints one [PASS]/[FAIL] line so the suite output doubles as a
checklist. Tolerances are part of the contract and are asserted as given,
never loosened.
"""

import math
import time

import numpy as np
import pytest

from myohold import (
    CONTROL_TICK,
    INTEGRATION_STEP,
    Direction,
    ImpedanceBaseline,
    JointController,
    LowpassFilter,
    MuscleActivation,
    bundled_scenarios,
    preset,
    run_scenario,
    scripted_activation,
    stiffness,
    window_mask,
)
from myohold.signals import butterworth_lowpass_coefficients


def _verdict(name: str, ok: bool, detail: str) -> None:
    print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    assert ok, f"{name}: {detail}"


# 1 ---------------------------------------------------------------------------

def test_hold_invariant():
    started = time.perf_counter()
    result = run_scenario(bundled_scenarios()["input1"])
    runtime = time.perf_counter() - started
    rec = result.record
    t = rec.column("t")
    theta_eq = rec.column("theta_eq")
    theta = rec.column("theta")
    settled = np.abs(rec.column("theta_dot")) < 1e-6
    worst_eq = 0.0
    worst_theta = 0.0
    for window in ((5.0, 10.0), (15.0, 20.0)):
        mask = window_mask(t, [window]) & settled
        assert mask.sum() > 100
        worst_eq = max(worst_eq, float(np.ptp(theta_eq[mask])))
        worst_theta = max(worst_theta, float(np.ptp(theta[mask])))
    ok = worst_eq < 1e-9 and worst_theta < 1e-3 and runtime < 5.0
    _verdict(
        "hold-invariant",
        ok,
        f"theta_eq drift {worst_eq:.2e} (<1e-9), theta drift {worst_theta:.2e} "
        f"(<1e-3), runtime {runtime:.2f}s (<5s)",
    )


# 2 ---------------------------------------------------------------------------

def test_continuity_invariant():
    started = time.perf_counter()
    result = run_scenario(bundled_scenarios()["input2"])
    runtime = time.perf_counter() - started
    rec = result.record
    motion = rec.column("motion")
    theta_eq = rec.column("theta_eq")
    switches = np.nonzero(motion[1:] != motion[:-1])[0] + 1
    assert len(switches) >= 4
    worst = float(np.max(np.abs(theta_eq[switches] - theta_eq[switches - 1])))
    ok = worst < 1e-6 and runtime < 5.0
    _verdict(
        "continuity-invariant",
        ok,
        f"worst |theta_eq jump| {worst:.2e} across {len(switches)} switches "
        f"(<1e-6), runtime {runtime:.2f}s (<5s)",
    )


# 3 ---------------------------------------------------------------------------

def test_sign_property():
    worst_up = 0.0
    worst_down = 0.0
    for name in ("input1", "input2"):
        rec = run_scenario(bundled_scenarios()[name]).record
        motion = rec.column("motion")
        theta_eq = rec.column("theta_eq")
        same_segment = motion[1:] == motion[:-1]
        diffs = np.diff(theta_eq)
        flex = (motion[1:] == "flexion") & same_segment
        ext = (motion[1:] == "extension") & same_segment
        if flex.any():
            worst_up = max(worst_up, float(np.max(diffs[flex])))
        if ext.any():
            worst_down = max(worst_down, float(-np.min(diffs[ext])))
    ok = worst_up <= 0.0 and worst_down <= 0.0
    _verdict(
        "sign-property",
        ok,
        f"flexion max increase {worst_up:.2e} (<=0), "
        f"extension max decrease {worst_down:.2e} (<=0)",
    )


# 4 ---------------------------------------------------------------------------

def test_baseline_defect_reproduction():
    summary = run_scenario(bundled_scenarios()["task1"]).summary
    proposed = summary["rmse"]["proposed"]["relaxation"]
    impedance = summary["rmse"]["impedance"]["relaxation"]
    ok = proposed < 0.01 and impedance >= 10.0 * proposed
    _verdict(
        "baseline-defect",
        ok,
        f"proposed relaxation RMSE {proposed:.2e} (<0.01), "
        f"impedance {impedance:.3f} (>= 10x)",
    )


# 5 ---------------------------------------------------------------------------

def test_proportional_saturation():
    rec = run_scenario(bundled_scenarios()["task2"]).record
    angles = rec.column("theta_proportional")
    hit_min = np.any(angles == -math.pi / 2)
    hit_max = np.any(angles == 7 * math.pi / 18)
    ok = bool(hit_min and hit_max)
    _verdict(
        "proportional-saturation",
        ok,
        f"bit-exact -pi/2 hit: {bool(hit_min)}, bit-exact 7pi/18 hit: {bool(hit_max)}",
    )


# 6 ---------------------------------------------------------------------------

def test_steady_state_oracle():
    worst = 0.0
    ticks_10s = round(10.0 / CONTROL_TICK)
    for preset_name in ("wrist", "finger"):
        params = preset(preset_name)[0]
        for alpha in (0.1, 0.5, 0.9):
            for direction in (Direction.FLEXION, Direction.EXTENSION):
                ceiling = (
                    params.tau_max_flex
                    if direction is Direction.FLEXION
                    else params.tau_max_ext
                )
                analytic = direction.sign * alpha * ceiling / stiffness(params, alpha)

                # ungated baseline pinned at the constant level
                baseline = ImpedanceBaseline(params)
                act = MuscleActivation(
                    alpha if direction is Direction.FLEXION else 0.0,
                    alpha if direction is Direction.EXTENSION else 0.0,
                    direction,
                )
                for _ in range(ticks_10s):
                    state = baseline.step(act)
                worst = max(worst, abs(state.theta - analytic))

                # gated controller ramped to the level, then held there.
                # the onset is smooth (zero initial slope): the first tick's
                # level anchors the segment's torque balance, so a blunt
                # linear ramp start would leave a small constant offset of
                # ceiling * (1-alpha) * alpha_first / K in the held angle
                ctl = JointController(params)
                ramp_ticks = 200
                for k in range(1, ticks_10s + 1):
                    level = alpha * min(k / ramp_ticks, 1.0) ** 2
                    ramped = MuscleActivation(
                        level if direction is Direction.FLEXION else 0.0,
                        level if direction is Direction.EXTENSION else 0.0,
                        direction,
                    )
                    result = ctl.step(ramped)
                worst = max(worst, abs(result.joint.theta - analytic))
    ok = worst < 1e-3
    _verdict(
        "steady-state-oracle",
        ok,
        f"worst |theta(10s) - analytic| {worst:.2e} over both presets, "
        f"alpha in {{0.1,0.5,0.9}}, both directions, baseline and gated paths (<1e-3)",
    )


# 7 ---------------------------------------------------------------------------

def test_integrator_convergence():
    def final_theta(substep: float) -> float:
        ctl = JointController(preset("wrist")[0], CONTROL_TICK, substep)
        n = round(30.0 / CONTROL_TICK)
        for k in range(n):
            act = scripted_activation("input1", k * CONTROL_TICK)
            result = ctl.step(act)
        return result.joint.theta

    coarse = final_theta(INTEGRATION_STEP)
    fine = final_theta(INTEGRATION_STEP / 2.0)
    delta = abs(coarse - fine)
    ok = delta < 1e-5
    _verdict(
        "integrator-convergence",
        ok,
        f"|theta_final(h) - theta_final(h/2)| = {delta:.2e} over 30 s (<1e-5)",
    )


# 8 ---------------------------------------------------------------------------

def test_filter_oracle():
    b, a = butterworth_lowpass_coefficients(500.0, 8.0)

    def analytic_gain(freq: float) -> float:
        z = np.exp(2j * np.pi * freq / 500.0)
        return abs((b[0] + b[1] / z + b[2] / z**2) / (1 + a[1] / z + a[2] / z**2))

    measured = {}
    for freq in (1.0, 50.0):
        filt = LowpassFilter(500.0, 8.0, channels=1)
        t = np.arange(0, 6.0, 1 / 500.0)
        out = filt.process_block(np.sin(2 * np.pi * freq * t)[:, None])
        measured[freq] = float(np.max(np.abs(out[len(out) // 2:, 0])))
    ok = (
        measured[50.0] < 0.04
        and measured[1.0] > 0.97
        and abs(measured[50.0] - analytic_gain(50.0)) < 1e-3
        and abs(measured[1.0] - analytic_gain(1.0)) < 1e-3
    )
    _verdict(
        "filter-oracle",
        ok,
        f"50 Hz amplitude {measured[50.0]:.4f} (<0.04), 1 Hz {measured[1.0]:.4f} "
        f"(>0.97), both within 1e-3 of the transfer function",
    )


# 9 ---------------------------------------------------------------------------

def test_determinism():
    all_same = True
    details = []
    for name, scenario in bundled_scenarios().items():
        first = run_scenario(scenario).record.to_csv_text()
        second = run_scenario(scenario).record.to_csv_text()
        same = first == second
        all_same &= same
        details.append(f"{name}: {'identical' if same else 'DIFFERS'}")
    _verdict("determinism", all_same, "; ".join(details))


# 10 --------------------------------------------------------------------------

def test_live_offline_equivalence():
    from myohold.server import SimSession

    session = SimSession("wrist")
    offline = JointController(preset("wrist")[0], CONTROL_TICK)
    # scripted command schedule: ramped slider moves with holds and releases
    schedule = {}
    for k in range(0, 300):
        schedule[k] = (min(k / 300.0, 0.8), 0.0)
    for k in range(400, 600):
        schedule[k] = (0.0, min((k - 400) / 250.0, 0.6))
    worst = 0.0
    for k in range(800):
        if k in schedule:
            flex, ext = schedule[k]
            session.apply(
                {"kind": "set_activation", "alpha_flex": flex, "alpha_ext": ext}
            )
        message = session.advance()
        act = MuscleActivation(
            message["alpha_flex"],
            message["alpha_ext"],
            Direction.from_label(message["motion"]),
        )
        result = offline.step(act)
        worst = max(worst, abs(result.joint.theta - message["theta"][0]))
    ok = worst < 1e-9
    _verdict(
        "live-offline-equivalence",
        ok,
        f"worst per-tick |theta difference| {worst:.2e} over 800 ticks (<1e-9)",
    )
