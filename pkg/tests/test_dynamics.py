"""Core control law: impedance curves, gating, switch algebra, integration."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from myohold import (
    CONTROL_TICK,
    INTEGRATION_STEP,
    LEVEL_CAP,
    Direction,
    IntegrationDiverged,
    JointController,
    JointState,
    MuscleActivation,
    capture_switch,
    compute_theta0,
    compute_torques,
    control_tick,
    equilibrium_angle,
    evaluate_gate,
    integrate_tick,
    stiffness,
    update_threshold,
    viscosity,
)
from myohold.dynamics import ControllerState

levels = st.floats(min_value=0.0, max_value=1.0, allow_nan=False)


# -- impedance curves ---------------------------------------------------

def test_stiffness_oracle(wrist):
    # frozen: 32.8*0.5**0.6 + 3.2 evaluated with an independent calculator
    assert stiffness(wrist, 0.5) == pytest.approx(24.83992973667546, rel=1e-14)
    assert stiffness(wrist, 0.1) == pytest.approx(11.438987495351423, rel=1e-14)
    assert stiffness(wrist, 0.0) == 3.2


def test_full_effort_evaluates_at_cap(wrist):
    # levels are capped just below 1 so the switch blend never divides by 0
    assert stiffness(wrist, 1.0) == stiffness(wrist, LEVEL_CAP)
    assert stiffness(wrist, 1.0) == pytest.approx(32.8 * 0.999**0.6 + 3.2, rel=1e-14)


def test_viscosity_oracle(wrist, finger):
    assert viscosity(wrist, 0.0) == 0.144
    assert viscosity(wrist, 1.0) == pytest.approx(0.14 * 0.999**0.2 + 0.144, rel=1e-14)
    assert viscosity(finger, 0.0) == 0.09


@given(a=levels, b=levels)
def test_impedance_curves_monotone(a, b):
    from myohold import preset

    params = preset("wrist")[0]
    lo, hi = sorted((a, b))
    assert stiffness(params, lo) <= stiffness(params, hi)
    assert viscosity(params, lo) <= viscosity(params, hi)


@given(alpha=levels)
def test_impedance_curves_positive(alpha):
    from myohold import preset

    for name in ("wrist", "finger"):
        params = preset(name)[0]
        assert stiffness(params, alpha) >= params.k3 > 0
        assert viscosity(params, alpha) >= params.b3 > 0


def test_level_outside_unit_interval_rejected(wrist):
    for bad in (-0.01, 1.01, float("nan")):
        with pytest.raises(ValueError):
            stiffness(wrist, bad)


# -- equilibrium --------------------------------------------------------

def test_equilibrium_sign_convention(wrist):
    # extension-positive: flexor torque pulls the angle negative
    assert equilibrium_angle(wrist, 0.5, tau_flex=10.0, tau_ext=0.0, theta0=0.0) < 0
    assert equilibrium_angle(wrist, 0.5, tau_flex=0.0, tau_ext=10.0, theta0=0.0) > 0
    assert equilibrium_angle(wrist, 0.5, 5.0, 5.0, theta0=0.25) == 0.25


def test_equilibrium_steady_state_oracle(wrist, finger):
    # delta*alpha*tau_max / K(alpha), frozen with an independent calculator
    cases = [
        (wrist, 0.1, -0.40318253707980933, 0.38683493637861144),
        (wrist, 0.5, -0.9283440108106487, 0.8907030025665916),
        (wrist, 0.9, -1.2211580943260407, 1.1716445289229684),
        (finger, 0.1, -0.15207108109694442, 0.15207108109694442),
        (finger, 0.5, -0.4475381464376526, 0.4475381464376526),
        (finger, 0.9, -0.6288943661149382, 0.6288943661149382),
    ]
    for params, alpha, flex_expected, ext_expected in cases:
        flex = equilibrium_angle(params, alpha, alpha * params.tau_max_flex, 0.0, 0.0)
        ext = equilibrium_angle(params, alpha, 0.0, alpha * params.tau_max_ext, 0.0)
        assert flex == pytest.approx(flex_expected, rel=1e-13)
        assert ext == pytest.approx(ext_expected, rel=1e-13)


def test_equilibrium_rejects_negative_torque_magnitudes(wrist):
    with pytest.raises(ValueError):
        equilibrium_angle(wrist, 0.5, -1.0, 0.0, 0.0)


# -- activation and state containers ------------------------------------

def test_activation_caps_at_level_cap():
    act = MuscleActivation(1.0, 1.0, Direction.FLEXION)
    assert act.alpha_flex == LEVEL_CAP == 0.999
    assert act.alpha_ext == LEVEL_CAP
    assert act.level == LEVEL_CAP


def test_activation_rejects_bad_levels():
    for bad in (-0.1, 1.5, float("nan")):
        with pytest.raises(ValueError):
            MuscleActivation(bad, 0.0, Direction.NONE)


def test_direction_signs():
    assert Direction.FLEXION.sign == -1
    assert Direction.EXTENSION.sign == 1
    assert Direction.NONE.sign == 0
    assert Direction.from_label("flexion") is Direction.FLEXION


# -- gating -------------------------------------------------------------

def test_gate_is_strictly_greater():
    assert evaluate_gate(0.5, 0.4) == (1, 0)
    assert evaluate_gate(0.5, 0.5) == (0, 1)  # equality keeps the gate shut
    assert evaluate_gate(0.4, 0.5) == (0, 1)


@given(alpha=levels, threshold=levels)
def test_gate_complementary(alpha, threshold):
    open_, closed = evaluate_gate(alpha, threshold)
    assert {open_, closed} <= {0, 1}
    assert open_ + closed == 1
    assert open_ == (1 if alpha > threshold else 0)


def test_threshold_resets_on_direction_change():
    state = ControllerState(threshold_flex=0.7, threshold_ext=0.2, direction=Direction.FLEXION)
    same = update_threshold(state, MuscleActivation(0.5, 0.0, Direction.FLEXION))
    assert same.threshold_flex == 0.7 and same.threshold_ext == 0.2
    changed = update_threshold(state, MuscleActivation(0.0, 0.5, Direction.EXTENSION))
    assert changed.threshold_flex == 0.0 and changed.threshold_ext == 0.0


# -- switch algebra ------------------------------------------------------

def test_capture_switch_records_pre_state():
    state = ControllerState(direction=Direction.NONE, prev_equilibrium=-0.4)
    captured = capture_switch(state, Direction.FLEXION, held_equilibrium=-0.4, first_level=0.5)
    assert captured.direction is Direction.FLEXION
    assert captured.theta_pre == -0.4
    assert captured.alpha_post == 0.5
    assert captured.threshold_flex == 0.0 and captured.threshold_ext == 0.0


def test_capture_switch_caps_first_level():
    state = ControllerState(direction=Direction.NONE)
    captured = capture_switch(state, Direction.EXTENSION, 0.0, first_level=1.0)
    assert captured.alpha_post == LEVEL_CAP


def test_capture_switch_to_none_rejected():
    state = ControllerState(direction=Direction.FLEXION)
    with pytest.raises(ValueError):
        capture_switch(state, Direction.NONE, 0.0, 0.0)


def test_torque_split_oracle(wrist):
    # frozen: 46.12*(0.5 - (0.5/0.9)*0.1), antagonist weighted by the
    # residual of the pre-switch co-activation on the active ceiling
    state = ControllerState(direction=Direction.FLEXION, alpha_post=0.1, gate_flex=1)
    torque = compute_torques(MuscleActivation(0.5, 0.0, Direction.FLEXION), state, wrist)
    assert torque.net == pytest.approx(-20.497777777777774, rel=1e-13)
    assert torque.tau_flex == pytest.approx(0.5 * 46.12, rel=1e-15)
    assert torque.tau_ext == pytest.approx((0.5 / 0.9) * 0.1 * 46.12, rel=1e-13)


def test_torque_zero_when_gate_closed(wrist):
    state = ControllerState(direction=Direction.FLEXION, alpha_post=0.1, gate_flex=0)
    torque = compute_torques(MuscleActivation(0.5, 0.0, Direction.FLEXION), state, wrist)
    assert torque.tau_flex == 0.0 and torque.tau_ext == 0.0


def test_torque_rest_is_zero(wrist):
    state = ControllerState(direction=Direction.NONE)
    torque = compute_torques(MuscleActivation(0.0, 0.0, Direction.NONE), state, wrist)
    assert torque.tau_flex == 0.0 and torque.tau_ext == 0.0 and torque.net == 0.0


def test_theta0_blend_oracle(wrist):
    # frozen: (K(0.1)/K(0.5)) * ((1-0.5)/(1-0.1)) * (-0.3)
    state = ControllerState(
        direction=Direction.FLEXION, alpha_post=0.1, theta_pre=-0.3, gate_flex=1
    )
    act = MuscleActivation(0.5, 0.0, Direction.FLEXION)
    theta0 = compute_theta0(act, state, wrist)
    assert theta0 == pytest.approx(-0.07675134092980195, rel=1e-13)


def test_theta0_holds_when_gate_closed(wrist):
    state = ControllerState(
        direction=Direction.FLEXION, alpha_post=0.1, theta_pre=-0.3,
        gate_flex=0, prev_equilibrium=-0.22,
    )
    act = MuscleActivation(0.5, 0.0, Direction.FLEXION)
    assert compute_theta0(act, state, wrist) == -0.22


def test_first_tick_after_switch_is_continuous(wrist):
    # alpha == alpha_post on the capture tick forces theta_eq == theta_pre
    # exactly, whatever the held posture was
    for held in (-0.73, 0.0, 0.41):
        state = ControllerState(direction=Direction.FLEXION, prev_equilibrium=held)
        state, torque, theta0, theta_eq = control_tick(
            state, MuscleActivation(0.0, 0.62, Direction.EXTENSION), wrist
        )
        assert theta_eq == held  # bit-exact, not approx


@settings(max_examples=200)
@given(level=st.floats(min_value=0.001, max_value=1.0), held=st.floats(-1.5, 1.5))
def test_switch_continuity_property(level, held):
    from myohold import preset

    params = preset("wrist")[0]
    state = ControllerState(direction=Direction.FLEXION, prev_equilibrium=held)
    state, _, _, theta_eq = control_tick(
        state, MuscleActivation(0.0, level, Direction.EXTENSION), params
    )
    assert theta_eq == held


def test_hold_is_bit_exact_through_rest(wrist):
    # drive up, then relax: theta_eq must repeat its held value bit for bit
    state = ControllerState()
    for k in range(1, 101):
        act = MuscleActivation(min(k * 0.005, 0.6), 0.0, Direction.FLEXION)
        state, _, _, theta_eq = control_tick(state, act, wrist)
    held = theta_eq
    assert held < -0.5
    for _ in range(500):
        state, torque, theta0, theta_eq = control_tick(
            state, MuscleActivation(0.0, 0.0, Direction.NONE), wrist
        )
        assert theta_eq == held
        assert theta0 == held
        assert torque.net == 0.0


def test_rising_ramp_keeps_gate_open(wrist):
    state = ControllerState()
    gates = []
    for k in range(1, 50):
        act = MuscleActivation(k * 0.01, 0.0, Direction.FLEXION)
        state, *_ = control_tick(state, act, wrist)
        gates.append(state.gate_flex)
    assert all(g == 1 for g in gates)


def test_plateau_closes_gate(wrist):
    state = ControllerState()
    for k in range(1, 11):
        state, *_ = control_tick(
            state, MuscleActivation(k * 0.05, 0.0, Direction.FLEXION), wrist
        )
    held_after_rise = state.prev_equilibrium
    for _ in range(20):
        state, _, _, theta_eq = control_tick(
            state, MuscleActivation(0.5, 0.0, Direction.FLEXION), wrist
        )
        assert state.gate_flex == 0
        assert theta_eq == held_after_rise


# -- integration ---------------------------------------------------------

def test_integrate_tick_matches_analytic_relaxation(wrist):
    # zero input from a displaced start: linear 2nd-order decay toward 0;
    # compare against the scipy matrix exponential of the same LTI system
    scipy_linalg = pytest.importorskip("scipy.linalg")
    K = stiffness(wrist, 0.0)
    B = viscosity(wrist, 0.0)
    A = np.array([[0.0, 1.0], [-K / wrist.inertia, -B / wrist.inertia]])
    state = JointState(theta=0.5, theta_dot=0.0, time=0.0)
    x = np.array([0.5, 0.0])
    for _ in range(200):
        state = integrate_tick(
            state, wrist, alpha=0.0, tau_net=0.0, theta0=0.0,
            dt=CONTROL_TICK, substep=INTEGRATION_STEP,
        )
        x = scipy_linalg.expm(A * CONTROL_TICK) @ x
    assert state.theta == pytest.approx(x[0], abs=1e-9)
    assert state.theta_dot == pytest.approx(x[1], abs=1e-8)
    assert state.time == pytest.approx(1.0)


def test_integrate_tick_convergence_order(wrist):
    # RK4: halving the substep shrinks the error by roughly 2**4
    def final_theta(substep):
        state = JointState(0.4, 0.0, 0.0)
        for _ in range(100):
            state = integrate_tick(state, wrist, 0.3, -2.0, 0.0, CONTROL_TICK, substep)
        return state.theta

    ref = final_theta(0.00003125)
    err1 = abs(final_theta(0.0005) - ref)
    err2 = abs(final_theta(0.00025) - ref)
    assert err2 < err1
    assert err1 / max(err2, 1e-18) > 8  # fourth order would give ~16


def test_integration_divergence_detected(wrist):
    state = JointState(1e300, 0.0, 0.0)
    with pytest.raises(IntegrationDiverged):
        for _ in range(1000):
            state = integrate_tick(state, wrist, 0.9, 1e305, 0.0, 1.0, 0.5)


@settings(max_examples=50, deadline=None)
@given(alpha=levels, theta0=st.floats(-1.0, 1.0))
def test_fixed_input_never_diverges(alpha, theta0):
    # stability: any constant drive settles toward its equilibrium
    from myohold import preset

    params = preset("wrist")[0]
    tau = alpha * params.tau_max_flex * -1.0
    state = JointState(0.0, 0.0, 0.0)
    bound = abs(equilibrium_angle(params, alpha, -tau, 0.0, theta0)) + abs(theta0) + 1.0
    for _ in range(500):
        state = integrate_tick(state, params, alpha, tau, theta0, CONTROL_TICK, INTEGRATION_STEP)
        assert abs(state.theta) < bound + 1.0
    assert np.isfinite(state.theta)


# -- stateful wrapper ----------------------------------------------------

def test_controller_tick_count_and_reset(wrist):
    ctl = JointController(wrist, CONTROL_TICK)
    for k in range(10):
        result = ctl.step(MuscleActivation(0.1, 0.0, Direction.FLEXION))
    assert ctl.joint.time == pytest.approx(10 * CONTROL_TICK)
    assert result.joint.time == ctl.joint.time
    ctl.reset()
    assert ctl.joint.time == 0.0
    assert ctl.joint.theta == 0.0
    assert ctl.state.direction is Direction.NONE


def test_step_results_expose_full_tick(wrist):
    ctl = JointController(wrist, CONTROL_TICK)
    first = ctl.step(MuscleActivation(0.3, 0.0, Direction.FLEXION))
    # capture tick: the new segment is anchored, net torque starts at zero
    assert first.gate == 1
    assert first.torque.net == 0.0
    assert first.theta_eq == 0.0
    result = ctl.step(MuscleActivation(0.35, 0.0, Direction.FLEXION))
    assert result.gate == 1
    assert result.torque.net < 0
    assert result.theta_eq == result.controller.prev_equilibrium
