"""Impedance joint dynamics with a contraction-gated, held equilibrium.

The joint obeys a second-order impedance law

    I * dd(theta) + B(a) * d(theta) + K(a) * (theta - theta0) = tau_net

where the contraction level ``a`` of the currently classified motion sets
both the viscosity B and the stiffness K, and ``tau_net`` is the difference
of extensor and flexor tendon torques.  Angles follow the convention that
extension rotates positive and flexion negative.

What makes the controller hold posture is the gating rule.  Tendon torque
is produced only while the contraction level exceeds its own running
maximum over the current classification segment; as soon as the user backs
off (or plateaus), the gate closes and the commanded equilibrium angle
freezes at its last value instead of decaying back to zero.  A switch to
the opposite motion re-anchors the torque balance at the held angle, so the
posture moves continuously from wherever it was held.

The integration step is classical fixed-step Runge-Kutta 4 with the
contraction level held constant within a control tick.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

from .params import ImpedanceParams

# Contraction levels are capped strictly below 1: the antagonist scaling
# term divides by (1 - level) at the moment a switch is captured.
LEVEL_CAP = 0.999

# Default control tick and integrator substep, seconds.
CONTROL_TICK = 0.005
INTEGRATION_STEP = 0.001


class IntegrationDiverged(RuntimeError):
    """Integration produced a non-finite joint state."""


class Direction(enum.Enum):
    """Classified motion of the joint's muscle pair."""

    FLEXION = "flexion"
    EXTENSION = "extension"
    NONE = "none"

    @property
    def sign(self) -> float:
        """Rotation sense on the joint axis: flexion -1, extension +1."""
        if self is Direction.FLEXION:
            return -1.0
        if self is Direction.EXTENSION:
            return 1.0
        return 0.0

    @classmethod
    def from_label(cls, label: str) -> "Direction":
        for member in cls:
            if member.value == label:
                return member
        raise ValueError(f"unknown motion label {label!r}")


def _check_level(alpha: float, name: str = "contraction level") -> float:
    if not 0.0 <= alpha <= 1.0 or math.isnan(alpha):
        raise ValueError(f"{name} must lie in [0, 1], got {alpha}")
    return min(alpha, LEVEL_CAP)


def stiffness(params: ImpedanceParams, alpha: float) -> float:
    """Joint stiffness K(alpha) = k1 * alpha**k2 + k3, in N*m/rad."""
    alpha = _check_level(alpha)
    return params.k1 * alpha**params.k2 + params.k3


def viscosity(params: ImpedanceParams, alpha: float) -> float:
    """Joint viscosity B(alpha) = b1 * alpha**b2 + b3, in N*m*s/rad."""
    alpha = _check_level(alpha)
    return params.b1 * alpha**params.b2 + params.b3


def equilibrium_angle(
    params: ImpedanceParams,
    alpha: float,
    tau_flex: float,
    tau_ext: float,
    theta0: float,
) -> float:
    """Static rest point of the impedance law for the given torques.

    Solves K(alpha) * (theta - theta0) = tau_ext - tau_flex.  The flexor
    tendon pulls the joint negative, the extensor positive.
    """
    if tau_flex < 0 or tau_ext < 0:
        raise ValueError("tendon torques are magnitudes and must be nonnegative")
    return (tau_ext - tau_flex) / stiffness(params, alpha) + theta0


@dataclass(frozen=True)
class MuscleActivation:
    """One control tick of classified muscle input.

    ``alpha_flex`` and ``alpha_ext`` are the contraction levels of the
    flexor and extensor side in [0, 1] (stored capped at LEVEL_CAP), and
    ``direction`` is the motion the classifier attributed the tick to.
    """

    alpha_flex: float
    alpha_ext: float
    direction: Direction = Direction.NONE

    def __post_init__(self) -> None:
        object.__setattr__(self, "alpha_flex", _check_level(self.alpha_flex, "alpha_flex"))
        object.__setattr__(self, "alpha_ext", _check_level(self.alpha_ext, "alpha_ext"))
        if not isinstance(self.direction, Direction):
            raise ValueError(f"direction must be a Direction, got {self.direction!r}")

    @property
    def level(self) -> float:
        """Contraction level of the classified direction (0 when none)."""
        if self.direction is Direction.FLEXION:
            return self.alpha_flex
        if self.direction is Direction.EXTENSION:
            return self.alpha_ext
        return 0.0


@dataclass(frozen=True)
class JointState:
    """Mechanical state of the joint."""

    theta: float = 0.0      # rad
    theta_dot: float = 0.0  # rad/s
    time: float = 0.0       # s


@dataclass(frozen=True)
class TorqueCommand:
    """Nonnegative flexor/extensor tendon torque pair for one tick."""

    tau_flex: float = 0.0
    tau_ext: float = 0.0

    @property
    def net(self) -> float:
        """Signed joint torque, extension positive."""
        return self.tau_ext - self.tau_flex


@dataclass(frozen=True)
class ControllerState:
    """Bookkeeping the gating controller carries between ticks.

    threshold_flex / threshold_ext
        Running maximum of the contraction level over the ticks of the
        current classification segment that precede this one.  Reset to
        zero whenever the classified direction changes.
    direction
        Direction of the current classification segment.
    theta_pre
        Equilibrium angle held at the last tick of the previous motion
        segment, captured when a new motion starts.
    alpha_post
        Contraction level on the first tick of the current motion segment
        (capped at LEVEL_CAP), captured together with theta_pre.
    prev_equilibrium
        Equilibrium angle commanded on the previous tick; reused verbatim
        while the gate is closed, which is what holds posture.
    gate_flex / gate_ext, theta0
        Outputs of the previous tick, kept for inspection and telemetry.
    """

    threshold_flex: float = 0.0
    threshold_ext: float = 0.0
    direction: Direction = Direction.NONE
    theta_pre: float = 0.0
    alpha_post: float = 0.0
    prev_equilibrium: float = 0.0
    gate_flex: int = 0
    gate_ext: int = 0
    theta0: float = 0.0


def evaluate_gate(alpha: float, threshold: float) -> tuple[int, int]:
    """Torque gate: (1, 0) while alpha strictly exceeds its running max.

    Returns (gate_open, gate_closed); the pair always sums to 1.  At a
    plateau or during release alpha <= threshold, the gate closes, and the
    equilibrium angle freezes instead of tracking alpha back down.
    """
    open_ = 1 if alpha - threshold > 0.0 else 0
    return open_, 1 - open_


def update_threshold(state: ControllerState, activation: MuscleActivation) -> ControllerState:
    """Reset the running-max thresholds when the classified motion changes.

    Within a segment the thresholds already hold the maximum over prior
    ticks (folding in the current tick happens after gate evaluation), so
    no other change is needed here.
    """
    if activation.direction is not state.direction:
        return replace(state, threshold_flex=0.0, threshold_ext=0.0)
    return state


def capture_switch(
    state: ControllerState,
    new_direction: Direction,
    held_equilibrium: float,
    first_level: float,
) -> ControllerState:
    """Anchor a new motion segment at the posture held when it began.

    ``held_equilibrium`` is the equilibrium angle of the last tick before
    the switch and ``first_level`` the contraction level on the first tick
    of the new motion.  Both are stored so the torque balance of the new
    segment starts exactly at the held angle and evolves continuously from
    it.  Switching to no-motion never captures; posture is simply held.
    """
    if new_direction is Direction.NONE:
        raise ValueError("no-motion is not captured; it holds the current posture")
    return replace(
        state,
        direction=new_direction,
        theta_pre=held_equilibrium,
        alpha_post=_check_level(first_level, "first_level"),
        threshold_flex=0.0,
        threshold_ext=0.0,
    )


def compute_torques(
    activation: MuscleActivation,
    state: ControllerState,
    params: ImpedanceParams,
) -> TorqueCommand:
    """Gated tendon torque pair for the current tick.

    While the gate of the active direction is open, the agonist tendon
    produces torque proportional to the current contraction level, and the
    antagonist produces the residual share

        (1 - alpha) / (1 - alpha_post) * alpha_post

    of the same torque ceiling.  The residual equals alpha_post on the
    first tick of the segment (so the net torque starts at zero relative
    to the anchored balance) and shrinks to zero as the contraction level
    approaches full, handing the whole ceiling to the agonist.  With the
    gate closed both tendons are slack and posture is held by theta0.
    """
    direction = activation.direction
    if direction is Direction.NONE:
        return TorqueCommand(0.0, 0.0)
    alpha = activation.level
    residual = (1.0 - alpha) / (1.0 - state.alpha_post) * state.alpha_post
    if direction is Direction.FLEXION:
        gate = state.gate_flex
        ceiling = params.tau_max_flex
        return TorqueCommand(gate * ceiling * alpha, gate * ceiling * residual)
    gate = state.gate_ext
    ceiling = params.tau_max_ext
    return TorqueCommand(gate * ceiling * residual, gate * ceiling * alpha)


def compute_theta0(
    activation: MuscleActivation,
    state: ControllerState,
    params: ImpedanceParams,
) -> float:
    """Equilibrium offset term of the impedance law for this tick.

    Gate open: the held pre-switch angle enters the torque balance scaled
    by the stiffness ratio K(alpha_post) / K(alpha) and by the antagonist
    residual factor, so the balance is exact at the first tick of the
    segment and fades as contraction deepens.  Gate closed (including
    no-motion): the previous equilibrium is reused unchanged, the hold.
    """
    direction = activation.direction
    if direction is Direction.NONE:
        return state.prev_equilibrium
    gate = state.gate_flex if direction is Direction.FLEXION else state.gate_ext
    if not gate:
        return state.prev_equilibrium
    alpha = activation.level
    fade = (1.0 - alpha) / (1.0 - state.alpha_post)
    ratio = stiffness(params, state.alpha_post) / stiffness(params, alpha)
    return ratio * fade * state.theta_pre


def integrate_tick(
    joint: JointState,
    params: ImpedanceParams,
    alpha: float,
    tau_net: float,
    theta0: float,
    dt: float = CONTROL_TICK,
    substep: float = INTEGRATION_STEP,
) -> JointState:
    """Advance the joint one control tick with RK4 at fixed substeps.

    The contraction level (hence B and K), net torque and theta0 are held
    constant across the tick.  Raises IntegrationDiverged if the state
    leaves the finite range.
    """
    if dt <= 0 or substep <= 0:
        raise ValueError("dt and substep must be positive")
    damping = viscosity(params, alpha)
    stiff = stiffness(params, alpha)
    inertia = params.inertia
    n = max(1, round(dt / substep))
    h = dt / n
    theta, omega = joint.theta, joint.theta_dot

    def accel(th: float, om: float) -> float:
        return (tau_net - damping * om - stiff * (th - theta0)) / inertia

    for _ in range(n):
        k1t = omega
        k1o = accel(theta, omega)
        k2t = omega + 0.5 * h * k1o
        k2o = accel(theta + 0.5 * h * k1t, omega + 0.5 * h * k1o)
        k3t = omega + 0.5 * h * k2o
        k3o = accel(theta + 0.5 * h * k2t, omega + 0.5 * h * k2o)
        k4t = omega + h * k3o
        k4o = accel(theta + h * k3t, omega + h * k3o)
        theta += h / 6.0 * (k1t + 2.0 * k2t + 2.0 * k3t + k4t)
        omega += h / 6.0 * (k1o + 2.0 * k2o + 2.0 * k3o + k4o)
    if not (math.isfinite(theta) and math.isfinite(omega)):
        raise IntegrationDiverged(
            f"joint state diverged at t={joint.time + dt:.3f}s (theta={theta}, omega={omega})"
        )
    return JointState(theta=theta, theta_dot=omega, time=joint.time + dt)


@dataclass(frozen=True)
class TickResult:
    """Everything one control tick produced, for recording and telemetry."""

    joint: JointState
    controller: ControllerState
    torque: TorqueCommand
    theta0: float
    theta_eq: float
    gate: int


def control_tick(
    state: ControllerState,
    activation: MuscleActivation,
    params: ImpedanceParams,
) -> tuple[ControllerState, TorqueCommand, float, float]:
    """Control-law half of a tick: everything except mechanical integration.

    Order of operations: segment-change bookkeeping (threshold reset and
    switch capture), gate evaluation against the running maximum over the
    segment's prior ticks, torque and theta0 computation, equilibrium
    angle, and finally folding the current level into the running maximum.
    Returns (state, torque, theta0, theta_eq).  The control path never
    reads the mechanical joint state, so commanded equilibria can be
    computed without integrating the plant.
    """
    state = update_threshold(state, activation)
    direction = activation.direction
    if direction is not state.direction:
        if direction is Direction.NONE:
            state = replace(state, direction=Direction.NONE)
        else:
            state = capture_switch(state, direction, state.prev_equilibrium, activation.level)

    if direction is Direction.FLEXION:
        gate_flex, _ = evaluate_gate(activation.alpha_flex, state.threshold_flex)
        gate_ext = 0
    elif direction is Direction.EXTENSION:
        gate_ext, _ = evaluate_gate(activation.alpha_ext, state.threshold_ext)
        gate_flex = 0
    else:
        gate_flex = gate_ext = 0
    state = replace(state, gate_flex=gate_flex, gate_ext=gate_ext)

    torque = compute_torques(activation, state, params)
    theta0 = compute_theta0(activation, state, params)
    theta_eq = equilibrium_angle(params, activation.level, torque.tau_flex, torque.tau_ext, theta0)

    if direction is Direction.FLEXION:
        state = replace(state, threshold_flex=max(state.threshold_flex, activation.alpha_flex))
    elif direction is Direction.EXTENSION:
        state = replace(state, threshold_ext=max(state.threshold_ext, activation.alpha_ext))
    state = replace(state, prev_equilibrium=theta_eq, theta0=theta0)
    return state, torque, theta0, theta_eq


def tick(
    joint: JointState,
    state: ControllerState,
    activation: MuscleActivation,
    params: ImpedanceParams,
    dt: float = CONTROL_TICK,
    substep: float = INTEGRATION_STEP,
) -> TickResult:
    """Run one full control tick: control law plus mechanical integration."""
    new_state, torque, theta0, theta_eq = control_tick(state, activation, params)
    joint = integrate_tick(joint, params, activation.level, torque.net, theta0, dt, substep)
    gate = new_state.gate_flex if activation.direction is Direction.FLEXION else new_state.gate_ext
    return TickResult(
        joint=joint,
        controller=new_state,
        torque=torque,
        theta0=theta0,
        theta_eq=theta_eq,
        gate=gate,
    )


def step(
    joint: JointState,
    state: ControllerState,
    activation: MuscleActivation,
    params: ImpedanceParams,
    dt: float = CONTROL_TICK,
    substep: float = INTEGRATION_STEP,
) -> tuple[JointState, ControllerState]:
    """One control tick; returns only the advanced states."""
    result = tick(joint, state, activation, params, dt, substep)
    return result.joint, result.controller


class JointController:
    """Stateful wrapper advancing one joint tick by tick."""

    def __init__(
        self,
        params: ImpedanceParams,
        dt: float = CONTROL_TICK,
        substep: float = INTEGRATION_STEP,
    ) -> None:
        if dt <= 0 or substep <= 0:
            raise ValueError("dt and substep must be positive")
        self.params = params
        self.dt = dt
        self.substep = substep
        self.joint = JointState()
        self.state = ControllerState()

    def reset(self) -> None:
        self.joint = JointState()
        self.state = ControllerState()

    def step(self, activation: MuscleActivation) -> TickResult:
        result = tick(self.joint, self.state, activation, self.params, self.dt, self.substep)
        self.joint = result.joint
        self.state = result.controller
        return result
