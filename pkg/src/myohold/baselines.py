"""Comparison controllers: ungated impedance and proportional position.

Both consume the same classified activation stream as the gated controller
so runs line up tick for tick.  The ungated impedance baseline applies
tendon torque whenever muscles are active and relaxes back to zero when
they are not; the proportional baseline maps contraction level directly to
a clamped joint angle with no dynamics at all.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import (
    CONTROL_TICK,
    INTEGRATION_STEP,
    Direction,
    JointState,
    MuscleActivation,
    TorqueCommand,
    integrate_tick,
)
from .params import ImpedanceParams

PROPORTIONAL_MIN_ANGLE = -math.pi / 2          # full flexion stop, rad
PROPORTIONAL_MAX_ANGLE = 7.0 * math.pi / 18.0  # full extension stop, rad

# Full deflection is reached at 40% contraction so everyday efforts span
# the whole range and the clamp actually engages at both stops.
PROPORTIONAL_FULL_SCALE_LEVEL = 0.4


class ImpedanceBaseline:
    """Impedance joint with a fixed zero equilibrium and ungated torque.

    Each tick the flexor and extensor tendons pull with their contraction
    level times the torque ceiling, theta0 stays 0, and B and K follow the
    classified direction's level.  Releasing the muscles therefore lets
    the joint decay back to zero: this controller cannot hold a posture.
    """

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

    def reset(self) -> None:
        self.joint = JointState()

    def torques(self, activation: MuscleActivation) -> TorqueCommand:
        return TorqueCommand(
            tau_flex=self.params.tau_max_flex * activation.alpha_flex,
            tau_ext=self.params.tau_max_ext * activation.alpha_ext,
        )

    def step(self, activation: MuscleActivation) -> JointState:
        torque = self.torques(activation)
        self.joint = integrate_tick(
            self.joint,
            self.params,
            activation.level,
            torque.net,
            0.0,
            self.dt,
            self.substep,
        )
        return self.joint


@dataclass(frozen=True)
class ProportionalConfig:
    """Gains and stops of the proportional position map.

    The commanded angle is sign * gain * level clamped to the stops, where
    sign is -1 for flexion and +1 for extension.  An optional rate limit
    (rad/s) turns the otherwise memoryless map into a slewed one.
    """

    gain_flex: float = abs(PROPORTIONAL_MIN_ANGLE) / PROPORTIONAL_FULL_SCALE_LEVEL
    gain_ext: float = PROPORTIONAL_MAX_ANGLE / PROPORTIONAL_FULL_SCALE_LEVEL
    min_angle: float = PROPORTIONAL_MIN_ANGLE
    max_angle: float = PROPORTIONAL_MAX_ANGLE
    rate_limit: float | None = None

    def __post_init__(self) -> None:
        if not self.min_angle < self.max_angle:
            raise ValueError("min_angle must be strictly below max_angle")
        if self.gain_flex <= 0 or self.gain_ext <= 0:
            raise ValueError("gains must be positive")
        if self.rate_limit is not None and self.rate_limit <= 0:
            raise ValueError("rate_limit must be positive when set")


def proportional_angle(activation: MuscleActivation, config: ProportionalConfig) -> float:
    """Memoryless proportional map from activation to joint angle."""
    if activation.direction is Direction.FLEXION:
        raw = -config.gain_flex * activation.alpha_flex
    elif activation.direction is Direction.EXTENSION:
        raw = config.gain_ext * activation.alpha_ext
    else:
        raw = 0.0
    return min(max(raw, config.min_angle), config.max_angle)


class ProportionalBaseline:
    """Proportional position controller, optionally rate limited."""

    def __init__(self, config: ProportionalConfig | None = None, dt: float = CONTROL_TICK) -> None:
        if dt <= 0:
            raise ValueError("dt must be positive")
        self.config = config if config is not None else ProportionalConfig()
        self.dt = dt
        self.angle = 0.0

    def reset(self) -> None:
        self.angle = 0.0

    def step(self, activation: MuscleActivation) -> float:
        target = proportional_angle(activation, self.config)
        if self.config.rate_limit is None:
            self.angle = target
        else:
            max_move = self.config.rate_limit * self.dt
            self.angle += min(max(target - self.angle, -max_move), max_move)
        return self.angle


def rmse(actual, target, mask=None) -> float:
    """Root-mean-square error between two equal-length angle series.

    ``mask`` optionally restricts the comparison to a boolean selection;
    an empty selection or mismatched lengths raise ValueError.
    """
    a = np.asarray(actual, dtype=float)
    b = np.asarray(target, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError("series must be one-dimensional and the same length")
    if mask is not None:
        m = np.asarray(mask, dtype=bool)
        if m.shape != a.shape:
            raise ValueError("mask must match the series length")
        a = a[m]
        b = b[m]
    if a.size == 0:
        raise ValueError("cannot compute RMSE over an empty selection")
    return float(np.sqrt(np.mean((a - b) ** 2)))
