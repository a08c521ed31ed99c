"""Baseline controllers: plain impedance, proportional map, RMSE metric."""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from myohold import (
    CONTROL_TICK,
    Direction,
    ImpedanceBaseline,
    MuscleActivation,
    ProportionalBaseline,
    ProportionalConfig,
    proportional_angle,
    rmse,
)

MIN_ANGLE = -math.pi / 2
MAX_ANGLE = 7 * math.pi / 18


# -- plain impedance baseline ----------------------------------------------

def test_impedance_baseline_tracks_activation(wrist):
    ctl = ImpedanceBaseline(wrist)
    act = MuscleActivation(0.5, 0.0, Direction.FLEXION)
    for _ in range(2000):
        state = ctl.step(act)
    expected = -0.5 * wrist.tau_max_flex / (32.8 * 0.5**0.6 + 3.2)
    assert state.theta == pytest.approx(expected, abs=1e-6)


def test_impedance_baseline_cannot_hold(wrist):
    # the defining defect: posture decays to zero once the effort stops
    ctl = ImpedanceBaseline(wrist)
    for _ in range(2000):
        ctl.step(MuscleActivation(0.5, 0.0, Direction.FLEXION))
    held = ctl.joint.theta
    assert held < -0.9
    rest = MuscleActivation(0.0, 0.0, Direction.NONE)
    magnitudes = np.array([abs(ctl.step(rest).theta) for _ in range(3000)])
    assert magnitudes[-1] < 1e-4
    # the relaxed joint is underdamped, so |theta| rings; the envelope of
    # successive oscillation peaks must still decay monotonically
    interior = (magnitudes[1:-1] > magnitudes[:-2]) & (magnitudes[1:-1] > magnitudes[2:])
    peaks = magnitudes[1:-1][interior]
    assert len(peaks) > 3
    assert np.all(np.diff(peaks) < 0)


def test_impedance_baseline_torques_ungated(wrist):
    ctl = ImpedanceBaseline(wrist)
    torque = ctl.torques(MuscleActivation(0.3, 0.2, Direction.FLEXION))
    assert torque.tau_flex == pytest.approx(0.3 * wrist.tau_max_flex)
    assert torque.tau_ext == pytest.approx(0.2 * wrist.tau_max_ext)


# -- proportional baseline ----------------------------------------------------

def test_proportional_hits_stops_exactly():
    config = ProportionalConfig()
    # full-scale level 0.4 maps to the hard stops bit for bit
    at_min = proportional_angle(MuscleActivation(0.4, 0.0, Direction.FLEXION), config)
    at_max = proportional_angle(MuscleActivation(0.0, 0.4, Direction.EXTENSION), config)
    assert at_min == MIN_ANGLE
    assert at_max == MAX_ANGLE
    # beyond full scale the stops clamp
    past = proportional_angle(MuscleActivation(0.9, 0.0, Direction.FLEXION), config)
    assert past == MIN_ANGLE


def test_proportional_is_memoryless_by_default():
    ctl = ProportionalBaseline()
    ctl.step(MuscleActivation(0.4, 0.0, Direction.FLEXION))
    angle = ctl.step(MuscleActivation(0.0, 0.0, Direction.NONE))
    assert angle == 0.0  # posture lost the moment the muscles relax


def test_proportional_rate_limit_slews():
    config = ProportionalConfig(rate_limit=1.0)
    ctl = ProportionalBaseline(config, dt=CONTROL_TICK)
    angle = ctl.step(MuscleActivation(0.4, 0.0, Direction.FLEXION))
    assert angle == pytest.approx(-1.0 * CONTROL_TICK)
    for _ in range(2000):
        angle = ctl.step(MuscleActivation(0.4, 0.0, Direction.FLEXION))
    assert angle == pytest.approx(MIN_ANGLE, abs=1e-9)


@given(
    flex=st.floats(0.0, 1.0),
    ext=st.floats(0.0, 1.0),
    direction=st.sampled_from([Direction.FLEXION, Direction.EXTENSION, Direction.NONE]),
)
def test_proportional_angle_stays_in_stops(flex, ext, direction):
    config = ProportionalConfig()
    angle = proportional_angle(MuscleActivation(flex, ext, direction), config)
    assert MIN_ANGLE <= angle <= MAX_ANGLE
    if direction is Direction.NONE:
        assert angle == 0.0


def test_proportional_config_validation():
    with pytest.raises(ValueError):
        ProportionalConfig(min_angle=1.0, max_angle=-1.0)
    with pytest.raises(ValueError):
        ProportionalConfig(gain_flex=0.0)
    with pytest.raises(ValueError):
        ProportionalConfig(rate_limit=-2.0)


# -- metric --------------------------------------------------------------------

def test_rmse_oracle():
    # frozen: sqrt((0.5**2 + 0**2) / 2)
    actual = np.array([0.5, 0.0])
    target = np.array([0.0, 0.0])
    assert rmse(actual, target) == pytest.approx(0.3535533905932738, rel=1e-15)


def test_rmse_zero_on_perfect_match():
    series = np.linspace(-1, 1, 50)
    assert rmse(series, series) == 0.0


def test_rmse_mask_selects_section():
    actual = np.array([1.0, 0.0, 3.0, 0.0])
    target = np.zeros(4)
    mask = np.array([False, True, False, True])
    assert rmse(actual, target, mask) == 0.0


def test_rmse_validates_shapes():
    with pytest.raises(ValueError):
        rmse(np.zeros(3), np.zeros(4))
    with pytest.raises(ValueError):
        rmse(np.zeros(0), np.zeros(0))
    with pytest.raises(ValueError):
        rmse(np.zeros(3), np.zeros(3), np.array([False, False, False]))
