"""myohold: myoelectric joint control that holds posture through relaxation.

A joint simulated as a muscle-driven impedance (inertia, contraction-
dependent viscosity and stiffness) whose commanded equilibrium angle is
gated by the muscle contraction level: torque flows only while contraction
exceeds its running maximum for the current motion, and the equilibrium is
frozen otherwise.  Relaxing the muscles therefore leaves the joint where
it was instead of springing back, and switching motion direction picks up
continuously from the held posture.

The package bundles the signal pipeline that turns raw envelope channels
into classified activation, two baseline controllers for comparison, a
deterministic scenario harness with CSV/JSON export, and a live WebSocket
simulation server (see myohold.server and the `myohold` CLI).
"""

from .baselines import (
    ImpedanceBaseline,
    ProportionalBaseline,
    ProportionalConfig,
    proportional_angle,
    rmse,
)
from .dynamics import (
    CONTROL_TICK,
    INTEGRATION_STEP,
    LEVEL_CAP,
    ControllerState,
    Direction,
    IntegrationDiverged,
    JointController,
    JointState,
    MuscleActivation,
    TickResult,
    TorqueCommand,
    capture_switch,
    compute_theta0,
    compute_torques,
    control_tick,
    equilibrium_angle,
    evaluate_gate,
    integrate_tick,
    step,
    stiffness,
    tick,
    update_threshold,
    viscosity,
)
from .params import (
    PRESET_NAMES,
    ImpedanceParams,
    joints_from_dict,
    joints_to_dict,
    load_joints,
    preset,
    save_joints,
)
from .scenarios import (
    RECORD_COLUMNS,
    Scenario,
    ScenarioRecord,
    ScenarioResult,
    ServoConfig,
    ServoPlant,
    SynthConfig,
    TaskPhase,
    TaskProfile,
    bundled_scenarios,
    calibrate_from_trace,
    calibration_protocol_windows,
    classify_levels,
    gen_input1,
    gen_input2,
    load_trace,
    plan_efforts,
    run_scenario,
    save_trace,
    scripted_activation,
    synth_calibration_trace,
    synth_emg,
    task_profile,
    window_mask,
)
from .signals import (
    CalibrationProfile,
    EmgFrame,
    EmgProcessor,
    LowpassFilter,
    ProcessedFrame,
    TemplateClassifier,
    classify_frame,
    contraction_level,
    default_calibration,
    emg_pattern,
    force_information,
    normalize,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
