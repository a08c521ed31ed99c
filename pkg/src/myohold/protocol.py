"""Wire protocol of the live simulation service.

Messages are single JSON objects, one per WebSocket text frame.  Every
message carries ``kind`` and a protocol version ``v``.  Clients open with
a ``hello``; the server answers with ``welcome`` (or ``rejected`` on a
version mismatch) and then streams one ``telemetry`` message per control
tick.  Command messages may carry a client-side monotone ``sequence``
number, echoed in rejections so a client can match failures to sends.

All numbers are SI units (seconds, radians, newton-meters); contraction
levels are dimensionless in [0, 1].
"""

from __future__ import annotations

import json
from typing import Any

PROTOCOL_VERSION = 1

COMMAND_KINDS = (
    "hello",
    "set_activation",
    "set_motion",
    "load_preset",
    "start_scenario",
    "pause",
    "reset",
)

MOTION_LABELS = ("flexion", "extension", "none")


class ProtocolError(ValueError):
    """A message violated the wire protocol; ``reason`` is client-safe."""

    def __init__(self, reason: str, sequence: int | None = None) -> None:
        super().__init__(reason)
        self.reason = reason
        self.sequence = sequence


def encode(message: dict) -> str:
    """Serialize a message to a single-line JSON text frame."""
    return json.dumps(message, separators=(",", ":"), sort_keys=True, allow_nan=False)


def decode(text: str | bytes) -> dict:
    """Parse a text frame into a message dict; ProtocolError when invalid."""
    try:
        message = json.loads(text)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ProtocolError(f"not valid JSON: {exc}") from exc
    if not isinstance(message, dict):
        raise ProtocolError("message must be a JSON object")
    return message


def _require_number(message: dict, key: str, lo: float | None = None, hi: float | None = None) -> float:
    value = message.get(key)
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise ProtocolError(f"field {key!r} must be a number", message.get("sequence"))
    value = float(value)
    if value != value:
        raise ProtocolError(f"field {key!r} must not be NaN", message.get("sequence"))
    if lo is not None and value < lo or hi is not None and value > hi:
        raise ProtocolError(
            f"field {key!r} must lie in [{lo}, {hi}], got {value}", message.get("sequence")
        )
    return value


def parse_command(text_or_message: str | bytes | dict) -> dict:
    """Validate an inbound client message and return its canonical form.

    Raises ProtocolError with a client-reportable reason on any violation:
    unknown kind, missing or out-of-range fields, wrong types.
    """
    message = text_or_message if isinstance(text_or_message, dict) else decode(text_or_message)
    kind = message.get("kind")
    sequence = message.get("sequence")
    if sequence is not None and (not isinstance(sequence, int) or isinstance(sequence, bool)):
        raise ProtocolError("field 'sequence' must be an integer")
    if kind not in COMMAND_KINDS:
        raise ProtocolError(f"unknown command kind {kind!r}", sequence)

    command: dict[str, Any] = {"kind": kind}
    if sequence is not None:
        command["sequence"] = sequence
    if "timestamp" in message:
        command["timestamp"] = _require_number(message, "timestamp")

    if kind == "hello":
        version = message.get("protocol_version")
        if not isinstance(version, int) or isinstance(version, bool):
            raise ProtocolError("hello must carry an integer 'protocol_version'", sequence)
        command["protocol_version"] = version
    elif kind == "set_activation":
        command["alpha_flex"] = _require_number(message, "alpha_flex", 0.0, 1.0)
        command["alpha_ext"] = _require_number(message, "alpha_ext", 0.0, 1.0)
    elif kind == "set_motion":
        motion = message.get("motion")
        if motion is not None and motion not in MOTION_LABELS:
            raise ProtocolError(
                f"field 'motion' must be one of {MOTION_LABELS} or null", sequence
            )
        command["motion"] = motion
    elif kind in ("load_preset", "start_scenario"):
        name = message.get("name")
        if not isinstance(name, str) or not name:
            raise ProtocolError(f"{kind} must carry a non-empty string 'name'", sequence)
        command["name"] = name
    elif kind == "pause":
        paused = message.get("paused", True)
        if not isinstance(paused, bool):
            raise ProtocolError("field 'paused' must be a boolean", sequence)
        command["paused"] = paused
    # reset carries no payload
    return command


def welcome_message(
    role: str,
    joint_count: int,
    tick: float,
    presets: list[str],
    scenarios: list[str],
) -> dict:
    return {
        "kind": "welcome",
        "v": PROTOCOL_VERSION,
        "protocol_version": PROTOCOL_VERSION,
        "role": role,
        "joint_count": joint_count,
        "tick": tick,
        "presets": presets,
        "scenarios": scenarios,
    }


def rejection_message(reason: str, sequence: int | None = None) -> dict:
    message = {"kind": "rejected", "v": PROTOCOL_VERSION, "reason": reason}
    if sequence is not None:
        message["sequence"] = sequence
    return message


def version_mismatch_message(got: int) -> dict:
    return rejection_message(
        f"unsupported protocol version {got}; supported versions: "
        f"{PROTOCOL_VERSION} through {PROTOCOL_VERSION}"
    )


def telemetry_message(
    tick_index: int,
    t: float,
    theta: list[float],
    theta_eq: list[float],
    theta0: list[float],
    gate: list[int],
    motion: str,
    alpha_flex: float,
    alpha_ext: float,
    tau_flex: list[float],
    tau_ext: list[float],
    overrun: bool,
) -> dict:
    return {
        "kind": "telemetry",
        "v": PROTOCOL_VERSION,
        "tick_index": tick_index,
        "t": t,
        "theta": theta,
        "theta_eq": theta_eq,
        "theta0": theta0,
        "gate": gate,
        "motion": motion,
        "alpha_flex": alpha_flex,
        "alpha_ext": alpha_ext,
        "tau_flex": tau_flex,
        "tau_ext": tau_ext,
        "overrun": overrun,
    }
