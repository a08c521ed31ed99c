"""Per-joint impedance constants and bundled parameter presets.

A joint is modeled as a second-order rotational system whose viscosity and
stiffness grow with the muscle contraction level.  The constants live in
:class:`ImpedanceParams`; named presets for a wrist, a single finger, and a
five-finger hand ship with the package as JSON files.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from importlib import resources
from pathlib import Path

PRESET_NAMES = ("wrist", "finger", "hand")


@dataclass(frozen=True)
class ImpedanceParams:
    """Constants of one muscle-driven joint.

    Stiffness and viscosity rise with the contraction level ``a`` in [0, 1]:

        K(a) = k1 * a**k2 + k3        [N*m/rad]
        B(a) = b1 * a**b2 + b3        [N*m*s/rad]

    ``tau_max_flex`` and ``tau_max_ext`` convert contraction level into
    tendon torque magnitude for the flexor and extensor side.  ``k3 > 0``
    keeps the joint a damped oscillator even at zero contraction, which the
    equilibrium-angle algebra relies on (it divides by K).
    """

    inertia: float        # kg*m^2
    b1: float             # N*m*s/rad
    b2: float             # dimensionless exponent
    b3: float             # N*m*s/rad
    k1: float             # N*m/rad
    k2: float             # dimensionless exponent
    k3: float             # N*m/rad
    tau_max_flex: float   # N*m
    tau_max_ext: float    # N*m

    def __post_init__(self) -> None:
        if not self.inertia > 0:
            raise ValueError(f"inertia must be positive, got {self.inertia}")
        if self.b1 < 0 or self.b3 < 0 or self.k1 < 0:
            raise ValueError("b1, b3 and k1 must be nonnegative")
        if not self.k3 > 0:
            raise ValueError(f"k3 must be positive, got {self.k3}")
        if not self.b2 > 0 or not self.k2 > 0:
            raise ValueError("exponents b2 and k2 must be positive")
        if not self.tau_max_flex > 0 or not self.tau_max_ext > 0:
            raise ValueError("torque ceilings must be positive")


def joints_to_dict(joints: list[ImpedanceParams]) -> dict:
    """Serializable form of a joint list: ``{"joints": [{...}, ...]}``."""
    return {"joints": [asdict(j) for j in joints]}


def joints_from_dict(payload: dict) -> list[ImpedanceParams]:
    """Parse a ``{"joints": [...]}`` mapping into validated params.

    Raises ValueError on missing keys, extra keys, or invariant violations.
    """
    if not isinstance(payload, dict) or "joints" not in payload:
        raise ValueError('parameter document must be a mapping with a "joints" list')
    entries = payload["joints"]
    if not isinstance(entries, list) or not entries:
        raise ValueError('"joints" must be a non-empty list')
    expected = set(ImpedanceParams.__dataclass_fields__)
    joints = []
    for i, entry in enumerate(entries):
        if not isinstance(entry, dict):
            raise ValueError(f"joint {i} is not a mapping")
        keys = set(entry)
        if keys != expected:
            missing = expected - keys
            extra = keys - expected
            parts = []
            if missing:
                parts.append(f"missing {sorted(missing)}")
            if extra:
                parts.append(f"unexpected {sorted(extra)}")
            raise ValueError(f"joint {i}: " + ", ".join(parts))
        joints.append(ImpedanceParams(**{k: float(v) for k, v in entry.items()}))
    return joints


def load_joints(path: str | Path) -> list[ImpedanceParams]:
    """Load joint parameters from a JSON file."""
    with open(path, "r", encoding="utf-8") as fh:
        return joints_from_dict(json.load(fh))


def save_joints(joints: list[ImpedanceParams], path: str | Path) -> None:
    """Write joint parameters as JSON."""
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(joints_to_dict(joints), fh, indent=2)
        fh.write("\n")


def preset(name: str) -> list[ImpedanceParams]:
    """Return a bundled preset by name ("wrist", "finger" or "hand")."""
    if name not in PRESET_NAMES:
        raise ValueError(f"unknown preset {name!r}, choose from {PRESET_NAMES}")
    text = resources.files("myohold.presets").joinpath(f"{name}.json").read_text()
    return joints_from_dict(json.loads(text))
