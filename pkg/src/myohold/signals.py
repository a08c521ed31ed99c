"""Streaming EMG envelope processing: filter, normalize, classify, scale.

The stages mirror what runs on an embedded controller between the analog
front end and the joint control law:

1. second-order Butterworth low-pass on the rectified envelope,
2. per-channel normalization against calibrated rest and max levels,
3. split into a spatial pattern (shape across electrodes) and a scalar
   force value (overall effort),
4. motion classification from the pattern, with a force floor below which
   the tick counts as no motion,
5. contraction level: force scaled into [0, 1] by the per-motion maximum
   recorded during calibration.

All stages are deterministic and operate frame by frame at the sample rate
of the envelope stream.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Protocol

import numpy as np

from .dynamics import LEVEL_CAP, Direction, MuscleActivation

DEFAULT_SAMPLE_RATE = 500.0  # Hz
DEFAULT_CUTOFF = 8.0         # Hz
DEFAULT_F_THRESHOLD = 0.02   # force at or below this is treated as no motion


class LowpassFilter:
    """Streaming second-order Butterworth low-pass over N channels.

    Coefficients come from the standard bilinear transform of the analog
    Butterworth prototype; the recursion is direct form II transposed with
    zero initial state, so the step response starts from silence rather
    than from a pre-charged filter.
    """

    def __init__(
        self,
        sample_rate_hz: float = DEFAULT_SAMPLE_RATE,
        cutoff_hz: float = DEFAULT_CUTOFF,
        channels: int = 2,
    ) -> None:
        if sample_rate_hz <= 0:
            raise ValueError("sample rate must be positive")
        if not 0 < cutoff_hz < sample_rate_hz / 2:
            raise ValueError(
                f"cutoff must lie in (0, Nyquist); got {cutoff_hz} Hz at fs={sample_rate_hz} Hz"
            )
        if channels < 1:
            raise ValueError("need at least one channel")
        self.sample_rate_hz = sample_rate_hz
        self.cutoff_hz = cutoff_hz
        self.channels = channels
        self.b, self.a = butterworth_lowpass_coefficients(sample_rate_hz, cutoff_hz)
        self._s1 = np.zeros(channels)
        self._s2 = np.zeros(channels)

    def reset(self) -> None:
        self._s1[:] = 0.0
        self._s2[:] = 0.0

    def state_snapshot(self) -> tuple[np.ndarray, np.ndarray]:
        """Copy of the internal delay state, for later restore."""
        return self._s1.copy(), self._s2.copy()

    def state_restore(self, snapshot: tuple[np.ndarray, np.ndarray]) -> None:
        s1, s2 = snapshot
        self._s1 = np.array(s1, dtype=float)
        self._s2 = np.array(s2, dtype=float)

    def process(self, sample: np.ndarray) -> np.ndarray:
        """Filter one frame (one value per channel)."""
        x = np.asarray(sample, dtype=float)
        if x.shape != (self.channels,):
            raise ValueError(f"expected frame of shape ({self.channels},), got {x.shape}")
        b0, b1, b2 = self.b
        _, a1, a2 = self.a
        y = b0 * x + self._s1
        self._s1 = b1 * x - a1 * y + self._s2
        self._s2 = b2 * x - a2 * y
        return y

    def process_block(self, samples: np.ndarray) -> np.ndarray:
        """Filter a (frames, channels) block, preserving streaming state."""
        samples = np.asarray(samples, dtype=float)
        out = np.empty_like(samples)
        for i in range(samples.shape[0]):
            out[i] = self.process(samples[i])
        return out


def butterworth_lowpass_coefficients(
    sample_rate_hz: float, cutoff_hz: float
) -> tuple[np.ndarray, np.ndarray]:
    """Digital (b, a) for a 2nd-order Butterworth low-pass, bilinear design.

    a is normalized so a[0] == 1.
    """
    if not 0 < cutoff_hz < sample_rate_hz / 2:
        raise ValueError("cutoff must lie strictly between 0 and Nyquist")
    # Prewarped analog frequency folded into the bilinear substitution.
    c = 1.0 / math.tan(math.pi * cutoff_hz / sample_rate_hz)
    sqrt2 = math.sqrt(2.0)
    norm = 1.0 / (1.0 + sqrt2 * c + c * c)
    b = np.array([norm, 2.0 * norm, norm])
    a = np.array([1.0, 2.0 * (1.0 - c * c) * norm, (1.0 - sqrt2 * c + c * c) * norm])
    return b, a


@dataclass(frozen=True)
class CalibrationProfile:
    """Per-user scaling recorded during a calibration session.

    rest_level / mvc_level
        Envelope value per channel at rest and at maximum voluntary
        contraction; normalization maps this span onto [0, 1].
    f_max
        Largest force value observed per motion during calibration; the
        contraction level is force divided by this, clamped to [0, 1].
    f_threshold
        Force at or below which the tick is classified as no motion.
    templates
        Reference spatial pattern per motion for the default classifier.
    """

    rest_level: tuple[float, ...]
    mvc_level: tuple[float, ...]
    f_max: Mapping[Direction, float]
    templates: Mapping[Direction, tuple[float, ...]]
    f_threshold: float = DEFAULT_F_THRESHOLD
    sample_rate_hz: float = DEFAULT_SAMPLE_RATE
    cutoff_hz: float = DEFAULT_CUTOFF

    def __post_init__(self) -> None:
        object.__setattr__(self, "rest_level", tuple(float(v) for v in self.rest_level))
        object.__setattr__(self, "mvc_level", tuple(float(v) for v in self.mvc_level))
        if len(self.rest_level) != len(self.mvc_level) or not self.rest_level:
            raise ValueError("rest and mvc levels must be non-empty and the same length")
        for rest, mvc in zip(self.rest_level, self.mvc_level):
            if not mvc > rest:
                raise ValueError("each channel needs mvc level strictly above rest level")
        f_max = {Direction(k) if not isinstance(k, Direction) else k: float(v)
                     for k, v in self.f_max.items()}
        templates = {Direction(k) if not isinstance(k, Direction) else k: tuple(float(x) for x in v)
                     for k, v in self.templates.items()}
        for motion in (Direction.FLEXION, Direction.EXTENSION):
            if motion not in f_max:
                raise ValueError(f"f_max missing entry for {motion.value}")
            if motion not in templates:
                raise ValueError(f"templates missing entry for {motion.value}")
            if len(templates[motion]) != len(self.rest_level):
                raise ValueError("template length must match the channel count")
            if not any(templates[motion]):
                raise ValueError("templates must be nonzero patterns")
        for motion, fmax in f_max.items():
            if not 0 < fmax <= 1:
                raise ValueError(f"f_max[{motion.value}] must lie in (0, 1], got {fmax}")
        if not 0 < self.f_threshold < min(f_max.values()):
            raise ValueError("f_threshold must be positive and below every f_max")
        object.__setattr__(self, "f_max", f_max)
        object.__setattr__(self, "templates", templates)

    @property
    def channels(self) -> int:
        return len(self.rest_level)

    def to_dict(self) -> dict:
        return {
            "rest_level": list(self.rest_level),
            "mvc_level": list(self.mvc_level),
            "f_max": {d.value: v for d, v in self.f_max.items()},
            "templates": {d.value: list(v) for d, v in self.templates.items()},
            "f_threshold": self.f_threshold,
            "sample_rate_hz": self.sample_rate_hz,
            "cutoff_hz": self.cutoff_hz,
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "CalibrationProfile":
        return cls(
            rest_level=payload["rest_level"],
            mvc_level=payload["mvc_level"],
            f_max={Direction.from_label(k): v for k, v in payload["f_max"].items()},
            templates={Direction.from_label(k): v for k, v in payload["templates"].items()},
            f_threshold=payload.get("f_threshold", DEFAULT_F_THRESHOLD),
            sample_rate_hz=payload.get("sample_rate_hz", DEFAULT_SAMPLE_RATE),
            cutoff_hz=payload.get("cutoff_hz", DEFAULT_CUTOFF),
        )

    def save(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, indent=2)
            fh.write("\n")

    @classmethod
    def load(cls, path: str | Path) -> "CalibrationProfile":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


def default_calibration(channels: int = 2) -> CalibrationProfile:
    """Two-electrode desk setup: channel 0 flexor, channel 1 extensor.

    f_max of 0.5 reflects that with one electrode per muscle the mean
    over channels reaches about half scale during a single-muscle effort.
    """
    if channels != 2:
        raise ValueError("the default profile is defined for two channels")
    return CalibrationProfile(
        rest_level=(0.05, 0.05),
        mvc_level=(1.0, 1.0),
        f_max={Direction.FLEXION: 0.5, Direction.EXTENSION: 0.5},
        templates={Direction.FLEXION: (1.0, 0.0), Direction.EXTENSION: (0.0, 1.0)},
    )


def normalize(calib: CalibrationProfile, filtered: np.ndarray) -> np.ndarray:
    """Map a filtered frame onto [0, 1] per channel against rest/mvc."""
    x = np.asarray(filtered, dtype=float)
    if x.shape != (calib.channels,):
        raise ValueError(f"expected {calib.channels} channels, got shape {x.shape}")
    rest = np.array(calib.rest_level)
    mvc = np.array(calib.mvc_level)
    return np.clip((x - rest) / (mvc - rest), 0.0, 1.0)


def emg_pattern(normalized: np.ndarray) -> np.ndarray | None:
    """Spatial pattern: the frame scaled to unit sum, or None when silent."""
    x = np.asarray(normalized, dtype=float)
    total = float(x.sum())
    if total <= 0.0:
        return None
    return x / total


def force_information(normalized: np.ndarray) -> float:
    """Scalar effort: mean of the normalized channels."""
    x = np.asarray(normalized, dtype=float)
    return float(x.mean())


def contraction_level(force: float, motion: Direction, calib: CalibrationProfile) -> float:
    """Force scaled by the per-motion calibration maximum, in [0, LEVEL_CAP]."""
    if motion is Direction.NONE:
        return 0.0
    scaled = force / calib.f_max[motion]
    return float(min(max(scaled, 0.0), LEVEL_CAP))


class Classifier(Protocol):
    """Maps a spatial pattern to a motion; pluggable."""

    def classify(self, pattern: np.ndarray, previous: Direction) -> Direction: ...


class TemplateClassifier:
    """Cosine-similarity argmax against per-motion template patterns.

    An exact similarity tie keeps the previous tick's motion when that
    motion is one of the candidates, otherwise the first motion in
    template order wins, so the result is deterministic.
    """

    def __init__(self, templates: Mapping[Direction, Iterable[float]]) -> None:
        self.templates = {}
        for motion, vec in templates.items():
            arr = np.asarray(tuple(vec), dtype=float)
            norm = float(np.linalg.norm(arr))
            if norm <= 0:
                raise ValueError(f"template for {motion.value} must be nonzero")
            self.templates[motion] = arr / norm
        if not self.templates:
            raise ValueError("need at least one template")

    def classify(self, pattern: np.ndarray, previous: Direction) -> Direction:
        p = np.asarray(pattern, dtype=float)
        norm = float(np.linalg.norm(p))
        if norm <= 0:
            return Direction.NONE
        p = p / norm
        best: list[Direction] = []
        best_sim = -np.inf
        for motion, template in self.templates.items():
            sim = float(np.dot(p, template))
            if sim > best_sim:
                best_sim = sim
                best = [motion]
            elif sim == best_sim:
                best.append(motion)
        if previous in best:
            return previous
        return best[0]


def classify_frame(
    pattern: np.ndarray | None,
    force: float,
    calib: CalibrationProfile,
    classifier: Classifier,
    previous: Direction = Direction.NONE,
) -> Direction:
    """Motion for one frame: no motion at or below the force floor."""
    if pattern is None or force <= calib.f_threshold:
        return Direction.NONE
    return classifier.classify(np.asarray(pattern, dtype=float), previous)


@dataclass(frozen=True)
class EmgFrame:
    """One raw envelope sample across all channels."""

    timestamp: float
    channels: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "channels", tuple(float(v) for v in self.channels))
        if not self.channels:
            raise ValueError("a frame needs at least one channel")
        if any(v < 0 for v in self.channels):
            raise ValueError("envelope samples are nonnegative")


@dataclass(frozen=True)
class ProcessedFrame:
    """Outputs of every pipeline stage for one frame."""

    timestamp: float
    filtered: tuple[float, ...]
    normalized: tuple[float, ...]
    pattern: tuple[float, ...] | None
    force: float
    motion: Direction
    level: float

    def activation(self) -> MuscleActivation:
        """Controller-facing view: per-side contraction levels."""
        return MuscleActivation(
            alpha_flex=self.level if self.motion is Direction.FLEXION else 0.0,
            alpha_ext=self.level if self.motion is Direction.EXTENSION else 0.0,
            direction=self.motion,
        )


class EmgProcessor:
    """Streaming pipeline turning raw envelope frames into activation.

    Holds the filter state and the previous motion used for tie-breaking;
    reset() returns both to the power-on condition.
    """

    def __init__(
        self,
        calib: CalibrationProfile | None = None,
        classifier: Classifier | None = None,
    ) -> None:
        self.calib = calib if calib is not None else default_calibration()
        self.classifier = classifier if classifier is not None else TemplateClassifier(
            self.calib.templates
        )
        self.filter = LowpassFilter(
            self.calib.sample_rate_hz, self.calib.cutoff_hz, self.calib.channels
        )
        self.previous = Direction.NONE

    def reset(self) -> None:
        self.filter.reset()
        self.previous = Direction.NONE

    def process(self, frame: EmgFrame) -> ProcessedFrame:
        if len(frame.channels) != self.calib.channels:
            raise ValueError(
                f"frame has {len(frame.channels)} channels, calibration expects {self.calib.channels}"
            )
        filtered = self.filter.process(np.asarray(frame.channels, dtype=float))
        normalized = normalize(self.calib, filtered)
        pattern = emg_pattern(normalized)
        force = force_information(normalized)
        motion = classify_frame(pattern, force, self.calib, self.classifier, self.previous)
        level = contraction_level(force, motion, self.calib)
        self.previous = motion
        return ProcessedFrame(
            timestamp=frame.timestamp,
            filtered=tuple(float(v) for v in filtered),
            normalized=tuple(float(v) for v in normalized),
            pattern=None if pattern is None else tuple(float(v) for v in pattern),
            force=force,
            motion=motion,
            level=level,
        )

    def process_many(self, frames: Iterable[EmgFrame]) -> list[ProcessedFrame]:
        return [self.process(f) for f in frames]
