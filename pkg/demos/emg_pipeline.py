"""Walk a synthetic EMG recording through the full signal pipeline.

Shows each stage in order: low-pass envelope filtering, calibration
against rest/MVC levels, pattern extraction, motion classification and
the final contraction level that drives the controller. Ends with the
scripted calibration protocol producing a profile from scratch.

Usage:
    python3 demos/emg_pipeline.py [--noise A] [--seed N]
"""

import argparse

import numpy as np

from myohold import (
    EmgProcessor,
    LowpassFilter,
    calibrate_from_trace,
    default_calibration,
    synth_calibration_trace,
)


def filter_response(cutoff: float, rate: float) -> None:
    # empirical gain: feed unit sines, read the settled output amplitude
    print(f"low-pass envelope filter: 2nd order, {cutoff} Hz cutoff at {rate} Hz")
    for freq in (1.0, 8.0, 50.0):
        filt = LowpassFilter(cutoff_hz=cutoff, sample_rate_hz=rate, channels=1)
        t = np.arange(0, 4.0, 1.0 / rate)
        out = filt.process_block(np.sin(2 * np.pi * freq * t)[:, None])
        gain = np.max(np.abs(out[len(out) // 2:, 0]))
        verdict = "passes" if gain > 0.9 else ("edge" if gain > 0.5 else "rejected")
        print(f"  {freq:5.1f} Hz sine -> amplitude {gain:.4f}  ({verdict})")
    print()


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--noise", type=float, default=0.01)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    calib = default_calibration()
    filter_response(calib.cutoff_hz, calib.sample_rate_hz)

    frames = synth_calibration_trace(seed=args.seed, noise=args.noise)
    print(f"synthetic protocol recording: {len(frames)} frames, "
          f"{frames[-1].timestamp:.0f} s (rest, flexion MVC, extension MVC)")

    processor = EmgProcessor(calib)
    processed = processor.process_many(frames)

    # sample one processed frame from the middle of each protocol phase
    for label, t_probe in (("rest", 2.5), ("flexion MVC", 7.5), ("extension MVC", 12.5)):
        frame = min(processed, key=lambda p: abs(p.timestamp - t_probe))
        pattern = "none" if frame.pattern is None else \
            "(" + ", ".join(f"{x:.3f}" for x in frame.pattern) + ")"
        print(f"  t = {frame.timestamp:5.2f} s [{label}]: force = {frame.force:.4f}, "
              f"pattern = {pattern}, motion = {frame.motion.value}, level = {frame.level:.4f}")

    profile = calibrate_from_trace(frames)
    print("\ncalibration profile extracted from the recording:")
    print(f"  rest levels: {[round(v, 4) for v in profile.rest_level]}")
    print(f"  MVC levels:  {[round(v, 4) for v in profile.mvc_level]}")
    for direction, fmax in profile.f_max.items():
        print(f"  f_max[{direction.value}] = {fmax:.4f}")
    for direction, template in profile.templates.items():
        shaped = ", ".join(f"{x:.3f}" for x in template)
        print(f"  template[{direction.value}] = ({shaped})")


if __name__ == "__main__":
    main()
