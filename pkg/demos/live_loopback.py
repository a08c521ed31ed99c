"""Drive the live service with a scripted command schedule and check it
against an offline run of the same inputs.

Starts the WebSocket server on an ephemeral port, connects as the
controller, plays a slider schedule (flex, co-contract, relax, extend),
collects telemetry, then replays the per-tick activation stream through
an offline controller and reports the worst angle disagreement. The two
must match to numerical identity: the live path adds no dynamics of its
own.

Usage:
    python3 demos/live_loopback.py [--ticks N]
"""

import argparse
import json

from websockets.sync.client import connect

from myohold import CONTROL_TICK, Direction, JointController, MuscleActivation, preset
from myohold.protocol import encode
from myohold.server import SimServer

# Piecewise-linear slider motion. The gate only opens while the level is
# still climbing past its running maximum, so a believable drive ramps the
# way a dragged slider does; an instant step would be gated out after the
# very first tick.
SEGMENTS = (
    # (start_tick, end_tick, flex 0->1 ramp fractions, ext ramp fractions)
    (40, 140, (0.0, 0.6), (0.0, 0.0)),    # drag flexor slider up
    (140, 200, (0.6, 0.6), (0.0, 0.0)),   # hold it
    (200, 210, (0.6, 0.0), (0.0, 0.0)),   # let go: posture must hold
    (280, 360, (0.0, 0.0), (0.0, 0.5)),   # drag extensor slider up
    (360, 380, (0.0, 0.0), (0.5, 0.0)),   # let go again
)


def slider_levels(tick: int) -> tuple[float, float]:
    for start, end, (f0, f1), (e0, e1) in SEGMENTS:
        if start <= tick < end:
            u = (tick - start) / (end - start)
            return f0 + u * (f1 - f0), e0 + u * (e1 - e0)
    if tick >= SEGMENTS[-1][1]:
        return 0.0, 0.0
    for start, end, (f0, _), (e0, _) in SEGMENTS:
        if tick < start:
            return f0, e0
    return 0.0, 0.0


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--ticks", type=int, default=420, help="telemetry frames to collect")
    args = ap.parse_args()

    frames = []
    with SimServer(port=0) as server:
        print(f"server listening on {server.url}")
        with connect(server.url) as ws:
            ws.send(encode({"kind": "hello", "protocol_version": 1}))
            welcome = json.loads(ws.recv())
            print(f"handshake: role={welcome['role']}, joints={welcome['joint_count']}, "
                  f"tick={welcome['tick'] * 1000:.0f} ms")

            sequence = 0
            last = (0.0, 0.0)
            while len(frames) < args.ticks:
                message = json.loads(ws.recv())
                if message["kind"] != "telemetry":
                    continue
                frames.append(message)
                levels = slider_levels(message["tick_index"])
                if levels != last:
                    last = levels
                    sequence += 1
                    ws.send(encode({
                        "kind": "set_activation",
                        "alpha_flex": levels[0],
                        "alpha_ext": levels[1],
                        "sequence": sequence,
                    }))

    print(f"collected {len(frames)} telemetry frames")

    # offline replay: feed the exact activation stream the server reported
    offline = JointController(preset("wrist")[0], CONTROL_TICK)
    worst = 0.0
    for message in frames:
        activation = MuscleActivation(
            message["alpha_flex"],
            message["alpha_ext"],
            Direction.from_label(message["motion"]),
        )
        result = offline.step(activation)
        worst = max(worst, abs(result.joint.theta - message["theta"][0]))

    # the flexed posture must survive letting go of the slider
    release = next(f for f in frames if f["tick_index"] == 215)
    peak = next(f for f in frames if f["tick_index"] == 199)
    print(f"posture at peak flexion (tick 199): θ_eq = {peak['theta_eq'][0]:+.4f} rad")
    print(f"posture after release (tick 215): θ_eq = {release['theta_eq'][0]:+.4f} rad, "
          f"motion = {release['motion']}")
    held = frames[-1]
    print(f"final posture: θ = {held['theta'][0]:+.4f} rad, "
          f"θ_eq = {held['theta_eq'][0]:+.4f} rad, motion = {held['motion']}")
    print(f"worst |θ_live − θ_offline| over {len(frames)} ticks: {worst:.3e} rad")
    if worst < 1e-9:
        print("live and offline trajectories agree.")
    else:
        raise SystemExit("MISMATCH: live stream diverged from the offline replay")


if __name__ == "__main__":
    main()
