"""Live simulation service: a fixed-rate control loop behind a WebSocket.

Two activities run concurrently.  A dedicated control thread advances the
simulation every tick on a monotonic-clock schedule (overruns skip wall
time rather than bursting to catch up) and never touches the network.  An
asyncio thread owns the WebSocket endpoint, validates inbound commands,
and broadcasts one telemetry frame per tick.  The two sides communicate
only through a pair of single-producer/single-consumer queues.

The first client to complete the hello handshake gets the controller
role; later clients are observers whose commands are rejected.  Commands
are coalesced per tick: for each command kind the latest arrival wins,
so a flood of slider updates costs one application per tick.
"""

from __future__ import annotations

import asyncio
import logging
import queue
import threading
import time

from websockets.asyncio.server import broadcast, serve

from .dynamics import (
    CONTROL_TICK,
    INTEGRATION_STEP,
    Direction,
    JointController,
    MuscleActivation,
)
from .params import PRESET_NAMES, preset
from .protocol import (
    PROTOCOL_VERSION,
    ProtocolError,
    encode,
    parse_command,
    rejection_message,
    telemetry_message,
    version_mismatch_message,
    welcome_message,
)
from .scenarios import SCRIPTED_INPUT_DURATION, classify_levels, scripted_activation

logger = logging.getLogger(__name__)

AUTOPLAY_SOURCES = ("input1", "input2")
HANDSHAKE_TIMEOUT = 10.0  # s a client may take to send hello


class SimSession:
    """Simulation state advanced tick by tick; single-writer.

    Directly drivable without any network for offline tests: apply()
    ingests validated commands, advance() runs one control tick and
    returns the telemetry message (or None while paused).
    """

    def __init__(
        self,
        preset_name: str = "wrist",
        tick: float = CONTROL_TICK,
        substep: float = INTEGRATION_STEP,
    ) -> None:
        if preset_name not in PRESET_NAMES:
            raise ValueError(f"unknown preset {preset_name!r}")
        self.preset_name = preset_name
        self.tick = tick
        self.substep = substep
        self.joints = [JointController(p, tick, substep) for p in preset(preset_name)]
        self.alpha_flex = 0.0
        self.alpha_ext = 0.0
        self.motion_override: Direction | None = None
        self.scenario: str | None = None
        self.paused = False
        self.tick_index = 0
        self.overrun_pending = False

    def reset(self) -> None:
        """Return to power-on state: zero joints, no input, tick 0."""
        for joint in self.joints:
            joint.reset()
        self.alpha_flex = 0.0
        self.alpha_ext = 0.0
        self.motion_override = None
        self.scenario = None
        self.paused = False
        self.tick_index = 0
        self.overrun_pending = False

    def load_preset(self, name: str) -> None:
        if name not in PRESET_NAMES:
            raise ValueError(f"unknown preset {name!r}")
        self.preset_name = name
        self.joints = [JointController(p, self.tick, self.substep) for p in preset(name)]

    def apply(self, command: dict) -> str | None:
        """Apply one validated command; returns a rejection reason or None."""
        kind = command["kind"]
        if kind == "set_activation":
            self.alpha_flex = command["alpha_flex"]
            self.alpha_ext = command["alpha_ext"]
        elif kind == "set_motion":
            label = command.get("motion")
            self.motion_override = None if label is None else Direction.from_label(label)
        elif kind == "load_preset":
            try:
                self.load_preset(command["name"])
            except ValueError as exc:
                return str(exc)
        elif kind == "start_scenario":
            name = command["name"]
            if name not in AUTOPLAY_SOURCES:
                return (
                    f"unknown scenario {name!r}; live autoplay supports {AUTOPLAY_SOURCES}"
                )
            self.reset()
            self.scenario = name
        elif kind == "pause":
            self.paused = command.get("paused", True)
        elif kind == "reset":
            self.reset()
        else:
            return f"command {kind!r} has no server-side effect"
        return None

    def current_activation(self) -> MuscleActivation:
        """Input for the next tick: autoplay when active, else slider state."""
        if self.scenario is not None:
            t = self.tick_index * self.tick
            if t <= SCRIPTED_INPUT_DURATION:
                return scripted_activation(self.scenario, t)
            self.scenario = None  # autoplay finished; hold via manual levels
        direction = self.motion_override
        if direction is None:
            direction = classify_levels(self.alpha_flex, self.alpha_ext)
        return MuscleActivation(self.alpha_flex, self.alpha_ext, direction)

    def advance(self) -> dict | None:
        """One control tick; returns the telemetry message, None when paused."""
        if self.paused:
            return None
        activation = self.current_activation()
        results = [joint.step(activation) for joint in self.joints]
        message = telemetry_message(
            tick_index=self.tick_index,
            t=results[0].joint.time,
            theta=[r.joint.theta for r in results],
            theta_eq=[r.theta_eq for r in results],
            theta0=[r.theta0 for r in results],
            gate=[r.gate for r in results],
            motion=activation.direction.value,
            alpha_flex=activation.alpha_flex,
            alpha_ext=activation.alpha_ext,
            tau_flex=[r.torque.tau_flex for r in results],
            tau_ext=[r.torque.tau_ext for r in results],
            overrun=self.overrun_pending,
        )
        self.overrun_pending = False
        self.tick_index += 1
        return message


def coalesce_commands(commands: list[dict]) -> list[dict]:
    """Per-kind last-writer-wins: keep each kind's newest command, in order."""
    latest = {command["kind"]: command for command in commands}
    return [command for command in commands if latest[command["kind"]] is command]


class SimServer:
    """WebSocket endpoint plus control thread around one SimSession."""

    def __init__(
        self,
        host: str = "127.0.0.1",
        port: int = 0,
        preset_name: str = "wrist",
        tick: float = CONTROL_TICK,
        substep: float = INTEGRATION_STEP,
        scenario: str | None = None,
    ) -> None:
        self.session = SimSession(preset_name, tick, substep)
        if scenario is not None:
            reason = self.session.apply({"kind": "start_scenario", "name": scenario})
            if reason:
                raise ValueError(reason)
        self.host = host
        self.port = port
        self._commands: queue.SimpleQueue = queue.SimpleQueue()
        self._telemetry: queue.SimpleQueue = queue.SimpleQueue()
        self._stop = threading.Event()
        self._ready = threading.Event()
        self._loop: asyncio.AbstractEventLoop | None = None
        self._shutdown: asyncio.Event | None = None
        self._clients: set = set()
        self._controller = None
        self._role_lock = threading.Lock()
        self._control_thread: threading.Thread | None = None
        self._network_thread: threading.Thread | None = None

    # -- control side -------------------------------------------------

    def _drain_commands(self) -> None:
        pending = []
        while True:
            try:
                pending.append(self._commands.get_nowait())
            except queue.Empty:
                break
        for command in coalesce_commands(pending):
            reason = self.session.apply(command)
            if reason:
                logger.warning("command dropped: %s", reason)

    def _control_loop(self) -> None:
        tick = self.session.tick
        deadline = time.monotonic() + tick
        while not self._stop.is_set():
            self._drain_commands()
            message = self.session.advance()
            if message is not None:
                self._telemetry.put(encode(message))
            now = time.monotonic()
            if now > deadline + tick:
                # Overrun: skip the missed wall time, never burst to catch up.
                missed = int((now - deadline) / tick)
                deadline += missed * tick
                self.session.overrun_pending = True
                logger.warning("control loop overran by %d ticks", missed)
            delay = deadline - time.monotonic()
            if delay > 0:
                time.sleep(delay)
            deadline += tick

    # -- network side ---------------------------------------------------

    async def _pump_telemetry(self) -> None:
        while True:
            text = await asyncio.to_thread(self._telemetry.get)
            if text is None:
                return
            broadcast(self._clients, text)

    async def _handler(self, websocket) -> None:
        try:
            raw = await asyncio.wait_for(websocket.recv(), timeout=HANDSHAKE_TIMEOUT)
        except (asyncio.TimeoutError, Exception):
            return
        try:
            hello = parse_command(raw)
            if hello["kind"] != "hello":
                await websocket.send(encode(rejection_message("first message must be a hello")))
                return
        except ProtocolError as exc:
            await websocket.send(encode(rejection_message(exc.reason, exc.sequence)))
            return
        if hello["protocol_version"] != PROTOCOL_VERSION:
            await websocket.send(encode(version_mismatch_message(hello["protocol_version"])))
            return

        with self._role_lock:
            if self._controller is None:
                self._controller = websocket
                role = "controller"
            else:
                role = "observer"
        await websocket.send(
            encode(
                welcome_message(
                    role=role,
                    joint_count=len(self.session.joints),
                    tick=self.session.tick,
                    presets=list(PRESET_NAMES),
                    scenarios=list(AUTOPLAY_SOURCES),
                )
            )
        )
        self._clients.add(websocket)
        last_sequence: int | None = None
        try:
            async for raw in websocket:
                try:
                    command = parse_command(raw)
                except ProtocolError as exc:
                    await websocket.send(encode(rejection_message(exc.reason, exc.sequence)))
                    continue
                if command["kind"] == "hello":
                    await websocket.send(
                        encode(rejection_message("session already greeted", command.get("sequence")))
                    )
                    continue
                if websocket is not self._controller:
                    await websocket.send(
                        encode(
                            rejection_message(
                                "read-only role: only the controller client may command",
                                command.get("sequence"),
                            )
                        )
                    )
                    continue
                sequence = command.get("sequence")
                if sequence is not None:
                    if last_sequence is not None and sequence <= last_sequence:
                        await websocket.send(
                            encode(
                                rejection_message(
                                    f"sequence must increase (last {last_sequence}, got {sequence})",
                                    sequence,
                                )
                            )
                        )
                        continue
                    last_sequence = sequence
                self._commands.put(command)
        finally:
            self._clients.discard(websocket)
            with self._role_lock:
                if self._controller is websocket:
                    self._controller = None  # slot freed for the next hello

    async def _serve(self) -> None:
        self._loop = asyncio.get_running_loop()
        self._shutdown = asyncio.Event()
        async with serve(self._handler, self.host, self.port) as server:
            self.port = server.sockets[0].getsockname()[1]
            pump = asyncio.create_task(self._pump_telemetry())
            self._ready.set()
            await self._shutdown.wait()
            pump.cancel()

    def _network_main(self) -> None:
        asyncio.run(self._serve())

    # -- lifecycle ------------------------------------------------------

    @property
    def url(self) -> str:
        return f"ws://{self.host}:{self.port}"

    def start(self) -> "SimServer":
        self._network_thread = threading.Thread(target=self._network_main, daemon=True)
        self._network_thread.start()
        if not self._ready.wait(timeout=10):
            raise RuntimeError("server failed to start listening")
        self._control_thread = threading.Thread(target=self._control_loop, daemon=True)
        self._control_thread.start()
        return self

    def stop(self) -> None:
        self._stop.set()
        if self._control_thread is not None:
            self._control_thread.join(timeout=5)
        if self._loop is not None and self._shutdown is not None:
            self._telemetry.put(None)  # unblock the pump
            self._loop.call_soon_threadsafe(self._shutdown.set)
        if self._network_thread is not None:
            self._network_thread.join(timeout=5)

    def __enter__(self) -> "SimServer":
        return self.start()

    def __exit__(self, *exc) -> None:
        self.stop()


def run_server(
    host: str = "127.0.0.1",
    port: int = 8765,
    preset_name: str = "wrist",
    tick: float = CONTROL_TICK,
    scenario: str | None = None,
) -> None:
    """Blocking entry point used by the CLI; Ctrl+C stops the service."""
    server = SimServer(host=host, port=port, preset_name=preset_name, tick=tick, scenario=scenario)
    server.start()
    logger.info("listening on %s (preset %s, tick %g s)", server.url, preset_name, tick)
    print(f"myohold sim server listening on {server.url}")
    try:
        while True:
            time.sleep(1.0)
    except KeyboardInterrupt:
        pass
    finally:
        server.stop()
