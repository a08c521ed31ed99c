/**
 * Connection state machine between the socket and the widgets.
 *
 * Owns the telemetry ring, the input drain, the command sequence counter,
 * and the latency marks. Deliberately DOM-free: the socket is injected as
 * a factory, so tests drive the same code over a fake socket or a real
 * one, and the browser entry point only adapts WebSocket and renders.
 *
 * The ring holds received telemetry only; nothing is simulated locally.
 */

import { ActivationInput } from "./input.js";
import { LatencyTracker } from "./latency.js";
import type { Command, Rejected, Telemetry, Welcome } from "./protocol.js";
import {
  ProtocolError,
  decodeServerMessage,
  encodeCommand,
  hello,
} from "./protocol.js";
import { TelemetryRing } from "./ring.js";

export type ConnectionState = "idle" | "connecting" | "connected" | "closed";

/** Minimal full-duplex text socket; browser WebSocket adapts onto this. */
export interface SocketLike {
  send(text: string): void;
  close(): void;
  onopen: (() => void) | null;
  onmessage: ((text: string) => void) | null;
  onclose: (() => void) | null;
}

export type SocketFactory = (url: string) => SocketLike;

export interface SessionEvents {
  /** Anything observable changed; cheap, safe to re-render on. */
  onChange?: () => void;
  onTelemetry?: (frame: Telemetry) => void;
  onRejected?: (rejection: Rejected) => void;
}

export class Session {
  readonly input = new ActivationInput();
  readonly latency = new LatencyTracker();

  state: ConnectionState = "idle";
  welcome: Welcome | null = null;
  ring: TelemetryRing | null = null;
  /** Last error or rejection reason for the banner, null when healthy. */
  lastError: string | null = null;
  malformedFrames = 0;

  private socket: SocketLike | null = null;
  private sequence = 0;
  private readonly factory: SocketFactory;
  private readonly events: SessionEvents;

  constructor(factory: SocketFactory, events: SessionEvents = {}) {
    this.factory = factory;
    this.events = events;
  }

  get role(): "controller" | "observer" | null {
    return this.welcome?.role ?? null;
  }

  /**
   * Open (or reopen) the connection. The command sequence restarts and
   * the telemetry buffer is discarded when the new welcome arrives, so a
   * reconnect never mixes two sessions' histories.
   */
  connect(url: string): void {
    if (this.socket !== null) {
      this.detach(this.socket);
      this.socket.close();
    }
    this.state = "connecting";
    this.lastError = null;
    this.welcome = null;
    this.sequence = 0;

    let socket: SocketLike;
    try {
      socket = this.factory(url);
    } catch (exc) {
      this.state = "closed";
      this.lastError = `connection failed: ${String(exc)}`;
      this.changed();
      return;
    }
    this.socket = socket;
    socket.onopen = () => {
      this.send(hello(this.nextSequence()));
      this.changed();
    };
    socket.onmessage = (text) => this.receive(text);
    socket.onclose = () => {
      if (this.socket === socket) {
        this.state = "closed";
        this.socket = null;
        if (this.lastError === null) {
          this.lastError = "connection closed";
        }
        this.changed();
      }
    };
    this.changed();
  }

  disconnect(): void {
    if (this.socket !== null) {
      const socket = this.socket;
      this.socket = null;
      this.detach(socket);
      socket.close();
      this.state = "closed";
      this.changed();
    }
  }

  /**
   * Animation-frame hook: drains at most one coalesced activation command
   * per call, so the command rate is bounded by the frame rate.
   */
  frame(): void {
    if (this.state !== "connected" || this.role !== "controller") {
      return;
    }
    const command = this.input.takeCommand(this.nextSequence());
    if (command === null) {
      return;
    }
    this.send(command);
    if (command.kind === "set_activation") {
      const after = this.ring?.latest()?.tickIndex ?? -1;
      this.latency.sent(command.sequence ?? -1, command.alpha_flex, command.alpha_ext, after);
    }
  }

  /** Buttons/selects path: pause, reset, set_motion, load_preset, start_scenario. */
  command(command: Command): void {
    if (this.state !== "connected") {
      return;
    }
    const sequenced = { ...command, sequence: this.nextSequence() } as Command;
    this.send(sequenced);
    if (command.kind !== "set_activation") {
      // reset/preset/scenario restart the tick clock; stale marks would lie
      this.latency.clear();
    }
  }

  private receive(text: string): void {
    let message;
    try {
      message = decodeServerMessage(text);
    } catch (exc) {
      if (exc instanceof ProtocolError) {
        this.malformedFrames += 1;
        this.lastError = exc.reason;
        this.changed();
        return;
      }
      throw exc;
    }
    switch (message.kind) {
      case "welcome":
        this.welcome = message;
        this.ring = new TelemetryRing(message.joint_count);
        this.latency.clear();
        this.state = "connected";
        this.lastError = null;
        break;
      case "telemetry":
        // a preset change mid-session changes the joint count without a
        // new welcome; histories across presets are incomparable anyway
        if (this.ring === null || message.theta.length !== this.ring.jointCount) {
          this.ring = new TelemetryRing(message.theta.length);
          this.latency.clear();
        }
        this.ring.push(message);
        this.latency.observe(message);
        this.events.onTelemetry?.(message);
        break;
      case "rejected":
        this.lastError = message.reason;
        this.events.onRejected?.(message);
        break;
    }
    this.changed();
  }

  private nextSequence(): number {
    this.sequence += 1;
    return this.sequence;
  }

  private send(command: Command): void {
    this.socket?.send(encodeCommand(command));
  }

  private detach(socket: SocketLike): void {
    socket.onopen = null;
    socket.onmessage = null;
    socket.onclose = null;
  }

  private changed(): void {
    this.events.onChange?.();
  }
}
