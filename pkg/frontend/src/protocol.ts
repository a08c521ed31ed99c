/**
 * Wire protocol of the live simulation service, client side.
 *
 * Messages are single JSON objects, one per WebSocket text frame. Every
 * message carries `kind` and a protocol version `v`. The client opens with
 * a `hello`; the server answers `welcome` (or `rejected` on a version
 * mismatch) and then streams one `telemetry` message per control tick.
 * Commands may carry a monotone integer `sequence`, echoed in rejections.
 */

export const PROTOCOL_VERSION = 1;

export type MotionLabel = "flexion" | "extension" | "none";

export const MOTION_LABELS: readonly MotionLabel[] = ["flexion", "extension", "none"];

export interface Welcome {
  kind: "welcome";
  v: number;
  protocol_version: number;
  role: "controller" | "observer";
  joint_count: number;
  tick: number;
  presets: string[];
  scenarios: string[];
}

export interface Telemetry {
  kind: "telemetry";
  v: number;
  tick_index: number;
  t: number;
  theta: number[];
  theta_eq: number[];
  theta0: number[];
  gate: number[];
  motion: MotionLabel;
  alpha_flex: number;
  alpha_ext: number;
  tau_flex: number[];
  tau_ext: number[];
  overrun: boolean;
}

export interface Rejected {
  kind: "rejected";
  v: number;
  reason: string;
  sequence?: number;
}

export type ServerMessage = Welcome | Telemetry | Rejected;

export type Command =
  | { kind: "hello"; protocol_version: number; sequence?: number }
  | { kind: "set_activation"; alpha_flex: number; alpha_ext: number; sequence?: number }
  | { kind: "set_motion"; motion: MotionLabel | null; sequence?: number }
  | { kind: "load_preset"; name: string; sequence?: number }
  | { kind: "start_scenario"; name: string; sequence?: number }
  | { kind: "pause"; paused: boolean; sequence?: number }
  | { kind: "reset"; sequence?: number };

/** A server frame violated the protocol; `reason` is display-safe. */
export class ProtocolError extends Error {
  constructor(public readonly reason: string) {
    super(reason);
    this.name = "ProtocolError";
  }
}

export function encodeCommand(command: Command): string {
  return JSON.stringify({ v: PROTOCOL_VERSION, ...command });
}

export function hello(sequence?: number): Command {
  return { kind: "hello", protocol_version: PROTOCOL_VERSION, sequence };
}

export function setActivation(alphaFlex: number, alphaExt: number, sequence?: number): Command {
  if (!inUnitRange(alphaFlex) || !inUnitRange(alphaExt)) {
    throw new ProtocolError(`activation levels must lie in [0, 1], got (${alphaFlex}, ${alphaExt})`);
  }
  return { kind: "set_activation", alpha_flex: alphaFlex, alpha_ext: alphaExt, sequence };
}

function inUnitRange(value: number): boolean {
  return Number.isFinite(value) && value >= 0 && value <= 1;
}

function requireNumber(raw: Record<string, unknown>, key: string): number {
  const value = raw[key];
  if (typeof value !== "number" || Number.isNaN(value)) {
    throw new ProtocolError(`field '${key}' must be a number`);
  }
  return value;
}

function requireNumberArray(raw: Record<string, unknown>, key: string, length: number): number[] {
  const value = raw[key];
  if (!Array.isArray(value) || value.length !== length
      || !value.every((x) => typeof x === "number" && !Number.isNaN(x))) {
    throw new ProtocolError(`field '${key}' must be a numeric array of length ${length}`);
  }
  return value as number[];
}

/**
 * Parse and validate one inbound server frame.
 *
 * Strict on shape: the charts render nothing that did not arrive in a
 * well-formed telemetry message, so a malformed frame throws rather than
 * letting partial data through.
 */
export function decodeServerMessage(text: string): ServerMessage {
  let raw: unknown;
  try {
    raw = JSON.parse(text);
  } catch (exc) {
    throw new ProtocolError(`not valid JSON: ${String(exc)}`);
  }
  if (typeof raw !== "object" || raw === null || Array.isArray(raw)) {
    throw new ProtocolError("message must be a JSON object");
  }
  const message = raw as Record<string, unknown>;
  if (typeof message.v !== "number") {
    throw new ProtocolError("message must carry a numeric protocol version 'v'");
  }

  switch (message.kind) {
    case "welcome": {
      const role = message.role;
      if (role !== "controller" && role !== "observer") {
        throw new ProtocolError(`field 'role' must be controller or observer, got ${String(role)}`);
      }
      const jointCount = requireNumber(message, "joint_count");
      if (!Number.isInteger(jointCount) || jointCount < 1) {
        throw new ProtocolError("field 'joint_count' must be a positive integer");
      }
      if (!Array.isArray(message.presets) || !Array.isArray(message.scenarios)) {
        throw new ProtocolError("welcome must carry 'presets' and 'scenarios' lists");
      }
      return {
        kind: "welcome",
        v: message.v,
        protocol_version: requireNumber(message, "protocol_version"),
        role,
        joint_count: jointCount,
        tick: requireNumber(message, "tick"),
        presets: message.presets.map(String),
        scenarios: message.scenarios.map(String),
      };
    }
    case "telemetry": {
      const theta = message.theta;
      if (!Array.isArray(theta) || theta.length < 1) {
        throw new ProtocolError("field 'theta' must be a non-empty array");
      }
      const joints = theta.length;
      const motion = message.motion;
      if (motion !== "flexion" && motion !== "extension" && motion !== "none") {
        throw new ProtocolError(`field 'motion' must be one of ${MOTION_LABELS.join(", ")}`);
      }
      const tickIndex = requireNumber(message, "tick_index");
      if (!Number.isInteger(tickIndex) || tickIndex < 0) {
        throw new ProtocolError("field 'tick_index' must be a nonnegative integer");
      }
      return {
        kind: "telemetry",
        v: message.v,
        tick_index: tickIndex,
        t: requireNumber(message, "t"),
        theta: requireNumberArray(message, "theta", joints),
        theta_eq: requireNumberArray(message, "theta_eq", joints),
        theta0: requireNumberArray(message, "theta0", joints),
        gate: requireNumberArray(message, "gate", joints),
        motion,
        alpha_flex: requireNumber(message, "alpha_flex"),
        alpha_ext: requireNumber(message, "alpha_ext"),
        tau_flex: requireNumberArray(message, "tau_flex", joints),
        tau_ext: requireNumberArray(message, "tau_ext", joints),
        overrun: message.overrun === true,
      };
    }
    case "rejected": {
      const reason = message.reason;
      if (typeof reason !== "string") {
        throw new ProtocolError("rejection must carry a string 'reason'");
      }
      const rejected: Rejected = { kind: "rejected", v: message.v, reason };
      if (typeof message.sequence === "number") {
        rejected.sequence = message.sequence;
      }
      return rejected;
    }
    default:
      throw new ProtocolError(`unknown server message kind ${String(message.kind)}`);
  }
}
