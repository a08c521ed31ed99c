import { describe, expect, it } from "vitest";

import type { SocketLike } from "../src/session.js";
import { Session } from "../src/session.js";

class FakeSocket implements SocketLike {
  sent: string[] = [];
  closed = false;
  onopen: (() => void) | null = null;
  onmessage: ((text: string) => void) | null = null;
  onclose: (() => void) | null = null;

  send(text: string): void {
    this.sent.push(text);
  }

  close(): void {
    this.closed = true;
  }

  open(): void {
    this.onopen?.();
  }

  serverSays(message: Record<string, unknown>): void {
    this.onmessage?.(JSON.stringify(message));
  }

  drop(): void {
    this.onclose?.();
  }
}

function welcome(role = "controller", joints = 1): Record<string, unknown> {
  return {
    kind: "welcome",
    v: 1,
    protocol_version: 1,
    role,
    joint_count: joints,
    tick: 0.005,
    presets: ["wrist"],
    scenarios: ["input1"],
  };
}

function telemetry(tick: number, alphaFlex = 0): Record<string, unknown> {
  return {
    kind: "telemetry",
    v: 1,
    tick_index: tick,
    t: (tick + 1) * 0.005,
    theta: [-0.01 * tick],
    theta_eq: [-0.02 * tick],
    theta0: [0],
    gate: [1],
    motion: "flexion",
    alpha_flex: alphaFlex,
    alpha_ext: 0,
    tau_flex: [0],
    tau_ext: [0],
    overrun: false,
  };
}

function connected(role = "controller"): { session: Session; socket: FakeSocket; sockets: FakeSocket[] } {
  const sockets: FakeSocket[] = [];
  const session = new Session(() => {
    const socket = new FakeSocket();
    sockets.push(socket);
    return socket;
  });
  session.connect("ws://test");
  const socket = sockets[0];
  socket.open();
  socket.serverSays(welcome(role));
  return { session, socket, sockets };
}

describe("Session", () => {
  it("opens with a hello and exposes the welcome descriptor", () => {
    const { session, socket } = connected();
    const first = JSON.parse(socket.sent[0]);
    expect(first.kind).toBe("hello");
    expect(first.protocol_version).toBe(1);
    expect(first.sequence).toBe(1);
    expect(session.state).toBe("connected");
    expect(session.role).toBe("controller");
    expect(session.welcome?.tick).toBeCloseTo(0.005, 12);
  });

  it("buffers telemetry and marks command latency", () => {
    const { session, socket } = connected();
    socket.serverSays(telemetry(0));
    session.input.setFlexor(0.5);
    session.frame();
    socket.serverSays(telemetry(1, 0));
    socket.serverSays(telemetry(2, 0.5));
    expect(session.ring?.length).toBe(3);
    expect(session.latency.worstLatency()).toBe(2);
    const command = JSON.parse(socket.sent[1]);
    expect(command.kind).toBe("set_activation");
    expect(command.alpha_flex).toBe(0.5);
  });

  it("sends at most one activation command per frame", () => {
    const { session, socket } = connected();
    session.input.setFlexor(0.3);
    session.input.setExtensor(0.1);
    session.input.setFlexor(0.4);
    session.frame();
    session.frame();
    const kinds = socket.sent.map((text) => JSON.parse(text).kind);
    expect(kinds).toEqual(["hello", "set_activation"]);
  });

  it("does not send activation when the role is observer", () => {
    const { session, socket } = connected("observer");
    session.input.setFlexor(0.5);
    session.frame();
    expect(socket.sent).toHaveLength(1); // hello only
    expect(session.role).toBe("observer");
  });

  it("surfaces rejections without dropping the stream", () => {
    const { session, socket } = connected();
    socket.serverSays({ kind: "rejected", v: 1, reason: "unknown scenario 'x'" });
    expect(session.lastError).toContain("unknown scenario");
    socket.serverSays(telemetry(0));
    expect(session.ring?.length).toBe(1);
  });

  it("counts malformed frames and keeps running", () => {
    const { session, socket } = connected();
    socket.onmessage?.("{broken");
    expect(session.malformedFrames).toBe(1);
    socket.serverSays(telemetry(0));
    expect(session.ring?.length).toBe(1);
  });

  it("clears the buffer and restarts the sequence on reconnect", () => {
    const { session, socket, sockets } = connected();
    socket.serverSays(telemetry(0));
    socket.serverSays(telemetry(1));
    expect(session.ring?.length).toBe(2);

    socket.drop();
    expect(session.state).toBe("closed");
    expect(session.lastError).not.toBeNull();

    session.connect("ws://test");
    const next = sockets[1];
    next.open();
    const helloAgain = JSON.parse(next.sent[0]);
    expect(helloAgain.sequence).toBe(1); // sequence restarts per connection

    next.serverSays(welcome());
    expect(session.ring?.length).toBe(0); // buffer cleared
    expect(session.lastError).toBeNull();
    next.serverSays(telemetry(0));
    expect(session.ring?.length).toBe(1);
  });

  it("rebuilds the ring when a preset change alters the joint count", () => {
    // the server sends welcome once; after load_preset the new joint
    // count shows up directly in the telemetry lanes
    const { session, socket } = connected();
    socket.serverSays(telemetry(0));
    session.command({ kind: "load_preset", name: "hand" });
    const fiveJoints = {
      ...telemetry(1),
      theta: [0, 0, 0, 0, 0],
      theta_eq: [0, 0, 0, 0, 0],
      theta0: [0, 0, 0, 0, 0],
      gate: [0, 0, 0, 0, 0],
      tau_flex: [0, 0, 0, 0, 0],
      tau_ext: [0, 0, 0, 0, 0],
    };
    socket.serverSays(fiveJoints);
    expect(session.ring?.jointCount).toBe(5);
    expect(session.ring?.length).toBe(1);
  });

  it("reports a connection failure as an error state", () => {
    const session = new Session(() => {
      throw new Error("unreachable");
    });
    session.connect("ws://nowhere");
    expect(session.state).toBe("closed");
    expect(session.lastError).toContain("unreachable");
  });
});
