/**
 * Canvas strip charts over the telemetry ring.
 *
 * Three stacked lanes: joint angle with commanded equilibrium, the two
 * contraction levels with command-latency marks, and the binary gate.
 * Spans where the classified motion is rest are shaded across all lanes,
 * which makes the posture-hold behavior visible at a glance: the angle
 * trace runs flat through every shaded region.
 *
 * Every plotted point is a received telemetry value; nothing is
 * interpolated or simulated on the client.
 */

import type { CommandMark } from "./latency.js";
import { DEFAULT_CAPACITY, TelemetryRing } from "./ring.js";

const COLORS = {
  background: "#ffffff",
  frame: "#d0d4da",
  zero: "#aab2bd",
  text: "#444b54",
  restShade: "rgba(110, 118, 129, 0.14)",
  theta: "#1f6fd0",
  thetaEq: "#d9480f",
  alphaFlex: "#c92a2a",
  alphaExt: "#1864ab",
  gate: "#2b8a3e",
  mark: "#845ef7",
  overrun: "#e03131",
};

export class StripCharts {
  private readonly tBuf = new Float64Array(DEFAULT_CAPACITY);
  private readonly aBuf = new Float32Array(DEFAULT_CAPACITY);
  private readonly bBuf = new Float32Array(DEFAULT_CAPACITY);
  private readonly motionBuf = new Float32Array(DEFAULT_CAPACITY);
  private readonly flagBuf = new Float32Array(DEFAULT_CAPACITY);
  private readonly tickBuf = new Float64Array(DEFAULT_CAPACITY);

  constructor(
    private readonly angleCanvas: HTMLCanvasElement,
    private readonly activationCanvas: HTMLCanvasElement,
    private readonly gateCanvas: HTMLCanvasElement,
  ) {}

  render(
    ring: TelemetryRing | null,
    joint: number,
    marks: readonly CommandMark[],
    windowSeconds = 10,
  ): void {
    const contexts = [this.angleCanvas, this.activationCanvas, this.gateCanvas]
      .map((canvas) => canvas.getContext("2d"));
    if (contexts.some((ctx) => ctx === null)) {
      return;
    }
    const [angles, activation, gates] = contexts as CanvasRenderingContext2D[];
    this.clear(angles, this.angleCanvas);
    this.clear(activation, this.activationCanvas);
    this.clear(gates, this.gateCanvas);
    if (ring === null || ring.length < 2 || joint >= ring.jointCount) {
      return;
    }

    const n = ring.scalar("t", ring.capacity, this.tBuf);
    const tEnd = this.tBuf[n - 1];
    const tStart = Math.max(this.tBuf[0], tEnd - windowSeconds);
    let first = 0;
    while (first < n - 1 && this.tBuf[first] < tStart) {
      first += 1;
    }
    const span = Math.max(tEnd - this.tBuf[first], 1e-9);
    const points = n - first;
    ring.scalar("motion", ring.capacity, this.motionBuf);

    const xAt = (i: number, width: number): number =>
      ((this.tBuf[first + i] - this.tBuf[first]) / span) * width;

    this.shadeRest(angles, this.angleCanvas, first, points, xAt);
    this.shadeRest(activation, this.activationCanvas, first, points, xAt);
    this.shadeRest(gates, this.gateCanvas, first, points, xAt);

    this.drawAngles(angles, this.angleCanvas, ring, joint, first, points, xAt);
    this.drawActivation(activation, this.activationCanvas, ring, first, points, xAt, marks);
    this.drawGate(gates, this.gateCanvas, ring, joint, points, xAt);
  }

  private clear(ctx: CanvasRenderingContext2D, canvas: HTMLCanvasElement): void {
    ctx.fillStyle = COLORS.background;
    ctx.fillRect(0, 0, canvas.width, canvas.height);
    ctx.strokeStyle = COLORS.frame;
    ctx.strokeRect(0.5, 0.5, canvas.width - 1, canvas.height - 1);
  }

  /** Shade contiguous spans where the classified motion is rest. */
  private shadeRest(
    ctx: CanvasRenderingContext2D,
    canvas: HTMLCanvasElement,
    first: number,
    points: number,
    xAt: (i: number, width: number) => number,
  ): void {
    ctx.fillStyle = COLORS.restShade;
    let runStart = -1;
    for (let i = 0; i <= points; i += 1) {
      const resting = i < points && this.motionBuf[first + i] === 0;
      if (resting && runStart < 0) {
        runStart = i;
      } else if (!resting && runStart >= 0) {
        const x0 = xAt(runStart, canvas.width);
        const x1 = xAt(Math.min(i, points - 1), canvas.width);
        ctx.fillRect(x0, 0, Math.max(x1 - x0, 1), canvas.height);
        runStart = -1;
      }
    }
  }

  private polyline(
    ctx: CanvasRenderingContext2D,
    values: Float32Array,
    points: number,
    xAt: (i: number, width: number) => number,
    width: number,
    yAt: (v: number) => number,
    color: string,
    dashed = false,
  ): void {
    ctx.strokeStyle = color;
    ctx.lineWidth = 1.5;
    ctx.setLineDash(dashed ? [6, 4] : []);
    ctx.beginPath();
    for (let i = 0; i < points; i += 1) {
      const x = xAt(i, width);
      const y = yAt(values[i]);
      if (i === 0) {
        ctx.moveTo(x, y);
      } else {
        ctx.lineTo(x, y);
      }
    }
    ctx.stroke();
    ctx.setLineDash([]);
  }

  private drawAngles(
    ctx: CanvasRenderingContext2D,
    canvas: HTMLCanvasElement,
    ring: TelemetryRing,
    joint: number,
    first: number,
    points: number,
    xAt: (i: number, width: number) => number,
  ): void {
    const got = ring.lane("theta", joint, ring.capacity, this.aBuf);
    ring.lane("thetaEq", joint, ring.capacity, this.bBuf);
    const theta = this.aBuf.subarray(got - points, got);
    const thetaEq = this.bBuf.subarray(got - points, got);

    let lo = 0;
    let hi = 0;
    for (let i = 0; i < points; i += 1) {
      lo = Math.min(lo, theta[i], thetaEq[i]);
      hi = Math.max(hi, theta[i], thetaEq[i]);
    }
    const pad = Math.max((hi - lo) * 0.1, 0.05);
    lo -= pad;
    hi += pad;
    const yAt = (v: number): number =>
      canvas.height - ((v - lo) / (hi - lo)) * canvas.height;

    ctx.strokeStyle = COLORS.zero;
    ctx.beginPath();
    ctx.moveTo(0, yAt(0));
    ctx.lineTo(canvas.width, yAt(0));
    ctx.stroke();

    this.polyline(ctx, thetaEq, points, xAt, canvas.width, yAt, COLORS.thetaEq, true);
    this.polyline(ctx, theta, points, xAt, canvas.width, yAt, COLORS.theta);

    // overrun ticks along the top edge
    ring.scalar("overrun", ring.capacity, this.flagBuf);
    ctx.fillStyle = COLORS.overrun;
    for (let i = 0; i < points; i += 1) {
      if (this.flagBuf[first + i] === 1) {
        ctx.fillRect(xAt(i, canvas.width), 0, 2, 6);
      }
    }

    ctx.fillStyle = COLORS.text;
    ctx.font = "11px system-ui, sans-serif";
    ctx.fillText(`${hi.toFixed(2)} rad`, 4, 12);
    ctx.fillText(`${lo.toFixed(2)} rad`, 4, canvas.height - 4);
  }

  private drawActivation(
    ctx: CanvasRenderingContext2D,
    canvas: HTMLCanvasElement,
    ring: TelemetryRing,
    first: number,
    points: number,
    xAt: (i: number, width: number) => number,
    marks: readonly CommandMark[],
  ): void {
    const gotF = ring.scalar("alphaFlex", ring.capacity, this.aBuf);
    ring.scalar("alphaExt", ring.capacity, this.bBuf);
    const flex = this.aBuf.subarray(gotF - points, gotF);
    const ext = this.bBuf.subarray(gotF - points, gotF);
    const yAt = (v: number): number => canvas.height - v * (canvas.height - 8) - 4;

    this.polyline(ctx, flex, points, xAt, canvas.width, yAt, COLORS.alphaFlex);
    this.polyline(ctx, ext, points, xAt, canvas.width, yAt, COLORS.alphaExt);

    // triangle at the tick where telemetry first reflected each command
    ring.scalar("tickIndex", ring.capacity, this.tickBuf);
    ctx.fillStyle = COLORS.mark;
    for (const mark of marks) {
      if (mark.reflectedTick === null) {
        continue;
      }
      for (let i = points - 1; i >= 0; i -= 1) {
        if (this.tickBuf[first + i] === mark.reflectedTick) {
          const x = xAt(i, canvas.width);
          ctx.beginPath();
          ctx.moveTo(x, canvas.height - 1);
          ctx.lineTo(x - 4, canvas.height - 8);
          ctx.lineTo(x + 4, canvas.height - 8);
          ctx.closePath();
          ctx.fill();
          break;
        }
      }
    }

    ctx.fillStyle = COLORS.alphaFlex;
    ctx.font = "11px system-ui, sans-serif";
    ctx.fillText("flexor", 4, 12);
    ctx.fillStyle = COLORS.alphaExt;
    ctx.fillText("extensor", 44, 12);
  }

  private drawGate(
    ctx: CanvasRenderingContext2D,
    canvas: HTMLCanvasElement,
    ring: TelemetryRing,
    joint: number,
    points: number,
    xAt: (i: number, width: number) => number,
  ): void {
    const got = ring.lane("gate", joint, ring.capacity, this.aBuf);
    const gate = this.aBuf.subarray(got - points, got);
    const yClosed = canvas.height - 4;
    const yOpen = 4;

    ctx.strokeStyle = COLORS.gate;
    ctx.lineWidth = 1.5;
    ctx.beginPath();
    for (let i = 0; i < points; i += 1) {
      const x = xAt(i, canvas.width);
      const y = gate[i] > 0 ? yOpen : yClosed;
      if (i === 0) {
        ctx.moveTo(x, y);
      } else {
        ctx.lineTo(x, y);
      }
    }
    ctx.stroke();

    ctx.fillStyle = COLORS.text;
    ctx.font = "11px system-ui, sans-serif";
    ctx.fillText("gate open", 4, 12);
  }
}
