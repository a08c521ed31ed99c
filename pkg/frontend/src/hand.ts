/**
 * Schematic joint view: a wrist lever for single-joint presets, a
 * five-finger hand for multi-joint ones. Extension rotates positive
 * (counterclockwise with the limb pointing up), flexion curls toward
 * the palm. Purely a picture of the latest telemetry frame.
 */

import type { FrameView } from "./ring.js";

const PALM = "#e8dccd";
const LIMB = "#b08e6a";
const OUTLINE = "#58472f";
const GATE_OPEN = "#2b8a3e";

export class HandSchematic {
  constructor(private readonly canvas: HTMLCanvasElement) {}

  render(frame: FrameView | null): void {
    const ctx = this.canvas.getContext("2d");
    if (ctx === null) {
      return;
    }
    const { width, height } = this.canvas;
    ctx.clearRect(0, 0, width, height);
    ctx.fillStyle = "#ffffff";
    ctx.fillRect(0, 0, width, height);
    ctx.strokeStyle = "#d0d4da";
    ctx.strokeRect(0.5, 0.5, width - 1, height - 1);
    if (frame === null) {
      return;
    }
    if (frame.theta.length === 1) {
      this.renderWrist(ctx, frame, width, height);
    } else {
      this.renderFingers(ctx, frame, width, height);
    }
  }

  private renderWrist(
    ctx: CanvasRenderingContext2D,
    frame: FrameView,
    width: number,
    height: number,
  ): void {
    const cx = width / 2;
    const cy = height * 0.78;
    const reach = height * 0.6;

    // forearm
    ctx.strokeStyle = OUTLINE;
    ctx.lineWidth = 10;
    ctx.lineCap = "round";
    ctx.beginPath();
    ctx.moveTo(cx, height - 6);
    ctx.lineTo(cx, cy);
    ctx.stroke();

    // hand lever: theta = 0 points straight up, extension tips positive x
    const angle = frame.theta[0];
    const tipX = cx + Math.sin(angle) * reach;
    const tipY = cy - Math.cos(angle) * reach;
    ctx.strokeStyle = frame.gate[0] > 0 ? GATE_OPEN : LIMB;
    ctx.lineWidth = 8;
    ctx.beginPath();
    ctx.moveTo(cx, cy);
    ctx.lineTo(tipX, tipY);
    ctx.stroke();

    // equilibrium ghost
    const eq = frame.thetaEq[0];
    ctx.strokeStyle = "rgba(217, 72, 15, 0.45)";
    ctx.lineWidth = 3;
    ctx.setLineDash([5, 4]);
    ctx.beginPath();
    ctx.moveTo(cx, cy);
    ctx.lineTo(cx + Math.sin(eq) * reach, cy - Math.cos(eq) * reach);
    ctx.stroke();
    ctx.setLineDash([]);

    ctx.fillStyle = OUTLINE;
    ctx.beginPath();
    ctx.arc(cx, cy, 7, 0, Math.PI * 2);
    ctx.fill();
  }

  private renderFingers(
    ctx: CanvasRenderingContext2D,
    frame: FrameView,
    width: number,
    height: number,
  ): void {
    const joints = frame.theta.length;
    const palmTop = height * 0.55;
    const palmLeft = width * 0.18;
    const palmWidth = width * 0.64;

    ctx.fillStyle = PALM;
    ctx.strokeStyle = OUTLINE;
    ctx.lineWidth = 2;
    ctx.beginPath();
    ctx.roundRect(palmLeft, palmTop, palmWidth, height * 0.34, 10);
    ctx.fill();
    ctx.stroke();

    const segment = height * 0.17;
    for (let j = 0; j < joints; j += 1) {
      const baseX = palmLeft + (palmWidth * (j + 0.5)) / joints;
      const baseY = palmTop;
      // flexion (negative theta) curls the finger over the palm
      const curl = -frame.theta[j];
      const midX = baseX + Math.sin(curl) * segment;
      const midY = baseY - Math.cos(curl) * segment;
      const tipX = midX + Math.sin(2 * curl) * segment;
      const tipY = midY - Math.cos(2 * curl) * segment;

      ctx.strokeStyle = frame.gate[j] > 0 ? GATE_OPEN : LIMB;
      ctx.lineWidth = 9;
      ctx.lineCap = "round";
      ctx.beginPath();
      ctx.moveTo(baseX, baseY);
      ctx.lineTo(midX, midY);
      ctx.lineTo(tipX, tipY);
      ctx.stroke();
    }
  }
}
