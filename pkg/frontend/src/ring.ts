/**
 * Fixed-capacity telemetry history backing the strip charts.
 *
 * Stores the numeric lanes of each received telemetry frame in
 * preallocated typed arrays (one Float32 slot per joint per lane), so a
 * long session neither grows memory nor churns the garbage collector.
 * Writes wrap around and overwrite the oldest frame; readers index
 * chronologically from the oldest retained frame.
 */

import type { MotionLabel, Telemetry } from "./protocol.js";

export const MOTION_CODE: Record<MotionLabel, number> = {
  none: 0,
  flexion: 1,
  extension: 2,
};

const MOTION_FROM_CODE: MotionLabel[] = ["none", "flexion", "extension"];

/** 30 s of history at the 5 ms control tick. */
export const DEFAULT_CAPACITY = 6000;

export interface FrameView {
  tickIndex: number;
  t: number;
  /** Per-joint lanes, length = jointCount. */
  theta: Float32Array;
  thetaEq: Float32Array;
  theta0: Float32Array;
  gate: Uint8Array;
  motion: MotionLabel;
  alphaFlex: number;
  alphaExt: number;
  overrun: boolean;
}

export class TelemetryRing {
  readonly jointCount: number;
  readonly capacity: number;

  private start = 0;
  private count = 0;

  private readonly tickIndex: Float64Array;
  private readonly t: Float64Array;
  private readonly theta: Float32Array;
  private readonly thetaEq: Float32Array;
  private readonly theta0: Float32Array;
  private readonly gate: Uint8Array;
  private readonly motion: Uint8Array;
  private readonly alphaFlex: Float32Array;
  private readonly alphaExt: Float32Array;
  private readonly overrun: Uint8Array;

  constructor(jointCount: number, capacity: number = DEFAULT_CAPACITY) {
    if (!Number.isInteger(jointCount) || jointCount < 1) {
      throw new RangeError(`jointCount must be a positive integer, got ${jointCount}`);
    }
    if (!Number.isInteger(capacity) || capacity < 2) {
      throw new RangeError(`capacity must be an integer >= 2, got ${capacity}`);
    }
    this.jointCount = jointCount;
    this.capacity = capacity;
    this.tickIndex = new Float64Array(capacity);
    this.t = new Float64Array(capacity);
    this.theta = new Float32Array(capacity * jointCount);
    this.thetaEq = new Float32Array(capacity * jointCount);
    this.theta0 = new Float32Array(capacity * jointCount);
    this.gate = new Uint8Array(capacity * jointCount);
    this.motion = new Uint8Array(capacity);
    this.alphaFlex = new Float32Array(capacity);
    this.alphaExt = new Float32Array(capacity);
    this.overrun = new Uint8Array(capacity);
  }

  get length(): number {
    return this.count;
  }

  clear(): void {
    this.start = 0;
    this.count = 0;
  }

  push(frame: Telemetry): void {
    if (frame.theta.length !== this.jointCount) {
      throw new RangeError(
        `telemetry carries ${frame.theta.length} joints, ring is sized for ${this.jointCount}`,
      );
    }
    const slot = (this.start + this.count) % this.capacity;
    if (this.count === this.capacity) {
      this.start = (this.start + 1) % this.capacity; // overwrite oldest
    } else {
      this.count += 1;
    }
    this.tickIndex[slot] = frame.tick_index;
    this.t[slot] = frame.t;
    this.motion[slot] = MOTION_CODE[frame.motion];
    this.alphaFlex[slot] = frame.alpha_flex;
    this.alphaExt[slot] = frame.alpha_ext;
    this.overrun[slot] = frame.overrun ? 1 : 0;
    const base = slot * this.jointCount;
    for (let j = 0; j < this.jointCount; j += 1) {
      this.theta[base + j] = frame.theta[j];
      this.thetaEq[base + j] = frame.theta_eq[j];
      this.theta0[base + j] = frame.theta0[j];
      this.gate[base + j] = frame.gate[j];
    }
  }

  /** Frame i in chronological order, 0 = oldest retained. Views are copies. */
  at(i: number): FrameView {
    if (!Number.isInteger(i) || i < 0 || i >= this.count) {
      throw new RangeError(`index ${i} outside [0, ${this.count})`);
    }
    const slot = (this.start + i) % this.capacity;
    const base = slot * this.jointCount;
    return {
      tickIndex: this.tickIndex[slot],
      t: this.t[slot],
      theta: this.theta.slice(base, base + this.jointCount),
      thetaEq: this.thetaEq.slice(base, base + this.jointCount),
      theta0: this.theta0.slice(base, base + this.jointCount),
      gate: this.gate.slice(base, base + this.jointCount),
      motion: MOTION_FROM_CODE[this.motion[slot]],
      alphaFlex: this.alphaFlex[slot],
      alphaExt: this.alphaExt[slot],
      overrun: this.overrun[slot] === 1,
    };
  }

  latest(): FrameView | null {
    return this.count === 0 ? null : this.at(this.count - 1);
  }

  /**
   * Copy one scalar lane for the last `n` frames into `out` (oldest first)
   * and return how many values were written. Allocation-free on the hot
   * path when the caller reuses `out` across animation frames.
   */
  lane(
    name: "theta" | "thetaEq" | "theta0" | "gate",
    joint: number,
    n: number,
    out: Float32Array,
  ): number {
    if (joint < 0 || joint >= this.jointCount) {
      throw new RangeError(`joint ${joint} outside [0, ${this.jointCount})`);
    }
    const source = name === "theta" ? this.theta
      : name === "thetaEq" ? this.thetaEq
      : name === "theta0" ? this.theta0
      : this.gate;
    const take = Math.min(n, this.count, out.length);
    const first = this.count - take;
    for (let i = 0; i < take; i += 1) {
      const slot = (this.start + first + i) % this.capacity;
      out[i] = source[slot * this.jointCount + joint];
    }
    return take;
  }

  /** Same as lane() for the per-frame scalars. */
  scalar(
    name: "t" | "alphaFlex" | "alphaExt" | "motion" | "overrun" | "tickIndex",
    n: number,
    out: Float32Array | Float64Array,
  ): number {
    const source = name === "t" ? this.t
      : name === "alphaFlex" ? this.alphaFlex
      : name === "alphaExt" ? this.alphaExt
      : name === "motion" ? this.motion
      : name === "overrun" ? this.overrun
      : this.tickIndex;
    const take = Math.min(n, this.count, out.length);
    const first = this.count - take;
    for (let i = 0; i < take; i += 1) {
      out[i] = source[(this.start + first + i) % this.capacity];
    }
    return take;
  }
}
