/**
 * Marks the control tick at which telemetry first reflects each sent
 * activation command, so the UI can annotate command latency on the
 * charts (the live loop promises reflection within two ticks).
 */

import type { Telemetry } from "./protocol.js";

/**
 * The engine caps applied levels just below 1 and echoes the capped value
 * in telemetry (see docs/protocol.md, set_activation). Matching must
 * anticipate that or a slider at exactly 1.0 would never resolve.
 */
export const ECHOED_LEVEL_CAP = 0.999;

function echoed(level: number): number {
  return Math.min(level, ECHOED_LEVEL_CAP);
}

export interface CommandMark {
  sequence: number;
  /** Latest telemetry tick already received when the command was sent. */
  sentAfterTick: number;
  alphaFlex: number;
  alphaExt: number;
  /** Tick of the first telemetry frame carrying the commanded levels. */
  reflectedTick: number | null;
}

export class LatencyTracker {
  private pending: CommandMark[] = [];
  private marks: CommandMark[] = [];
  private readonly keep: number;

  constructor(keep = 256) {
    this.keep = keep;
  }

  /** Record a just-sent set_activation command. */
  sent(sequence: number, alphaFlex: number, alphaExt: number, sentAfterTick: number): void {
    this.pending.push({
      sequence,
      sentAfterTick,
      alphaFlex: echoed(alphaFlex),
      alphaExt: echoed(alphaExt),
      reflectedTick: null,
    });
  }

  /**
   * Inspect one received telemetry frame; returns the commands it
   * resolves. The live loop coalesces to the last writer per tick, so an
   * overwritten command is resolved by the frame reflecting its
   * successor (its own levels will never appear).
   */
  observe(frame: Telemetry): CommandMark[] {
    const resolved: CommandMark[] = [];
    for (let i = this.pending.length - 1; i >= 0; i -= 1) {
      const mark = this.pending[i];
      if (frame.alpha_flex === mark.alphaFlex && frame.alpha_ext === mark.alphaExt) {
        mark.reflectedTick = frame.tick_index;
        // everything sent before this command was coalesced away
        resolved.push(...this.pending.splice(0, i + 1));
        break;
      }
    }
    for (const mark of resolved) {
      this.marks.push(mark);
    }
    if (this.marks.length > this.keep) {
      this.marks.splice(0, this.marks.length - this.keep);
    }
    return resolved;
  }

  /** Commands sent but not yet seen in telemetry. */
  get pendingCount(): number {
    return this.pending.length;
  }

  /** Resolved marks, oldest first, bounded history. */
  history(): readonly CommandMark[] {
    return this.marks;
  }

  /** Worst reflected latency in ticks over the kept history, 0 if none. */
  worstLatency(): number {
    let worst = 0;
    for (const mark of this.marks) {
      if (mark.reflectedTick !== null) {
        worst = Math.max(worst, mark.reflectedTick - mark.sentAfterTick);
      }
    }
    return worst;
  }

  clear(): void {
    this.pending = [];
    this.marks = [];
  }
}
