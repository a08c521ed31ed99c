/**
 * Operator input state: two contraction sliders, keyboard nudges, and a
 * relax action. Mutations mark the state dirty; once per animation frame
 * the session drains at most one set_activation command, so a dragged
 * slider emits one command per frame no matter how many DOM events fired.
 */

import type { Command } from "./protocol.js";
import { setActivation } from "./protocol.js";

/** Out-of-range input is clamped, never rejected: sliders and keys saturate. */
export function clamp01(value: number): number {
  if (Number.isNaN(value)) {
    return 0;
  }
  return Math.min(1, Math.max(0, value));
}

export const KEY_STEP = 0.05;

export interface KeyBinding {
  flexorUp: string;
  flexorDown: string;
  extensorUp: string;
  extensorDown: string;
  relax: string;
}

export const DEFAULT_KEYS: KeyBinding = {
  flexorUp: "w",
  flexorDown: "s",
  extensorUp: "e",
  extensorDown: "d",
  relax: "r",
};

export class ActivationInput {
  private flexor = 0;
  private extensor = 0;
  private dirty = false;

  get flexorLevel(): number {
    return this.flexor;
  }

  get extensorLevel(): number {
    return this.extensor;
  }

  setFlexor(level: number): void {
    this.apply(clamp01(level), this.extensor);
  }

  setExtensor(level: number): void {
    this.apply(this.flexor, clamp01(level));
  }

  /** Zero both sides; the joint then holds its posture. */
  relax(): void {
    this.apply(0, 0);
  }

  /** Keyboard handler; returns true when the key was consumed. */
  handleKey(key: string, bindings: KeyBinding = DEFAULT_KEYS): boolean {
    switch (key) {
      case bindings.flexorUp:
        this.setFlexor(this.flexor + KEY_STEP);
        return true;
      case bindings.flexorDown:
        this.setFlexor(this.flexor - KEY_STEP);
        return true;
      case bindings.extensorUp:
        this.setExtensor(this.extensor + KEY_STEP);
        return true;
      case bindings.extensorDown:
        this.setExtensor(this.extensor - KEY_STEP);
        return true;
      case bindings.relax:
        this.relax();
        return true;
      default:
        return false;
    }
  }

  /**
   * Drain the pending change as one command, or null when nothing
   * changed since the last drain. Call once per animation frame.
   */
  takeCommand(sequence: number): Command | null {
    if (!this.dirty) {
      return null;
    }
    this.dirty = false;
    return setActivation(this.flexor, this.extensor, sequence);
  }

  private apply(flexor: number, extensor: number): void {
    if (flexor !== this.flexor || extensor !== this.extensor) {
      this.flexor = flexor;
      this.extensor = extensor;
      this.dirty = true;
    }
  }
}
