// Pointer capture: normalizes pointer positions to [0,1]^2 canvas
// coordinates, tracks the trigger button, and emits input messages at a
// steady rate (every tick of the caller's send loop, at least 30/s while
// the pointer moves).

import type { GazeProxy } from "./gazeProxy.js";
import { makeInputMessage, type InputMessage } from "./protocol.js";

export interface CanvasRect {
  left: number;
  top: number;
  width: number;
  height: number;
}

export function normalizePointer(
  clientX: number,
  clientY: number,
  rect: CanvasRect,
): [number, number] {
  const u = rect.width > 0 ? (clientX - rect.left) / rect.width : 0.5;
  const v = rect.height > 0 ? (clientY - rect.top) / rect.height : 0.5;
  return [Math.min(1, Math.max(0, u)), Math.min(1, Math.max(0, v))];
}

export class InputCapture {
  handle: [number, number] = [0.5, 0.5];
  trigger = false;
  gazeEnabled = true;
  private lastEmitted: InputMessage | null = null;

  constructor(private proxy: GazeProxy) {}

  setProxy(proxy: GazeProxy): void {
    this.proxy = proxy;
  }

  pointerMove(clientX: number, clientY: number, rect: CanvasRect, nowMs: number): void {
    this.handle = normalizePointer(clientX, clientY, rect);
    this.proxy.pointer(this.handle[0], this.handle[1], nowMs);
  }

  pointerButton(down: boolean): void {
    this.trigger = down;
  }

  key(key: string): boolean {
    const proxy = this.proxy as { nudge?: (key: string) => boolean };
    return proxy.nudge ? proxy.nudge(key) : false;
  }

  /** Build the message for this send tick; timestamps are seconds. */
  message(nowMs: number): InputMessage {
    const gaze = this.gazeEnabled ? this.proxy.sample(nowMs) : null;
    const msg = makeInputMessage(nowMs / 1000, this.handle, gaze, this.trigger);
    this.lastEmitted = msg;
    return msg;
  }

  get last(): InputMessage | null {
    return this.lastEmitted;
  }
}
