// Snapshot interpolation: render one snapshot behind the newest and lerp
// between the two. Never extrapolates past the newest committed snapshot.

import type { Snapshot, TargetView } from "./protocol.js";

export interface InterpolatedFrame {
  targets: TargetView[];
  tip: [number, number];
  gaze: [number, number] | null;
  snapshot: Snapshot; // the newer of the pair (HUD state, score, status)
}

const lerp = (a: number, b: number, t: number) => a + (b - a) * t;

export class SnapshotBuffer {
  private prev: Snapshot | null = null;
  private next: Snapshot | null = null;
  private nextArrivedAt = 0; // performance.now() ms when `next` landed
  private interval = 1000 / 60; // measured snapshot cadence, ms

  get latest(): Snapshot | null {
    return this.next;
  }

  push(snapshot: Snapshot, nowMs: number): void {
    // only newer snapshots are committed
    if (this.next !== null && snapshot.tick_index <= this.next.tick_index) {
      return;
    }
    if (this.next !== null) {
      const measured = nowMs - this.nextArrivedAt;
      if (measured > 0 && measured < 1000) {
        // smooth the cadence estimate a little
        this.interval = 0.8 * this.interval + 0.2 * measured;
      }
    }
    this.prev = this.next;
    this.next = snapshot;
    this.nextArrivedAt = nowMs;
  }

  /** Interpolation factor in [0, 1]; clamped so we never extrapolate. */
  factor(nowMs: number): number {
    if (this.prev === null || this.next === null) return 1;
    const t = (nowMs - this.nextArrivedAt) / this.interval;
    return t < 0 ? 0 : t > 1 ? 1 : t;
  }

  frame(nowMs: number): InterpolatedFrame | null {
    if (this.next === null) return null;
    if (this.prev === null) {
      return {
        targets: this.next.targets,
        tip: this.next.tip_point,
        gaze: this.next.gaze_point,
        snapshot: this.next,
      };
    }
    const t = this.factor(nowMs);
    const before = new Map(this.prev.targets.map((x) => [x.id, x]));
    const targets = this.next.targets.map((target) => {
      const old = before.get(target.id);
      if (old === undefined) return target;
      return {
        ...target,
        x: lerp(old.x, target.x, t),
        y: lerp(old.y, target.y, t),
        progress: lerp(old.progress, target.progress, t),
      };
    });
    const tip: [number, number] = [
      lerp(this.prev.tip_point[0], this.next.tip_point[0], t),
      lerp(this.prev.tip_point[1], this.next.tip_point[1], t),
    ];
    let gaze: [number, number] | null = this.next.gaze_point;
    if (gaze !== null && this.prev.gaze_point !== null) {
      gaze = [
        lerp(this.prev.gaze_point[0], gaze[0], t),
        lerp(this.prev.gaze_point[1], gaze[1], t),
      ];
    }
    return { targets, tip, gaze, snapshot: this.next };
  }

  reset(): void {
    this.prev = null;
    this.next = null;
  }
}
