import { describe, expect, it } from "vitest";
import { SnapshotBuffer } from "../src/interpolation.js";
import type { Snapshot } from "../src/protocol.js";

function snap(tick: number, overrides: Partial<Snapshot> = {}): Snapshot {
  return {
    v: 1,
    tick_index: tick,
    time: tick / 60,
    mode: "cooperative",
    status: "running",
    targets: [],
    tip_point: [0, 0],
    locked_target: null,
    gaze_point: null,
    score: { completed: 0, failed: 0, total_spawned: 0 },
    stale_inputs: 0,
    ...overrides,
  };
}

describe("SnapshotBuffer", () => {
  it("returns the only snapshot before a pair exists", () => {
    const buf = new SnapshotBuffer();
    buf.push(snap(1, { tip_point: [10, 20] }), 0);
    const frame = buf.frame(100)!;
    expect(frame.tip).toEqual([10, 20]);
  });

  it("interpolates linearly between two snapshots", () => {
    const buf = new SnapshotBuffer();
    buf.push(snap(1, { targets: [{ id: 1, kind: "task", x: 0, y: 100, speed: 60, progress: 0, state: "falling" }] }), 0);
    buf.push(
      snap(2, {
        targets: [{ id: 1, kind: "task", x: 10, y: 90, speed: 60, progress: 0.5, state: "falling" }],
      }),
      1000 / 60,
    );
    // halfway through the measured cadence
    const frame = buf.frame(1000 / 60 + 1000 / 120)!;
    expect(frame.targets[0].x).toBeCloseTo(5, 5);
    expect(frame.targets[0].y).toBeCloseTo(95, 5);
    expect(frame.targets[0].progress).toBeCloseTo(0.25, 5);
  });

  it("never extrapolates past the newest snapshot", () => {
    const buf = new SnapshotBuffer();
    buf.push(snap(1, { tip_point: [0, 0] }), 0);
    buf.push(snap(2, { tip_point: [10, 0] }), 16);
    const late = buf.frame(5000)!;
    expect(late.tip[0]).toBe(10); // clamped at the committed state
    expect(buf.factor(5000)).toBe(1);
  });

  it("ignores stale or duplicate snapshots", () => {
    const buf = new SnapshotBuffer();
    buf.push(snap(5), 0);
    buf.push(snap(4), 10); // older tick: dropped
    buf.push(snap(5), 20); // duplicate: dropped
    expect(buf.latest!.tick_index).toBe(5);
  });

  it("passes through targets that appear between snapshots", () => {
    const buf = new SnapshotBuffer();
    buf.push(snap(1), 0);
    buf.push(
      snap(2, {
        targets: [{ id: 9, kind: "distractor", x: 3, y: 4, speed: 60, progress: 0, state: "falling" }],
      }),
      16,
    );
    const frame = buf.frame(24)!;
    expect(frame.targets[0].x).toBe(3);
  });
});
