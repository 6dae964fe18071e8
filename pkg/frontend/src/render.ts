// Canvas renderer. Grey-scale only (no hue-based distinctions): task
// targets are circles, distractors are diamonds, the tip is a crosshair,
// the laser a bright line, a locked target gets a highlight ring with a
// progress arc.

import type { InterpolatedFrame } from "./interpolation.js";
import type { ViewState } from "./viewState.js";

export interface GameGeometry {
  screenWidth: number; // mm
  screenHeight: number;
  targetRadius: number;
  laserRange: number;
  trialDuration: number;
}

export const DEFAULT_GEOMETRY: GameGeometry = {
  screenWidth: 915,
  screenHeight: 515,
  targetRadius: 30,
  laserRange: 100,
  trialDuration: 80,
};

// grey-scale palette (equal RGB channels throughout)
export const PALETTE = {
  background: "#1c1c1c",
  ground: "#3a3a3a",
  task: "#d8d8d8",
  distractor: "#6e6e6e",
  tip: "#ffffff",
  laser: "#f2f2f2",
  lockRing: "#ffffff",
  gaze: "#9a9a9a",
  hud: "#e0e0e0",
  toastBg: "#4a4a4a",
};

export function isGreyscale(color: string): boolean {
  const m = /^#([0-9a-f]{2})([0-9a-f]{2})([0-9a-f]{2})$/i.exec(color);
  if (!m) return false;
  return m[1] === m[2] && m[2] === m[3];
}

/** mm (centre origin, y up) -> canvas pixels (top-left origin, y down). */
export function mmToCanvas(
  x: number,
  y: number,
  geom: GameGeometry,
  width: number,
  height: number,
): [number, number] {
  return [(x / geom.screenWidth + 0.5) * width, (0.5 - y / geom.screenHeight) * height];
}

export function mmScale(geom: GameGeometry, width: number): number {
  return width / geom.screenWidth;
}

type Ctx = CanvasRenderingContext2D;

function drawBackground(ctx: Ctx, w: number, h: number): void {
  ctx.fillStyle = PALETTE.background;
  ctx.fillRect(0, 0, w, h);
  // cartoon skyline strip along the bottom line
  ctx.fillStyle = PALETTE.ground;
  const base = h - 14;
  ctx.fillRect(0, base, w, 14);
  for (let i = 0; i < 9; i++) {
    const bw = w / 14;
    const bh = 10 + ((i * 37) % 26);
    ctx.fillRect(w * 0.03 + i * bw * 1.5, base - bh, bw, bh);
  }
}

function drawTargets(ctx: Ctx, frame: InterpolatedFrame, geom: GameGeometry, w: number, h: number): void {
  const r = geom.targetRadius * mmScale(geom, w);
  for (const t of frame.targets) {
    const [px, py] = mmToCanvas(t.x, t.y, geom, w, h);
    if (t.kind === "task") {
      ctx.fillStyle = PALETTE.task;
      ctx.beginPath();
      ctx.arc(px, py, r, 0, Math.PI * 2);
      ctx.fill();
      if (t.progress > 0) {
        ctx.strokeStyle = PALETTE.background;
        ctx.lineWidth = 3;
        ctx.beginPath();
        ctx.arc(px, py, r * 0.62, -Math.PI / 2, -Math.PI / 2 + t.progress * Math.PI * 2);
        ctx.stroke();
      }
    } else {
      ctx.fillStyle = PALETTE.distractor;
      ctx.beginPath();
      ctx.moveTo(px, py - r);
      ctx.lineTo(px + r, py);
      ctx.lineTo(px, py + r);
      ctx.lineTo(px - r, py);
      ctx.closePath();
      ctx.fill();
    }
    if (t.id === frame.snapshot.locked_target) {
      ctx.strokeStyle = PALETTE.lockRing;
      ctx.lineWidth = 2;
      ctx.beginPath();
      ctx.arc(px, py, r * 1.35, 0, Math.PI * 2);
      ctx.stroke();
      ctx.lineWidth = 4;
      ctx.beginPath();
      ctx.arc(px, py, r * 1.35, -Math.PI / 2, -Math.PI / 2 + t.progress * Math.PI * 2);
      ctx.stroke();
    }
  }
}

function drawLaserAndTip(ctx: Ctx, frame: InterpolatedFrame, geom: GameGeometry, w: number, h: number): void {
  const [tx, ty] = mmToCanvas(frame.tip[0], frame.tip[1], geom, w, h);
  const locked = frame.targets.find((t) => t.id === frame.snapshot.locked_target);
  let beamTo: [number, number] | null = null;
  if (locked !== undefined) {
    beamTo = mmToCanvas(locked.x, locked.y, geom, w, h);
  } else {
    // nearest task target within laser range
    let best = geom.laserRange;
    for (const t of frame.targets) {
      if (t.kind !== "task") continue;
      const d = Math.hypot(t.x - frame.tip[0], t.y - frame.tip[1]);
      if (d < best) {
        best = d;
        beamTo = mmToCanvas(t.x, t.y, geom, w, h);
      }
    }
  }
  if (beamTo !== null && (locked !== undefined || beamTo !== null)) {
    ctx.strokeStyle = PALETTE.laser;
    ctx.lineWidth = 2;
    ctx.setLineDash([6, 4]);
    ctx.beginPath();
    ctx.moveTo(tx, ty);
    ctx.lineTo(beamTo[0], beamTo[1]);
    ctx.stroke();
    ctx.setLineDash([]);
  }
  // tip crosshair
  ctx.strokeStyle = PALETTE.tip;
  ctx.lineWidth = 2;
  ctx.beginPath();
  ctx.moveTo(tx - 10, ty);
  ctx.lineTo(tx + 10, ty);
  ctx.moveTo(tx, ty - 10);
  ctx.lineTo(tx, ty + 10);
  ctx.stroke();
  ctx.beginPath();
  ctx.arc(tx, ty, 5, 0, Math.PI * 2);
  ctx.stroke();
}

function drawGazeMarker(ctx: Ctx, frame: InterpolatedFrame, geom: GameGeometry, w: number, h: number): void {
  if (frame.gaze === null) return;
  const [gx, gy] = mmToCanvas(frame.gaze[0], frame.gaze[1], geom, w, h);
  ctx.strokeStyle = PALETTE.gaze;
  ctx.lineWidth = 1.5;
  ctx.beginPath();
  ctx.arc(gx, gy, 9, 0, Math.PI * 2);
  ctx.stroke();
  ctx.beginPath();
  ctx.arc(gx, gy, 2, 0, Math.PI * 2);
  ctx.stroke();
}

function drawHud(ctx: Ctx, view: ViewState, geom: GameGeometry, w: number, nowMs: number): void {
  const snap = view.latest;
  ctx.fillStyle = PALETTE.hud;
  ctx.font = "14px monospace";
  ctx.textBaseline = "top";
  if (snap !== null) {
    const remaining = Math.max(0, geom.trialDuration - snap.time);
    ctx.fillText(
      `mode ${snap.mode}  |  stopped ${snap.score.completed}  ` +
        `missed ${snap.score.failed}  of ${snap.score.total_spawned}  |  ` +
        `${remaining.toFixed(0)}s left`,
      12,
      10,
    );
  } else {
    ctx.fillText("choose a mode, then press start", 12, 10);
  }
  if (view.session === "ended" && view.final !== null) {
    const s = view.final.score;
    const total = Math.max(1, s.completed + s.failed);
    ctx.font = "22px monospace";
    ctx.fillText(
      `trial over - ${s.completed}/${s.completed + s.failed} stopped ` +
        `(${((100 * s.completed) / total).toFixed(0)}%)`,
      12,
      40,
    );
  }
  if (view.toast !== null && view.toast.until > nowMs) {
    ctx.font = "14px monospace";
    const text = view.toast.text;
    const width = ctx.measureText(text).width + 20;
    ctx.fillStyle = PALETTE.toastBg;
    ctx.fillRect(w - width - 12, 10, width, 26);
    ctx.fillStyle = PALETTE.hud;
    ctx.fillText(text, w - width - 2, 16);
  }
}

export function render(
  ctx: Ctx,
  view: ViewState,
  geom: GameGeometry,
  width: number,
  height: number,
  nowMs: number,
): void {
  drawBackground(ctx, width, height);
  const frame = view.buffer.frame(nowMs);
  if (frame !== null) {
    drawTargets(ctx, frame, geom, width, height);
    drawLaserAndTip(ctx, frame, geom, width, height);
    if (view.showGazeMarker) {
      drawGazeMarker(ctx, frame, geom, width, height);
    }
  }
  drawHud(ctx, view, geom, width, nowMs);
  if (view.connection !== "connected") {
    ctx.fillStyle = "rgba(20, 20, 20, 0.65)";
    ctx.fillRect(0, 0, width, height);
    ctx.fillStyle = PALETTE.hud;
    ctx.font = "18px monospace";
    ctx.fillText(
      view.connection === "connecting" ? "connecting..." : "disconnected - retrying",
      width / 2 - 90,
      height / 2,
    );
  }
}
