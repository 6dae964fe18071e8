// Desk setups rarely have an eye tracker, so the gaze channel is a proxy:
// either the pointer path delayed by a fixed lag, or a second cursor nudged
// with the keyboard (dwell style).

export type GazeProxyKind = "pointer-lag" | "keyboard";

export interface GazeProxy {
  readonly kind: GazeProxyKind;
  /** Feed the current pointer position (normalized). */
  pointer(x: number, y: number, nowMs: number): void;
  /** Current gaze point, or null when the proxy has nothing yet. */
  sample(nowMs: number): [number, number] | null;
}

/** The gaze point replays the pointer path `lagMs` milliseconds behind. */
export class PointerLagProxy implements GazeProxy {
  readonly kind = "pointer-lag";
  private trail: { t: number; x: number; y: number }[] = [];

  constructor(private lagMs = 100) {}

  pointer(x: number, y: number, nowMs: number): void {
    this.trail.push({ t: nowMs, x, y });
    // keep a little more history than the lag needs
    const cutoff = nowMs - this.lagMs * 4 - 500;
    while (this.trail.length > 2 && this.trail[0].t < cutoff) {
      this.trail.shift();
    }
  }

  sample(nowMs: number): [number, number] | null {
    if (this.trail.length === 0) return null;
    const wanted = nowMs - this.lagMs;
    if (wanted <= this.trail[0].t) {
      const first = this.trail[0];
      return [first.x, first.y];
    }
    for (let i = this.trail.length - 1; i >= 0; i--) {
      if (this.trail[i].t <= wanted) {
        const a = this.trail[i];
        const b = this.trail[i + 1];
        if (b === undefined) return [a.x, a.y];
        const span = b.t - a.t;
        const f = span > 0 ? (wanted - a.t) / span : 1;
        return [a.x + (b.x - a.x) * f, a.y + (b.y - a.y) * f];
      }
    }
    const last = this.trail[this.trail.length - 1];
    return [last.x, last.y];
  }
}

/** A second cursor moved in steps with the arrow keys / WASD. */
export class KeyboardGazeProxy implements GazeProxy {
  readonly kind = "keyboard";
  private x = 0.5;
  private y = 0.5;

  constructor(private step = 0.02) {}

  pointer(_x: number, _y: number, _nowMs: number): void {
    // keyboard proxy ignores the pointer
  }

  nudge(key: string): boolean {
    switch (key) {
      case "ArrowLeft":
      case "a":
        this.x -= this.step;
        break;
      case "ArrowRight":
      case "d":
        this.x += this.step;
        break;
      case "ArrowUp":
      case "w":
        this.y -= this.step;
        break;
      case "ArrowDown":
      case "s":
        this.y += this.step;
        break;
      default:
        return false;
    }
    this.x = Math.min(1, Math.max(0, this.x));
    this.y = Math.min(1, Math.max(0, this.y));
    return true;
  }

  sample(_nowMs: number): [number, number] {
    return [this.x, this.y];
  }
}
