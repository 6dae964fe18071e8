// Client-side state: committed snapshots, connection status and the mode
// selection workflow. The UI never mutates game state; every change comes
// from a server message.

import { SnapshotBuffer } from "./interpolation.js";
import type { Mode, ServerMessage, Snapshot } from "./protocol.js";

export type ConnectionStatus = "connecting" | "connected" | "disconnected";
export type SessionStatus = "idle" | "configured" | "running" | "ended";

export interface Toast {
  text: string;
  until: number; // ms timestamp
}

export class ViewState {
  connection: ConnectionStatus = "connecting";
  session: SessionStatus = "idle";
  selectedMode: Mode = "cooperative";
  availableModes: Mode[] = [];
  sessionId: string | null = null;
  buffer = new SnapshotBuffer();
  final: Snapshot | null = null;
  toast: Toast | null = null;
  showGazeMarker = true;

  get latest(): Snapshot | null {
    return this.buffer.latest ?? this.final;
  }

  /** Mode changes are only allowed while no trial is running. */
  canConfigure(): boolean {
    return this.session === "idle" || this.session === "configured" || this.session === "ended";
  }

  showToast(text: string, nowMs: number, forMs = 2500): void {
    this.toast = { text, until: nowMs + forMs };
  }

  apply(msg: ServerMessage, nowMs: number): void {
    switch (msg.kind) {
      case "hello":
        this.availableModes = msg.modes;
        break;
      case "configure":
        if (msg.ok) {
          this.session = "configured";
          this.sessionId = msg.session_id;
          this.selectedMode = msg.mode;
          this.buffer.reset();
          this.final = null;
        }
        break;
      case "start":
        this.session = "running";
        break;
      case "snapshot":
        this.buffer.push(msg, nowMs);
        if (msg.status === "ended") {
          this.session = "ended";
          this.final = msg;
        }
        break;
      case "end":
        this.session = "ended";
        this.final = msg;
        break;
      case "error":
        this.showToast(msg.message, nowMs);
        break;
    }
  }
}
