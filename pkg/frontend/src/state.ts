/** UI state store and the telemetry render buffer. */

import type { ClipJson, TelemetryFrame } from "./types.js";
import { emptyClip } from "./types.js";

export interface UiState {
  connected: boolean;
  /** Always equals the latest telemetry frame's mode field. */
  modeLabel: string;
  clip: ClipJson;
  selectedNoteId: number | null;
  /** Inline error surfaced from the last rejected mutation. */
  error: string | null;
  recordingId: string | null;
}

export type Listener = (state: UiState) => void;

export class UiStore {
  private state: UiState = {
    connected: false,
    modeLabel: "—",
    clip: emptyClip(),
    selectedNoteId: null,
    error: null,
    recordingId: null,
  };
  private listeners: Listener[] = [];

  get(): UiState {
    return this.state;
  }

  update(patch: Partial<UiState>): void {
    this.state = { ...this.state, ...patch };
    for (const fn of this.listeners) fn(this.state);
  }

  subscribe(fn: Listener): () => void {
    this.listeners.push(fn);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== fn);
    };
  }
}

/**
 * Decouples rendering from message ingestion: the WebSocket handler pushes
 * every frame, the requestAnimationFrame loop consumes only the newest one.
 * Stale or duplicate frames (seq not increasing) are discarded so the render
 * buffer stays seq-monotone, and the buffer never grows past its cap no
 * matter how far rendering falls behind.
 */
export class TelemetryBuffer {
  private frames: TelemetryFrame[] = [];
  private lastSeq = -1;
  dropped = 0;

  constructor(readonly capacity: number = 64) {}

  push(frame: TelemetryFrame): void {
    if (frame.seq <= this.lastSeq) {
      this.dropped += 1;
      return;
    }
    this.lastSeq = frame.seq;
    this.frames.push(frame);
    if (this.frames.length > this.capacity) {
      this.frames.splice(0, this.frames.length - this.capacity);
      this.dropped += 1;
    }
  }

  /** Newest pending frame, discarding everything older (render coalescing). */
  takeLatest(): TelemetryFrame | null {
    if (this.frames.length === 0) return null;
    const latest = this.frames[this.frames.length - 1];
    this.frames.length = 0;
    return latest;
  }

  /** All pending frames in order (for consumers that must not skip). */
  drain(): TelemetryFrame[] {
    const out = this.frames;
    this.frames = [];
    return out;
  }

  get size(): number {
    return this.frames.length;
  }
}
