/** Canvas piano roll with the four grid-editor gestures.
 *
 * The component never commits clip state itself: every gesture builds a
 * proposed clip and hands it to `onPropose` (which posts it to the bridge).
 * The committed document only changes when `setClip` is called with the
 * backend's accepted clip; a rejected proposal leaves the view on the last
 * committed state, so the backend stays the single source of truth. During
 * an active drag a ghost preview is drawn without touching the document.
 */

import type { ClipJson, NoteJson } from "./types.js";
import { PITCH_MAX, PITCH_MIN } from "./types.js";

export interface PianoRollOptions {
  rowHeight: number;
  pxPerTick: number;
  defaultVelocity: number;
}

const DEFAULTS: PianoRollOptions = {
  rowHeight: 12,
  pxPerTick: 0.08,
  defaultVelocity: 100,
};

const EDGE_PX = 5; // grab margin for resize handles
const DRAG_THRESHOLD_PX = 3; // below this a pointerdown+up is a click

type Gesture =
  | { kind: "idle" }
  | {
      kind: "drag";
      noteId: number;
      edge: "start" | "end" | null; // null = move the whole note
      originX: number;
      originY: number;
      dTicks: number;
      dPitch: number;
      moved: boolean;
    };

// --- pure proposal builders ---------------------------------------------------

function nextNoteId(clip: ClipJson): number {
  return clip.notes.reduce((acc, n) => Math.max(acc, n.id), 0) + 1;
}

export function withAddedNote(
  clip: ClipJson,
  pitch: number,
  startTicks: number,
  durationTicks: number,
  velocity: number,
): ClipJson {
  const note: NoteJson = {
    id: nextNoteId(clip),
    pitch,
    start_ticks: startTicks,
    duration_ticks: durationTicks,
    velocity,
  };
  return { ...clip, notes: [...clip.notes, note] };
}

export function withMovedNote(
  clip: ClipJson,
  noteId: number,
  dTicks: number,
  dPitch: number,
): ClipJson {
  return {
    ...clip,
    notes: clip.notes.map((n) =>
      n.id === noteId
        ? { ...n, start_ticks: n.start_ticks + dTicks, pitch: n.pitch + dPitch }
        : n,
    ),
  };
}

export function withResizedNote(
  clip: ClipJson,
  noteId: number,
  newStart: number | null,
  newEnd: number | null,
): ClipJson {
  return {
    ...clip,
    notes: clip.notes.map((n) => {
      if (n.id !== noteId) return n;
      const start = newStart ?? n.start_ticks;
      const end = newEnd ?? n.start_ticks + n.duration_ticks;
      return { ...n, start_ticks: start, duration_ticks: end - start };
    }),
  };
}

export function withoutNotes(clip: ClipJson): ClipJson {
  return { ...clip, notes: [], pitch_bends: [] };
}

// --- the component --------------------------------------------------------------

export class PianoRoll {
  readonly options: PianoRollOptions;
  onPropose: (clip: ClipJson) => Promise<void> = async () => {};
  onSelect: (noteId: number | null) => void = () => {};

  private clip: ClipJson;
  private selectedId: number | null = null;
  private scrollTicks = 0;
  private gesture: Gesture = { kind: "idle" };

  constructor(
    readonly canvas: HTMLCanvasElement,
    clip: ClipJson,
    options: Partial<PianoRollOptions> = {},
  ) {
    this.options = { ...DEFAULTS, ...options };
    this.clip = clip;
    canvas.addEventListener("dblclick", (e) => this.handleDoubleClick(e));
    canvas.addEventListener("pointerdown", (e) => this.handlePointerDown(e));
    canvas.addEventListener("pointermove", (e) => this.handlePointerMove(e));
    canvas.addEventListener("pointerup", (e) => this.handlePointerUp(e));
  }

  /** Grid snap: sixteenth notes. */
  get gridTicks(): number {
    return this.clip.ppq / 4;
  }

  setClip(clip: ClipJson): void {
    this.clip = clip;
    if (
      this.selectedId !== null &&
      !clip.notes.some((n) => n.id === this.selectedId)
    ) {
      this.selectedId = null;
    }
    this.render();
  }

  getClip(): ClipJson {
    return this.clip;
  }

  getSelectedId(): number | null {
    return this.selectedId;
  }

  setScroll(ticks: number): void {
    this.scrollTicks = Math.max(0, ticks);
    this.render();
  }

  getScroll(): number {
    return this.scrollTicks;
  }

  // --- geometry ---

  private point(e: MouseEvent): { x: number; y: number } {
    const rect = this.canvas.getBoundingClientRect();
    return { x: e.clientX - rect.left, y: e.clientY - rect.top };
  }

  ticksAt(x: number): number {
    return this.scrollTicks + x / this.options.pxPerTick;
  }

  snapTicks(ticks: number): number {
    return Math.max(0, Math.floor(ticks / this.gridTicks) * this.gridTicks);
  }

  pitchAt(y: number): number {
    return PITCH_MAX - Math.floor(y / this.options.rowHeight);
  }

  private noteRect(note: NoteJson): { x: number; y: number; w: number; h: number } {
    const { pxPerTick, rowHeight } = this.options;
    return {
      x: (note.start_ticks - this.scrollTicks) * pxPerTick,
      y: (PITCH_MAX - note.pitch) * rowHeight,
      w: note.duration_ticks * pxPerTick,
      h: rowHeight,
    };
  }

  noteAt(x: number, y: number): NoteJson | null {
    for (let i = this.clip.notes.length - 1; i >= 0; i--) {
      const note = this.clip.notes[i];
      const r = this.noteRect(note);
      if (x >= r.x && x <= r.x + r.w && y >= r.y && y < r.y + r.h) return note;
    }
    return null;
  }

  private edgeAt(note: NoteJson, x: number): "start" | "end" | null {
    const r = this.noteRect(note);
    if (Math.abs(x - r.x) <= EDGE_PX) return "start";
    if (Math.abs(x - (r.x + r.w)) <= EDGE_PX) return "end";
    return null;
  }

  // --- gestures ---

  private handleDoubleClick(e: MouseEvent): void {
    const { x, y } = this.point(e);
    if (this.noteAt(x, y)) return; // only empty cells add
    const pitch = this.pitchAt(y);
    if (pitch < PITCH_MIN || pitch > PITCH_MAX) return;
    const start = this.snapTicks(this.ticksAt(x));
    const proposal = withAddedNote(
      this.clip, pitch, start, this.gridTicks, this.options.defaultVelocity,
    );
    void this.onPropose(proposal);
  }

  private handlePointerDown(e: MouseEvent): void {
    const { x, y } = this.point(e);
    const note = this.noteAt(x, y);
    if (!note) return;
    this.gesture = {
      kind: "drag",
      noteId: note.id,
      edge: this.edgeAt(note, x),
      originX: x,
      originY: y,
      dTicks: 0,
      dPitch: 0,
      moved: false,
    };
  }

  private handlePointerMove(e: MouseEvent): void {
    if (this.gesture.kind !== "drag") return;
    const { x, y } = this.point(e);
    const g = this.gesture;
    const dx = x - g.originX;
    const dy = y - g.originY;
    if (Math.abs(dx) + Math.abs(dy) > DRAG_THRESHOLD_PX) g.moved = true;
    const rawTicks = dx / this.options.pxPerTick;
    g.dTicks = Math.round(rawTicks / this.gridTicks) * this.gridTicks;
    g.dPitch = -Math.round(dy / this.options.rowHeight);
    this.render(); // ghost preview only; the document is untouched
  }

  private handlePointerUp(_e: MouseEvent): void {
    if (this.gesture.kind !== "drag") return;
    const g = this.gesture;
    this.gesture = { kind: "idle" };
    if (!g.moved) {
      this.selectedId = g.noteId; // plain click: highlight the selection
      this.onSelect(g.noteId);
      this.render();
      return;
    }
    const note = this.clip.notes.find((n) => n.id === g.noteId);
    if (!note || (g.dTicks === 0 && g.dPitch === 0)) {
      this.render();
      return;
    }
    let proposal: ClipJson;
    if (g.edge === null) {
      proposal = withMovedNote(this.clip, g.noteId, g.dTicks, g.dPitch);
    } else if (g.edge === "start") {
      proposal = withResizedNote(
        this.clip, g.noteId, note.start_ticks + g.dTicks, null,
      );
    } else {
      proposal = withResizedNote(
        this.clip, g.noteId, null,
        note.start_ticks + note.duration_ticks + g.dTicks,
      );
    }
    void this.onPropose(proposal);
  }

  // --- painting ---

  render(): void {
    const ctx = this.canvas.getContext("2d");
    if (!ctx) return; // headless test environment
    const { width, height } = this.canvas;
    const { rowHeight, pxPerTick } = this.options;
    ctx.clearRect(0, 0, width, height);

    ctx.fillStyle = "#1c1f26";
    ctx.fillRect(0, 0, width, height);
    for (let pitch = PITCH_MAX; pitch >= PITCH_MIN; pitch--) {
      const y = (PITCH_MAX - pitch) * rowHeight;
      if (y > height) break;
      const black = [1, 3, 6, 8, 10].includes(pitch % 12);
      ctx.fillStyle = black ? "#181b21" : "#1e222a";
      ctx.fillRect(0, y, width, rowHeight - 1);
    }
    const firstBeat = Math.floor(this.scrollTicks / this.clip.ppq);
    for (let beat = firstBeat; ; beat++) {
      const x = (beat * this.clip.ppq - this.scrollTicks) * pxPerTick;
      if (x > width) break;
      ctx.fillStyle = beat % this.clip.time_signature[0] === 0 ? "#3a4152" : "#262b35";
      ctx.fillRect(x, 0, 1, height);
    }

    const ghost = this.gesture.kind === "drag" && this.gesture.moved ? this.gesture : null;
    for (const note of this.clip.notes) {
      let draw = note;
      if (ghost && note.id === ghost.noteId) {
        if (ghost.edge === null) {
          draw = {
            ...note,
            start_ticks: note.start_ticks + ghost.dTicks,
            pitch: note.pitch + ghost.dPitch,
          };
        } else if (ghost.edge === "start") {
          draw = {
            ...note,
            start_ticks: note.start_ticks + ghost.dTicks,
            duration_ticks: note.duration_ticks - ghost.dTicks,
          };
        } else {
          draw = { ...note, duration_ticks: note.duration_ticks + ghost.dTicks };
        }
      }
      const r = this.noteRect(draw);
      if (r.x + r.w < 0 || r.x > width) continue;
      ctx.fillStyle = note.id === this.selectedId ? "#7fd4ff" : "#4f9dde";
      ctx.fillRect(r.x, r.y, Math.max(r.w, 2), r.h - 1);
    }
  }
}
