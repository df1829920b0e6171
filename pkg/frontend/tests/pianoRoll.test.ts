import { beforeEach, describe, expect, it, vi } from "vitest";

import { PianoRoll, withoutNotes } from "../src/pianoRoll.js";
import type { ClipJson } from "../src/types.js";
import { emptyClip } from "../src/types.js";

// geometry at the test options: 1 grid cell (120 ticks) = 12 px, row = 12 px
const OPTS = { rowHeight: 12, pxPerTick: 0.1, defaultVelocity: 100 };

const xOfTick = (tick: number) => tick * OPTS.pxPerTick;
const yOfPitch = (pitch: number) => (115 - pitch) * OPTS.rowHeight + 6;

function mouse(type: string, x: number, y: number): MouseEvent {
  return new MouseEvent(type, { clientX: x, clientY: y, bubbles: true });
}

function makeRoll(clip: ClipJson = emptyClip()) {
  const canvas = document.createElement("canvas");
  canvas.width = 920;
  canvas.height = 552;
  const roll = new PianoRoll(canvas, clip, OPTS);
  const proposals: ClipJson[] = [];
  // accept every proposal, like a backend that validates and commits
  roll.onPropose = vi.fn(async (proposal: ClipJson) => {
    proposals.push(proposal);
    roll.setClip(proposal);
  });
  return { canvas, roll, proposals };
}

function drag(canvas: HTMLCanvasElement, from: [number, number], to: [number, number]) {
  canvas.dispatchEvent(mouse("pointerdown", from[0], from[1]));
  canvas.dispatchEvent(mouse("pointermove", to[0], to[1]));
  canvas.dispatchEvent(mouse("pointerup", to[0], to[1]));
}

describe("piano roll gestures", () => {
  let canvas: HTMLCanvasElement;
  let roll: PianoRoll;
  let proposals: ClipJson[];

  beforeEach(() => {
    ({ canvas, roll, proposals } = makeRoll());
  });

  it("double click on an empty cell adds a snapped note", () => {
    canvas.dispatchEvent(mouse("dblclick", xOfTick(245), yOfPitch(60)));
    expect(proposals).toHaveLength(1);
    const note = proposals[0].notes[0];
    expect(note.pitch).toBe(60);
    expect(note.start_ticks).toBe(240); // snapped to the 16th grid
    expect(note.duration_ticks).toBe(120);
    expect(note.velocity).toBe(100);
  });

  it("double click on an occupied cell does nothing", () => {
    canvas.dispatchEvent(mouse("dblclick", xOfTick(0), yOfPitch(60)));
    canvas.dispatchEvent(mouse("dblclick", xOfTick(60), yOfPitch(60)));
    expect(proposals).toHaveLength(1);
  });

  it("click highlights the selection without mutating", () => {
    canvas.dispatchEvent(mouse("dblclick", xOfTick(0), yOfPitch(60)));
    const id = roll.getClip().notes[0].id;
    const selected: Array<number | null> = [];
    roll.onSelect = (noteId) => selected.push(noteId);
    const x = xOfTick(60);
    canvas.dispatchEvent(mouse("pointerdown", x, yOfPitch(60)));
    canvas.dispatchEvent(mouse("pointerup", x, yOfPitch(60)));
    expect(roll.getSelectedId()).toBe(id);
    expect(selected).toEqual([id]);
    expect(proposals).toHaveLength(1); // only the add
  });

  it("dragging a note body moves it in ticks and semitones", () => {
    canvas.dispatchEvent(mouse("dblclick", xOfTick(0), yOfPitch(60)));
    drag(canvas, [xOfTick(60), yOfPitch(60)], [xOfTick(300), yOfPitch(62)]);
    expect(proposals).toHaveLength(2);
    const moved = roll.getClip().notes[0];
    expect(moved.start_ticks).toBe(240);
    expect(moved.pitch).toBe(62);
    expect(moved.duration_ticks).toBe(120);
  });

  it("dragging the right edge resizes the note end", () => {
    canvas.dispatchEvent(mouse("dblclick", xOfTick(0), yOfPitch(60)));
    const endX = xOfTick(120);
    drag(canvas, [endX, yOfPitch(60)], [endX + xOfTick(240), yOfPitch(60)]);
    const resized = roll.getClip().notes[0];
    expect(resized.start_ticks).toBe(0);
    expect(resized.duration_ticks).toBe(360);
  });

  it("dragging the left edge resizes the note start", () => {
    canvas.dispatchEvent(mouse("dblclick", xOfTick(240), yOfPitch(60)));
    const startX = xOfTick(240);
    drag(canvas, [startX, yOfPitch(60)], [startX - xOfTick(120), yOfPitch(60)]);
    const resized = roll.getClip().notes[0];
    expect(resized.start_ticks).toBe(120);
    expect(resized.duration_ticks).toBe(240);
  });

  it("a rejected proposal leaves the committed clip untouched", () => {
    canvas.dispatchEvent(mouse("dblclick", xOfTick(0), yOfPitch(60)));
    const before = roll.getClip();
    roll.onPropose = vi.fn(async () => {
      throw new Error("duration must be >= 1 tick");
    });
    // drag the end edge left past the start: backend would refuse
    const endX = xOfTick(120);
    canvas.dispatchEvent(mouse("pointerdown", endX, yOfPitch(60)));
    canvas.dispatchEvent(mouse("pointermove", endX - xOfTick(240), yOfPitch(60)));
    canvas.dispatchEvent(mouse("pointerup", endX - xOfTick(240), yOfPitch(60)));
    expect(roll.getClip()).toEqual(before); // nothing committed locally
  });

  it("clear proposes an empty note list", () => {
    canvas.dispatchEvent(mouse("dblclick", xOfTick(0), yOfPitch(60)));
    canvas.dispatchEvent(mouse("dblclick", xOfTick(480), yOfPitch(64)));
    void roll.onPropose(withoutNotes(roll.getClip()));
    expect(roll.getClip().notes).toHaveLength(0);
  });

  it("scroll slider shifts the visible tick origin", () => {
    roll.setScroll(960);
    expect(roll.getScroll()).toBe(960);
    canvas.dispatchEvent(mouse("dblclick", xOfTick(0), yOfPitch(60)));
    expect(roll.getClip().notes[0].start_ticks).toBe(960);
  });

  it("selection follows the clip when the selected note disappears", () => {
    canvas.dispatchEvent(mouse("dblclick", xOfTick(0), yOfPitch(60)));
    const x = xOfTick(60);
    canvas.dispatchEvent(mouse("pointerdown", x, yOfPitch(60)));
    canvas.dispatchEvent(mouse("pointerup", x, yOfPitch(60)));
    expect(roll.getSelectedId()).not.toBeNull();
    roll.setClip(emptyClip());
    expect(roll.getSelectedId()).toBeNull();
  });
});
