/** End-to-end against the real backend: spawns the Python bridge over the
 * simulator, drives the four grid-editor gestures through the real PianoRoll
 * component, and verifies the clip state the backend holds after each one.
 * Also checks that a saved contour is byte-identical to the bridge download.
 */

import { spawn, type ChildProcess } from "node:child_process";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { BridgeClient } from "../src/api.js";
import { ContourPanel } from "../src/contourPanel.js";
import { PianoRoll, withoutNotes } from "../src/pianoRoll.js";
import { UiStore } from "../src/state.js";
import type { ClipJson } from "../src/types.js";
import { emptyClip } from "../src/types.js";

const PORT = 8931;
const BASE = `http://127.0.0.1:${PORT}`;

let bridge: ChildProcess | null = null;
let available = false;

async function waitForBridge(timeoutMs: number): Promise<boolean> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    try {
      const resp = await fetch(`${BASE}/api/modes`);
      if (resp.ok) return true;
    } catch {
      await new Promise((r) => setTimeout(r, 200));
    }
  }
  return false;
}

beforeAll(async () => {
  bridge = spawn(
    "python3",
    ["-c",
     "import tempfile; from hapticknob.cli import main_bridge; " +
     `main_bridge(['--device', 'sim', '--port', '${PORT}', ` +
     "'--record-dir', tempfile.mkdtemp()])"],
    { stdio: "ignore" },
  );
  bridge.on("error", () => {
    bridge = null;
  });
  available = await waitForBridge(15_000);
}, 20_000);

afterAll(() => {
  bridge?.kill();
});

// geometry: 120-tick grid cell = 12 px, one semitone row = 12 px
const OPTS = { rowHeight: 12, pxPerTick: 0.1, defaultVelocity: 100 };
const xOfTick = (tick: number) => tick * OPTS.pxPerTick;
const yOfPitch = (pitch: number) => (115 - pitch) * OPTS.rowHeight + 6;

function mouse(type: string, x: number, y: number): MouseEvent {
  return new MouseEvent(type, { clientX: x, clientY: y });
}

describe("live bridge session", () => {
  it("performs the four edit gestures and verifies backend clip state", async () => {
    if (!available) return expect.fail("bridge did not start");
    const client = new BridgeClient(BASE);
    await client.connect("sim");
    await client.postClip(emptyClip()); // start from a blank document

    const store = new UiStore();
    const canvas = document.createElement("canvas");
    const roll = new PianoRoll(canvas, await client.getClip(), OPTS);
    const settled: Promise<void>[] = [];
    roll.onPropose = (proposal: ClipJson) => {
      const job = client
        .postClip(proposal)
        .then((accepted) => {
          store.update({ clip: accepted, error: null });
          roll.setClip(accepted);
        })
        .catch((err) => store.update({ error: String(err) }));
      settled.push(job);
      return job;
    };

    // 1. double click an empty cell: C4 at tick 240
    canvas.dispatchEvent(mouse("dblclick", xOfTick(245), yOfPitch(60)));
    await Promise.all(settled);
    let backend = await client.getClip();
    expect(backend.notes).toHaveLength(1);
    expect(backend.notes[0]).toMatchObject({
      pitch: 60,
      start_ticks: 240,
      duration_ticks: 120,
    });

    // 2. click to highlight the selection (view state; document unchanged)
    const noteId = backend.notes[0].id;
    canvas.dispatchEvent(mouse("pointerdown", xOfTick(300), yOfPitch(60)));
    canvas.dispatchEvent(mouse("pointerup", xOfTick(300), yOfPitch(60)));
    expect(roll.getSelectedId()).toBe(noteId);
    expect(await client.getClip()).toEqual(backend);

    // 3. drag the note to move it: +480 ticks, +2 semitones
    canvas.dispatchEvent(mouse("pointerdown", xOfTick(300), yOfPitch(60)));
    canvas.dispatchEvent(mouse("pointermove", xOfTick(780), yOfPitch(62)));
    canvas.dispatchEvent(mouse("pointerup", xOfTick(780), yOfPitch(62)));
    await Promise.all(settled);
    backend = await client.getClip();
    expect(backend.notes[0]).toMatchObject({
      pitch: 62,
      start_ticks: 720,
      duration_ticks: 120,
    });

    // 4. drag the end edge to resize: +240 ticks of duration
    const endX = xOfTick(720 + 120);
    canvas.dispatchEvent(mouse("pointerdown", endX, yOfPitch(62)));
    canvas.dispatchEvent(mouse("pointermove", endX + xOfTick(240), yOfPitch(62)));
    canvas.dispatchEvent(mouse("pointerup", endX + xOfTick(240), yOfPitch(62)));
    await Promise.all(settled);
    backend = await client.getClip();
    expect(backend.notes[0]).toMatchObject({
      pitch: 62,
      start_ticks: 720,
      duration_ticks: 360,
    });

    // an illegal resize is refused by the backend and leaves state intact
    canvas.dispatchEvent(mouse("pointerdown", xOfTick(720), yOfPitch(62)));
    canvas.dispatchEvent(mouse("pointermove", xOfTick(720 + 480), yOfPitch(62)));
    canvas.dispatchEvent(mouse("pointerup", xOfTick(720 + 480), yOfPitch(62)));
    await Promise.all(settled);
    expect(store.get().error).toMatch(/duration|tick/);
    expect(await client.getClip()).toEqual(backend);

    // clear button removes every note
    await roll.onPropose(withoutNotes(roll.getClip()));
    expect((await client.getClip()).notes).toHaveLength(0);
  }, 30_000);

  it("saved contour bytes equal the bridge download", async () => {
    if (!available) return expect.fail("bridge did not start");
    const client = new BridgeClient(BASE);
    await client.connect("sim");
    const recId = await client.startRecording();
    await new Promise((r) => setTimeout(r, 300)); // real-time device ticks
    const stopped = await client.stopRecording();
    expect(stopped.id).toBe(recId);
    expect(stopped.rows).toBeGreaterThan(100);

    const downloaded = await client.downloadRecording(recId);
    const panel = new ContourPanel(document.createElement("canvas"));
    panel.showRecording(recId, downloaded);
    expect(panel.pointCount).toBe(stopped.rows);
    const payload = panel.savePayload();
    expect(payload!.bytes).toEqual(downloaded);

    const reference = await client.referenceCsv();
    expect(new TextDecoder().decode(reference).split("\n")[0]).toBe("t_ms,cents");
  }, 30_000);
});
