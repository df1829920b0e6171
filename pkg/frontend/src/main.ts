/** Application wiring: bridge client, stores, components, render loop. */

import { BridgeApiError, BridgeClient } from "./api.js";
import { ContourPanel } from "./contourPanel.js";
import { KnobView } from "./knobView.js";
import { PianoRoll } from "./pianoRoll.js";
import { TelemetryBuffer, UiStore } from "./state.js";
import { PluckSynth, midiToFrequency } from "./synth.js";
import type { ClipJson, TelemetryFrame } from "./types.js";
import { emptyClip, referenceClip } from "./types.js";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

export function boot(baseUrl = ""): void {
  const client = new BridgeClient(baseUrl);
  const store = new UiStore();
  const telemetry = new TelemetryBuffer();

  const roll = new PianoRoll(el<HTMLCanvasElement>("piano-roll"), emptyClip());
  const knob = new KnobView(el<HTMLCanvasElement>("knob"));
  const contour = new ContourPanel(el<HTMLCanvasElement>("contour"));

  const statusLine = el<HTMLSpanElement>("status");
  const errorLine = el<HTMLSpanElement>("error");
  const modeButtons = el<HTMLDivElement>("mode-buttons");
  const scroll = el<HTMLInputElement>("scroll");

  let synth: PluckSynth | null = null;
  const audio = (): PluckSynth => {
    synth ??= new PluckSynth(new AudioContext());
    return synth;
  };

  store.subscribe((state) => {
    statusLine.textContent = state.connected
      ? `connected · ${state.modeLabel}`
      : "disconnected";
    errorLine.textContent = state.error ?? "";
    roll.setClip(state.clip);
  });

  roll.onPropose = async (proposal: ClipJson) => {
    try {
      const accepted = await client.postClip(proposal);
      store.update({ clip: accepted, error: null });
    } catch (err) {
      // rejected mutation: leave the committed clip, surface the reason
      store.update({
        error: err instanceof BridgeApiError ? err.message : String(err),
      });
    }
  };
  roll.onSelect = (noteId) => store.update({ selectedNoteId: noteId });

  scroll.addEventListener("input", () => {
    roll.setScroll(Number(scroll.value));
  });

  el<HTMLButtonElement>("connect").addEventListener("click", async () => {
    if (store.get().connected) return; // one socket per session
    try {
      await client.connect("sim");
      const clip = await client.getClip();
      store.update({ clip, error: null });
      const modes = await client.getModes();
      modeButtons.replaceChildren(
        ...modes.map((name) => {
          const button = document.createElement("button");
          button.textContent = name;
          button.addEventListener("click", () => {
            client.setMode(name).catch((err) =>
              store.update({ error: String(err) }),
            );
          });
          return button;
        }),
      );
      client.openTelemetry(
        (frame) => {
          telemetry.push(frame);
        },
        (up) => {
          store.update({ connected: up });
          knob.setConnected(up);
        },
      );
    } catch (err) {
      store.update({ error: String(err) });
    }
  });

  el<HTMLButtonElement>("clear").addEventListener("click", () => {
    void roll.onPropose({ ...roll.getClip(), notes: [], pitch_bends: [] });
  });

  const upload = el<HTMLInputElement>("upload");
  upload.addEventListener("change", async () => {
    const file = upload.files?.[0];
    if (!file) return;
    try {
      const clip = await client.uploadMidi(await file.arrayBuffer());
      store.update({ clip, error: null });
    } catch (err) {
      store.update({
        error: err instanceof BridgeApiError ? err.message : String(err),
      });
    }
    upload.value = "";
  });

  el<HTMLButtonElement>("record").addEventListener("click", async () => {
    const state = store.get();
    try {
      if (state.recordingId === null) {
        const id = await client.startRecording();
        store.update({ recordingId: id, error: null });
        el<HTMLButtonElement>("record").textContent = "stop";
      } else {
        const { id } = await client.stopRecording();
        store.update({ recordingId: null, error: null });
        el<HTMLButtonElement>("record").textContent = "record";
        contour.showRecording(id, await client.downloadRecording(id));
      }
    } catch (err) {
      store.update({ error: String(err) });
    }
  });

  el<HTMLButtonElement>("save").addEventListener("click", () => {
    const anchor = document.createElement("a");
    if (!contour.saveToAnchor(anchor)) {
      store.update({ error: "no recording loaded yet" });
    }
  });

  el<HTMLButtonElement>("play-clip").addEventListener("click", () => {
    audio().playClip(roll.getClip());
  });

  el<HTMLButtonElement>("play-reference").addEventListener("click", () => {
    audio().playClip(referenceClip());
  });

  // Render loop: decoupled from the 100 Hz message stream; each frame
  // consumes only the newest telemetry so backlog can never build up.
  const tick = () => {
    const frame: TelemetryFrame | null = telemetry.takeLatest();
    if (frame) {
      knob.update(frame);
      contour.pushLive(frame);
      contour.render();
      if (frame.mode !== store.get().modeLabel) {
        store.update({ modeLabel: frame.mode });
      }
      // live bend: knob angle drives the sounding pitch (0..90deg -> 0..200c)
      const cents = Math.min(Math.max((frame.angle / 90) * 200, 0), 200);
      synth?.setPitchBend(cents);
    }
    requestAnimationFrame(tick);
  };
  requestAnimationFrame(tick);
}

// Entry point for the real page; tests import the pieces directly. A
// cross-origin bridge can be pointed at with ?bridge=http://host:port.
if (typeof document !== "undefined" && document.getElementById("piano-roll")) {
  boot(new URLSearchParams(location.search).get("bridge") ?? "");
}

export { midiToFrequency };
