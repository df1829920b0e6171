import { describe, expect, it } from "vitest";

import { TelemetryBuffer, UiStore } from "../src/state.js";
import type { TelemetryFrame } from "../src/types.js";

function frame(seq: number, overrides: Partial<TelemetryFrame> = {}): TelemetryFrame {
  return {
    seq,
    t_ms: seq,
    angle: 0,
    velocity: 0,
    torque: 0,
    mode: "SMOOTH",
    ...overrides,
  };
}

describe("TelemetryBuffer", () => {
  it("keeps frames in seq order and drops stale ones", () => {
    const buf = new TelemetryBuffer();
    buf.push(frame(10));
    buf.push(frame(20));
    buf.push(frame(15)); // out of order: discarded
    buf.push(frame(20)); // duplicate: discarded
    const seqs = buf.drain().map((f) => f.seq);
    expect(seqs).toEqual([10, 20]);
    expect(buf.dropped).toBe(2);
  });

  it("never grows past its capacity", () => {
    const buf = new TelemetryBuffer(16);
    for (let i = 1; i <= 1000; i++) buf.push(frame(i));
    expect(buf.size).toBeLessThanOrEqual(16);
    expect(buf.takeLatest()?.seq).toBe(1000);
  });

  it("takeLatest coalesces to the newest frame and empties the buffer", () => {
    const buf = new TelemetryBuffer();
    for (let i = 1; i <= 5; i++) buf.push(frame(i * 10));
    expect(buf.takeLatest()?.seq).toBe(50);
    expect(buf.takeLatest()).toBeNull();
  });

  it("keeps up with a 100 Hz stream consumed at ~33 fps without backlog", () => {
    const buf = new TelemetryBuffer(64);
    let produced = 0;
    let consumed = 0;
    // 10 simulated seconds: 3 pushes per render pass
    for (let ms = 0; ms < 10_000; ms += 10) {
      produced += 1;
      buf.push(frame(produced * 10, { t_ms: ms }));
      if (ms % 30 === 0) {
        if (buf.takeLatest()) consumed += 1;
        expect(buf.size).toBe(0); // no backlog survives a render
      }
    }
    expect(buf.size).toBeLessThanOrEqual(3); // at most the tail since last render
    expect(consumed).toBeGreaterThanOrEqual(300);
  });
});

describe("UiStore", () => {
  it("notifies subscribers with merged state", () => {
    const store = new UiStore();
    const seen: string[] = [];
    store.subscribe((s) => seen.push(s.modeLabel));
    store.update({ modeLabel: "SPRING" });
    store.update({ connected: true });
    expect(seen).toEqual(["SPRING", "SPRING"]);
    expect(store.get().connected).toBe(true);
  });

  it("unsubscribe stops notifications", () => {
    const store = new UiStore();
    let count = 0;
    const off = store.subscribe(() => count++);
    store.update({ error: "x" });
    off();
    store.update({ error: "y" });
    expect(count).toBe(1);
  });
});
