/** Angle/pitch contour panel: a live rolling trace from telemetry plus the
 * last loaded recording, with save-as-CSV. The saved file is byte-identical
 * to the bridge download: the panel keeps the exact bytes it fetched. */

import type { TelemetryFrame } from "./types.js";

const LIVE_WINDOW_MS = 10_000;

export function parseContourCsv(data: Uint8Array): Array<[number, number]> {
  const text = new TextDecoder().decode(data);
  const lines = text.split("\n");
  const points: Array<[number, number]> = [];
  for (let i = 1; i < lines.length; i++) {
    const row = lines[i].trim();
    if (!row) continue;
    const [t, cents] = row.split(",");
    points.push([Number(t), Number(cents)]);
  }
  return points;
}

export class ContourPanel {
  private live: Array<[number, number]> = []; // (t_ms, cents)
  private loaded: Array<[number, number]> = [];
  private loadedBytes: Uint8Array | null = null;
  private loadedId: string | null = null;
  centsAtMax = 200; // must match the bridge's pitch map range

  constructor(readonly canvas: HTMLCanvasElement) {}

  pushLive(frame: TelemetryFrame): void {
    const cents = Math.min(
      Math.max((frame.angle / 90) * this.centsAtMax, 0),
      this.centsAtMax,
    );
    this.live.push([frame.t_ms, cents]);
    const cutoff = frame.t_ms - LIVE_WINDOW_MS;
    while (this.live.length > 0 && this.live[0][0] < cutoff) this.live.shift();
  }

  /** Install a downloaded recording (exact bytes from the bridge). */
  showRecording(id: string, csvBytes: Uint8Array): void {
    this.loadedId = id;
    this.loadedBytes = csvBytes;
    this.loaded = parseContourCsv(csvBytes);
    this.render();
  }

  get recordingId(): string | null {
    return this.loadedId;
  }

  get pointCount(): number {
    return this.loaded.length;
  }

  /** The exact bytes a save produces (what the download anchor receives). */
  savePayload(): { filename: string; bytes: Uint8Array } | null {
    if (this.loadedBytes === null || this.loadedId === null) return null;
    return { filename: `${this.loadedId}.csv`, bytes: this.loadedBytes };
  }

  saveToAnchor(anchor: HTMLAnchorElement): boolean {
    const payload = this.savePayload();
    if (!payload) return false;
    const blob = new Blob([payload.bytes as BlobPart], { type: "text/csv" });
    anchor.href = URL.createObjectURL(blob);
    anchor.download = payload.filename;
    anchor.click();
    return true;
  }

  render(): void {
    const ctx = this.canvas.getContext("2d");
    if (!ctx) return;
    const { width, height } = this.canvas;
    ctx.clearRect(0, 0, width, height);
    ctx.fillStyle = "#1c1f26";
    ctx.fillRect(0, 0, width, height);
    this.trace(ctx, this.loaded, "#53c478");
    this.trace(ctx, this.live, "#4f9dde");
  }

  private trace(
    ctx: CanvasRenderingContext2D,
    points: Array<[number, number]>,
    color: string,
  ): void {
    if (points.length < 2) return;
    const { width, height } = this.canvas;
    const t0 = points[0][0];
    const t1 = points[points.length - 1][0];
    const span = Math.max(t1 - t0, 1);
    ctx.strokeStyle = color;
    ctx.lineWidth = 1.5;
    ctx.beginPath();
    points.forEach(([t, cents], i) => {
      const x = ((t - t0) / span) * width;
      const y = height - (cents / this.centsAtMax) * (height - 8) - 4;
      if (i === 0) ctx.moveTo(x, y);
      else ctx.lineTo(x, y);
    });
    ctx.stroke();
  }
}
