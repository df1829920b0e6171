/** Knob visualizer: a small blue circle riding a larger dial circle, a
 * signed torque meter, and the active mode label. The pointer eases toward
 * the live angle for smooth display, except on a mode change, where it
 * snaps to the zero position along with the device's own reset. */

import type { TelemetryFrame } from "./types.js";

const SMOOTHING = 0.35; // display easing per update toward the target angle

/** Signed meter extent in pixels: proportional to |torque|, clamped so a
 * full-torque bar spans exactly half the meter from its center line. */
export function torqueMeterExtent(torque: number, meterWidth: number): number {
  return Math.max(-1, Math.min(1, torque)) * (meterWidth / 2);
}

export class KnobView {
  private displayAngle = 0;
  private torque = 0;
  private mode = "—";
  private connected = false;
  private lastSeq = -1;

  constructor(readonly canvas: HTMLCanvasElement) {}

  get modeLabel(): string {
    return this.mode;
  }

  get pointerAngle(): number {
    return this.displayAngle;
  }

  setConnected(connected: boolean): void {
    this.connected = connected;
    this.render();
  }

  /** Apply one telemetry frame; frames must arrive in seq order and stale
   * ones are ignored so the visualizer can never run backwards. */
  update(frame: TelemetryFrame): void {
    if (frame.seq <= this.lastSeq) return;
    this.lastSeq = frame.seq;
    if (frame.mode !== this.mode) {
      this.mode = frame.mode;
      this.displayAngle = frame.angle; // snap on mode change (device re-zeroed)
    } else {
      this.displayAngle += SMOOTHING * (frame.angle - this.displayAngle);
    }
    this.torque = frame.torque;
    this.render();
  }

  render(): void {
    const ctx = this.canvas.getContext("2d");
    if (!ctx) return;
    const { width, height } = this.canvas;
    ctx.clearRect(0, 0, width, height);
    const cx = width / 2;
    const cy = height / 2 - 10;
    const radius = Math.min(width, height) / 2 - 30;

    ctx.strokeStyle = this.connected ? "#8b93a7" : "#4a4f5c";
    ctx.lineWidth = 3;
    ctx.beginPath();
    ctx.arc(cx, cy, radius, 0, Math.PI * 2);
    ctx.stroke();

    // pointer: 0 degrees at twelve o'clock, clockwise positive
    const theta = ((this.displayAngle - 90) * Math.PI) / 180;
    ctx.fillStyle = this.connected ? "#4f9dde" : "#55606e";
    ctx.beginPath();
    ctx.arc(cx + radius * Math.cos(theta), cy + radius * Math.sin(theta), 7, 0, Math.PI * 2);
    ctx.fill();

    // torque meter: bar from the center line, length ~ |torque|, sign by color
    const meterWidth = width - 40;
    const meterY = height - 18;
    ctx.fillStyle = "#262b35";
    ctx.fillRect(20, meterY, meterWidth, 8);
    const half = meterWidth / 2;
    const extent = torqueMeterExtent(this.torque, meterWidth);
    ctx.fillStyle = this.torque >= 0 ? "#53c478" : "#e06656";
    if (extent >= 0) {
      ctx.fillRect(20 + half, meterY, extent, 8);
    } else {
      ctx.fillRect(20 + half + extent, meterY, -extent, 8);
    }

    ctx.fillStyle = this.connected ? "#dfe5f1" : "#73798a";
    ctx.font = "14px system-ui, sans-serif";
    ctx.textAlign = "center";
    ctx.fillText(this.connected ? this.mode : "disconnected", cx, cy + radius + 24);
  }
}
