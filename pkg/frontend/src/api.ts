/** Thin client for the bridge HTTP + WebSocket API. */

import type { ClipJson, TelemetryFrame } from "./types.js";

export class BridgeApiError extends Error {
  constructor(
    readonly status: number,
    message: string,
  ) {
    super(message);
  }
}

async function errorMessage(resp: Response): Promise<string> {
  try {
    const body = await resp.json();
    return body.error ?? body.detail ?? resp.statusText;
  } catch {
    return resp.statusText;
  }
}

export class BridgeClient {
  constructor(readonly baseUrl: string = "") {}

  private async request(path: string, init?: RequestInit): Promise<Response> {
    const resp = await fetch(this.baseUrl + path, init);
    if (!resp.ok) {
      throw new BridgeApiError(resp.status, await errorMessage(resp));
    }
    return resp;
  }

  private async postJson(path: string, payload: unknown): Promise<any> {
    const resp = await this.request(path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(payload),
    });
    return resp.json();
  }

  async getModes(): Promise<string[]> {
    const body = await (await this.request("/api/modes")).json();
    return body.modes;
  }

  async connect(device = "sim"): Promise<{ connected: boolean; mode: string }> {
    return this.postJson("/api/connect", { device });
  }

  async setMode(name: string): Promise<void> {
    await this.postJson("/api/mode", { name });
  }

  async getClip(): Promise<ClipJson> {
    return (await this.request("/api/clip")).json();
  }

  /** Propose a whole-document clip replacement; resolves to the committed
   * clip or rejects with the backend's validation message. */
  async postClip(clip: ClipJson): Promise<ClipJson> {
    return this.postJson("/api/clip", clip);
  }

  async uploadMidi(data: ArrayBuffer | Uint8Array): Promise<ClipJson> {
    const body = data instanceof Uint8Array ? new Uint8Array(data) : data;
    const resp = await this.request("/api/midi", {
      method: "POST",
      headers: { "Content-Type": "application/octet-stream" },
      body,
    });
    return resp.json();
  }

  async startRecording(): Promise<string> {
    return (await this.postJson("/api/record/start", {})).id;
  }

  async stopRecording(): Promise<{ id: string; rows: number }> {
    return this.postJson("/api/record/stop", {});
  }

  async downloadRecording(id: string): Promise<Uint8Array> {
    const resp = await this.request(`/api/record/${id}.csv`);
    return new Uint8Array(await resp.arrayBuffer());
  }

  async referenceCsv(): Promise<Uint8Array> {
    const resp = await this.request("/api/reference.csv");
    return new Uint8Array(await resp.arrayBuffer());
  }

  /** Subscribe to live telemetry; returns a function that closes the socket. */
  openTelemetry(
    onFrame: (frame: TelemetryFrame) => void,
    onStatus?: (connected: boolean) => void,
  ): () => void {
    const wsBase = this.baseUrl
      ? this.baseUrl.replace(/^http/, "ws")
      : `ws://${location.host}`;
    const ws = new WebSocket(`${wsBase}/ws/telemetry`);
    ws.onopen = () => onStatus?.(true);
    ws.onclose = () => onStatus?.(false);
    ws.onmessage = (event) => onFrame(JSON.parse(event.data) as TelemetryFrame);
    return () => ws.close();
  }
}
