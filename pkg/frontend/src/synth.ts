/** Plucked-string voice (Karplus-Strong) with live pitch bend.
 *
 * The DSP is a pure function over Float32Array so it can be tested without
 * an AudioContext; PluckSynth is the thin Web Audio wrapper that schedules
 * clip playback and retunes sounding notes from telemetry-driven cents.
 */

import type { ClipJson } from "./types.js";
import { clipDurationSeconds } from "./types.js";

export function midiToFrequency(pitch: number, centsOffset = 0): number {
  return 440 * Math.pow(2, (pitch - 69 + centsOffset / 100) / 12);
}

export function bendRatio(cents: number): number {
  return Math.pow(2, cents / 1200);
}

/** Render one plucked note: noise burst into an averaging string loop. */
export function pluckBuffer(
  frequency: number,
  sampleRate: number,
  durationS: number,
  damping = 0.996,
  seed = 1,
): Float32Array {
  const period = Math.max(2, Math.round(sampleRate / frequency));
  const length = Math.max(period + 1, Math.round(sampleRate * durationS));
  const out = new Float32Array(length);
  let state = seed >>> 0 || 1;
  const rand = () => {
    // xorshift32: deterministic excitation so renders are reproducible
    state ^= state << 13;
    state ^= state >>> 17;
    state ^= state << 5;
    return ((state >>> 0) / 0xffffffff) * 2 - 1;
  };
  for (let i = 0; i < period; i++) out[i] = rand();
  for (let i = period; i < length; i++) {
    out[i] = damping * 0.5 * (out[i - period] + out[i - period + 1]);
  }
  return out;
}

interface ActiveVoice {
  source: AudioBufferSourceNode;
  baseRate: number;
}

export class PluckSynth {
  private voices: ActiveVoice[] = [];
  private currentBendCents = 0;

  constructor(
    readonly ctx: AudioContext,
    readonly gainDb = -6,
  ) {}

  /** Live pitch bend applied to every sounding voice. */
  setPitchBend(cents: number): void {
    this.currentBendCents = cents;
    const ratio = bendRatio(cents);
    for (const voice of this.voices) {
      voice.source.playbackRate.value = voice.baseRate * ratio;
    }
  }

  playNote(pitch: number, when: number, durationS: number, velocity = 100): void {
    const buffer = this.renderNote(pitch, durationS, velocity);
    const source = this.ctx.createBufferSource();
    source.buffer = buffer;
    const voice: ActiveVoice = { source, baseRate: 1 };
    source.playbackRate.value = bendRatio(this.currentBendCents);
    source.connect(this.ctx.destination);
    source.onended = () => {
      this.voices = this.voices.filter((v) => v !== voice);
    };
    this.voices.push(voice);
    source.start(when);
  }

  /** Schedule every note of the clip; returns the playback span in seconds. */
  playClip(clip: ClipJson, startAt = this.ctx.currentTime + 0.05): number {
    const secondsPerTick = 60 / (clip.tempo_bpm * clip.ppq);
    for (const note of clip.notes) {
      this.playNote(
        note.pitch,
        startAt + note.start_ticks * secondsPerTick,
        note.duration_ticks * secondsPerTick,
        note.velocity,
      );
    }
    return clipDurationSeconds(clip);
  }

  stop(): void {
    for (const voice of this.voices) {
      try {
        voice.source.stop();
      } catch {
        // already stopped
      }
    }
    this.voices = [];
  }

  private renderNote(pitch: number, durationS: number, velocity: number): AudioBuffer {
    const sampleRate = this.ctx.sampleRate;
    const rendered = pluckBuffer(
      midiToFrequency(pitch), sampleRate, durationS + 0.4,
    );
    const gain = Math.pow(10, this.gainDb / 20) * (velocity / 127);
    const buffer = this.ctx.createBuffer(1, rendered.length, sampleRate);
    const channel = buffer.getChannelData(0);
    for (let i = 0; i < rendered.length; i++) channel[i] = rendered[i] * gain;
    return buffer;
  }
}
