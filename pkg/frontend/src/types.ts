/** Payload shapes shared with the bridge (see docs/http_api.md). */

export interface TelemetryFrame {
  seq: number;
  t_ms: number;
  angle: number;
  velocity: number;
  torque: number;
  mode: string;
}

export interface NoteJson {
  id: number;
  pitch: number;
  start_ticks: number;
  duration_ticks: number;
  velocity: number;
}

export interface ClipJson {
  ppq: number;
  tempo_bpm: number;
  time_signature: [number, number];
  notes: NoteJson[];
  pitch_bends: [number, number][];
}

export const PITCH_MIN = 24; // C1
export const PITCH_MAX = 115; // G8

export function emptyClip(): ClipJson {
  return {
    ppq: 480,
    tempo_bpm: 120,
    time_signature: [4, 4],
    notes: [],
    pitch_bends: [],
  };
}

/** The mimicry stimulus: three C3 notes, six quarters each, 120 bpm. */
export function referenceClip(): ClipJson {
  const dur = 6 * 480;
  return {
    ppq: 480,
    tempo_bpm: 120,
    time_signature: [4, 4],
    notes: [0, 1, 2].map((i) => ({
      id: i + 1,
      pitch: 48,
      start_ticks: i * dur,
      duration_ticks: dur,
      velocity: 100,
    })),
    pitch_bends: [],
  };
}

export function clipDurationSeconds(clip: ClipJson): number {
  const end = clip.notes.reduce(
    (acc, n) => Math.max(acc, n.start_ticks + n.duration_ticks),
    0,
  );
  return (end / clip.ppq) * (60 / clip.tempo_bpm);
}
