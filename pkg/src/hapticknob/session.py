"""Mimicry-task runtime: angle-to-pitch mapping, contour recording, CSV
interchange, the synthetic reference vibrato, and performance scoring.

Pitch offsets are in cents (hundredths of a semitone). The default map sends
the knob's working range 0..90 degrees linearly onto 0..200 cents.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .sequencer import make_reference_clip

CONTOUR_SAMPLE_HZ = 1000
SCORE_GRID_HZ = 100
ONSET_FLAT_S = 0.5  # flat lead-in at each reference note before vibrato starts


class ContourCsvError(ValueError):
    """Malformed contour CSV; ``line`` is the 1-based offending line."""

    def __init__(self, message: str, line: int):
        super().__init__(f"{message} (line {line})")
        self.line = line


@dataclass(frozen=True)
class PitchMapConfig:
    angle_min_deg: float = 0.0
    angle_max_deg: float = 90.0
    cents_at_max: float = 200.0
    clamp: bool = True

    def __post_init__(self) -> None:
        if self.angle_max_deg <= self.angle_min_deg:
            raise ValueError("angle_max_deg must exceed angle_min_deg")
        if self.cents_at_max <= 0:
            raise ValueError("cents_at_max must be positive")


@dataclass(frozen=True)
class PitchContour:
    samples: tuple[tuple[int, float], ...]  # (t_ms, cents), t strictly increasing
    source: str = "recorded"

    def __post_init__(self) -> None:
        last = None
        for t_ms, cents in self.samples:
            if last is not None and t_ms <= last:
                raise ValueError(f"t_ms not strictly increasing at {t_ms}")
            if not math.isfinite(cents):
                raise ValueError(f"non-finite cents at t={t_ms}")
            last = t_ms


@dataclass(frozen=True)
class MimicryScore:
    rmse_cents: float
    correlation: float
    peak_count_delta: int


def map_angle_to_cents(config: PitchMapConfig, angle_deg: float) -> float:
    span = config.angle_max_deg - config.angle_min_deg
    cents = (angle_deg - config.angle_min_deg) / span * config.cents_at_max
    if config.clamp:
        return min(max(cents, 0.0), config.cents_at_max)
    return cents


def record(config: PitchMapConfig, samples: Iterable) -> PitchContour:
    """Map a telemetry stream (KnobSample-shaped items) into a contour.

    Contour timestamps are strictly increasing; a device ticking faster than
    the millisecond clock yields duplicate t_ms values, of which the first
    per millisecond is kept.
    """
    points: list[tuple[int, float]] = []
    last_ms: int | None = None
    for s in samples:
        if last_ms is not None and s.t_ms <= last_ms:
            continue
        last_ms = s.t_ms
        points.append((s.t_ms, map_angle_to_cents(config, s.angle_deg)))
    return PitchContour(samples=tuple(points), source="recorded")


def export_csv(contour: PitchContour) -> bytes:
    lines = ["t_ms,cents"]
    lines.extend(f"{t},{cents:.4f}" for t, cents in contour.samples)
    return ("\n".join(lines) + "\n").encode("ascii")


def import_csv(data: bytes) -> PitchContour:
    try:
        text = data.decode("ascii")
    except UnicodeDecodeError as exc:
        raise ContourCsvError("not ASCII", 1) from exc
    lines = text.splitlines()
    if not lines or lines[0].strip() != "t_ms,cents":
        raise ContourCsvError("missing 't_ms,cents' header", 1)
    points: list[tuple[int, float]] = []
    for lineno, row in enumerate(lines[1:], start=2):
        if not row.strip():
            continue
        parts = row.split(",")
        if len(parts) != 2:
            raise ContourCsvError(f"expected 2 fields, got {len(parts)}", lineno)
        t_raw, c_raw = parts
        if not t_raw.strip().isdigit():
            raise ContourCsvError(f"bad t_ms: {t_raw!r}", lineno)
        try:
            cents = float(c_raw)
        except ValueError:
            raise ContourCsvError(f"bad cents: {c_raw!r}", lineno) from None
        if not math.isfinite(cents):
            raise ContourCsvError(f"non-finite cents: {c_raw!r}", lineno)
        t_ms = int(t_raw)
        if points and t_ms <= points[-1][0]:
            raise ContourCsvError(f"t_ms not strictly increasing: {t_ms}", lineno)
        points.append((t_ms, cents))
    return PitchContour(samples=tuple(points), source="recorded")


def reference_contour(depth_cents: float = 50.0, rate_hz: float = 5.0) -> PitchContour:
    """Synthetic stand-in for the study stimulus: per note, a flat onset then
    a raised-cosine vibrato cents(t) = depth*(1 - cos(2*pi*rate*t))/2.

    Timing derives from the reference clip (three consecutive notes, 3.0 s
    each at 120 bpm), sampled at 1 kHz.
    """
    if depth_cents <= 0:
        raise ValueError("depth_cents must be positive")
    if rate_hz <= 0:
        raise ValueError("rate_hz must be positive")
    clip = make_reference_clip()
    seconds_per_tick = 60.0 / (clip.tempo_bpm * clip.ppq)
    starts_ms = [round(n.start_ticks * seconds_per_tick * 1000) for n in clip.notes]
    ends_ms = [round(n.end_ticks * seconds_per_tick * 1000) for n in clip.notes]
    points: list[tuple[int, float]] = []
    for start, end in zip(starts_ms, ends_ms):
        for t_ms in range(start, end):
            t_note = (t_ms - start) / 1000.0
            if t_note < ONSET_FLAT_S:
                cents = 0.0
            else:
                cents = depth_cents * (
                    1.0 - math.cos(2.0 * math.pi * rate_hz * (t_note - ONSET_FLAT_S))
                ) / 2.0
            points.append((t_ms, cents))
    return PitchContour(samples=tuple(points), source="reference")


def _resample(contour: PitchContour, grid_ms: np.ndarray) -> np.ndarray:
    t = np.array([p[0] for p in contour.samples], dtype=float)
    c = np.array([p[1] for p in contour.samples], dtype=float)
    return np.interp(grid_ms, t, c)


def _count_peaks(values: np.ndarray) -> int:
    """Strict local maxima above the contour's half-depth midline."""
    if values.size < 3:
        return 0
    lo, hi = float(values.min()), float(values.max())
    if hi <= lo:
        return 0
    threshold = lo + (hi - lo) / 2.0
    inner = values[1:-1]
    peaks = (inner > values[:-2]) & (inner > values[2:]) & (inner > threshold)
    return int(np.count_nonzero(peaks))


def score(performed: PitchContour, reference: PitchContour) -> MimicryScore:
    """Compare two contours on a common 100 Hz grid over their overlap.

    RMSE and Pearson r are computed after linear-interpolation resampling;
    the peak delta counts strict local maxima above each contour's own
    half-depth. RMSE and r are symmetric in their arguments.
    """
    if not performed.samples or not reference.samples:
        raise ValueError("cannot score an empty contour")
    t0 = max(performed.samples[0][0], reference.samples[0][0])
    t1 = min(performed.samples[-1][0], reference.samples[-1][0])
    if t1 <= t0:
        raise ValueError("contours have no temporal overlap")
    step = 1000.0 / SCORE_GRID_HZ
    grid = np.arange(t0, t1 + step / 2, step)
    grid = grid[grid <= t1]
    p = _resample(performed, grid)
    r = _resample(reference, grid)
    rmse = float(np.sqrt(np.mean((p - r) ** 2)))
    p_var = float(np.sum((p - p.mean()) ** 2))
    r_var = float(np.sum((r - r.mean()) ** 2))
    if rmse == 0.0:
        correlation = 1.0  # identical signals
    elif p_var == 0.0 or r_var == 0.0:
        correlation = 0.0  # degenerate constant contour
    else:
        cov = float(np.sum((p - p.mean()) * (r - r.mean())))
        correlation = cov / math.sqrt(p_var * r_var)
    return MimicryScore(
        rmse_cents=rmse,
        correlation=correlation,
        peak_count_delta=_count_peaks(p) - _count_peaks(r),
    )
