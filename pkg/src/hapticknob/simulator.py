"""Fixed-timestep simulation of the rotary knob.

The rotor integrates engine torque plus a scripted user torque with
semi-implicit Euler at the haptic tick rate (1 kHz by default). Angular
acceleration in deg/s^2 is net normalized torque divided by the normalized
inertia; physical N*mm scaling is informational only.

Telemetry samples are emitted once per tick, after integration and after any
queued mode change has been applied, so the first sample following a mode
change always reports a zeroed angle and held (zero) torque.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, replace

from .engine import (
    EngineSession,
    HapticModeConfig,
    session_output,
    set_mode,
)


@dataclass(frozen=True)
class RotorParams:
    inertia: float = 1.0  # normalized; deg/s^2 per unit torque is 1/inertia
    damping: float = 0.002  # normalized torque per deg/s
    torque_scale_nmm: float = 70.0  # physical torque at normalized 1.0; informational
    tick_rate_hz: float = 1000.0

    def __post_init__(self) -> None:
        if self.inertia <= 0:
            raise ValueError("inertia must be positive")
        if self.damping < 0:
            raise ValueError("damping must be non-negative")
        if self.tick_rate_hz < 100:
            raise ValueError("tick_rate_hz must be at least 100")

    @property
    def dt(self) -> float:
        return 1.0 / self.tick_rate_hz


@dataclass(frozen=True)
class RotorState:
    angle_deg: float = 0.0  # absolute, unwrapped
    velocity_dps: float = 0.0


@dataclass(frozen=True)
class KnobSample:
    """One telemetry tick as printed by the device."""

    seq: int
    t_ms: int
    angle_deg: float
    velocity_dps: float
    torque: float
    mode: str


def step(
    state: RotorState,
    user_torque: float,
    engine_torque: float,
    params: RotorParams,
    dt: float,
) -> RotorState:
    """One semi-implicit Euler step: velocity first, then position."""
    accel = (user_torque + engine_torque - params.damping * state.velocity_dps) / params.inertia
    v = state.velocity_dps + dt * accel
    return RotorState(angle_deg=state.angle_deg + dt * v, velocity_dps=v)


class KnobSimulator:
    """Single-owner simulation session.

    Exactly one driver advances the session via :meth:`tick`; emitted samples
    are immutable values. Mode changes are queued and take effect at the next
    tick boundary (after integration, before the sample is emitted), which is
    when the new zero point is captured.
    """

    def __init__(
        self,
        config: HapticModeConfig | None = None,
        params: RotorParams | None = None,
    ) -> None:
        self.params = params or RotorParams()
        cfg = config or HapticModeConfig()
        self.rotor = RotorState()
        self._session: EngineSession = set_mode(None, cfg, self.rotor.angle_deg)
        self._pending_config: HapticModeConfig | None = None
        self._pending_rezero = False
        self._ticks = 0
        self._seq = 0
        # Torque rendered at the last emission; it is what acts during the
        # next integration step (the device applies what it last printed).
        self._render_torque = 0.0

    @property
    def config(self) -> HapticModeConfig:
        return self._session.config

    @property
    def next_config(self) -> HapticModeConfig:
        """The config in effect after pending commands apply; patches issued
        in the same batch as a mode change stack on top of it."""
        return self._pending_config or self._session.config

    @property
    def time_s(self) -> float:
        return self._ticks * self.params.dt

    def queue_mode(self, config: HapticModeConfig) -> None:
        """Request a mode change: applied at the next tick boundary, where it
        also re-zeroes the session."""
        self._pending_config = config
        self._pending_rezero = True

    def queue_params(self, config: HapticModeConfig) -> None:
        """Request a parameter patch: unlike a mode change it keeps the
        current zero point and interaction state."""
        self._pending_config = config

    def queue_zero(self) -> None:
        """Request a zero-point reset without changing the config."""
        self._pending_rezero = True

    def tick(self, user_torque: float = 0.0) -> KnobSample:
        """Advance one fixed step and emit the resulting telemetry sample."""
        dt = self.params.dt
        self.rotor = step(self.rotor, user_torque, self._render_torque, self.params, dt)
        self._ticks += 1
        self._seq += 1
        if self._pending_rezero:
            self._session = set_mode(
                self._session,
                self._pending_config or self._session.config,
                self.rotor.angle_deg,
            )
        elif self._pending_config is not None:
            self._session = replace(self._session, config=self._pending_config)
        self._pending_config = None
        self._pending_rezero = False
        rel, torque, self._session = session_output(
            self._session, self.rotor.angle_deg, self.rotor.velocity_dps, self.time_s
        )
        self._render_torque = torque
        return KnobSample(
            seq=self._seq,
            t_ms=round(self._ticks * 1000.0 / self.params.tick_rate_hz),
            angle_deg=rel,
            velocity_dps=self.rotor.velocity_dps,
            torque=torque,
            mode=self._session.config.mode.value,
        )


# --- scripted gestures -------------------------------------------------------


@dataclass(frozen=True)
class TorqueComponent:
    """One additive term of a segment's user-torque signal.

    kind "constant": value
    kind "ramp":     value -> end_value linearly over the segment
    kind "sinusoid": amplitude * sin(2*pi*freq_hz*t_local + phase_rad)
    """

    kind: str
    value: float = 0.0
    end_value: float = 0.0
    amplitude: float = 0.0
    freq_hz: float = 0.0
    phase_rad: float = 0.0

    def evaluate(self, t_local: float, duration_s: float) -> float:
        if self.kind == "constant":
            return self.value
        if self.kind == "ramp":
            frac = t_local / duration_s if duration_s > 0 else 0.0
            return self.value + (self.end_value - self.value) * frac
        if self.kind == "sinusoid":
            return self.amplitude * math.sin(
                2.0 * math.pi * self.freq_hz * t_local + self.phase_rad
            )
        raise ValueError(f"unknown torque component kind: {self.kind!r}")


@dataclass(frozen=True)
class GestureSegment:
    duration_s: float
    components: tuple[TorqueComponent, ...]

    def __post_init__(self) -> None:
        if self.duration_s <= 0:
            raise ValueError("segment duration must be positive")


@dataclass(frozen=True)
class GestureProfile:
    """Deterministic scripted user-torque signal.

    ``jitter_torque`` adds uniform noise in [-j, +j] per tick, drawn from a
    PRNG seeded with ``seed`` so replays are bit-identical.
    """

    segments: tuple[GestureSegment, ...] = ()
    seed: int = 0
    jitter_torque: float = 0.0

    @property
    def duration_s(self) -> float:
        return sum(seg.duration_s for seg in self.segments)


def profile_to_json(profile: GestureProfile) -> dict:
    return {
        "seed": profile.seed,
        "jitter_torque": profile.jitter_torque,
        "segments": [
            {
                "duration_s": seg.duration_s,
                "components": [
                    {
                        "kind": c.kind,
                        "value": c.value,
                        "end_value": c.end_value,
                        "amplitude": c.amplitude,
                        "freq_hz": c.freq_hz,
                        "phase_rad": c.phase_rad,
                    }
                    for c in seg.components
                ],
            }
            for seg in profile.segments
        ],
    }


def profile_from_json(data: dict) -> GestureProfile:
    segments = tuple(
        GestureSegment(
            duration_s=float(seg["duration_s"]),
            components=tuple(
                TorqueComponent(
                    kind=str(c["kind"]),
                    value=float(c.get("value", 0.0)),
                    end_value=float(c.get("end_value", 0.0)),
                    amplitude=float(c.get("amplitude", 0.0)),
                    freq_hz=float(c.get("freq_hz", 0.0)),
                    phase_rad=float(c.get("phase_rad", 0.0)),
                )
                for c in seg.get("components", [])
            ),
        )
        for seg in data.get("segments", [])
    )
    return GestureProfile(
        segments=segments,
        seed=int(data.get("seed", 0)),
        jitter_torque=float(data.get("jitter_torque", 0.0)),
    )


def run_profile(
    profile: GestureProfile,
    config: HapticModeConfig | None = None,
    params: RotorParams | None = None,
) -> list[KnobSample]:
    """Run a scripted gesture from rest; deterministic per (profile, config,
    params): identical inputs produce bit-identical sample lists."""
    sim = KnobSimulator(config=config, params=params)
    rng = random.Random(profile.seed)
    jitter = profile.jitter_torque
    samples: list[KnobSample] = []
    for seg in profile.segments:
        n_ticks = round(seg.duration_s * sim.params.tick_rate_hz)
        dt = sim.params.dt
        for i in range(n_ticks):
            t_local = i * dt  # pre-step time within the segment
            u = 0.0
            for comp in seg.components:
                u += comp.evaluate(t_local, seg.duration_s)
            if jitter > 0.0:
                u += rng.uniform(-jitter, jitter)
            samples.append(sim.tick(u))
    return samples


def make_vibrato_gesture(
    depth_deg: float,
    rate_hz: float,
    duration_s: float,
    params: RotorParams | None = None,
) -> GestureProfile:
    """Open-loop torque script whose angle trajectory under SMOOTH mode is
    theta(t) = depth * (1 - cos(2*pi*rate*t)) / 2, oscillating 0..depth.

    The feedforward is derived against the simulator's own backward-difference
    discretization, so tracking on the tick grid is exact: a lone first-tick
    impulse establishes the initial velocity, then two sinusoid components
    supply the inertial and damping torques.
    """
    if not 0.0 < depth_deg <= 90.0:
        raise ValueError("depth_deg must lie in (0, 90]")
    if not 0.0 < rate_hz <= 20.0:
        raise ValueError("rate_hz must lie in (0, 20]")
    if duration_s <= 0:
        raise ValueError("duration_s must be positive")
    p = params or RotorParams()
    dt = p.dt
    if duration_s <= dt:
        raise ValueError("duration_s must exceed one tick")
    omega = 2.0 * math.pi * rate_hz
    half = math.sin(omega * dt / 2.0)
    v_amp = depth_deg * half / dt  # tick-grid velocity amplitude, deg/s
    inertial_amp = 2.0 * p.inertia * depth_deg * half * half / (dt * dt)
    first_tick = inertial_amp / 2.0  # half step: starts the velocity sequence
    segments = (
        GestureSegment(
            duration_s=dt,
            components=(TorqueComponent(kind="constant", value=first_tick),),
        ),
        GestureSegment(
            duration_s=duration_s - dt,
            components=(
                # inertial term, cos(omega*t) in global time (local t is offset by dt)
                TorqueComponent(
                    kind="sinusoid",
                    amplitude=inertial_amp,
                    freq_hz=rate_hz,
                    phase_rad=math.pi / 2.0 + omega * dt,
                ),
                # damping compensation, in phase with the tick-grid velocity
                TorqueComponent(
                    kind="sinusoid",
                    amplitude=p.damping * v_amp,
                    freq_hz=rate_hz,
                    phase_rad=omega * dt / 2.0,
                ),
            ),
        ),
    )
    return GestureProfile(segments=segments)
