"""Torque rendering for a 1-DoF rotary haptic knob.

Five modes are rendered: SMOOTH (free-spinning baseline), DETENT (periodic
exponential walls with a transient assistive click at each crossing), SPRING
(Hooke-style restoring torque), FREE (constant torque) and VIBRATO
(sinusoidal torque in time).

Torque is dimensionless, normalized so +/-1.0 is the device's maximum
magnitude. Angles are degrees relative to the session zero point; the zero
point is captured whenever the mode changes, and torque output is held at 0
after a mode change until the knob is moved again.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum


class HapticMode(str, Enum):
    SMOOTH = "SMOOTH"
    DETENT = "DETENT"
    SPRING = "SPRING"
    FREE = "FREE"
    VIBRATO = "VIBRATO"


MODE_NAMES = tuple(m.value for m in HapticMode)


@dataclass(frozen=True)
class KnobState:
    """Instantaneous knob state, in zeroed (session-relative) coordinates."""

    angle_deg: float
    velocity_dps: float
    time_s: float = 0.0


@dataclass(frozen=True)
class TorqueCommand:
    """Commanded torque, normalized to [-1, +1]."""

    torque: float


@dataclass(frozen=True)
class HapticModeConfig:
    """A mode plus every rendering parameter any mode can consume.

    Unused parameters are carried along so a PARAM patch over the wire can
    target any field regardless of the active mode.
    """

    mode: HapticMode = HapticMode.SMOOTH
    detent_spacing_deg: float = 45.0
    detent_steepness: float = 4.0
    detent_click_fraction: float = 0.05
    detent_click_gain: float = 0.3
    spring_constant: float = 1.0 / 90.0
    free_torque: float = 0.2
    vibrato_amplitude: float = 0.2
    vibrato_freq_hz: float = 5.0
    rest_velocity_eps_dps: float = 1.0

    def __post_init__(self) -> None:
        if self.detent_spacing_deg <= 0:
            raise ValueError("detent_spacing_deg must be positive")
        if self.detent_steepness <= 0:
            raise ValueError("detent_steepness must be positive")
        if not 0.0 < self.detent_click_fraction < 0.5:
            raise ValueError("detent_click_fraction must lie in (0, 0.5)")
        for name in ("detent_click_gain", "free_torque", "vibrato_amplitude"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {value}")
        if self.vibrato_freq_hz < 0:
            raise ValueError("vibrato_freq_hz must be non-negative")
        if self.rest_velocity_eps_dps < 0:
            raise ValueError("rest_velocity_eps_dps must be non-negative")


# Numeric config fields patchable over the wire (everything except `mode`).
PARAM_KEYS = frozenset(
    name for name in HapticModeConfig.__dataclass_fields__ if name != "mode"
)


def _clamp(torque: float) -> float:
    if torque > 1.0:
        return 1.0
    if torque < -1.0:
        return -1.0
    return torque


def torque_smooth(state: KnobState) -> float:
    """Baseline mode: no rendered resistance at all."""
    return 0.0


def torque_detent(config: HapticModeConfig, state: KnobState) -> float:
    """Periodic exponential wall opposing travel, with an assistive click.

    Detents sit at integer multiples of ``detent_spacing_deg`` in zeroed
    coordinates. Let f in [0, 1) be the fractional progress from the last
    detent crossed toward the next one in the direction of travel. Just past
    a detent (f < detent_click_fraction) a short pulse pushes *with* the
    motion; past the pulse, resistance grows as (e^(k*f') - 1)/(e^k - 1)
    against the motion, where f' rescales the remaining sub-segment to
    [0, 1]. At rest (|velocity| below the eps) nothing is rendered, so the
    sign ambiguity of zero velocity can never chatter.
    """
    v = state.velocity_dps
    if abs(v) < config.rest_velocity_eps_dps:
        return 0.0
    s = 1.0 if v > 0 else -1.0
    x = state.angle_deg / config.detent_spacing_deg
    f = x - math.floor(x) if s > 0 else math.ceil(x) - x
    c = config.detent_click_fraction
    if f < c:
        return s * config.detent_click_gain
    k = config.detent_steepness
    f_prime = (f - c) / (1.0 - c)
    return -s * math.expm1(k * f_prime) / math.expm1(k)


def torque_spring(config: HapticModeConfig, state: KnobState) -> float:
    """Hooke's-law restoring torque: linear in angular displacement."""
    return _clamp(-config.spring_constant * state.angle_deg)


def torque_free(config: HapticModeConfig) -> float:
    """Constant torque regardless of knob state."""
    return config.free_torque


def torque_vibrato(config: HapticModeConfig, state: KnobState) -> float:
    """Sinusoidal torque in time: amplitude * sin(2*pi*f*t)."""
    return config.vibrato_amplitude * math.sin(
        2.0 * math.pi * config.vibrato_freq_hz * state.time_s
    )


def compute_torque(config: HapticModeConfig, state: KnobState) -> TorqueCommand:
    """Render the active mode's torque for one knob state, clamped to [-1, 1].

    Pure and O(1); safe to call from a fixed-rate haptic loop.
    """
    mode = config.mode
    if mode is HapticMode.SMOOTH:
        t = torque_smooth(state)
    elif mode is HapticMode.DETENT:
        t = torque_detent(config, state)
    elif mode is HapticMode.SPRING:
        t = torque_spring(config, state)
    elif mode is HapticMode.FREE:
        t = torque_free(config)
    elif mode is HapticMode.VIBRATO:
        t = torque_vibrato(config, state)
    else:  # pragma: no cover - enum is closed
        raise ValueError(f"unknown haptic mode: {mode!r}")
    return TorqueCommand(_clamp(t))


@dataclass(frozen=True)
class EngineSession:
    """Per-session rendering state: active config plus the zero point.

    ``interacted_since_reset`` implements the post-mode-change hold: torque
    reads 0 until the knob first moves past the motion threshold.
    """

    config: HapticModeConfig
    zero_offset_deg: float = 0.0
    interacted_since_reset: bool = False


def set_mode(
    session: EngineSession | None,
    config: HapticModeConfig,
    current_absolute_angle_deg: float,
) -> EngineSession:
    """Activate ``config``, re-zeroing the session at the current angle.

    The knob position at the moment of the change becomes the new zero
    point, and rendered torque is held at 0 until the next interaction.
    Consecutive calls are last-write-wins.
    """
    return EngineSession(
        config=config,
        zero_offset_deg=current_absolute_angle_deg,
        interacted_since_reset=False,
    )


def session_output(
    session: EngineSession,
    absolute_angle_deg: float,
    velocity_dps: float,
    time_s: float,
) -> tuple[float, float, EngineSession]:
    """Evaluate one telemetry tick: (relative angle, torque, next session).

    While the post-reset hold is active the rendered torque is 0; the hold
    is released one tick *after* motion first exceeds the threshold, so the
    first report following a mode change is always (0, 0). The motion
    threshold reuses ``rest_velocity_eps_dps`` (interpreted in degrees for
    the angle test).
    """
    rel = absolute_angle_deg - session.zero_offset_deg
    state = KnobState(rel, velocity_dps, time_s)
    if session.interacted_since_reset:
        return rel, compute_torque(session.config, state).torque, session
    eps = session.config.rest_velocity_eps_dps
    if abs(rel) > eps or abs(velocity_dps) > eps:
        session = replace(session, interacted_since_reset=True)
    return rel, 0.0, session
