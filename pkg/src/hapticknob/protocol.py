"""Line-oriented ASCII codec for the device<->host serial link.

Device -> host, one line per tick:

    TT,<seq>,<t_ms>,<angle_deg>,<velocity_dps>,<torque>,<mode>\\n

Host -> device:

    MODE,<name>\\n | ZERO\\n | PARAM,<key>,<value>\\n | PING,<nonce>\\n

Floats in telemetry are rendered with exactly 4 decimal places so frames
round-trip bit-exactly at that precision. Mode names come from the closed
set {SMOOTH, DETENT, SPRING, FREE, VIBRATO}; PARAM keys come from the
haptic config field names. Full grammar: docs/protocol.md.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

from .engine import MODE_NAMES, PARAM_KEYS

MAX_LINE_BYTES = 128
MAX_BUFFER_BYTES = 4096

_MODE_SET = frozenset(MODE_NAMES)


class ProtocolError(ValueError):
    """Raised when a line violates the wire grammar."""


@dataclass(frozen=True)
class TelemetryFrame:
    seq: int
    t_ms: int
    angle_deg: float
    velocity_dps: float
    torque: float
    mode: str


@dataclass(frozen=True)
class ModeCommand:
    mode: str


@dataclass(frozen=True)
class ZeroCommand:
    pass


@dataclass(frozen=True)
class ParamCommand:
    key: str
    value: float


@dataclass(frozen=True)
class PingCommand:
    nonce: int


CommandFrame = Union[ModeCommand, ZeroCommand, ParamCommand, PingCommand]
Frame = Union[TelemetryFrame, ModeCommand, ZeroCommand, ParamCommand, PingCommand]


def encode_telemetry(sample) -> bytes:
    """Encode one telemetry tick (anything with the KnobSample fields)."""
    mode = str(sample.mode)
    if mode not in _MODE_SET:
        raise ProtocolError(f"unknown mode name: {mode}")
    line = "TT,%d,%d,%.4f,%.4f,%.4f,%s\n" % (
        sample.seq,
        sample.t_ms,
        sample.angle_deg,
        sample.velocity_dps,
        sample.torque,
        mode,
    )
    data = line.encode("ascii")
    if len(data) > MAX_LINE_BYTES:
        raise ProtocolError(f"telemetry line exceeds {MAX_LINE_BYTES} bytes")
    return data


def encode_command(cmd: CommandFrame) -> bytes:
    if isinstance(cmd, ModeCommand):
        if cmd.mode not in _MODE_SET:
            raise ProtocolError(f"unknown mode name: {cmd.mode}")
        return f"MODE,{cmd.mode}\n".encode("ascii")
    if isinstance(cmd, ZeroCommand):
        return b"ZERO\n"
    if isinstance(cmd, ParamCommand):
        if cmd.key not in PARAM_KEYS:
            raise ProtocolError(f"unknown param key: {cmd.key}")
        return f"PARAM,{cmd.key},{cmd.value!r}\n".encode("ascii")
    if isinstance(cmd, PingCommand):
        return f"PING,{cmd.nonce}\n".encode("ascii")
    raise ProtocolError(f"not a command frame: {cmd!r}")


def _parse_uint(token: str, what: str) -> int:
    if not token.isdigit():
        raise ProtocolError(f"bad {what}: {token!r}")
    return int(token)


def _parse_float(token: str, what: str) -> float:
    try:
        value = float(token)
    except ValueError:
        raise ProtocolError(f"bad {what}: {token!r}") from None
    if not math.isfinite(value):
        raise ProtocolError(f"non-finite {what}: {token!r}")
    return value


def parse_telemetry(line: str) -> TelemetryFrame:
    fields = line.split(",")
    if len(fields) != 7 or fields[0] != "TT":
        raise ProtocolError(f"bad telemetry line: {line!r}")
    mode = fields[6]
    if mode not in _MODE_SET:
        raise ProtocolError(f"unknown mode name: {mode}")
    return TelemetryFrame(
        seq=_parse_uint(fields[1], "seq"),
        t_ms=_parse_uint(fields[2], "t_ms"),
        angle_deg=_parse_float(fields[3], "angle"),
        velocity_dps=_parse_float(fields[4], "velocity"),
        torque=_parse_float(fields[5], "torque"),
        mode=mode,
    )


def parse_command(line: str) -> CommandFrame:
    """Parse one host->device command line (without the newline)."""
    fields = line.split(",")
    head = fields[0]
    if head == "MODE" and len(fields) == 2:
        if fields[1] not in _MODE_SET:
            raise ProtocolError(f"unknown mode name: {fields[1]}")
        return ModeCommand(fields[1])
    if head == "ZERO" and len(fields) == 1:
        return ZeroCommand()
    if head == "PARAM" and len(fields) == 3:
        if fields[1] not in PARAM_KEYS:
            raise ProtocolError(f"unknown param key: {fields[1]}")
        return ParamCommand(fields[1], _parse_float(fields[2], "param value"))
    if head == "PING" and len(fields) == 2:
        return PingCommand(_parse_uint(fields[1], "nonce"))
    raise ProtocolError(f"bad command line: {line!r}")


def parse_line(line: str) -> Frame:
    if line.startswith("TT,"):
        return parse_telemetry(line)
    return parse_command(line)


@dataclass
class StreamDecoder:
    """Incremental line reassembler; never raises on arbitrary byte input.

    Frames may be split at any byte boundary across chunks. Malformed lines
    are counted in ``frames_dropped`` and skipped. The internal buffer is
    bounded: on overflow past 4 KiB without a newline the oldest bytes are
    discarded (the eventually-completed line then fails to parse and is
    counted as dropped).
    """

    frames_ok: int = 0
    frames_dropped: int = 0
    _buf: bytearray = field(default_factory=bytearray, repr=False)

    def feed(self, chunk: bytes) -> list[Frame]:
        self._buf.extend(chunk)
        frames: list[Frame] = []
        while True:
            nl = self._buf.find(b"\n")
            if nl < 0:
                break
            raw = bytes(self._buf[:nl])
            del self._buf[: nl + 1]
            if raw.endswith(b"\r"):
                raw = raw[:-1]
            if not raw:
                continue
            if len(raw) > MAX_LINE_BYTES:
                self.frames_dropped += 1
                continue
            try:
                text = raw.decode("ascii")
            except UnicodeDecodeError:
                self.frames_dropped += 1
                continue
            try:
                frames.append(parse_line(text))
                self.frames_ok += 1
            except ProtocolError:
                self.frames_dropped += 1
        if len(self._buf) > MAX_BUFFER_BYTES:
            del self._buf[: len(self._buf) - MAX_BUFFER_BYTES]
        return frames


def decode_stream(decoder: StreamDecoder, chunk: bytes) -> list[Frame]:
    """Feed one chunk into ``decoder``; returns completed frames in order."""
    return decoder.feed(chunk)
