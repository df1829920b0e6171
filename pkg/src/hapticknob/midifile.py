"""Standard MIDI File import/export for the sequencer's supported subset.

Load accepts SMF format 0 or 1 (PPQ division only), handling note-on/off
(velocity-0 note-ons are offs), set-tempo, time-signature, pitch-bend and
running status; unrecognized events are skipped by their declared length.
Save always emits format 0. load(save(clip)) preserves note content, tempo
and time signature exactly for any clip whose tempo is representable as a
whole number of microseconds per quarter note (all MIDI-sourced tempos are).

All multi-byte integers are big-endian per the SMF specification.
"""

from __future__ import annotations

import struct

from .sequencer import PITCH_MAX, PITCH_MIN, Clip, add_note

_MICROS_PER_MINUTE = 60_000_000


class MidiError(Exception):
    """Malformed SMF data; ``offset`` is the byte position of the fault."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset


class _Reader:
    def __init__(self, data: bytes, pos: int = 0):
        self.data = data
        self.pos = pos

    def take(self, n: int, what: str) -> bytes:
        if self.pos + n > len(self.data):
            raise MidiError(f"truncated {what}", self.pos)
        out = self.data[self.pos : self.pos + n]
        self.pos += n
        return out

    def u8(self, what: str) -> int:
        return self.take(1, what)[0]

    def data_byte(self, what: str) -> int:
        value = self.u8(what)
        if value & 0x80:
            raise MidiError(f"{what} has the status bit set: 0x{value:02X}", self.pos - 1)
        return value

    def varint(self, what: str) -> int:
        value = 0
        for _ in range(4):
            byte = self.u8(what)
            value = (value << 7) | (byte & 0x7F)
            if not byte & 0x80:
                return value
        raise MidiError(f"overlong varint in {what}", self.pos)


def _varint_bytes(value: int) -> bytes:
    if value < 0:
        raise ValueError("negative varint")
    out = [value & 0x7F]
    value >>= 7
    while value:
        out.append(0x80 | (value & 0x7F))
        value >>= 7
    return bytes(reversed(out))


def load_midi(data: bytes) -> Clip:
    r = _Reader(data)
    if r.take(4, "header") != b"MThd":
        raise MidiError("bad magic, expected MThd", 0)
    header_len = struct.unpack(">I", r.take(4, "header"))[0]
    if header_len < 6:
        raise MidiError(f"bad header length {header_len}", r.pos - 4)
    fmt, ntracks, division = struct.unpack(">HHH", r.take(6, "header"))
    r.take(header_len - 6, "header")  # spec allows oversized headers
    if fmt not in (0, 1):
        raise MidiError(f"unsupported SMF format {fmt}", 8)
    if division & 0x8000:
        raise MidiError("SMPTE division not supported", 12)
    ppq = division & 0x7FFF
    if ppq == 0:
        raise MidiError("zero ticks per quarter", 12)

    tempo_us: int | None = None
    time_signature: tuple[int, int] | None = None
    notes: list[tuple[int, int, int, int]] = []  # (start, pitch, duration, velocity)
    bends: list[tuple[int, int]] = []

    for _ in range(ntracks):
        if r.take(4, "track header") != b"MTrk":
            raise MidiError("bad track magic, expected MTrk", r.pos - 4)
        track_len = struct.unpack(">I", r.take(4, "track header"))[0]
        end = r.pos + track_len
        if end > len(data):
            raise MidiError("truncated track chunk", r.pos - 4)
        tick = 0
        running_status: int | None = None
        # open note-ons per pitch, FIFO: (start_tick, velocity, byte_offset)
        open_notes: dict[int, list[tuple[int, int, int]]] = {}

        def close_note(pitch: int, at_tick: int) -> None:
            start, velocity, _ = open_notes[pitch].pop(0)
            if not open_notes[pitch]:
                del open_notes[pitch]
            if at_tick > start:  # zero-length retriggers are discarded
                notes.append((start, pitch, at_tick - start, velocity))

        while r.pos < end:
            tick += r.varint("delta time")
            event_offset = r.pos
            status = r.u8("event")
            if status < 0x80:
                if running_status is None:
                    raise MidiError("data byte without running status", event_offset)
                status = running_status
                r.pos -= 1
            if status == 0xFF:
                meta_type = r.u8("meta event")
                length = r.varint("meta length")
                payload = r.take(length, "meta payload")
                running_status = None
                if meta_type == 0x51 and length == 3 and tempo_us is None:
                    tempo_us = int.from_bytes(payload, "big")
                elif meta_type == 0x58 and length >= 2 and time_signature is None:
                    time_signature = (payload[0], 1 << payload[1])
                continue
            if status in (0xF0, 0xF7):
                length = r.varint("sysex length")
                r.take(length, "sysex payload")
                running_status = None
                continue
            if status < 0x80 or status >= 0xF0:
                raise MidiError(f"unexpected status byte 0x{status:02X}", event_offset)
            running_status = status
            kind = status & 0xF0
            if kind in (0x80, 0x90, 0xA0, 0xB0, 0xE0):
                d1 = r.data_byte("event data")
                d2 = r.data_byte("event data")
            else:  # program change / channel pressure
                d1 = r.data_byte("event data")
                d2 = 0
            if kind == 0x90 and d2 > 0:
                if not PITCH_MIN <= d1 <= PITCH_MAX:
                    raise MidiError(
                        f"pitch {d1} outside supported range [{PITCH_MIN}, {PITCH_MAX}]",
                        event_offset,
                    )
                if d1 in open_notes:
                    close_note(d1, tick)  # retrigger truncates the open note
                open_notes.setdefault(d1, []).append((tick, d2, event_offset))
            elif kind == 0x80 or (kind == 0x90 and d2 == 0):
                if d1 in open_notes:
                    close_note(d1, tick)
                # unmatched note-offs are ignored
            elif kind == 0xE0:
                bends.append((tick, d1 | (d2 << 7)))
        if r.pos != end:
            raise MidiError("event ran past declared track length", r.pos)
        if open_notes:
            pitch = min(open_notes)
            raise MidiError(
                f"unmatched note-on for pitch {pitch}", open_notes[pitch][0][2]
            )

    clip = Clip(
        ppq=ppq,
        tempo_bpm=_MICROS_PER_MINUTE / tempo_us if tempo_us else 120.0,
        time_signature=time_signature or (4, 4),
        pitch_bends=tuple(sorted(bends)),
    )
    for start, pitch, duration, velocity in _resolve_overlaps(sorted(notes)):
        clip = add_note(clip, pitch, start, duration, velocity)
    return clip


def _resolve_overlaps(
    notes: list[tuple[int, int, int, int]],
) -> list[tuple[int, int, int, int]]:
    """Truncate cross-track same-pitch overlaps the way a retrigger would.

    Within one track the parser already truncates at retriggers; merging
    format-1 tracks can still collide, and the editor cannot represent
    same-pitch overlap.
    """
    last_by_pitch: dict[int, int] = {}  # pitch -> index of latest note kept
    out: list[tuple[int, int, int, int]] = []
    for note in notes:
        start, pitch, _, _ = note
        prev_idx = last_by_pitch.get(pitch)
        if prev_idx is not None:
            p_start, _, p_dur, p_vel = out[prev_idx]
            if start < p_start + p_dur:
                out[prev_idx] = (p_start, pitch, start - p_start, p_vel)
        out.append(note)
        last_by_pitch[pitch] = len(out) - 1
    return [n for n in out if n[2] > 0]


def save_midi(clip: Clip) -> bytes:
    """Serialize to SMF format 0 (single track)."""
    num, den = clip.time_signature
    dd = den.bit_length() - 1
    if den <= 0 or (1 << dd) != den:
        raise ValueError(f"time signature denominator {den} is not a power of two")
    tempo_us = round(_MICROS_PER_MINUTE / clip.tempo_bpm)
    if not 1 <= tempo_us <= 0xFFFFFF:
        raise ValueError(f"tempo {clip.tempo_bpm} bpm not representable")

    # (tick, order, payload): metas first, then bends, offs, ons at equal ticks
    events: list[tuple[int, int, bytes]] = [
        (0, 0, bytes([0xFF, 0x51, 0x03]) + tempo_us.to_bytes(3, "big")),
        (0, 0, bytes([0xFF, 0x58, 0x04, num, dd, 24, 8])),
    ]
    for tick, value in clip.pitch_bends:
        events.append((tick, 1, bytes([0xE0, value & 0x7F, (value >> 7) & 0x7F])))
    for note in clip.notes:
        events.append((note.start_ticks, 3, bytes([0x90, note.pitch, note.velocity])))
        events.append((note.end_ticks, 2, bytes([0x80, note.pitch, 0])))
    events.sort(key=lambda e: (e[0], e[1]))

    body = bytearray()
    last_tick = 0
    for tick, _, payload in events:
        body += _varint_bytes(tick - last_tick)
        body += payload
        last_tick = tick
    body += _varint_bytes(0) + bytes([0xFF, 0x2F, 0x00])

    header = b"MThd" + struct.pack(">IHHH", 6, 0, 1, clip.ppq)
    return header + b"MTrk" + struct.pack(">I", len(body)) + bytes(body)
