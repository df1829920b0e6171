"""Piano-roll document model and edit operations.

A Clip is an immutable value; every edit returns a new Clip or raises,
leaving the input untouched (edits are atomic by construction). Pitches are
MIDI note numbers with the C-1 = 0 convention, restricted to the editor's
range C1..G8 = [24, 115]. Notes of equal pitch may never overlap in time,
matching grid-editor behavior.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

PITCH_MIN = 24  # C1
PITCH_MAX = 115  # G8
DEFAULT_PPQ = 480
DEFAULT_VELOCITY = 100


class ClipError(Exception):
    """Base class for rejected clip edits."""


class PitchRangeError(ClipError):
    pass


class NoteOverlapError(ClipError):
    pass


class UnknownNoteError(ClipError):
    pass


class InvalidNoteError(ClipError):
    pass


@dataclass(frozen=True)
class NoteEvent:
    id: int
    pitch: int
    start_ticks: int
    duration_ticks: int
    velocity: int = DEFAULT_VELOCITY

    def __post_init__(self) -> None:
        if not PITCH_MIN <= self.pitch <= PITCH_MAX:
            raise PitchRangeError(
                f"pitch {self.pitch} outside [{PITCH_MIN}, {PITCH_MAX}] (C1..G8)"
            )
        if self.start_ticks < 0:
            raise InvalidNoteError(f"negative start: {self.start_ticks}")
        if self.duration_ticks < 1:
            raise InvalidNoteError(f"duration must be >= 1 tick, got {self.duration_ticks}")
        if not 1 <= self.velocity <= 127:
            raise InvalidNoteError(f"velocity {self.velocity} outside [1, 127]")

    @property
    def end_ticks(self) -> int:
        return self.start_ticks + self.duration_ticks


@dataclass(frozen=True)
class Clip:
    notes: tuple[NoteEvent, ...] = ()
    ppq: int = DEFAULT_PPQ
    tempo_bpm: float = 120.0
    time_signature: tuple[int, int] = (4, 4)
    selection: frozenset[int] = frozenset()
    pitch_bends: tuple[tuple[int, int], ...] = ()  # (tick, 14-bit value)
    next_id: int = 1

    def __post_init__(self) -> None:
        ids = [n.id for n in self.notes]
        if len(ids) != len(set(ids)):
            raise InvalidNoteError("duplicate note ids")
        if not self.selection <= set(ids):
            raise InvalidNoteError("selection references unknown note ids")

    def note(self, note_id: int) -> NoteEvent:
        for n in self.notes:
            if n.id == note_id:
                return n
        raise UnknownNoteError(f"no note with id {note_id}")


def _check_overlap(notes: tuple[NoteEvent, ...], candidate: NoteEvent) -> None:
    for n in notes:
        if n.id == candidate.id or n.pitch != candidate.pitch:
            continue
        if candidate.start_ticks < n.end_ticks and n.start_ticks < candidate.end_ticks:
            raise NoteOverlapError(
                f"note at pitch {candidate.pitch} overlaps note {n.id} "
                f"([{n.start_ticks}, {n.end_ticks}))"
            )


def add_note(
    clip: Clip,
    pitch: int,
    start_ticks: int,
    duration_ticks: int,
    velocity: int = DEFAULT_VELOCITY,
) -> Clip:
    note = NoteEvent(clip.next_id, pitch, start_ticks, duration_ticks, velocity)
    _check_overlap(clip.notes, note)
    return replace(clip, notes=clip.notes + (note,), next_id=clip.next_id + 1)


def select(clip: Clip, note_id: int) -> Clip:
    clip.note(note_id)  # raises UnknownNoteError
    return replace(clip, selection=frozenset({note_id}))


def move_note(clip: Clip, note_id: int, delta_ticks: int, delta_pitch: int) -> Clip:
    old = clip.note(note_id)
    moved = NoteEvent(
        old.id,
        old.pitch + delta_pitch,
        old.start_ticks + delta_ticks,
        old.duration_ticks,
        old.velocity,
    )
    _check_overlap(clip.notes, moved)
    return replace(
        clip, notes=tuple(moved if n.id == note_id else n for n in clip.notes)
    )


def resize_note(
    clip: Clip,
    note_id: int,
    new_start: int | None = None,
    new_end: int | None = None,
) -> Clip:
    old = clip.note(note_id)
    start = old.start_ticks if new_start is None else new_start
    end = old.end_ticks if new_end is None else new_end
    resized = NoteEvent(old.id, old.pitch, start, end - start, old.velocity)
    _check_overlap(clip.notes, resized)
    return replace(
        clip, notes=tuple(resized if n.id == note_id else n for n in clip.notes)
    )


def clear(clip: Clip) -> Clip:
    return replace(clip, notes=(), selection=frozenset(), pitch_bends=())


def make_reference_clip() -> Clip:
    """The mimicry-task stimulus: three back-to-back C3 notes, each six
    quarter notes long, 4/4 at 120 bpm (3.0 s of wall time per note)."""
    clip = Clip(ppq=DEFAULT_PPQ, tempo_bpm=120.0, time_signature=(4, 4))
    dur = 6 * DEFAULT_PPQ  # 2880 ticks
    for i in range(3):
        clip = add_note(clip, pitch=48, start_ticks=i * dur, duration_ticks=dur)
    return clip


# --- JSON interchange (UI payload schema; see docs/http_api.md) --------------


def clip_to_json(clip: Clip) -> dict:
    return {
        "ppq": clip.ppq,
        "tempo_bpm": clip.tempo_bpm,
        "time_signature": list(clip.time_signature),
        "notes": [
            {
                "id": n.id,
                "pitch": n.pitch,
                "start_ticks": n.start_ticks,
                "duration_ticks": n.duration_ticks,
                "velocity": n.velocity,
            }
            for n in clip.notes
        ],
        "pitch_bends": [list(pb) for pb in clip.pitch_bends],
    }


def clip_from_json(data: dict) -> Clip:
    """Validate and build a Clip from its JSON form.

    Raises ClipError (or a subclass) on any invariant violation, so a
    transport layer can reject bad payloads atomically.
    """
    try:
        ppq = int(data.get("ppq", DEFAULT_PPQ))
        tempo = float(data.get("tempo_bpm", 120.0))
        ts_raw = data.get("time_signature", [4, 4])
        time_signature = (int(ts_raw[0]), int(ts_raw[1]))
        notes_raw = data.get("notes", [])
        bends_raw = data.get("pitch_bends", [])
    except (TypeError, ValueError, IndexError) as exc:
        raise InvalidNoteError(f"malformed clip payload: {exc}") from exc
    if ppq < 1:
        raise InvalidNoteError(f"ppq must be >= 1, got {ppq}")
    if tempo <= 0:
        raise InvalidNoteError(f"tempo must be positive, got {tempo}")
    notes = []
    max_id = 0
    for entry in notes_raw:
        try:
            note = NoteEvent(
                id=int(entry.get("id", len(notes) + 1)),
                pitch=int(entry["pitch"]),
                start_ticks=int(entry["start_ticks"]),
                duration_ticks=int(entry["duration_ticks"]),
                velocity=int(entry.get("velocity", DEFAULT_VELOCITY)),
            )
        except (TypeError, KeyError, ValueError) as exc:
            raise InvalidNoteError(f"malformed note entry: {entry!r}") from exc
        _check_overlap(tuple(notes), note)
        notes.append(note)
        max_id = max(max_id, note.id)
    try:
        bends = tuple((int(t), int(v)) for t, v in bends_raw)
    except (TypeError, ValueError) as exc:
        raise InvalidNoteError(f"malformed pitch bends: {exc}") from exc
    return Clip(
        notes=tuple(notes),
        ppq=ppq,
        tempo_bpm=tempo,
        time_signature=time_signature,
        pitch_bends=bends,
        next_id=max_id + 1,
    )
