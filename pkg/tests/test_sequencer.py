"""Clip document model tests."""

from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hapticknob.sequencer import (
    PITCH_MAX,
    PITCH_MIN,
    Clip,
    ClipError,
    NoteOverlapError,
    PitchRangeError,
    UnknownNoteError,
    add_note,
    clear,
    clip_from_json,
    clip_to_json,
    make_reference_clip,
    move_note,
    resize_note,
    select,
)


@pytest.fixture
def one_note_clip() -> Clip:
    return add_note(Clip(), pitch=48, start_ticks=0, duration_ticks=480)


class TestAddNote:
    def test_add_c3_quarter(self, one_note_clip):
        assert len(one_note_clip.notes) == 1
        note = one_note_clip.notes[0]
        assert note.pitch == 48
        assert note.duration_ticks == 480

    def test_below_range_rejected(self):
        with pytest.raises(PitchRangeError):
            add_note(Clip(), pitch=23, start_ticks=0, duration_ticks=480)

    def test_above_range_rejected(self):
        with pytest.raises(PitchRangeError):
            add_note(Clip(), pitch=116, start_ticks=0, duration_ticks=480)

    def test_range_endpoints_allowed(self):
        clip = add_note(Clip(), PITCH_MIN, 0, 1)
        clip = add_note(clip, PITCH_MAX, 0, 1)
        assert {n.pitch for n in clip.notes} == {PITCH_MIN, PITCH_MAX}

    def test_same_pitch_overlap_rejected(self, one_note_clip):
        with pytest.raises(NoteOverlapError):
            add_note(one_note_clip, pitch=48, start_ticks=240, duration_ticks=480)

    def test_back_to_back_same_pitch_ok(self, one_note_clip):
        clip = add_note(one_note_clip, pitch=48, start_ticks=480, duration_ticks=480)
        assert len(clip.notes) == 2

    def test_other_pitch_overlap_ok(self, one_note_clip):
        clip = add_note(one_note_clip, pitch=50, start_ticks=0, duration_ticks=480)
        assert len(clip.notes) == 2

    def test_fresh_ids(self):
        clip = Clip()
        clip = add_note(clip, 48, 0, 10)
        clip = add_note(clip, 50, 0, 10)
        assert clip.notes[0].id != clip.notes[1].id


class TestEditOps:
    def test_select(self, one_note_clip):
        note_id = one_note_clip.notes[0].id
        clip = select(one_note_clip, note_id)
        assert clip.selection == {note_id}

    def test_select_unknown(self, one_note_clip):
        with pytest.raises(UnknownNoteError):
            select(one_note_clip, 999)

    def test_move_up_an_octave(self, one_note_clip):
        clip = move_note(one_note_clip, one_note_clip.notes[0].id, 0, 12)
        assert clip.notes[0].pitch == 60

    def test_move_out_of_range_rejected_atomically(self, one_note_clip):
        with pytest.raises(PitchRangeError):
            move_note(one_note_clip, one_note_clip.notes[0].id, 0, 100)
        assert one_note_clip.notes[0].pitch == 48  # input untouched

    def test_move_into_overlap_rejected(self):
        clip = add_note(Clip(), 48, 0, 480)
        clip = add_note(clip, 50, 240, 480)
        with pytest.raises(NoteOverlapError):
            move_note(clip, clip.notes[1].id, 0, -2)

    def test_resize(self, one_note_clip):
        clip = resize_note(one_note_clip, one_note_clip.notes[0].id, new_end=960)
        assert clip.notes[0].duration_ticks == 960

    def test_resize_to_zero_duration_rejected(self, one_note_clip):
        with pytest.raises(ClipError):
            resize_note(one_note_clip, one_note_clip.notes[0].id, new_end=0)

    def test_resize_past_start_rejected(self, one_note_clip):
        with pytest.raises(ClipError):
            resize_note(one_note_clip, one_note_clip.notes[0].id, new_start=-10)

    def test_clear(self):
        clip = Clip()
        for i in range(10):
            clip = add_note(clip, 48 + i, i * 480, 240)
        clip = select(clip, clip.notes[0].id)
        cleared = clear(clip)
        assert cleared.notes == ()
        assert cleared.selection == frozenset()


class TestReferenceClip:
    def test_three_c3_notes(self):
        clip = make_reference_clip()
        assert len(clip.notes) == 3
        assert all(n.pitch == 48 for n in clip.notes)

    def test_layout_and_timing(self):
        clip = make_reference_clip()
        assert [n.start_ticks for n in clip.notes] == [0, 2880, 5760]
        assert all(n.duration_ticks == 2880 for n in clip.notes)
        assert clip.tempo_bpm == 120.0
        assert clip.time_signature == (4, 4)
        # 6 quarters at 120 bpm = 3.0 s per note, 9.0 s total
        seconds_per_tick = 60.0 / (clip.tempo_bpm * clip.ppq)
        assert clip.notes[0].duration_ticks * seconds_per_tick == pytest.approx(3.0)
        total = max(n.end_ticks for n in clip.notes) * seconds_per_tick
        assert total == pytest.approx(9.0)


class TestJson:
    def test_round_trip(self):
        clip = make_reference_clip()
        again = clip_from_json(clip_to_json(clip))
        assert [(n.pitch, n.start_ticks, n.duration_ticks, n.velocity) for n in again.notes] == [
            (n.pitch, n.start_ticks, n.duration_ticks, n.velocity) for n in clip.notes
        ]
        assert again.tempo_bpm == clip.tempo_bpm
        assert again.time_signature == clip.time_signature

    def test_rejects_invalid_payload(self):
        with pytest.raises(ClipError):
            clip_from_json({"notes": [{"pitch": 20, "start_ticks": 0, "duration_ticks": 1}]})
        with pytest.raises(ClipError):
            clip_from_json({"notes": [{"pitch": 48}]})
        with pytest.raises(ClipError):
            clip_from_json(
                {
                    "notes": [
                        {"pitch": 48, "start_ticks": 0, "duration_ticks": 100},
                        {"pitch": 48, "start_ticks": 50, "duration_ticks": 100},
                    ]
                }
            )


note_specs = st.lists(
    st.tuples(
        st.integers(min_value=PITCH_MIN, max_value=PITCH_MAX),
        st.integers(min_value=0, max_value=50),  # slot index
        st.integers(min_value=1, max_value=4),  # slots long
        st.integers(min_value=1, max_value=127),
    ),
    max_size=30,
)


@given(note_specs)
def test_edits_preserve_invariants(specs):
    """Any sequence of accepted adds keeps ids unique and range/overlap holds."""
    clip = Clip()
    for pitch, slot, slots, velocity in specs:
        try:
            clip = add_note(clip, pitch, slot * 120, slots * 120, velocity)
        except ClipError:
            continue
    ids = [n.id for n in clip.notes]
    assert len(ids) == len(set(ids))
    for n in clip.notes:
        assert PITCH_MIN <= n.pitch <= PITCH_MAX
        for other in clip.notes:
            if other.id != n.id and other.pitch == n.pitch:
                assert other.end_ticks <= n.start_ticks or n.end_ticks <= other.start_ticks
