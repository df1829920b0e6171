"""Bridge service tests over the simulator device.

Tests drive simulated time directly through BridgeService.tick; the HTTP and
WebSocket surfaces run through Starlette's TestClient in the same process.
"""

from __future__ import annotations

import time

import pytest
from fastapi.testclient import TestClient

from hapticknob.bridge import BridgeConfig, BridgeService, create_app
from hapticknob.midifile import save_midi
from hapticknob.sequencer import clip_to_json, make_reference_clip
from hapticknob.session import import_csv


@pytest.fixture
def service(tmp_path) -> BridgeService:
    return BridgeService(BridgeConfig(record_dir=tmp_path / "recordings"))


@pytest.fixture
def client(service):
    with TestClient(create_app(service)) as c:
        yield c


class TestConnect:
    def test_connect_sim_defaults_to_smooth(self, client):
        resp = client.post("/api/connect", json={"device": "sim"})
        assert resp.status_code == 200
        assert resp.json() == {"connected": True, "mode": "SMOOTH"}

    def test_double_connect_idempotent(self, client):
        first = client.post("/api/connect", json={"device": "sim"}).json()
        second = client.post("/api/connect", json={"device": "sim"}).json()
        assert first == second

    def test_bad_serial_path_is_structured_error(self, client):
        resp = client.post("/api/connect", json={"device": "serial:/bad/path"})
        assert resp.status_code == 400
        assert "error" in resp.json()

    def test_modes_list(self, client):
        assert client.get("/api/modes").json() == {
            "modes": ["SMOOTH", "DETENT", "SPRING", "FREE", "VIBRATO"]
        }


class TestModeEndpoint:
    def test_set_mode_updates_telemetry_with_zeroed_angle(self, service, client):
        client.post("/api/connect", json={"device": "sim"})
        service.device.user_torque = lambda t: 0.3  # keep the knob moving
        service.tick(100)
        with client.websocket_connect("/ws/telemetry") as ws:
            resp = client.post("/api/mode", json={"name": "SPRING"})
            assert resp.status_code == 200
            service.tick(50)  # 50 ms of simulated time
            frame = ws.receive_json()
            seen = [frame]
            while frame["mode"] != "SPRING":
                frame = ws.receive_json()
                seen.append(frame)
            first_spring = next(f for f in seen if f["mode"] == "SPRING")
            assert first_spring["torque"] == 0.0
        assert service.state.mode == "SPRING"

    def test_unknown_mode_rejected(self, client):
        client.post("/api/connect", json={"device": "sim"})
        resp = client.post("/api/mode", json={"name": "MAGNET"})
        assert resp.status_code == 422

    def test_mode_while_disconnected_conflicts(self, client):
        resp = client.post("/api/mode", json={"name": "SPRING"})
        assert resp.status_code == 409

    def test_param_patch(self, service, client):
        client.post("/api/connect", json={"device": "sim"})
        resp = client.post(
            "/api/param", json={"key": "spring_constant", "value": 0.02}
        )
        assert resp.status_code == 200
        service.tick(1)
        assert service.device.sim.config.spring_constant == 0.02

    def test_unknown_param_rejected(self, client):
        client.post("/api/connect", json={"device": "sim"})
        resp = client.post("/api/param", json={"key": "warp", "value": 1.0})
        assert resp.status_code == 422


class TestRecording:
    def test_one_second_recording_rows(self, service, client):
        client.post("/api/connect", json={"device": "sim"})
        rec_id = client.post("/api/record/start").json()["id"]
        service.tick(1000)
        stopped = client.post("/api/record/stop").json()
        assert stopped["id"] == rec_id
        assert abs(stopped["rows"] - 1000) <= 2
        csv_resp = client.get(f"/api/record/{rec_id}.csv")
        assert csv_resp.status_code == 200
        contour = import_csv(csv_resp.content)
        assert len(contour.samples) == stopped["rows"]
        assert rec_id in client.get("/api/recordings").json()["ids"]

    def test_stop_without_start(self, client):
        client.post("/api/connect", json={"device": "sim"})
        assert client.post("/api/record/stop").status_code == 409

    def test_double_start_conflicts(self, client):
        client.post("/api/connect", json={"device": "sim"})
        client.post("/api/record/start")
        assert client.post("/api/record/start").status_code == 409

    def test_download_unknown_id(self, client):
        client.post("/api/connect", json={"device": "sim"})
        assert client.get("/api/record/rec-9999.csv").status_code == 404

    def test_recording_persisted_to_disk(self, service, client, tmp_path):
        client.post("/api/connect", json={"device": "sim"})
        client.post("/api/record/start")
        service.tick(100)
        rec_id = client.post("/api/record/stop").json()["id"]
        on_disk = (service.config.record_dir / f"{rec_id}.csv").read_bytes()
        assert on_disk == client.get(f"/api/record/{rec_id}.csv").content


class TestClipEndpoints:
    def test_round_trip(self, client):
        payload = clip_to_json(make_reference_clip())
        resp = client.post("/api/clip", json=payload)
        assert resp.status_code == 200
        assert client.get("/api/clip").json() == resp.json()

    def test_invalid_clip_rejected(self, client):
        payload = {"notes": [{"pitch": 20, "start_ticks": 0, "duration_ticks": 10}]}
        resp = client.post("/api/clip", json=payload)
        assert resp.status_code == 422
        assert client.get("/api/clip").json()["notes"] == []  # unchanged

    def test_midi_upload(self, client):
        data = save_midi(make_reference_clip())
        resp = client.post(
            "/api/midi", content=data,
            headers={"Content-Type": "application/octet-stream"},
        )
        assert resp.status_code == 200
        notes = resp.json()["notes"]
        assert [n["start_ticks"] for n in notes] == [0, 2880, 5760]

    def test_bad_midi_rejected(self, client):
        resp = client.post("/api/midi", content=b"not a midi file")
        assert resp.status_code == 422

    def test_reference_csv(self, client):
        resp = client.get("/api/reference.csv")
        assert resp.status_code == 200
        contour = import_csv(resp.content)
        assert len(contour.samples) == 9000
        assert max(c for _, c in contour.samples) == pytest.approx(50.0, abs=1e-9)

    def test_reference_csv_rejects_bad_params(self, client):
        assert client.get("/api/reference.csv?depth=0").status_code == 422
        assert client.get("/api/reference.csv?rate=-1").status_code == 422


class TestFanOut:
    def test_downsample_factor_and_ordering(self, service, client):
        client.post("/api/connect", json={"device": "sim"})
        q = service.subscribe()
        service.tick(1000)
        frames = []
        while True:
            frame = q.pop(timeout=0)
            if frame is None:
                break
            frames.append(frame)
        assert len(frames) == 100  # 1000 ticks, every 10th
        seqs = [f.seq for f in frames]
        assert seqs == sorted(seqs)
        assert all(b - a == 10 for a, b in zip(seqs, seqs[1:]))

    def test_slow_client_drops_counted_loop_unaffected(self, service, client):
        client.post("/api/connect", json={"device": "sim"})
        slow = service.subscribe(maxsize=5)
        normal = service.subscribe()
        worst_tick = 0.0
        for _ in range(1000):
            t0 = time.perf_counter()
            service.tick(1)
            worst_tick = max(worst_tick, time.perf_counter() - t0)
        assert service.device.sim.time_s == pytest.approx(1.0)
        assert slow.dropped == 95  # 100 published, queue holds 5
        assert len(slow) == 5
        normal_frames = []
        while (f := normal.pop(timeout=0)) is not None:
            normal_frames.append(f)
        assert len(normal_frames) == 100
        assert worst_tick < 0.05  # the producer never blocks on the full queue

    def test_websocket_stream_shape(self, service, client):
        client.post("/api/connect", json={"device": "sim"})
        with client.websocket_connect("/ws/telemetry") as ws:
            service.tick(10)
            frame = ws.receive_json()
            assert set(frame) == {"seq", "t_ms", "angle", "velocity", "torque", "mode"}
            assert frame["mode"] == "SMOOTH"

    def test_websocket_seq_order_and_downsample(self, service, client):
        client.post("/api/connect", json={"device": "sim"})
        with client.websocket_connect("/ws/telemetry") as ws:
            service.tick(300)
            seqs = [ws.receive_json()["seq"] for _ in range(30)]
        assert len(set(seqs)) == len(seqs)  # no duplicates
        assert all(b - a == 10 for a, b in zip(seqs, seqs[1:]))
