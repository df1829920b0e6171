"""HTTP/WebSocket service that owns the knob device and feeds the UI.

One owner advances the device at its tick rate; telemetry fans out to
per-client bounded queues with a drop-oldest policy so a slow client can
never stall the haptic loop. The device side of the service speaks the wire
protocol in both directions even for the in-process simulator, so the codec
path is identical for real serial hardware.

Endpoints and payload schemas are documented in docs/http_api.md.
"""

from __future__ import annotations

import threading
import time
from collections import deque
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Callable, Optional

from fastapi import Body, FastAPI, Request, WebSocket, WebSocketDisconnect
from fastapi.concurrency import run_in_threadpool
from fastapi.responses import JSONResponse, Response

from . import protocol, sequencer
from .engine import HapticMode, HapticModeConfig
from .midifile import MidiError, load_midi
from .protocol import (
    ModeCommand,
    ParamCommand,
    PingCommand,
    StreamDecoder,
    TelemetryFrame,
    ZeroCommand,
)
from .session import PitchMapConfig, export_csv, record, reference_contour
from .simulator import KnobSample, KnobSimulator, RotorParams


class BridgeError(Exception):
    """Structured service error with an HTTP-ish status code."""

    def __init__(self, status: int, message: str):
        super().__init__(message)
        self.status = status
        self.message = message


@dataclass(frozen=True)
class BridgeConfig:
    host: str = "127.0.0.1"
    port: int = 8080
    device: str = "sim"
    telemetry_downsample: int = 10  # 1 kHz device -> 100 Hz clients
    record_dir: Path = Path("recordings")
    client_queue_size: int = 256

    def __post_init__(self) -> None:
        if self.telemetry_downsample < 1:
            raise ValueError("telemetry_downsample must be >= 1")


@dataclass(frozen=True)
class SessionState:
    connected: bool = False
    mode: str = HapticMode.SMOOTH.value
    recording_id: Optional[str] = None


class SimDevice:
    """In-process simulator speaking the wire protocol on both sides."""

    def __init__(
        self,
        config: HapticModeConfig | None = None,
        params: RotorParams | None = None,
    ) -> None:
        self.sim = KnobSimulator(config=config, params=params)
        self._decoder = StreamDecoder()
        self._outbox = bytearray()
        # test/demo hook: scripted hand torque as a function of sim time
        self.user_torque: Callable[[float], float] = lambda t: 0.0

    @property
    def tick_rate_hz(self) -> float:
        return self.sim.params.tick_rate_hz

    def write(self, data: bytes) -> None:
        for frame in self._decoder.feed(data):
            if isinstance(frame, ModeCommand):
                self.sim.queue_mode(
                    replace(self.sim.next_config, mode=HapticMode(frame.mode))
                )
            elif isinstance(frame, ZeroCommand):
                self.sim.queue_zero()
            elif isinstance(frame, ParamCommand):
                self.sim.queue_params(
                    replace(self.sim.next_config, **{frame.key: frame.value})
                )
            elif isinstance(frame, PingCommand):
                self._outbox += f"PING,{frame.nonce}\n".encode("ascii")

    def tick(self, n: int = 1) -> None:
        for _ in range(n):
            sample = self.sim.tick(self.user_torque(self.sim.time_s))
            self._outbox += protocol.encode_telemetry(sample)

    def read(self) -> bytes:
        out = bytes(self._outbox)
        self._outbox.clear()
        return out

    def close(self) -> None:
        pass


class SerialDevice:
    """Real haptic-knob hardware behind the same byte interface.

    Only the open/close plumbing exists here; tests exercise the simulator
    path exclusively (no hardware attached).
    """

    def __init__(self, path: str) -> None:
        try:
            import serial  # type: ignore[import-not-found]
        except ImportError as exc:
            raise BridgeError(400, f"cannot open {path}: pyserial not installed") from exc
        try:
            self._port = serial.Serial(path, baudrate=115200, timeout=0)
        except Exception as exc:
            raise BridgeError(400, f"cannot open {path}: {exc}") from exc
        self.tick_rate_hz = 1000.0
        self.user_torque = None

    def write(self, data: bytes) -> None:
        self._port.write(data)

    def tick(self, n: int = 1) -> None:
        pass  # hardware self-ticks

    def read(self) -> bytes:
        return self._port.read(65536)

    def close(self) -> None:
        self._port.close()


class ClientQueue:
    """Bounded single-consumer telemetry queue; push never blocks."""

    def __init__(self, maxsize: int):
        self._items: deque = deque()
        self._maxsize = maxsize
        self._cond = threading.Condition()
        self.dropped = 0

    def push(self, item) -> None:
        with self._cond:
            if len(self._items) >= self._maxsize:
                self._items.popleft()
                self.dropped += 1
            self._items.append(item)
            self._cond.notify()

    def pop(self, timeout: float | None = None):
        with self._cond:
            if not self._items:
                self._cond.wait(timeout)
            return self._items.popleft() if self._items else None

    def __len__(self) -> int:
        with self._cond:
            return len(self._items)


class BridgeService:
    """Owns the device, the telemetry fan-out, recordings, and the clip."""

    def __init__(self, config: BridgeConfig | None = None):
        self.config = config or BridgeConfig()
        self.state = SessionState()
        self.clip = sequencer.Clip()
        self.pitch_map = PitchMapConfig()
        self._device: SimDevice | SerialDevice | None = None
        self._decoder = StreamDecoder()
        self._subscribers: list[ClientQueue] = []
        self._recording_rows: list[KnobSample] = []
        self._recordings: dict[str, bytes] = {}
        self._recording_counter = 0
        self._frames_seen = 0
        self._lock = threading.RLock()

    # -- device lifecycle ------------------------------------------------

    def connect(self, descriptor: str | None = None) -> SessionState:
        """Open the device; connecting twice is idempotent."""
        with self._lock:
            if self._device is not None:
                return self.state
            descriptor = descriptor or self.config.device
            if descriptor == "sim":
                self._device = SimDevice()
            elif descriptor.startswith("serial:"):
                self._device = SerialDevice(descriptor.split(":", 1)[1])
            else:
                raise BridgeError(400, f"unknown device descriptor: {descriptor}")
            self.state = SessionState(connected=True, mode=HapticMode.SMOOTH.value)
            return self.state

    def disconnect(self) -> None:
        with self._lock:
            if self._device is not None:
                self._device.close()
                self._device = None
            self.state = SessionState()

    @property
    def device(self) -> SimDevice | SerialDevice:
        if self._device is None:
            raise BridgeError(409, "not connected")
        return self._device

    # -- control plane ---------------------------------------------------

    def set_mode(self, name: str) -> str:
        name = name.upper()
        if name not in protocol.MODE_NAMES:
            raise BridgeError(422, f"unknown mode name: {name}")
        with self._lock:
            self.device.write(protocol.encode_command(ModeCommand(name)))
        return name

    def zero(self) -> None:
        with self._lock:
            self.device.write(protocol.encode_command(ZeroCommand()))

    def set_param(self, key: str, value: float) -> None:
        if key not in protocol.PARAM_KEYS:
            raise BridgeError(422, f"unknown param key: {key}")
        with self._lock:
            self.device.write(protocol.encode_command(ParamCommand(key, value)))

    # -- telemetry pump --------------------------------------------------

    def tick(self, n: int = 1) -> None:
        """Advance the simulated device n ticks and pump its telemetry."""
        with self._lock:
            self.device.tick(n)
            self.pump()

    def pump(self) -> None:
        """Drain device bytes, decode frames, record and fan out."""
        with self._lock:
            data = self.device.read()
            if not data:
                return
            for frame in self._decoder.feed(data):
                if not isinstance(frame, TelemetryFrame):
                    continue
                self._frames_seen += 1
                if self.state.mode != frame.mode:
                    self.state = replace(self.state, mode=frame.mode)
                if self.state.recording_id is not None:
                    self._recording_rows.append(frame)
                if self._frames_seen % self.config.telemetry_downsample == 0:
                    for q in self._subscribers:
                        q.push(frame)

    # -- fan-out ----------------------------------------------------------

    def subscribe(self, maxsize: int | None = None) -> ClientQueue:
        q = ClientQueue(maxsize or self.config.client_queue_size)
        with self._lock:
            self._subscribers.append(q)
        return q

    def unsubscribe(self, q: ClientQueue) -> None:
        with self._lock:
            if q in self._subscribers:
                self._subscribers.remove(q)

    # -- recordings --------------------------------------------------------

    def start_recording(self) -> str:
        with self._lock:
            self.device  # raises when disconnected
            if self.state.recording_id is not None:
                raise BridgeError(409, "a recording is already active")
            self._recording_counter += 1
            rec_id = f"rec-{self._recording_counter:04d}"
            self._recording_rows = []
            self.state = replace(self.state, recording_id=rec_id)
            return rec_id

    def stop_recording(self) -> tuple[str, int]:
        with self._lock:
            rec_id = self.state.recording_id
            if rec_id is None:
                raise BridgeError(409, "no active recording")
            contour = record(self.pitch_map, self._recording_rows)
            data = export_csv(contour)
            self._recordings[rec_id] = data
            self.config.record_dir.mkdir(parents=True, exist_ok=True)
            (self.config.record_dir / f"{rec_id}.csv").write_bytes(data)
            rows = len(contour.samples)
            self._recording_rows = []
            self.state = replace(self.state, recording_id=None)
            return rec_id, rows

    def recording_ids(self) -> list[str]:
        with self._lock:
            return sorted(self._recordings)

    def recording_csv(self, rec_id: str) -> bytes:
        with self._lock:
            if rec_id not in self._recordings:
                raise BridgeError(404, f"no recording {rec_id}")
            return self._recordings[rec_id]

    # -- clip state --------------------------------------------------------

    def set_clip(self, payload: dict) -> sequencer.Clip:
        try:
            clip = sequencer.clip_from_json(payload)
        except sequencer.ClipError as exc:
            raise BridgeError(422, str(exc)) from exc
        with self._lock:
            self.clip = clip
            return clip

    def load_midi_bytes(self, data: bytes) -> sequencer.Clip:
        try:
            clip = load_midi(data)
        except (MidiError, sequencer.ClipError) as exc:
            raise BridgeError(422, str(exc)) from exc
        with self._lock:
            self.clip = clip
            return clip


class RealTimeDriver(threading.Thread):
    """Paces BridgeService.tick at the device tick rate (CLI serving mode)."""

    def __init__(self, service: BridgeService):
        super().__init__(daemon=True)
        self.service = service
        self._stop = threading.Event()

    def run(self) -> None:
        period = 1.0 / self.service.device.tick_rate_hz
        next_due = time.monotonic() + period
        while not self._stop.is_set():
            now = time.monotonic()
            if now < next_due:
                time.sleep(next_due - now)
                continue
            # run every period elapsed since last wake, so wall-clock sync
            # holds despite sleep jitter; cap bursts to keep the lock fair
            behind = int((now - next_due) / period) + 1
            batch = min(behind, 50)
            self.service.tick(batch)
            next_due += period * batch

    def stop(self) -> None:
        self._stop.set()


def create_app(service: BridgeService) -> FastAPI:
    """Build the FastAPI app over a BridgeService."""
    app = FastAPI(title="hapticknob bridge")
    app.state.service = service

    @app.exception_handler(BridgeError)
    async def bridge_error_handler(_request, exc: BridgeError):
        return JSONResponse(status_code=exc.status, content={"error": exc.message})

    @app.get("/api/modes")
    def get_modes():
        return {"modes": list(protocol.MODE_NAMES)}

    @app.post("/api/connect")
    def post_connect(payload: dict = Body(default={})):
        state = service.connect(payload.get("device"))
        return {"connected": state.connected, "mode": state.mode}

    @app.post("/api/mode")
    def post_mode(payload: dict = Body(...)):
        name = service.set_mode(str(payload.get("name", "")))
        return {"ok": True, "mode": name}

    @app.post("/api/zero")
    def post_zero():
        service.zero()
        return {"ok": True}

    @app.post("/api/param")
    def post_param(payload: dict = Body(...)):
        key = str(payload.get("key", ""))
        try:
            value = float(payload.get("value"))
        except (TypeError, ValueError):
            raise BridgeError(422, "param value must be a number") from None
        service.set_param(key, value)
        return {"ok": True}

    @app.post("/api/record/start")
    def post_record_start():
        return {"id": service.start_recording()}

    @app.post("/api/record/stop")
    def post_record_stop():
        rec_id, rows = service.stop_recording()
        return {"id": rec_id, "rows": rows}

    @app.get("/api/recordings")
    def get_recordings():
        return {"ids": service.recording_ids()}

    @app.get("/api/record/{rec_id}.csv")
    def get_recording(rec_id: str):
        data = service.recording_csv(rec_id)
        return Response(content=data, media_type="text/csv")

    @app.get("/api/clip")
    def get_clip():
        return sequencer.clip_to_json(service.clip)

    @app.post("/api/clip")
    def post_clip(payload: dict = Body(...)):
        clip = service.set_clip(payload)
        return sequencer.clip_to_json(clip)

    @app.post("/api/midi")
    async def post_midi(request: Request):
        data = await request.body()
        clip = service.load_midi_bytes(data)
        return sequencer.clip_to_json(clip)

    @app.get("/api/reference.csv")
    def get_reference(depth: float = 50.0, rate: float = 5.0):
        try:
            contour = reference_contour(depth_cents=depth, rate_hz=rate)
        except ValueError as exc:
            raise BridgeError(422, str(exc)) from exc
        return Response(content=export_csv(contour), media_type="text/csv")

    @app.websocket("/ws/telemetry")
    async def ws_telemetry(ws: WebSocket):
        await ws.accept()
        q = service.subscribe()
        try:
            while True:
                frame = await run_in_threadpool(q.pop, 0.2)
                if frame is None:
                    continue
                await ws.send_json(
                    {
                        "seq": frame.seq,
                        "t_ms": frame.t_ms,
                        "angle": frame.angle_deg,
                        "velocity": frame.velocity_dps,
                        "torque": frame.torque,
                        "mode": frame.mode,
                    }
                )
        except WebSocketDisconnect:
            pass
        finally:
            service.unsubscribe(q)

    return app
