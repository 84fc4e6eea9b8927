"""Live session: command protocol, tick application, websocket transport."""

import asyncio
import json
import socket

import numpy as np
import pytest

from gripsim.config import RunConfig
from gripsim.physics import ContactClass
from gripsim.prediction import CLASS_ORDER, FEATURE_DIM, Classifier
from gripsim.server import PROTOCOL_VERSION, SNAPSHOT_EVERY, SessionEngine, serve_session


def contact_classifier() -> Classifier:
    """Cheap deterministic stand-in: always predicts steady contact."""
    w = np.zeros((len(CLASS_ORDER), FEATURE_DIM + 1))
    w[CLASS_ORDER.index(ContactClass.CONTACT), -1] = 1.0
    return Classifier(
        kind="multinomial-linear",
        feat_mean=np.zeros(FEATURE_DIM),
        feat_std=np.ones(FEATURE_DIM),
        weights=w,
    )


@pytest.fixture
def session():
    s = SessionEngine(contact_classifier(), RunConfig(), seed=0)
    yield s
    s.close()


def test_hello_message(session):
    hello = session.hello()
    assert hello["type"] == "hello"
    assert hello["protocol_version"] == PROTOCOL_VERSION
    assert hello["tick_seconds"] == 0.01
    assert hello["n_fingers"] == 3
    assert hello["seed"] == 0


def test_malformed_commands_rejected(session):
    cases = [
        {"type": "warp"},
        {"type": "wrench", "fx": "big", "duration": 1.0},
        {"type": "wrench", "fx": 1.0, "duration": 0.0},
        {"type": "override", "finger": "a", "vx": 0.0, "vy": 0.0},
        {"type": "override", "finger": 0, "vx": None, "vy": 0.0},
        {"type": "release"},
        {"type": "reset", "seed": "zero"},
    ]
    for cmd in cases:
        err = session.submit(cmd)
        assert err is not None and err["type"] == "error"
    assert session.pending == []


def test_commands_applied_at_next_tick(session):
    assert session.submit({"type": "wrench", "fx": 1.0, "fy": 0.0, "tau": 0.0,
                           "duration": 0.5, "id": 7}) is None
    assert session.engine.schedule == []  # queued, not yet applied
    acks, _ = session.process_tick()
    assert len(acks) == 1
    assert acks[0]["type"] == "ack"
    assert acks[0]["command"] == "wrench"
    assert acks[0]["id"] == 7
    assert acks[0]["tick"] == 0
    assert len(session.engine.schedule) == 1
    assert session.log[-1]["event"] == "command"
    assert session.log[-1]["tick"] == 0


def test_snapshot_cadence(session):
    snaps = 0
    for _ in range(SNAPSHOT_EVERY * 5):
        _, snap = session.process_tick()
        if snap is not None:
            snaps += 1
            assert snap["type"] == "state"
            assert {"tick", "t", "object", "fingers", "applied_wrench", "active"} <= set(snap)
    assert snaps == 5


def test_pause_stops_sim_time(session):
    session.submit({"type": "pause"})
    session.process_tick()
    t0 = session.engine.time
    for _ in range(10):
        acks, snap = session.process_tick()
        assert snap is None
    assert session.engine.time == t0
    session.submit({"type": "resume"})
    session.process_tick()
    assert session.engine.time > t0


def test_pause_resume_is_sim_time_deterministic():
    # A run with a mid-stream pause must match an unpaused run tick for
    # tick, given the same tick-stamped command timeline.
    def run(pause: bool):
        s = SessionEngine(contact_classifier(), RunConfig(), seed=3)
        for k in range(120):
            if k == 40:
                s.submit({"type": "wrench", "fx": 0.5, "fy": 0.0, "tau": 0.0, "duration": 0.3})
            if pause and k == 60:
                s.submit({"type": "pause"})
                s.process_tick()  # applies the pause, no step
                for _ in range(25):
                    s.process_tick()  # stalled wall ticks
                s.submit({"type": "resume"})  # applied by the loop tick below
            s.process_tick()
        trace = s.engine.trace
        s.close()
        return trace

    a, b = run(False), run(True)
    assert len(a) == len(b)
    assert a == b


def test_reset_restarts_engine(session):
    for _ in range(10):
        session.process_tick()
    assert session.engine.tick_index == 10
    session.submit({"type": "reset", "seed": 5})
    session.process_tick()
    assert session.seed == 5
    assert session.engine.tick_index <= 1


def test_override_and_release(session):
    session.submit({"type": "override", "finger": 1, "vx": 0.01, "vy": 0.0})
    session.process_tick()
    assert session.engine.manual_overrides == {1: (0.01, 0.0)}
    session.submit({"type": "release", "finger": 1})
    session.process_tick()
    assert session.engine.manual_overrides == {}


def test_session_log_file(tmp_path):
    path = tmp_path / "session.ndjson"
    s = SessionEngine(contact_classifier(), RunConfig(), seed=0, log_path=path)
    s.submit({"type": "pause"})
    s.process_tick()
    s.close()
    lines = path.read_text().splitlines()
    assert len(lines) == 1
    assert json.loads(lines[0])["command"]["type"] == "pause"


def free_port() -> int:
    with socket.socket() as sock:
        sock.bind(("127.0.0.1", 0))
        return sock.getsockname()[1]


def test_websocket_round_trip():
    import websockets

    async def scenario():
        port = free_port()
        ready = asyncio.Event()
        server = asyncio.create_task(
            serve_session(
                "127.0.0.1", port, contact_classifier(), RunConfig(),
                seed=0, paced=False, ready=ready,
            )
        )
        await asyncio.wait_for(ready.wait(), 10)
        try:
            async with websockets.connect(f"ws://127.0.0.1:{port}") as ws:
                hello = json.loads(await asyncio.wait_for(ws.recv(), 10))
                assert hello["type"] == "hello"
                assert hello["protocol_version"] == PROTOCOL_VERSION

                await ws.send(json.dumps(
                    {"type": "wrench", "fx": 0.5, "fy": 0.0, "tau": 0.0,
                     "duration": 0.2, "id": 1}
                ))
                await ws.send("this is not json")
                ack = error = None
                states = 0
                sent_tick = None
                while ack is None or error is None or states < 3:
                    msg = json.loads(await asyncio.wait_for(ws.recv(), 10))
                    if msg["type"] == "ack" and msg.get("id") == 1:
                        ack = msg
                    elif msg["type"] == "error":
                        error = msg
                    elif msg["type"] == "state":
                        states += 1
                        if sent_tick is None:
                            sent_tick = msg["tick"]
                assert "malformed" in error["message"]
                assert isinstance(ack["tick"], int)
        finally:
            server.cancel()
            try:
                await server
            except (asyncio.CancelledError, Exception):
                pass

    asyncio.run(scenario())
