"""Live session service: real-time stepping plus a JSON command protocol.

One session per websocket connection. The session steps the simulation at
the 10 ms control tick (wall-clock paced), publishes state snapshots at
30 Hz and accepts commands that take effect at the next executed tick.
"""

from __future__ import annotations

import asyncio
import json
import time
from dataclasses import dataclass, field
from pathlib import Path

from .config import CONTROL_TICK, RunConfig
from .geometry import Disk
from .physics import ObjectSpec
from .prediction import Classifier
from .trials import GraspEngine

PROTOCOL_VERSION = 1
SNAPSHOT_EVERY = 3   # ticks: ~30 Hz at the 100 Hz control rate

DEFAULT_SPEC = ObjectSpec(Disk(0.03), mass=0.2, friction=0.5, name="live-disk")


class SessionEngine:
    """Transport-independent session state machine.

    Commands are queued and applied atomically right before the next
    executed tick; every application is written to the session log with its
    tick stamp.
    """

    def __init__(
        self,
        classifier: Classifier,
        run_config: RunConfig,
        seed: int = 0,
        spec: ObjectSpec = DEFAULT_SPEC,
        n_fingers: int = 3,
        log_path: str | Path | None = None,
    ):
        self.classifier = classifier
        self.cfg = run_config
        self.spec = spec
        self.n_fingers = n_fingers
        self.paused = False
        self.pending: list[dict] = []
        self.log: list[dict] = []
        self._log_fh = open(log_path, "a") if log_path else None
        self._reset(seed)

    def _reset(self, seed: int) -> None:
        self.seed = seed
        self.engine = GraspEngine(self.spec, self.n_fingers, self.classifier, self.cfg, seed)

    def close(self) -> None:
        if self._log_fh:
            self._log_fh.close()
            self._log_fh = None

    def _log_event(self, event: dict) -> None:
        self.log.append(event)
        if self._log_fh:
            self._log_fh.write(json.dumps(event, separators=(",", ":")) + "\n")
            self._log_fh.flush()

    def submit(self, cmd: dict) -> dict | None:
        """Validate and queue a command; returns an error message dict for
        malformed commands, None when accepted."""
        err = self._validate(cmd)
        if err:
            return {"type": "error", "message": err, "id": cmd.get("id")}
        self.pending.append(cmd)
        return None

    @staticmethod
    def _validate(cmd: dict) -> str | None:
        kind = cmd.get("type")
        if kind == "wrench":
            for key in ("fx", "fy", "tau"):
                if not isinstance(cmd.get(key, 0.0), (int, float)):
                    return f"wrench field '{key}' must be a number"
            d = cmd.get("duration")
            if not isinstance(d, (int, float)) or d <= 0:
                return "wrench duration must be a positive number"
            return None
        if kind == "override":
            if not isinstance(cmd.get("finger"), int):
                return "override needs an integer finger id"
            for key in ("vx", "vy"):
                if not isinstance(cmd.get(key), (int, float)):
                    return f"override field '{key}' must be a number"
            return None
        if kind == "release":
            if not isinstance(cmd.get("finger"), int):
                return "release needs an integer finger id"
            return None
        if kind in ("pause", "resume"):
            return None
        if kind == "reset":
            if "seed" in cmd and not isinstance(cmd["seed"], int):
                return "reset seed must be an integer"
            return None
        return f"unknown command type '{kind}'"

    def _apply(self, cmd: dict) -> dict:
        tick = self.engine.tick_index
        kind = cmd["type"]
        if kind == "wrench":
            self.engine.apply_wrench(
                (cmd.get("fx", 0.0), cmd.get("fy", 0.0), cmd.get("tau", 0.0)),
                cmd["duration"],
            )
        elif kind == "override":
            if 0 <= cmd["finger"] < self.n_fingers:
                self.engine.set_override(cmd["finger"], (cmd["vx"], cmd["vy"]))
        elif kind == "release":
            self.engine.clear_override(cmd.get("finger", -1))
        elif kind == "pause":
            self.paused = True
        elif kind == "resume":
            self.paused = False
        elif kind == "reset":
            self._reset(cmd.get("seed", self.seed))
            tick = self.engine.tick_index
        self._log_event({"tick": tick, "event": "command", "command": cmd})
        return {"type": "ack", "command": kind, "tick": tick, "id": cmd.get("id")}

    def process_tick(self) -> tuple[list[dict], dict | None]:
        """Apply queued commands, then advance one tick unless paused.

        Returns (acks, snapshot-or-None)."""
        acks = [self._apply(cmd) for cmd in self.pending]
        self.pending.clear()
        if self.paused:
            return acks, None
        self.engine.tick()
        snapshot = None
        if self.engine.tick_index % SNAPSHOT_EVERY == 0:
            snapshot = self.engine.snapshot()
        return acks, snapshot

    def hello(self) -> dict:
        return {
            "type": "hello",
            "protocol_version": PROTOCOL_VERSION,
            "tick_seconds": CONTROL_TICK,
            "snapshot_every": SNAPSHOT_EVERY,
            "n_fingers": self.n_fingers,
            "seed": self.seed,
        }


async def _run_session(websocket, classifier, run_config, seed, log_dir, paced):
    session = SessionEngine(
        classifier,
        run_config,
        seed=seed,
        log_path=Path(log_dir) / f"session-{int(time.time() * 1000)}.ndjson"
        if log_dir
        else None,
    )
    await websocket.send(json.dumps(session.hello()))

    async def receiver():
        async for message in websocket:
            try:
                cmd = json.loads(message)
                if not isinstance(cmd, dict):
                    raise ValueError("command must be a JSON object")
            except (json.JSONDecodeError, ValueError) as exc:
                await websocket.send(
                    json.dumps({"type": "error", "message": f"malformed command: {exc}"})
                )
                continue
            err = session.submit(cmd)
            if err:
                await websocket.send(json.dumps(err))

    recv_task = asyncio.create_task(receiver())
    try:
        next_tick = time.monotonic()
        while not recv_task.done():
            acks, snapshot = session.process_tick()
            for ack in acks:
                await websocket.send(json.dumps(ack))
            if snapshot is not None:
                await websocket.send(json.dumps(snapshot))
            next_tick += CONTROL_TICK
            if paced:
                delay = next_tick - time.monotonic()
                if delay > 0:
                    await asyncio.sleep(delay)
                else:
                    next_tick = time.monotonic()
            else:
                await asyncio.sleep(0)
    except Exception:
        pass
    finally:
        recv_task.cancel()
        session.close()


async def serve_session(
    host: str,
    port: int,
    classifier: Classifier,
    run_config: RunConfig,
    seed: int = 0,
    log_dir: str | Path | None = None,
    paced: bool = True,
    ready: asyncio.Event | None = None,
):
    """Run the websocket service until cancelled."""
    import websockets

    if log_dir:
        Path(log_dir).mkdir(parents=True, exist_ok=True)

    async def handler(websocket):
        await _run_session(websocket, classifier, run_config, seed, log_dir, paced)

    async with websockets.serve(handler, host, port):
        if ready is not None:
            ready.set()
        await asyncio.Future()
