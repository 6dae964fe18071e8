"""WebSocket front door for live sessions.

Message kinds (JSON text frames, each carrying a schema version ``v``):
``hello``, ``configure``, ``start``, ``input``, ``snapshot``, ``end``,
``error``. One tick loop per session; inputs arriving on the socket are
handed to that loop through latest-wins buffering.
"""

from __future__ import annotations

import asyncio
import json
import time

from fastapi import FastAPI, WebSocket, WebSocketDisconnect

from .errors import ConfigError
from .realtime import (
    ENDED,
    MESSAGE_SCHEMA_VERSION,
    PAUSED,
    InputMessage,
    LiveSession,
    SessionConfig,
)

MAX_CATCHUP_TICKS = 5


def _error(message: str) -> dict:
    return {"kind": "error", "v": MESSAGE_SCHEMA_VERSION, "message": message}


async def _run_session(ws: WebSocket, session: LiveSession):
    """Fixed-timestep loop with wall-clock pacing.

    When the host falls behind, up to MAX_CATCHUP_TICKS simulation ticks
    run back to back; snapshots are dropped (only the latest is sent),
    simulation ticks never are.
    """
    dt = session.config.game.dt
    stride = session.snapshot_stride
    next_tick = time.monotonic()
    while session.status != ENDED:
        now = time.monotonic()
        behind = int((now - next_tick) / dt) + 1 if now >= next_tick else 0
        ticks = min(max(behind, 1), MAX_CATCHUP_TICKS)
        snapshot = None
        for _ in range(ticks):
            snapshot = session.step()
            next_tick += dt
            if session.status == ENDED:
                break
        if snapshot is not None and (
            session.state.tick_index % stride == 0 or session.status == ENDED
        ):
            payload = snapshot.to_dict()
            payload["kind"] = "snapshot"
            await ws.send_text(json.dumps(payload, sort_keys=True))
        if session.status == ENDED:
            final = session.snapshot().to_dict()
            final["kind"] = "end"
            await ws.send_text(json.dumps(final, sort_keys=True))
            break
        delay = next_tick - time.monotonic()
        if delay > 0:
            await asyncio.sleep(delay)
        else:
            await asyncio.sleep(0)  # yield so input handlers run


def build_app(base_config: SessionConfig | None = None, log_dir=None) -> FastAPI:
    app = FastAPI(title="gazecoop live session server")
    base = base_config or SessionConfig()

    @app.websocket("/ws")
    async def ws_endpoint(ws: WebSocket):
        await ws.accept()
        session: LiveSession | None = None
        log_fh = None
        loop_task: asyncio.Task | None = None
        try:
            while True:
                raw = await ws.receive_text()
                try:
                    msg = json.loads(raw)
                except json.JSONDecodeError:
                    await ws.send_text(json.dumps(_error("malformed JSON")))
                    continue
                kind = msg.get("kind")

                if kind == "hello":
                    await ws.send_text(
                        json.dumps(
                            {
                                "kind": "hello",
                                "v": MESSAGE_SCHEMA_VERSION,
                                "modes": ["manual", "slave", "autonomous", "cooperative"],
                            }
                        )
                    )

                elif kind == "configure":
                    if session is not None and session.status != ENDED:
                        await ws.send_text(json.dumps(_error("cannot configure while running")))
                        continue
                    try:
                        cfg_dict = base.to_dict()
                        cfg_dict["mode"] = msg.get("mode", base.mode)
                        if "seed" in msg:
                            cfg_dict["seed"] = int(msg["seed"])
                        if "game" in msg:
                            game = dict(cfg_dict["game"])
                            game.update(msg["game"])
                            cfg_dict["game"] = game
                        for key in ("gaze_source", "snapshot_rate", "inject_dropout", "inject_noise"):
                            if key in msg:
                                cfg_dict[key] = msg[key]
                        config = SessionConfig.from_dict(cfg_dict)
                    except (ConfigError, ValueError, TypeError) as exc:
                        await ws.send_text(json.dumps(_error(str(exc))))
                        continue
                    if log_fh is not None:
                        log_fh.close()
                        log_fh = None
                    if log_dir is not None:
                        from pathlib import Path

                        log_fh = open(Path(log_dir) / f"session-{int(time.time() * 1000)}.jsonl", "w")
                    session = LiveSession(config, log_fh=log_fh)
                    await ws.send_text(
                        json.dumps(
                            {
                                "kind": "configure",
                                "v": MESSAGE_SCHEMA_VERSION,
                                "ok": True,
                                "session_id": session.id,
                                "mode": config.mode,
                                "status": PAUSED,
                                "game": {
                                    "screen_width": config.game.screen_width,
                                    "screen_height": config.game.screen_height,
                                    "trial_duration": config.game.trial_duration,
                                    "laser_range": config.game.laser_range,
                                    "target_radius": config.game.target_radius,
                                },
                            }
                        )
                    )

                elif kind == "start":
                    if session is None:
                        await ws.send_text(json.dumps(_error("configure a session first")))
                        continue
                    if session.status != PAUSED:
                        await ws.send_text(json.dumps(_error("session is not paused")))
                        continue
                    session.start()
                    await ws.send_text(
                        json.dumps({"kind": "start", "v": MESSAGE_SCHEMA_VERSION, "session_id": session.id})
                    )
                    loop_task = asyncio.create_task(_run_session(ws, session))

                elif kind == "input":
                    if session is None:
                        continue
                    try:
                        session.ingest(
                            InputMessage(
                                timestamp=float(msg.get("timestamp", 0.0)),
                                handle_point=tuple(msg.get("handle_point", (0.5, 0.5))),
                                gaze_point=(
                                    None
                                    if msg.get("gaze_point") is None
                                    else tuple(msg["gaze_point"])
                                ),
                                trigger=bool(msg.get("trigger", False)),
                            )
                        )
                    except (TypeError, ValueError, IndexError):
                        await ws.send_text(json.dumps(_error("malformed input message")))

                else:
                    await ws.send_text(json.dumps(_error(f"unknown message kind {kind!r}")))
        except WebSocketDisconnect:
            pass
        finally:
            if loop_task is not None:
                loop_task.cancel()
            if log_fh is not None:
                log_fh.close()

    return app


def serve(port: int = 8000, host: str = "127.0.0.1", config_path=None, log_dir=None):
    """Blocking entry point for the live-play server."""
    import uvicorn

    base = SessionConfig()
    if config_path is not None:
        with open(config_path) as fh:
            data = json.load(fh)
        base = SessionConfig.from_dict(data)
    uvicorn.run(build_app(base, log_dir=log_dir), host=host, port=port, log_level="warning")
