"""Live game sessions for human play.

A session owns the authoritative 60 Hz simulation: pointer/gaze-proxy
input messages are buffered latest-wins, each tick consumes the most
recent one, and snapshots of the full game state are broadcast to the
client. Every consumed input is logged so a finished session can be
replayed headlessly to the bit-identical final score.
"""

from __future__ import annotations

import json
import random
import uuid
from dataclasses import dataclass, field

from .attention import (
    DEFAULT_ASSOCIATION_RADIUS,
    DEFAULT_HOLD_WINDOW,
    MODES,
    AttentionEstimate,
    RobotState,
    behavior_step,
    estimate_attention,
    move_tip,
)
from .errors import ConfigError, UnknownSessionError
from .game import FALLING, GameConfig, TrialLogWriter, new_game, tick
from .session import screen_plane_for
from .synthetic_user import UserParams, apply_gaze_noise, gaze_ray_to

MESSAGE_SCHEMA_VERSION = 1
STALE_INPUT_WINDOW = 0.200  # seconds

POINTER_PROXY = "pointer-proxy"
DWELL_PROXY = "dwell-proxy"

PAUSED = "paused"
RUNNING = "running"
ENDED = "ended"


@dataclass(frozen=True)
class SessionConfig:
    mode: str = "cooperative"
    game: GameConfig = field(default_factory=GameConfig)
    snapshot_rate: float = 60.0
    gaze_source: str = POINTER_PROXY
    seed: int = 0
    tip_speed_limit: float = 1500.0
    workspace_radius: float = 200.0
    inject_dropout: bool = False
    inject_noise: bool = False
    user: UserParams = field(default_factory=UserParams)  # noise/dropout emulation

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigError(f"unknown behavior mode {self.mode!r}")
        if self.snapshot_rate <= 0 or self.snapshot_rate > self.game.tick_rate:
            raise ConfigError("snapshot rate must be positive and <= tick rate")
        if self.gaze_source not in (POINTER_PROXY, DWELL_PROXY):
            raise ConfigError(f"unknown gaze source {self.gaze_source!r}")

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "game": self.game.to_dict(),
            "snapshot_rate": self.snapshot_rate,
            "gaze_source": self.gaze_source,
            "seed": self.seed,
            "tip_speed_limit": self.tip_speed_limit,
            "workspace_radius": self.workspace_radius,
            "inject_dropout": self.inject_dropout,
            "inject_noise": self.inject_noise,
            "user": self.user.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SessionConfig":
        data = dict(data)
        if "game" in data:
            data["game"] = GameConfig.from_dict(data["game"])
        if "user" in data:
            data["user"] = UserParams.from_dict(data["user"])
        return cls(**data)


def _clamp01(v: float) -> float:
    return 0.0 if v < 0.0 else 1.0 if v > 1.0 else float(v)


@dataclass(frozen=True)
class InputMessage:
    """Client input; coordinates are normalized to [0, 1] (clamped)."""

    timestamp: float
    handle_point: tuple[float, float] = (0.5, 0.5)
    gaze_point: tuple[float, float] | None = None
    trigger: bool = False

    def __post_init__(self):
        object.__setattr__(
            self,
            "handle_point",
            (_clamp01(self.handle_point[0]), _clamp01(self.handle_point[1])),
        )
        if self.gaze_point is not None:
            object.__setattr__(
                self,
                "gaze_point",
                (_clamp01(self.gaze_point[0]), _clamp01(self.gaze_point[1])),
            )

    def to_dict(self) -> dict:
        return {
            "timestamp": self.timestamp,
            "handle_point": list(self.handle_point),
            "gaze_point": None if self.gaze_point is None else list(self.gaze_point),
            "trigger": self.trigger,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "InputMessage":
        gaze = data.get("gaze_point")
        return cls(
            timestamp=float(data["timestamp"]),
            handle_point=tuple(data.get("handle_point", (0.5, 0.5))),
            gaze_point=None if gaze is None else tuple(gaze),
            trigger=bool(data.get("trigger", False)),
        )


@dataclass(frozen=True)
class Snapshot:
    """Full authoritative state for one tick; serialization round-trips."""

    tick_index: int
    time: float
    mode: str
    status: str
    targets: tuple
    tip_point: tuple[float, float]
    locked_target: int | None
    gaze_point: tuple[float, float] | None
    score: dict
    stale_inputs: int

    def to_dict(self) -> dict:
        return {
            "v": MESSAGE_SCHEMA_VERSION,
            "tick_index": self.tick_index,
            "time": self.time,
            "mode": self.mode,
            "status": self.status,
            "targets": [dict(t) for t in self.targets],
            "tip_point": list(self.tip_point),
            "locked_target": self.locked_target,
            "gaze_point": None if self.gaze_point is None else list(self.gaze_point),
            "score": dict(self.score),
            "stale_inputs": self.stale_inputs,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict) -> "Snapshot":
        if data.get("v") != MESSAGE_SCHEMA_VERSION:
            raise ValueError(f"unsupported snapshot version {data.get('v')}")
        return cls(
            tick_index=data["tick_index"],
            time=data["time"],
            mode=data["mode"],
            status=data["status"],
            targets=tuple(dict(t) for t in data["targets"]),
            tip_point=tuple(data["tip_point"]),
            locked_target=data["locked_target"],
            gaze_point=None if data["gaze_point"] is None else tuple(data["gaze_point"]),
            score=dict(data["score"]),
            stale_inputs=data["stale_inputs"],
        )

    @classmethod
    def from_json(cls, text: str) -> "Snapshot":
        return cls.from_dict(json.loads(text))


class LiveSession:
    """One authoritative simulation advanced tick by tick.

    Not thread-safe by itself: ingest and step are expected to be called
    from the session's single logical loop (the server hands inputs over
    through that loop).
    """

    def __init__(self, config: SessionConfig, session_id: str | None = None, log_fh=None):
        self.id = session_id or uuid.uuid4().hex
        self.config = config
        self.status = PAUSED
        self.state = new_game(config.game, config.seed, mode=config.mode, trial_id=self.id)
        self.robot = RobotState(
            tip_speed_limit=config.tip_speed_limit,
            workspace_radius=config.workspace_radius,
        )
        self.screen = screen_plane_for(config.game)
        self.attention: AttentionEstimate | None = None
        self.latest_input = InputMessage(timestamp=0.0)
        self.newest_timestamp = float("-inf")
        self.stale_inputs = 0
        self.samples = []
        self._noise_rng = random.Random(config.seed ^ 0x5EED)
        self._dropout_tracked = True
        self._writer = TrialLogWriter(log_fh, config.game, config.seed, config.mode, self.id) if log_fh else None
        self._log_fh = log_fh
        if self._writer is not None:
            self._writer.record({"kind": "session_config", **config.to_dict()})

    # -- lifecycle ---------------------------------------------------------

    def start(self):
        if self.status == ENDED:
            raise ConfigError("session already ended")
        self.status = RUNNING

    def ingest(self, msg: InputMessage):
        """Latest-wins input buffering; out-of-date messages are dropped."""
        if self.status == ENDED:
            return
        if msg.timestamp < self.newest_timestamp - STALE_INPUT_WINDOW:
            self.stale_inputs += 1
            return
        self.newest_timestamp = max(self.newest_timestamp, msg.timestamp)
        self.latest_input = msg

    # -- simulation --------------------------------------------------------

    def _to_screen_mm(self, norm_point) -> tuple[float, float]:
        w, h = self.config.game.screen_width, self.config.game.screen_height
        return ((norm_point[0] - 0.5) * w, (0.5 - norm_point[1]) * h)

    def _gaze_point_mm(self, msg: InputMessage) -> tuple[float, float] | None:
        point = msg.gaze_point
        if point is None and self.config.gaze_source == DWELL_PROXY:
            point = msg.handle_point
        if point is None:
            return None
        return self._to_screen_mm(point)

    def step(self) -> Snapshot:
        """Advance one fixed timestep consuming the freshest input."""
        if self.status != RUNNING:
            return self.snapshot()
        msg = self.latest_input
        cfg = self.config
        dt = cfg.game.dt

        self.robot = self.robot.with_handle(self._to_screen_mm(msg.handle_point))

        gaze_mm = self._gaze_point_mm(msg)
        if cfg.inject_dropout:
            if self._dropout_tracked:
                if self._noise_rng.random() < cfg.user.dropout_to_untracked:
                    self._dropout_tracked = False
            elif self._noise_rng.random() < cfg.user.dropout_to_tracked:
                self._dropout_tracked = True
            if not self._dropout_tracked:
                gaze_mm = None
        if gaze_mm is not None and cfg.inject_noise:
            gaze_mm = apply_gaze_noise(gaze_mm, cfg.user, self._noise_rng,
                                       self.robot.tip_screen_point)
        gaze_ray = None if gaze_mm is None else gaze_ray_to(gaze_mm, cfg.user)

        self.attention = estimate_attention(
            gaze_ray, self.screen, self.state.targets,
            DEFAULT_ASSOCIATION_RADIUS + cfg.game.target_radius,
            self.attention, dt, hold_window=DEFAULT_HOLD_WINDOW,
        )
        command = behavior_step(cfg.mode, self.attention, self.state, self.robot, dt)
        self.robot = move_tip(self.robot, command, dt)

        if self._writer is not None:
            self._writer.record({"kind": "input", **msg.to_dict()})
            self._writer.tick(self.robot.tip_screen_point, msg.trigger,
                              command.laser_override, command.locked_target)
        emitted = tick(self.state, self.robot.tip_screen_point, msg.trigger,
                       command.laser_override, command.locked_target, cfg.game)
        self.samples.extend(emitted)
        if self._writer is not None:
            for s in emitted:
                self._writer.sample(s)

        if self.state.tick_index >= round(cfg.game.trial_duration * cfg.game.tick_rate):
            self.status = ENDED
            if self._writer is not None:
                self._writer.end(self.state)
                if hasattr(self._log_fh, "flush"):
                    self._log_fh.flush()
        return self.snapshot()

    def snapshot(self) -> Snapshot:
        gaze = self.attention.gaze_screen_point if self.attention else None
        targets = tuple(
            {
                "id": t.id,
                "kind": t.kind,
                "x": t.x,
                "y": t.y,
                "speed": t.speed,
                "progress": (
                    t.accumulated_lase / t.required_lase_time if t.is_task else 0.0
                ),
                "state": t.state,
            }
            for t in self.state.targets
            if t.state == FALLING
        )
        return Snapshot(
            tick_index=self.state.tick_index,
            time=self.state.time,
            mode=self.config.mode,
            status=self.status,
            targets=targets,
            tip_point=self.robot.tip_screen_point,
            locked_target=self.robot.locked_target,
            gaze_point=gaze,
            score={
                "completed": self.state.completed,
                "failed": self.state.failed,
                "total_spawned": self.state.total_spawned,
            },
            stale_inputs=self.stale_inputs,
        )

    @property
    def snapshot_stride(self) -> int:
        """Simulation ticks per emitted snapshot."""
        return max(1, round(self.config.game.tick_rate / self.config.snapshot_rate))


# ---------------------------------------------------------------------------
# Session registry (module-level, used by the websocket server and tests)
# ---------------------------------------------------------------------------

_SESSIONS: dict[str, LiveSession] = {}


def open_session(config: SessionConfig, log_fh=None) -> str:
    """Create a paused session and return its unique id."""
    session = LiveSession(config, log_fh=log_fh)
    _SESSIONS[session.id] = session
    return session.id


def get_session(session_id: str) -> LiveSession:
    try:
        return _SESSIONS[session_id]
    except KeyError:
        raise UnknownSessionError(f"no such session: {session_id}") from None


def ingest_input(session_id: str, msg: InputMessage) -> None:
    get_session(session_id).ingest(msg)


def step_and_broadcast(session_id: str) -> Snapshot:
    return get_session(session_id).step()


def close_session(session_id: str) -> None:
    _SESSIONS.pop(session_id, None)


def replay_session_log(lines) -> Snapshot:
    """Re-run a session's consumed-input log through the full pipeline.

    Needs the header and the per-tick ``input`` records written by a live
    session; returns the final snapshot, which matches the live run's
    final score exactly.
    """
    it = iter(lines)
    header = json.loads(next(it))
    if header.get("kind") != "header":
        raise ValueError("session log must start with a header record")
    config = SessionConfig(
        mode=header["mode"],
        game=GameConfig.from_dict(header["config"]),
        seed=header["seed"],
    )
    session = None
    for line in it:
        if not line.strip():
            continue
        rec = json.loads(line)
        if rec.get("kind") == "session_config":
            rec = dict(rec)
            rec.pop("kind")
            config = SessionConfig.from_dict(rec)
            continue
        if session is None:
            session = LiveSession(config, session_id=header["trial_id"])
            session.start()
        if rec.get("kind") == "input":
            session.ingest(InputMessage.from_dict(rec))
            session.step()
    if session is None:
        session = LiveSession(config, session_id=header["trial_id"])
        session.start()
    return session.snapshot()
