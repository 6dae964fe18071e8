"""Falling-targets validation game: deterministic fixed-timestep simulation.

Targets drop from the upper screen edge at constant speed and must be
stopped by keeping the laser on them for a speed-dependent lase time
while the tip is within laser range. Distractors look similar but cannot
be stopped. Half of the task targets (by count, configurable) belong to
scripted challenge scenarios.

Screen coordinates are millimetres with the origin at the screen centre,
x to the right, y up; the bottom line is ``y = -height / 2``.
"""

from __future__ import annotations

import dataclasses
import json
import math
import random
from dataclasses import dataclass, field

from .errors import ConfigError, InsufficientDataError

TASK = "task"
DISTRACTOR = "distractor"

FALLING = "falling"
COMPLETED = "completed"
FAILED = "failed"

SCENARIO_TRIANGLE = "triangle_formation"
SCENARIO_LINE = "line_formation"
SCENARIO_OVERTAKE = "overtake"
SCENARIO_KINDS = (SCENARIO_TRIANGLE, SCENARIO_LINE, SCENARIO_OVERTAKE)

LOG_SCHEMA_VERSION = 1


@dataclass
class Target:
    id: int
    kind: str
    x: float
    y: float
    speed: float  # mm/s, downward
    required_lase_time: float
    accumulated_lase: float = 0.0
    state: str = FALLING

    @property
    def position(self) -> tuple[float, float]:
        return (self.x, self.y)

    @property
    def is_task(self) -> bool:
        return self.kind == TASK


@dataclass(frozen=True)
class GameConfig:
    """Every tunable of the validation game.

    The default screen is a 1050 mm diagonal 16:9 panel; lase times follow
    the inverse-speed law tau(v) = tau_ref * v_ref / v clamped to
    [lase_time_min, lase_time_max], which keeps every spawnable target
    stoppable before it reaches the bottom line (checked at load).
    """

    screen_width: float = 915.0
    screen_height: float = 515.0
    trial_duration: float = 80.0
    tick_rate: float = 60.0
    laser_range: float = 100.0
    target_radius: float = 30.0
    speed_min: float = 70.0
    speed_max: float = 490.0
    lase_time_ref: float = 1.2
    lase_speed_ref: float = 200.0
    lase_time_min: float = 0.3
    lase_time_max: float = 2.0
    target_spawn_interval: float = 2.6  # mean seconds between task-spawn events
    distractor_spawn_interval: float = 3.0
    scenario_fraction: float = 0.5

    def __post_init__(self):
        positive = [
            "screen_width", "screen_height", "tick_rate", "laser_range",
            "target_radius", "speed_min", "speed_max", "lase_time_ref",
            "lase_speed_ref", "lase_time_min", "lase_time_max",
            "target_spawn_interval", "distractor_spawn_interval",
        ]
        for name in positive:
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be positive")
        if self.trial_duration < 0:
            raise ConfigError("trial_duration must be >= 0")
        if not 0.0 <= self.scenario_fraction <= 1.0:
            raise ConfigError("scenario_fraction must lie in [0, 1]")
        if self.speed_min > self.speed_max:
            raise ConfigError("speed_min must not exceed speed_max")
        if self.lase_time_min > self.lase_time_max:
            raise ConfigError("lase_time_min must not exceed lase_time_max")
        self._check_completability()

    def _check_completability(self):
        # v * tau(v) is piecewise monotone; its maximum over the spawn range
        # occurs at a range endpoint or where a clamp kicks in.
        candidates = {self.speed_min, self.speed_max}
        for boundary in (
            self.lase_time_ref * self.lase_speed_ref / self.lase_time_max,
            self.lase_time_ref * self.lase_speed_ref / self.lase_time_min,
        ):
            if self.speed_min <= boundary <= self.speed_max:
                candidates.add(boundary)
        for v in candidates:
            if v * required_lase_time(v, self) > self.screen_height:
                raise ConfigError(
                    f"lase time at speed {v:.1f} mm/s exceeds the screen fall "
                    "time; targets would be uncompletable"
                )

    @property
    def dt(self) -> float:
        return 1.0 / self.tick_rate

    @property
    def bottom_y(self) -> float:
        return -self.screen_height / 2.0

    @property
    def top_y(self) -> float:
        return self.screen_height / 2.0

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "GameConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown game config keys: {sorted(unknown)}")
        return cls(**data)


@dataclass(frozen=True)
class TargetSample:
    """Per-target outcome record, emitted exactly once at the end transition."""

    speed: float
    mode: str
    completed: bool
    trial_id: str
    timestamp: float
    target_id: int

    def to_dict(self) -> dict:
        return {
            "speed": self.speed,
            "mode": self.mode,
            "completed": self.completed,
            "trial_id": self.trial_id,
            "timestamp": self.timestamp,
            "target_id": self.target_id,
        }


@dataclass
class _PendingSpawn:
    time: float
    x: float
    speed: float
    scenario: str


@dataclass
class GameState:
    config: GameConfig
    rng: random.Random
    mode: str = "manual"
    trial_id: str = ""
    time: float = 0.0
    tick_index: int = 0
    targets: list[Target] = field(default_factory=list)
    completed: int = 0
    failed: int = 0
    total_spawned: int = 0  # task targets only
    distractors_spawned: int = 0
    scenario_spawned: int = 0  # task targets that belong to a scenario
    next_target_id: int = 0
    next_task_event: float = 0.0
    next_distractor_event: float = 0.0
    pending: list[_PendingSpawn] = field(default_factory=list)

    def falling_task_targets(self) -> list[Target]:
        return [t for t in self.targets if t.is_task and t.state == FALLING]


def new_game(config: GameConfig, seed: int, mode: str = "manual", trial_id: str = "") -> GameState:
    rng = random.Random(seed)
    state = GameState(config=config, rng=rng, mode=mode, trial_id=trial_id)
    state.next_task_event = rng.expovariate(1.0 / config.target_spawn_interval)
    state.next_distractor_event = rng.expovariate(1.0 / config.distractor_spawn_interval)
    return state


def required_lase_time(speed: float, config: GameConfig) -> float:
    """Continuous lasering time needed to stop a target of the given speed."""
    if speed <= 0:
        raise ValueError("speed must be positive")
    tau = config.lase_time_ref * config.lase_speed_ref / speed
    return min(max(tau, config.lase_time_min), config.lase_time_max)


def _spawn_x(rng: random.Random, config: GameConfig) -> float:
    half = config.screen_width / 2.0 - config.target_radius
    return rng.uniform(-half, half)


def _spawn_speed(rng: random.Random, config: GameConfig) -> float:
    return rng.uniform(config.speed_min, config.speed_max)


def scenario_generate(kind: str, rng: random.Random, config: GameConfig) -> list[_PendingSpawn]:
    """Scripted spawn list for one challenge scenario, as (delay, x, speed).

    Formations use equal speeds so target priorities are equal by
    construction; the overtake pair is arranged so the fast target passes
    the slow one before the slow one reaches the bottom line.
    """
    spacing = 3.0 * config.target_radius
    if kind == SCENARIO_LINE:
        n = rng.randint(3, 5)
        speed = _spawn_speed(rng, config)
        half_extent = spacing * (n - 1) / 2.0
        margin = max(config.screen_width / 2.0 - config.target_radius - half_extent, 0.0)
        centre = rng.uniform(-margin, margin)
        return [
            _PendingSpawn(0.0, centre + (i - (n - 1) / 2.0) * spacing, speed, kind)
            for i in range(n)
        ]
    if kind == SCENARIO_TRIANGLE:
        speed = _spawn_speed(rng, config)
        margin = max(config.screen_width / 2.0 - config.target_radius - spacing / 2.0, 0.0)
        centre = rng.uniform(-margin, margin)
        apex_delay = (spacing * math.sqrt(3.0) / 2.0) / speed
        return [
            _PendingSpawn(0.0, centre - spacing / 2.0, speed, kind),
            _PendingSpawn(0.0, centre + spacing / 2.0, speed, kind),
            _PendingSpawn(apex_delay, centre, speed, kind),
        ]
    if kind == SCENARIO_OVERTAKE:
        x = _spawn_x(rng, config)
        slow = rng.uniform(config.speed_min, min(config.speed_max, 2.0 * config.speed_min))
        fast = min(slow * rng.uniform(1.6, 2.4), config.speed_max)
        # fast catches slow at 0.8 of the slow target's fall time
        fall_time = config.screen_height / slow
        delay = 0.8 * fall_time * (fast - slow) / fast
        return [
            _PendingSpawn(0.0, x, slow, kind),
            _PendingSpawn(delay, x, fast, kind),
        ]
    raise ValueError(f"unknown scenario kind {kind!r}")


def _mean_scenario_size() -> float:
    # triangle 3, line 3..5 (mean 4), overtake 2, kinds equally likely
    return (3.0 + 4.0 + 2.0) / 3.0


def _scenario_event_probability(fraction: float) -> float:
    """Event probability such that the expected share of *targets* born in
    scenarios equals ``fraction`` (scenario events spawn several targets)."""
    if fraction <= 0.0:
        return 0.0
    k = _mean_scenario_size()
    return fraction / (k * (1.0 - fraction) + fraction)


def _add_target(state: GameState, x: float, speed: float, kind: str, scenario: bool = False) -> Target:
    config = state.config
    target = Target(
        id=state.next_target_id,
        kind=kind,
        x=x,
        y=config.top_y,
        speed=speed,
        required_lase_time=required_lase_time(speed, config),
    )
    state.next_target_id += 1
    state.targets.append(target)
    if kind == TASK:
        state.total_spawned += 1
        if scenario:
            state.scenario_spawned += 1
    else:
        state.distractors_spawned += 1
    return target


def spawn_step(state: GameState, config: GameConfig, rng: random.Random | None = None) -> list[Target]:
    """Process all spawn events due at the current game time.

    Order is fixed for determinism: scheduled scenario members, then task
    spawn events, then distractor events.
    """
    rng = rng if rng is not None else state.rng
    born: list[Target] = []

    due = [p for p in state.pending if p.time <= state.time]
    if due:
        state.pending = [p for p in state.pending if p.time > state.time]
        for p in due:
            born.append(_add_target(state, p.x, p.speed, TASK, scenario=True))

    p_event = _scenario_event_probability(config.scenario_fraction)
    while state.next_task_event <= state.time:
        if rng.random() < p_event:
            kind = SCENARIO_KINDS[rng.randrange(len(SCENARIO_KINDS))]
            for member in scenario_generate(kind, rng, config):
                if member.time <= 0.0:
                    born.append(_add_target(state, member.x, member.speed, TASK, scenario=True))
                else:
                    member.time += state.time
                    state.pending.append(member)
        else:
            born.append(_add_target(state, _spawn_x(rng, config), _spawn_speed(rng, config), TASK))
        state.next_task_event += rng.expovariate(1.0 / config.target_spawn_interval)

    while state.next_distractor_event <= state.time:
        born.append(_add_target(state, _spawn_x(rng, config), _spawn_speed(rng, config), DISTRACTOR))
        state.next_distractor_event += rng.expovariate(1.0 / config.distractor_spawn_interval)

    return born


def tick(
    state: GameState,
    tip_point: tuple[float, float],
    trigger: bool,
    laser_override: bool,
    locked_target: int | None,
    config: GameConfig | None = None,
) -> list[TargetSample]:
    """Advance the game by one fixed timestep and return emitted samples.

    Update order: clock, target motion, laser progress (at most one
    affected target: the locked one if set, else the nearest task target
    within laser range), completion, bottom-line transitions, spawns.
    """
    config = config or state.config
    dt = config.dt
    state.tick_index += 1
    state.time += dt

    for t in state.targets:
        if t.state == FALLING:
            t.y -= t.speed * dt

    samples: list[TargetSample] = []
    tip_x, tip_y = tip_point

    if trigger or laser_override:
        affected = None
        if locked_target is not None:
            for t in state.targets:
                if t.id == locked_target and t.is_task and t.state == FALLING:
                    affected = t
                    break
        if affected is None and locked_target is None:
            best = config.laser_range
            for t in state.targets:
                if not (t.is_task and t.state == FALLING):
                    continue
                d = math.hypot(t.x - tip_x, t.y - tip_y)
                if d < best:
                    best = d
                    affected = t
        if affected is not None:
            d = math.hypot(affected.x - tip_x, affected.y - tip_y)
            if d < config.laser_range:
                affected.accumulated_lase += dt
                if affected.accumulated_lase >= affected.required_lase_time:
                    affected.state = COMPLETED
                    state.completed += 1
                    samples.append(
                        TargetSample(
                            affected.speed, state.mode, True, state.trial_id,
                            state.time, affected.id,
                        )
                    )

    survivors = []
    for t in state.targets:
        if t.state == FALLING and t.y < config.bottom_y:
            if t.is_task:
                t.state = FAILED
                state.failed += 1
                samples.append(
                    TargetSample(t.speed, state.mode, False, state.trial_id, state.time, t.id)
                )
            else:
                continue  # distractors despawn silently
        if t.state == FALLING:
            survivors.append(t)
        # completed/failed targets leave the board
    state.targets = survivors

    spawn_step(state, config)
    return samples


def performance(samples) -> float:
    """Completed fraction over all task-target samples."""
    samples = list(samples)
    if not samples:
        raise InsufficientDataError("performance needs at least one target sample")
    return sum(1 for s in samples if s.completed) / len(samples)


# ---------------------------------------------------------------------------
# Trial logs: JSONL, replayable to bit-identical state
# ---------------------------------------------------------------------------


class TrialLogWriter:
    """Serializes one trial as JSONL: header, per-tick inputs, samples, end."""

    def __init__(self, fh, config: GameConfig, seed: int, mode: str, trial_id: str):
        self._fh = fh
        self.record(
            {
                "kind": "header",
                "v": LOG_SCHEMA_VERSION,
                "seed": seed,
                "mode": mode,
                "trial_id": trial_id,
                "config": config.to_dict(),
            }
        )

    def record(self, record: dict):
        self._fh.write(json.dumps(record, sort_keys=True) + "\n")

    def tick(self, tip_point, trigger: bool, laser_override: bool, locked_target):
        self.record(
            {
                "kind": "tick",
                "tip": [tip_point[0], tip_point[1]],
                "trigger": trigger,
                "override": laser_override,
                "locked": locked_target,
            }
        )

    def sample(self, s: TargetSample):
        self.record({"kind": "sample", **s.to_dict()})

    def end(self, state: GameState):
        self.record(
            {
                "kind": "end",
                "time": state.time,
                "completed": state.completed,
                "failed": state.failed,
                "total_spawned": state.total_spawned,
            }
        )


def replay_trial_log(lines) -> GameState:
    """Re-run a logged trial tick by tick; returns the reconstructed state.

    The result is bit-identical to the original run because the log pins
    the seed and every per-tick input.
    """
    it = iter(lines)
    header = json.loads(next(it))
    if header.get("kind") != "header":
        raise ValueError("trial log must start with a header record")
    if header.get("v") != LOG_SCHEMA_VERSION:
        raise ValueError(f"unsupported log schema version {header.get('v')}")
    config = GameConfig.from_dict(header["config"])
    state = new_game(config, header["seed"], header["mode"], header["trial_id"])
    for line in it:
        if not line.strip():
            continue
        rec = json.loads(line)
        if rec["kind"] == "tick":
            tick(
                state,
                (rec["tip"][0], rec["tip"][1]),
                rec["trigger"],
                rec["override"],
                rec["locked"],
                config,
            )
        # sample/end records are outputs; they are regenerated by the replay
    return state
