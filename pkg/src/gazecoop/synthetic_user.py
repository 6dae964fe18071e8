"""Parameterized simulated player supplying gaze and handle input per tick.

The model captures the behavioral ingredients the mode comparison needs:
look-ahead fixations (gaze moves to the next object before the current
action finishes), saccadic reaction delay, situational scan glances at
other falling objects, velocity-limited handle transport with aim jitter,
angular gaze noise that grows with the shift away from the tip, and
tracker dropout as a two-state Markov chain calibrated so that untracked
frames cover about half the trial while long (>150 ms) gaps stay rare.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

from . import gaze_models
from .attention import RobotState, completable, select_target_autonomous
from .errors import ConfigError
from .game import FALLING, GameState
from .geometry import WORLD, GazeRay

# Markov-chain defaults: stationary untracked share 0.499 with the time
# share of >150 ms gaps near 0.051 (see tests for the calibration oracle).
DROPOUT_TO_UNTRACKED = 0.3336
DROPOUT_TO_TRACKED = 0.3349


@dataclass(frozen=True)
class UserParams:
    reaction_delay: float = 0.2
    lookahead_lead: float = 1.4
    handle_speed_limit: float = 800.0
    aim_jitter_mm: float = 4.0
    eye_distance_mm: float = 700.0
    gaze_noise_model: gaze_models.LinearErrorModel = gaze_models.STUDY_LINEAR_MODEL
    gaze_noise_sigma_deg: float = 0.5
    dropout_to_untracked: float = DROPOUT_TO_UNTRACKED  # P(tracked -> untracked) per tick
    dropout_to_tracked: float = DROPOUT_TO_TRACKED  # P(untracked -> tracked) per tick
    slave_gaze_pull: float = 0.6  # gaze drawn toward the moving tip in slave mode
    scan_interval: float = 0.8  # mean seconds between situational glances
    scan_duration: float = 0.35
    plan_surprise_factor: float = 2.2  # extra reaction time when the robot re-plans on its own
    pursuit_lag: float = 0.08  # smooth pursuit trails a moving target by this many seconds
    seed: int = 0

    def __post_init__(self):
        for name in ("dropout_to_untracked", "dropout_to_tracked", "slave_gaze_pull"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ConfigError(f"{name} must lie in [0, 1], got {v}")
        for name in ("reaction_delay", "lookahead_lead", "scan_duration", "aim_jitter_mm"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be >= 0")
        for name in ("handle_speed_limit", "eye_distance_mm", "scan_interval"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be positive")

    def to_dict(self) -> dict:
        d = {
            k: getattr(self, k)
            for k in (
                "reaction_delay", "lookahead_lead", "handle_speed_limit",
                "aim_jitter_mm", "eye_distance_mm", "gaze_noise_sigma_deg",
                "dropout_to_untracked", "dropout_to_tracked", "slave_gaze_pull",
                "scan_interval", "scan_duration", "seed",
            )
        }
        d["gaze_noise_model"] = {
            "c1": self.gaze_noise_model.c1,
            "c2": self.gaze_noise_model.c2,
        }
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "UserParams":
        data = dict(data)
        model = data.pop("gaze_noise_model", None)
        kwargs = dict(data)
        if model is not None:
            kwargs["gaze_noise_model"] = gaze_models.LinearErrorModel(
                c1=model["c1"], c2=model["c2"]
            )
        return cls(**kwargs)


@dataclass(frozen=True)
class UserTickOutput:
    true_gaze_point: tuple[float, float]
    measured_gaze: GazeRay | None
    handle_aim_point: tuple[float, float]
    trigger: bool
    measured_gaze_point: tuple[float, float] | None = None


@dataclass
class UserState:
    """Mutable per-session internals of one simulated player."""

    rng: random.Random
    time: float = 0.0
    tracked: bool = True
    engaged_target: int | None = None
    fixated_target: int | None = None
    fixation_point: tuple[float, float] = (0.0, 0.0)
    pending_target: int | None = None
    pending_timer: float = 0.0
    has_pending: bool = False
    next_scan: float = 0.0
    scan_until: float = -1.0
    scan_target: int | None = None
    lookahead_target: int | None = None
    lookahead_lock: int | None = None


def new_user_state(params: UserParams, seed: int | None = None) -> UserState:
    rng = random.Random(params.seed if seed is None else seed)
    state = UserState(rng=rng)
    state.next_scan = rng.expovariate(1.0 / params.scan_interval)
    return state


def dropout_step(state: UserState, params: UserParams, rng: random.Random | None = None) -> bool:
    """One step of the tracked/untracked Markov chain."""
    rng = rng if rng is not None else state.rng
    if state.tracked:
        if rng.random() < params.dropout_to_untracked:
            state.tracked = False
    else:
        if rng.random() < params.dropout_to_tracked:
            state.tracked = True
    return state.tracked


def _eye_position(params: UserParams) -> tuple[float, float, float]:
    return (0.0, 0.0, params.eye_distance_mm)


def gaze_ray_to(point: tuple[float, float], params: UserParams) -> GazeRay:
    """Ray from the nominal eye position through a screen point (world frame,
    screen plane at z = 0)."""
    ex, ey, ez = _eye_position(params)
    return GazeRay((ex, ey, ez), (point[0] - ex, point[1] - ey, -ez), WORLD)


def apply_gaze_noise(
    true_point: tuple[float, float],
    params: UserParams,
    rng: random.Random,
    tip_point: tuple[float, float] = (0.0, 0.0),
) -> tuple[float, float]:
    """Perturb the gaze ray by a sampled angular error and re-project.

    The error magnitude is |Normal(mu, sigma)| where mu comes from the
    linear error model evaluated at the current shift between gaze and
    tip directions; the perturbation direction is uniform around the ray.
    """
    ex, ey, ez = _eye_position(params)
    gx, gy, gz = true_point[0] - ex, true_point[1] - ey, -ez
    gn = math.sqrt(gx * gx + gy * gy + gz * gz)
    gx, gy, gz = gx / gn, gy / gn, gz / gn

    tx, ty, tz = tip_point[0] - ex, tip_point[1] - ey, -ez
    tn = math.sqrt(tx * tx + ty * ty + tz * tz)
    cos_shift = max(-1.0, min(1.0, (gx * tx + gy * ty + gz * tz) / tn))
    shift_deg = math.degrees(math.acos(cos_shift))

    mu = gaze_models.predict_error(params.gaze_noise_model, shift_deg)
    eps = abs(rng.gauss(mu, params.gaze_noise_sigma_deg))
    if eps == 0.0:
        return (true_point[0], true_point[1])
    eps_rad = math.radians(eps)

    # orthonormal basis (u, v) perpendicular to the gaze direction
    if abs(gx) < 0.9:
        ux, uy, uz = 1.0, 0.0, 0.0
    else:
        ux, uy, uz = 0.0, 1.0, 0.0
    # u := normalize(e - (e.g) g), v := g x u
    d = ux * gx + uy * gy + uz * gz
    ux, uy, uz = ux - d * gx, uy - d * gy, uz - d * gz
    un = math.sqrt(ux * ux + uy * uy + uz * uz)
    ux, uy, uz = ux / un, uy / un, uz / un
    vx = gy * uz - gz * uy
    vy = gz * ux - gx * uz
    vz = gx * uy - gy * ux

    psi = rng.uniform(0.0, 2.0 * math.pi)
    ca, sa = math.cos(eps_rad), math.sin(eps_rad)
    cw, sw = math.cos(psi), math.sin(psi)
    dx = gx * ca + (ux * cw + vx * sw) * sa
    dy = gy * ca + (uy * cw + vy * sw) * sa
    dz = gz * ca + (uz * cw + vz * sw) * sa
    if dz >= -1e-9:  # pathological: perturbed ray no longer hits the screen
        return (true_point[0], true_point[1])
    lam = -ez / dz
    return (ex + lam * dx, ey + lam * dy)


def _find(game: GameState, target_id: int | None):
    if target_id is None:
        return None
    for t in game.targets:
        if t.id == target_id and t.is_task and t.state == FALLING:
            return t
    return None


def _find_any(game: GameState, target_id: int | None):
    """Like _find but includes distractors (anything visible can be looked at)."""
    if target_id is None:
        return None
    for t in game.targets:
        if t.id == target_id and t.state == FALLING:
            return t
    return None


def _newest_object(game: GameState, exclude: int | None = None) -> int | None:
    """Most recently spawned falling object: the one still needing triage."""
    newest = None
    for t in game.targets:
        if t.state != FALLING or t.id == exclude:
            continue
        if newest is None or t.id > newest:
            newest = t.id
    return newest


def _time_to_bottom(t, game: GameState) -> float:
    return (t.y - game.config.bottom_y) / t.speed


# A plan is only revised for a clearly more urgent target (seconds of
# bottom-arrival difference), not for marginal re-orderings.
REPLAN_MARGIN = 0.3


def _achievable(
    t, game: GameState, robot: RobotState, params: UserParams, mode: str, reach: float,
    cushion: float = 0.0,
) -> bool:
    """The player's feasibility estimate.

    Aiming by hand (manual) or by gaze (slave), the handle has to carry
    the tool within ``reach``, so transport speed bounds what is worth
    starting. When the robot aims itself the player trusts the robot's
    own feasibility judgement. ``cushion`` adds slack for jobs already
    committed to, so engagements do not flap on marginal feasibility.
    """
    if mode in ("autonomous", "cooperative"):
        return completable(t, game, robot, cushion=cushion)
    hx, hy = robot.handle_aim_point
    time_to_bottom = (t.y - game.config.bottom_y) / t.speed
    travel = max(0.0, math.hypot(t.x - hx, t.y - hy) - reach) / params.handle_speed_limit
    remaining = t.required_lase_time - t.accumulated_lase
    return remaining <= time_to_bottom - travel + cushion


def _user_pick(
    game: GameState, robot: RobotState, params: UserParams, mode: str, reach: float, exclude=()
) -> int | None:
    """The player's own triage: earliest deadline first among targets the
    user believes are still achievable."""
    hx, hy = robot.handle_aim_point
    best_key = None
    best_id = None
    for t in game.falling_task_targets():
        if t.id in exclude:
            continue
        if not _achievable(t, game, robot, params, mode, reach):
            continue
        time_to_bottom = (t.y - game.config.bottom_y) / t.speed
        key = (time_to_bottom, math.hypot(t.x - hx, t.y - hy), t.id)
        if best_key is None or key < best_key:
            best_key = key
            best_id = t.id
    return best_id


def user_step(
    game: GameState,
    mode: str,
    robot: RobotState,
    params: UserParams,
    state: UserState,
    dt: float,
) -> tuple[UserTickOutput, UserState]:
    """Advance the player by one tick; mutates and returns ``state``.

    The player triages targets earliest-deadline-first, fixates the
    intended one after a saccadic reaction delay, occasionally glances at
    other objects, and in cooperative mode departs to the next object
    ``lookahead_lead`` seconds before the robot finishes the locked one.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    state.time += dt
    dropout_step(state, params)

    locked = _find(game, robot.locked_target)

    # How close the handle has to carry the robot: within laser range for
    # manual aiming, onto the gaze workspace in slave mode, and merely near
    # enough that tip travel plus laser range cover the rest when the robot
    # aims itself.
    if mode == "manual":
        reach = 0.9 * game.config.laser_range
        approach = 0.6 * game.config.laser_range
    elif mode == "slave":
        reach = approach = 0.8 * robot.workspace_radius
    else:
        reach = approach = 0.8 * (robot.workspace_radius + game.config.laser_range)

    # What the player works on (hand) and what the player looks at (gaze).
    # Engagements are sticky: re-triage only when the current job is done
    # or no longer achievable (humans commit, then adapt).
    if mode == "autonomous":
        engage_id = locked.id if locked is not None else select_target_autonomous(game, robot)
        state.engaged_target = engage_id
        gaze_intent = engage_id
    elif mode == "cooperative" and locked is not None:
        engage_id = locked.id
        state.engaged_target = engage_id
        remaining = locked.required_lase_time - locked.accumulated_lase
        if remaining <= params.lookahead_lead:
            # pin the look-ahead choice per lock so the saccade actually
            # lands, but adapt when a clearly more urgent target appears
            pinned = _find(game, state.lookahead_target)
            stale = (
                state.lookahead_lock != locked.id
                or pinned is None
                or state.lookahead_target == locked.id
            )
            fresh = _user_pick(game, robot, params, mode, reach, exclude={locked.id})
            if stale:
                state.lookahead_target = fresh
                state.lookahead_lock = locked.id
            elif fresh is not None and fresh != pinned.id:
                fresh_t = _find(game, fresh)
                if _time_to_bottom(fresh_t, game) < _time_to_bottom(pinned, game) - REPLAN_MARGIN:
                    state.lookahead_target = fresh
            gaze_intent = state.lookahead_target if state.lookahead_target is not None else locked.id
        else:
            state.lookahead_target = None
            state.lookahead_lock = None
            gaze_intent = locked.id
    else:
        current = _find(game, state.engaged_target)
        if current is None or not _achievable(current, game, robot, params, mode, reach, cushion=0.2):
            # prefer the object the gaze already moved ahead to, unless a
            # clearly more urgent one turned up in the meantime
            prepared = _find(game, state.lookahead_target)
            fresh = _user_pick(game, robot, params, mode, reach)
            choice = None
            if prepared is not None and _achievable(prepared, game, robot, params, mode, reach):
                choice = prepared.id
                if fresh is not None and fresh != prepared.id:
                    fresh_t = _find(game, fresh)
                    if _time_to_bottom(fresh_t, game) < _time_to_bottom(prepared, game) - REPLAN_MARGIN:
                        choice = fresh
            else:
                choice = fresh
            state.engaged_target = choice
            state.lookahead_target = None
            state.lookahead_lock = None
        engage_id = state.engaged_target
        gaze_intent = engage_id

    # Saccadic reaction delay before the gaze lands on a new intent. The
    # robot's own plan jumps take longer to follow than self-chosen ones.
    delay = params.reaction_delay
    if mode == "autonomous":
        delay *= params.plan_surprise_factor
    if gaze_intent != state.fixated_target:
        if not state.has_pending or state.pending_target != gaze_intent:
            state.has_pending = True
            state.pending_target = gaze_intent
            state.pending_timer = 0.0
        state.pending_timer += dt
        if state.pending_timer >= delay:
            state.fixated_target = state.pending_target
            state.has_pending = False
    else:
        state.has_pending = False

    # Situational scan glances: falling objects have to be looked at to be
    # triaged, and distractors look like targets until checked. While a
    # cooperative lock runs, the look-ahead glance does the scanning, and
    # nobody glances away mid-saccade.
    scanning = state.time < state.scan_until and _find_any(game, state.scan_target) is not None
    if mode == "cooperative" and locked is not None:
        scanning = False
        state.scan_until = -1.0
        state.next_scan = max(state.next_scan, state.time + params.scan_interval)
    if not scanning and state.has_pending:
        state.next_scan = max(state.next_scan, state.time + params.reaction_delay)
    if not scanning and state.time >= state.next_scan:
        candidate = _newest_object(game, exclude=gaze_intent)
        if candidate is not None:
            state.scan_target = candidate
            state.scan_until = state.time + params.scan_duration
            scanning = True
        state.next_scan = (
            state.time + params.scan_duration + state.rng.expovariate(1.0 / params.scan_interval)
        )

    look_id = state.scan_target if scanning else state.fixated_target
    looked_at = _find_any(game, look_id) if scanning else _find(game, look_id)
    if looked_at is not None:
        # smooth pursuit trails the falling object slightly
        state.fixation_point = (
            looked_at.x,
            looked_at.y + looked_at.speed * params.pursuit_lag,
        )
    elif look_id is None and state.fixated_target is None:
        state.fixation_point = (0.0, 0.0)  # idle gaze rests at the screen centre
    # otherwise: dwell on the last fixation point while re-targeting

    true_point = state.fixation_point
    if mode == "slave" and params.slave_gaze_pull > 0.0:
        # the moving tip draws the gaze toward itself
        pull = params.slave_gaze_pull
        tip = robot.tip_screen_point
        true_point = (
            true_point[0] + pull * (tip[0] - true_point[0]),
            true_point[1] + pull * (tip[1] - true_point[1]),
        )

    if state.tracked:
        measured_point = apply_gaze_noise(true_point, params, state.rng, robot.tip_screen_point)
        measured = gaze_ray_to(measured_point, params)
    else:
        measured_point = None
        measured = None

    # Handle transport: pursue the engaged target (gaze-gated except while
    # the robot holds a lock the player merely accompanies).
    if mode == "cooperative" and locked is not None:
        handle_id = engage_id
    elif mode == "autonomous":
        handle_id = state.fixated_target  # follow the robot once the eyes caught up
    else:
        handle_id = state.fixated_target if state.fixated_target == engage_id else None
    handle_target = _find(game, handle_id)
    hx, hy = robot.handle_aim_point
    if handle_target is not None:
        d_target = math.hypot(handle_target.x - hx, handle_target.y - hy)
        if d_target > approach:
            jx = state.rng.gauss(0.0, params.aim_jitter_mm)
            jy = state.rng.gauss(0.0, params.aim_jitter_mm)
            goal = (handle_target.x + jx, handle_target.y + jy)
            dx, dy = goal[0] - hx, goal[1] - hy
            d = math.hypot(dx, dy)
            step = params.handle_speed_limit * dt
            if d <= step:
                hx, hy = goal
            else:
                hx, hy = hx + dx / d * step, hy + dy / d * step

    trig_target = locked if (mode == "cooperative" and locked is not None) else _find(game, handle_id)
    trigger = False
    if trig_target is not None:
        trigger = (
            math.hypot(
                trig_target.x - robot.tip_screen_point[0],
                trig_target.y - robot.tip_screen_point[1],
            )
            < game.config.laser_range
        )

    return (
        UserTickOutput(
            true_gaze_point=true_point,
            measured_gaze=measured,
            handle_aim_point=(hx, hy),
            trigger=trigger,
            measured_gaze_point=measured_point,
        ),
        state,
    )
