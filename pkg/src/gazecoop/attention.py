"""Attention estimation and the four robot behavior modes.

The attention model rests on two assumptions: the watched part of the
workspace is the user's focus (A1), and a watched object matters only
when it is task-relevant (A2) — distractors never become the focus.
The behavior matrix crosses gaze awareness with task knowledge:

  manual       no gaze, no task knowledge: the robot holds still
  slave        gaze only: the tip follows the gaze point
  autonomous   task knowledge only: the robot runs its own plan
  cooperative  both: follow gaze, lock and finish focused task objects
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from . import gaze_models
from .game import FALLING, GameState, Target
from .geometry import GazeRay, ScreenPlane, ray_plane_intersection

MANUAL = "manual"
SLAVE = "slave"
AUTONOMOUS = "autonomous"
COOPERATIVE = "cooperative"
MODES = (MANUAL, SLAVE, AUTONOMOUS, COOPERATIVE)

# Gaze dropouts rarely exceed 150 ms; the attention estimate persists
# across shorter gaps and decays to none afterwards.
DEFAULT_HOLD_WINDOW = 0.150

NOMINAL_EYE_DISTANCE = 700.0

# Feasibility slack (seconds) applied when re-checking a held lock.
RETENTION_CUSHION = 0.2


def association_radius(
    model: gaze_models.LinearErrorModel = gaze_models.STUDY_LINEAR_MODEL,
    eye_distance_mm: float = NOMINAL_EYE_DISTANCE,
    gaze_shift_deg: float = 27.0,
) -> float:
    """Screen-projected gaze accuracy: how close (mm) a gaze point must be
    to a target to count as looking at it."""
    eps = gaze_models.predict_error(model, gaze_shift_deg)
    return eye_distance_mm * math.tan(math.radians(eps))


DEFAULT_ASSOCIATION_RADIUS = association_radius()


@dataclass(frozen=True)
class AttentionEstimate:
    gaze_screen_point: tuple[float, float] | None = None
    focused_target: int | None = None
    focus_age: float = 0.0
    untracked_age: float = 0.0


IDLE_ATTENTION = AttentionEstimate()


@dataclass(frozen=True)
class RobotCommand:
    """Per-tick tip command; ``tip_screen_target=None`` means hold."""

    tip_screen_target: tuple[float, float] | None = None
    laser_override: bool = False
    locked_target: int | None = None

    def __post_init__(self):
        if self.laser_override and self.locked_target is None:
            raise ValueError("laser_override requires a locked target")


HOLD = RobotCommand()


@dataclass(frozen=True)
class RobotState:
    """Screen-plane abstraction of the handheld robot.

    The tip can deviate from the user-held handle aim point by at most
    ``workspace_radius``; the handle itself is moved by the user.
    """

    tip_screen_point: tuple[float, float] = (0.0, 0.0)
    handle_aim_point: tuple[float, float] = (0.0, 0.0)
    tip_speed_limit: float = 1500.0
    workspace_radius: float = 200.0
    locked_target: int | None = None

    def with_handle(self, handle_point: tuple[float, float]) -> "RobotState":
        """Move the handle; the tip rides along rigidly (same local offset)."""
        dx = handle_point[0] - self.handle_aim_point[0]
        dy = handle_point[1] - self.handle_aim_point[1]
        return replace(
            self,
            handle_aim_point=(handle_point[0], handle_point[1]),
            tip_screen_point=(self.tip_screen_point[0] + dx, self.tip_screen_point[1] + dy),
        )


def estimate_attention(
    gaze: GazeRay | None,
    screen: ScreenPlane,
    targets,
    radius: float,
    previous: AttentionEstimate | None,
    dt: float,
    hold_window: float = DEFAULT_HOLD_WINDOW,
) -> AttentionEstimate:
    """Turn a (possibly untracked) gaze ray into a focus-of-attention estimate.

    The gaze is projected onto the screen; the nearest incomplete task
    target within ``radius`` becomes the focus. Distractors are never
    focused. On untracked ticks the previous estimate persists for up to
    ``hold_window`` seconds, then decays to none.
    """
    if radius <= 0:
        raise ValueError("association radius must be positive")
    previous = previous if previous is not None else IDLE_ATTENTION

    if gaze is None:
        untracked_age = previous.untracked_age + dt
        if untracked_age <= hold_window:
            return replace(
                previous,
                focus_age=previous.focus_age + dt if previous.focused_target is not None else 0.0,
                untracked_age=untracked_age,
            )
        return AttentionEstimate(untracked_age=untracked_age)

    point = ray_plane_intersection(gaze, screen)
    if point is None:
        return AttentionEstimate()
    px, py = float(point[0]), float(point[1])

    focused = None
    best = radius
    for t in targets:
        if not (t.is_task and t.state == FALLING):
            continue
        d = math.hypot(t.x - px, t.y - py)
        if d <= best:
            best = d
            focused = t.id
    focus_age = (
        previous.focus_age + dt
        if focused is not None and focused == previous.focused_target
        else 0.0
    )
    return AttentionEstimate((px, py), focused, focus_age, 0.0)


def _clamp_to_workspace(point, robot: RobotState) -> tuple[float, float]:
    hx, hy = robot.handle_aim_point
    dx, dy = point[0] - hx, point[1] - hy
    d = math.hypot(dx, dy)
    if d <= robot.workspace_radius or d == 0.0:
        return (point[0], point[1])
    s = robot.workspace_radius / d
    return (hx + dx * s, hy + dy * s)


def _find_target(game: GameState, target_id: int | None) -> Target | None:
    if target_id is None:
        return None
    for t in game.targets:
        if t.id == target_id and t.is_task and t.state == FALLING:
            return t
    return None


def completable(target: Target, game: GameState, robot: RobotState, cushion: float = 0.0) -> bool:
    """Whether the remaining lase time fits before the target's bottom arrival,
    accounting for tip travel at the speed limit.

    ``cushion`` adds slack when re-checking an already held job, so locks
    do not flap on marginal feasibility.
    """
    remaining = target.required_lase_time - target.accumulated_lase
    time_to_bottom = (target.y - game.config.bottom_y) / target.speed
    travel = (
        math.hypot(target.x - robot.tip_screen_point[0], target.y - robot.tip_screen_point[1])
        / robot.tip_speed_limit
    )
    return remaining <= time_to_bottom - travel + cushion


def select_target_autonomous(game: GameState, robot: RobotState) -> int | None:
    """Earliest-deadline-first pick among still-completable task targets.

    Ties break by distance to the tip, then by lowest id.
    """
    tx, ty = robot.tip_screen_point
    best_key = None
    best_id = None
    for t in game.falling_task_targets():
        if not completable(t, game, robot):
            continue
        time_to_bottom = (t.y - game.config.bottom_y) / t.speed
        key = (time_to_bottom, math.hypot(t.x - tx, t.y - ty), t.id)
        if best_key is None or key < best_key:
            best_key = key
            best_id = t.id
    return best_id


def behavior_step(
    mode: str,
    attention: AttentionEstimate,
    game: GameState,
    robot: RobotState,
    dt: float,
    aim_blend: float = 1.0,
) -> RobotCommand:
    """Map attention, task knowledge and robot state to a tip command.

    ``aim_blend`` tunes how strongly the cooperative mode snaps the tip
    onto a locked target (1 = full snap onto the target, 0 = stay on the
    raw gaze point).
    """
    if mode == MANUAL:
        return HOLD

    if mode == SLAVE:
        if attention.gaze_screen_point is None:
            return HOLD
        return RobotCommand(_clamp_to_workspace(attention.gaze_screen_point, robot))

    if mode == AUTONOMOUS:
        # a lock persists while its job stays feasible; re-planning happens
        # only between jobs
        t = _find_target(game, robot.locked_target)
        if t is None or not completable(t, game, robot, cushion=RETENTION_CUSHION):
            chosen = select_target_autonomous(game, robot)
            if chosen is None:
                return HOLD
            t = _find_target(game, chosen)
        in_range = (
            math.hypot(t.x - robot.tip_screen_point[0], t.y - robot.tip_screen_point[1])
            < game.config.laser_range
        )
        return RobotCommand(
            _clamp_to_workspace((t.x, t.y), robot),
            laser_override=in_range,
            locked_target=t.id,
        )

    if mode == COOPERATIVE:
        held = _find_target(game, robot.locked_target)
        if held is not None and completable(held, game, robot, cushion=RETENTION_CUSHION):
            # finish the job regardless of where the gaze went
            return RobotCommand(
                _clamp_to_workspace((held.x, held.y), robot),
                laser_override=True,
                locked_target=held.id,
            )
        focus = _find_target(game, attention.focused_target)
        if focus is not None:
            gaze = attention.gaze_screen_point
            aim = (
                gaze[0] + aim_blend * (focus.x - gaze[0]),
                gaze[1] + aim_blend * (focus.y - gaze[1]),
            ) if gaze is not None else (focus.x, focus.y)
            return RobotCommand(
                _clamp_to_workspace(aim, robot),
                laser_override=True,
                locked_target=focus.id,
            )
        if attention.gaze_screen_point is None:
            return HOLD
        return RobotCommand(_clamp_to_workspace(attention.gaze_screen_point, robot))

    raise ValueError(f"unknown behavior mode {mode!r}")


def move_tip(robot: RobotState, command: RobotCommand, dt: float) -> RobotState:
    """Velocity-limited pursuit of the commanded tip target.

    The target is clamped into the workspace disc around the handle aim
    point (along the segment from the handle); on hold the tip keeps its
    current offset. The lock memory is updated from the command.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    tip = robot.tip_screen_point
    if command.tip_screen_target is not None:
        target = _clamp_to_workspace(command.tip_screen_target, robot)
        dx, dy = target[0] - tip[0], target[1] - tip[1]
        dist = math.hypot(dx, dy)
        step = robot.tip_speed_limit * dt
        if dist <= step:
            tip = target
        else:
            tip = (tip[0] + dx / dist * step, tip[1] + dy / dist * step)
    tip = _clamp_to_workspace(tip, robot)
    return replace(robot, tip_screen_point=tip, locked_target=command.locked_target)
