"""Headless trial loop: wires the synthetic user, attention estimation,
behavior modes, tip kinematics and the game into one deterministic tick
pipeline (user input -> attention -> behavior -> tip -> game)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .attention import (
    DEFAULT_ASSOCIATION_RADIUS,
    DEFAULT_HOLD_WINDOW,
    AttentionEstimate,
    RobotState,
    behavior_step,
    estimate_attention,
    move_tip,
)
from .game import GameConfig, GameState, TargetSample, TrialLogWriter, new_game, tick
from .geometry import SCREEN_CENTRE, WORLD, Pose, ScreenPlane
from .synthetic_user import UserParams, new_user_state, user_step


def screen_plane_for(config: GameConfig) -> ScreenPlane:
    """Canonical world-frame screen: centre at the origin, front face +z."""
    pose = Pose(np.eye(3), np.zeros(3), WORLD, SCREEN_CENTRE)
    return ScreenPlane(pose, config.screen_width, config.screen_height)


@dataclass
class TrialResult:
    samples: list[TargetSample]
    state: GameState
    ticks: int
    seed: int
    mode: str
    trial_id: str


def run_trial(
    mode: str,
    game_config: GameConfig,
    user_params: UserParams,
    seed: int,
    trial_id: str = "",
    robot: RobotState | None = None,
    log_fh=None,
    association_radius: float | None = None,
    hold_window: float = DEFAULT_HOLD_WINDOW,
) -> TrialResult:
    """Simulate one full trial with a synthetic player.

    Game and user randomness are split deterministically from ``seed``,
    so identical calls give bit-identical sample logs. The gaze-to-target
    association accepts gaze landing anywhere on the target footprint up
    to the modelled measurement error (target radius + accuracy radius).
    """
    if association_radius is None:
        association_radius = DEFAULT_ASSOCIATION_RADIUS + game_config.target_radius
    state = new_game(game_config, seed * 2, mode=mode, trial_id=trial_id)
    ustate = new_user_state(user_params, seed=seed * 2 + 1)
    robot = robot if robot is not None else RobotState()
    screen = screen_plane_for(game_config)
    attention: AttentionEstimate | None = None
    dt = game_config.dt

    writer = None
    if log_fh is not None:
        # the log replays the game alone, so it pins the game's derived seed
        writer = TrialLogWriter(log_fh, game_config, seed * 2, mode, trial_id)

    samples: list[TargetSample] = []
    n_ticks = round(game_config.trial_duration * game_config.tick_rate)
    for _ in range(n_ticks):
        out, ustate = user_step(state, mode, robot, user_params, ustate, dt)
        robot = robot.with_handle(out.handle_aim_point)
        attention = estimate_attention(
            out.measured_gaze, screen, state.targets, association_radius,
            attention, dt, hold_window=hold_window,
        )
        command = behavior_step(mode, attention, state, robot, dt)
        robot = move_tip(robot, command, dt)
        if writer is not None:
            writer.tick(robot.tip_screen_point, out.trigger, command.laser_override,
                        command.locked_target)
        emitted = tick(state, robot.tip_screen_point, out.trigger,
                       command.laser_override, command.locked_target, game_config)
        samples.extend(emitted)
        if writer is not None:
            for s in emitted:
                writer.sample(s)

    if writer is not None:
        writer.end(state)
    return TrialResult(samples, state, n_ticks, seed, mode, trial_id)
