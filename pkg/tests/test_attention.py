import math
import random

import pytest

from gazecoop.attention import (
    AUTONOMOUS,
    COOPERATIVE,
    DEFAULT_ASSOCIATION_RADIUS,
    MANUAL,
    SLAVE,
    AttentionEstimate,
    RobotCommand,
    RobotState,
    association_radius,
    behavior_step,
    completable,
    estimate_attention,
    move_tip,
    select_target_autonomous,
)
from gazecoop.game import DISTRACTOR, GameConfig, Target, new_game, required_lase_time
from gazecoop.session import screen_plane_for
from gazecoop.synthetic_user import gaze_ray_to, UserParams

CFG = GameConfig(target_spawn_interval=10_000.0, distractor_spawn_interval=10_000.0)
SCREEN = screen_plane_for(CFG)
DT = CFG.dt
PARAMS = UserParams()


def game_with(*specs, seed=0):
    """specs: (x, y, speed[, kind[, accumulated]])"""
    state = new_game(CFG, seed)
    for i, spec in enumerate(specs):
        x, y, speed = spec[:3]
        kind = spec[3] if len(spec) > 3 else "task"
        acc = spec[4] if len(spec) > 4 else 0.0
        state.targets.append(
            Target(i, kind, x, y, speed, required_lase_time(speed, CFG), acc)
        )
        state.next_target_id = i + 1
        if kind == "task":
            state.total_spawned += 1
    return state


def ray_at(x, y):
    return gaze_ray_to((x, y), PARAMS)


class TestAssociationRadius:
    def test_default_value(self):
        # 700 mm viewing distance, error model at the trackable limit
        assert DEFAULT_ASSOCIATION_RADIUS == pytest.approx(700 * math.tan(math.radians(2.107)), abs=0.01)

    def test_scales_with_distance(self):
        assert association_radius(eye_distance_mm=1400) == pytest.approx(
            2 * DEFAULT_ASSOCIATION_RADIUS, rel=1e-6
        )


class TestEstimateAttention:
    def test_gaze_on_target_focuses_it(self):
        game = game_with((100.0, 50.0, 200.0))
        est = estimate_attention(ray_at(100.0, 50.0), SCREEN, game.targets, 40.0, None, DT)
        assert est.focused_target == 0
        assert est.gaze_screen_point == pytest.approx((100.0, 50.0), abs=1e-6)

    def test_distractor_never_focused(self):
        game = game_with((100.0, 50.0, 200.0, DISTRACTOR))
        est = estimate_attention(ray_at(100.0, 50.0), SCREEN, game.targets, 40.0, None, DT)
        assert est.focused_target is None
        assert est.gaze_screen_point is not None

    def test_nearest_target_wins(self):
        game = game_with((0.0, 0.0, 200.0), (30.0, 0.0, 200.0))
        est = estimate_attention(ray_at(25.0, 0.0), SCREEN, game.targets, 60.0, None, DT)
        assert est.focused_target == 1

    def test_untracked_holds_within_window(self):
        game = game_with((100.0, 50.0, 200.0))
        est = estimate_attention(ray_at(100.0, 50.0), SCREEN, game.targets, 40.0, None, DT)
        for _ in range(3):  # 50 ms < hold window
            est = estimate_attention(None, SCREEN, game.targets, 40.0, est, DT)
        assert est.focused_target == 0
        assert est.gaze_screen_point is not None

    def test_untracked_decays_after_window(self):
        game = game_with((100.0, 50.0, 200.0))
        est = estimate_attention(ray_at(100.0, 50.0), SCREEN, game.targets, 40.0, None, DT)
        for _ in range(12):  # 200 ms > hold window
            est = estimate_attention(None, SCREEN, game.targets, 40.0, est, DT)
        assert est.focused_target is None
        assert est.gaze_screen_point is None

    def test_offscreen_gaze_clears_focus(self):
        game = game_with((100.0, 50.0, 200.0))
        est = estimate_attention(ray_at(100.0, 50.0), SCREEN, game.targets, 40.0, None, DT)
        est = estimate_attention(ray_at(5000.0, 0.0), SCREEN, game.targets, 40.0, est, DT)
        assert est.gaze_screen_point is None
        assert est.focused_target is None

    def test_focus_age_accumulates(self):
        game = game_with((100.0, 50.0, 200.0))
        est = None
        for _ in range(6):
            est = estimate_attention(ray_at(100.0, 50.0), SCREEN, game.targets, 40.0, est, DT)
        assert est.focus_age == pytest.approx(5 * DT)

    def test_invalid_radius(self):
        with pytest.raises(ValueError):
            estimate_attention(None, SCREEN, [], 0.0, None, DT)


class TestManualMode:
    def test_always_holds(self):
        rng = random.Random(0)
        for _ in range(100):
            game = game_with((rng.uniform(-400, 400), rng.uniform(-200, 200), 300.0))
            att = AttentionEstimate((rng.uniform(-400, 400), rng.uniform(-200, 200)), 0, 1.0)
            robot = RobotState(
                tip_screen_point=(rng.uniform(-100, 100), rng.uniform(-100, 100)),
                handle_aim_point=(0.0, 0.0),
            )
            cmd = behavior_step(MANUAL, att, game, robot, DT)
            assert cmd.tip_screen_target is None
            assert not cmd.laser_override
            assert cmd.locked_target is None


class TestSlaveMode:
    def test_follows_gaze_point(self):
        game = game_with((0.0, 0.0, 200.0))
        att = AttentionEstimate((100.0, 50.0), 0, 0.0)
        cmd = behavior_step(SLAVE, att, game, RobotState(), DT)
        assert cmd.tip_screen_target == pytest.approx((100.0, 50.0))
        assert not cmd.laser_override and cmd.locked_target is None

    def test_ignores_task_state(self):
        att = AttentionEstimate((80.0, -30.0), None, 0.0)
        robot = RobotState()
        a = game_with((10.0, 10.0, 100.0), (50.0, 50.0, 300.0))
        b = game_with((50.0, 50.0, 300.0, DISTRACTOR), (10.0, 10.0, 100.0, DISTRACTOR))
        cmd_a = behavior_step(SLAVE, att, a, robot, DT)
        cmd_b = behavior_step(SLAVE, att, b, robot, DT)
        assert cmd_a == cmd_b

    def test_holds_without_gaze(self):
        game = game_with((0.0, 0.0, 200.0))
        cmd = behavior_step(SLAVE, AttentionEstimate(), game, RobotState(), DT)
        assert cmd.tip_screen_target is None

    def test_clamps_to_workspace(self):
        game = game_with((0.0, 0.0, 200.0))
        att = AttentionEstimate((400.0, 0.0), None, 0.0)
        robot = RobotState(workspace_radius=200.0)
        cmd = behavior_step(SLAVE, att, game, robot, DT)
        assert math.hypot(*cmd.tip_screen_target) == pytest.approx(200.0)


class TestAutonomousMode:
    def test_ignores_gaze(self):
        game = game_with((100.0, 0.0, 200.0))
        robot = RobotState()
        cmds = set()
        for gaze in [None, (0.0, 0.0), (-300.0, 100.0)]:
            att = AttentionEstimate(gaze, None, 0.0)
            cmds.add(behavior_step(AUTONOMOUS, att, game, robot, DT))
        assert len(cmds) == 1

    def test_locks_and_overrides_in_range(self):
        game = game_with((50.0, 0.0, 200.0))
        robot = RobotState(tip_screen_point=(0.0, 0.0))
        cmd = behavior_step(AUTONOMOUS, AttentionEstimate(), game, robot, DT)
        assert cmd.locked_target == 0
        assert cmd.laser_override  # within the 100 mm laser range

    def test_no_override_out_of_range(self):
        game = game_with((400.0, 200.0, 200.0))
        robot = RobotState(tip_screen_point=(0.0, 0.0))
        cmd = behavior_step(AUTONOMOUS, AttentionEstimate(), game, robot, DT)
        assert cmd.locked_target == 0
        assert not cmd.laser_override

    def test_holds_when_nothing_completable(self):
        game = game_with((0.0, 0.0, 200.0, DISTRACTOR))
        cmd = behavior_step(AUTONOMOUS, AttentionEstimate(), game, RobotState(), DT)
        assert cmd == RobotCommand()

    def test_retains_lock_between_plans(self):
        game = game_with((0.0, 100.0, 100.0), (0.0, 90.0, 100.0))
        robot = RobotState(tip_screen_point=(0.0, 95.0), locked_target=0)
        cmd = behavior_step(AUTONOMOUS, AttentionEstimate(), game, robot, DT)
        assert cmd.locked_target == 0  # target 1 is more urgent but job 0 is held


class TestSelectTargetAutonomous:
    def test_single_target(self):
        game = game_with((0.0, 100.0, 200.0))
        assert select_target_autonomous(game, RobotState()) == 0

    def test_earliest_deadline_first(self):
        # one ~0.7 s from the bottom (still completable), one 3 s
        game = game_with(
            (0.0, CFG.bottom_y + 300.0, 450.0),
            (100.0, CFG.bottom_y + 900.0, 300.0),
        )
        robot = RobotState(tip_screen_point=(0.0, CFG.bottom_y + 300.0))
        assert select_target_autonomous(game, robot) == 0

    def test_skips_uncompletable(self):
        game = game_with(
            (0.0, CFG.bottom_y + 10.0, 400.0),  # hits bottom in 25 ms
            (100.0, 200.0, 200.0),
        )
        robot = RobotState(tip_screen_point=(100.0, 200.0))
        assert select_target_autonomous(game, robot) == 1

    def test_only_distractors(self):
        game = game_with((0.0, 0.0, 200.0, DISTRACTOR))
        assert select_target_autonomous(game, RobotState()) is None

    def test_tie_breaks_by_distance_then_id(self):
        game = game_with((200.0, 100.0, 200.0), (50.0, 100.0, 200.0))
        robot = RobotState(tip_screen_point=(50.0, 100.0))
        assert select_target_autonomous(game, robot) == 1
        centred = RobotState(tip_screen_point=(125.0, 100.0))
        assert select_target_autonomous(game, centred) == 0  # equidistant, lowest id


class TestCooperativeMode:
    def test_locks_focused_target(self):
        game = game_with((100.0, 50.0, 200.0))
        att = AttentionEstimate((100.0, 52.0), 0, 0.1)
        cmd = behavior_step(COOPERATIVE, att, game, RobotState(), DT)
        assert cmd.locked_target == 0
        assert cmd.laser_override
        assert cmd.tip_screen_target == pytest.approx((100.0, 50.0))

    def test_keeps_lock_when_gaze_departs(self):
        game = game_with((0.0, 0.0, 100.0), (300.0, 100.0, 100.0))
        robot = RobotState(tip_screen_point=(0.0, 0.0), locked_target=0)
        att = AttentionEstimate((300.0, 100.0), 1, 0.5)  # gaze on the next object
        cmd = behavior_step(COOPERATIVE, att, game, robot, DT)
        assert cmd.locked_target == 0
        assert cmd.laser_override

    def test_releases_on_completion_and_follows_gaze(self):
        # locked target no longer on the board: robot catches up with the gaze
        game = game_with((300.0, 100.0, 100.0))
        game.targets[0].id = 7
        robot = RobotState(tip_screen_point=(0.0, 0.0), locked_target=99)
        att = AttentionEstimate((150.0, -40.0), None, 0.0)
        cmd = behavior_step(COOPERATIVE, att, game, robot, DT)
        assert cmd.locked_target is None
        assert cmd.tip_screen_target == pytest.approx((150.0, -40.0))

    def test_never_locks_distractor(self):
        game = game_with((100.0, 50.0, 200.0, DISTRACTOR))
        att = AttentionEstimate((100.0, 50.0), 0, 0.1)  # stale/incorrect focus id
        cmd = behavior_step(COOPERATIVE, att, game, RobotState(), DT)
        assert cmd.locked_target is None

    def test_holds_on_untracked_without_lock(self):
        game = game_with((100.0, 50.0, 200.0))
        cmd = behavior_step(COOPERATIVE, AttentionEstimate(), game, RobotState(), DT)
        assert cmd == RobotCommand()

    def test_lock_persists_through_long_dropout(self):
        game = game_with((0.0, 0.0, 100.0))
        robot = RobotState(tip_screen_point=(0.0, 0.0), locked_target=0)
        cmd = behavior_step(COOPERATIVE, AttentionEstimate(), game, robot, DT)
        assert cmd.locked_target == 0

    def test_drops_uncompletable_lock(self):
        game = game_with((0.0, CFG.bottom_y + 5.0, 450.0))
        robot = RobotState(tip_screen_point=(400.0, 200.0), locked_target=0)
        att = AttentionEstimate()
        cmd = behavior_step(COOPERATIVE, att, game, robot, DT)
        assert cmd.locked_target is None


class TestMoveTip:
    def test_target_at_tip_unchanged(self):
        robot = RobotState(tip_screen_point=(10.0, 10.0))
        out = move_tip(robot, RobotCommand((10.0, 10.0)), DT)
        assert out.tip_screen_point == (10.0, 10.0)

    def test_arrives_exactly_within_step(self):
        robot = RobotState(tip_screen_point=(0.0, 0.0), tip_speed_limit=1000.0)
        out = move_tip(robot, RobotCommand((10.0, 0.0)), 1.0 / 60.0)
        assert out.tip_screen_point == pytest.approx((10.0, 0.0))

    def test_velocity_limit(self):
        robot = RobotState(tip_screen_point=(0.0, 0.0), tip_speed_limit=600.0)
        out = move_tip(robot, RobotCommand((100.0, 0.0)), 1.0 / 60.0)
        assert out.tip_screen_point == pytest.approx((10.0, 0.0))

    def test_clamps_target_to_workspace_boundary(self):
        robot = RobotState(
            tip_screen_point=(0.0, 0.0), handle_aim_point=(0.0, 0.0),
            tip_speed_limit=1e9, workspace_radius=200.0,
        )
        out = move_tip(robot, RobotCommand((600.0, 0.0)), DT)
        assert out.tip_screen_point == pytest.approx((200.0, 0.0))

    def test_hold_keeps_offset_as_handle_moves(self):
        robot = RobotState(tip_screen_point=(20.0, 0.0), handle_aim_point=(0.0, 0.0))
        robot = robot.with_handle((100.0, 50.0))
        assert robot.tip_screen_point == pytest.approx((120.0, 50.0))
        out = move_tip(robot, RobotCommand(), DT)
        assert out.tip_screen_point == pytest.approx((120.0, 50.0))

    def test_workspace_invariant_random(self):
        rng = random.Random(1)
        robot = RobotState()
        for _ in range(500):
            robot = robot.with_handle((rng.uniform(-400, 400), rng.uniform(-250, 250)))
            target = (rng.uniform(-500, 500), rng.uniform(-300, 300))
            robot = move_tip(robot, RobotCommand(target), DT)
            d = math.hypot(
                robot.tip_screen_point[0] - robot.handle_aim_point[0],
                robot.tip_screen_point[1] - robot.handle_aim_point[1],
            )
            assert d <= robot.workspace_radius + 1e-9

    def test_invalid_dt(self):
        with pytest.raises(ValueError):
            move_tip(RobotState(), RobotCommand(), 0.0)


class TestRobotCommandInvariant:
    def test_override_requires_lock(self):
        with pytest.raises(ValueError):
            RobotCommand((0.0, 0.0), laser_override=True, locked_target=None)


class TestCompletable:
    def test_with_and_without_cushion(self):
        game = game_with((0.0, CFG.bottom_y + 100.0, 200.0))
        t = game.targets[0]
        # 0.5 s to bottom; required lase 1.2 s: not completable
        robot = RobotState(tip_screen_point=(0.0, t.y))
        assert not completable(t, game, robot)
        assert completable(t, game, robot, cushion=1.0)
