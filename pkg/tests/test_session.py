import io

from gazecoop.game import GameConfig, replay_trial_log
from gazecoop.session import run_trial, screen_plane_for
from gazecoop.synthetic_user import UserParams

CFG = GameConfig(trial_duration=15.0)


class TestRunTrial:
    def test_deterministic(self):
        a = run_trial("cooperative", CFG, UserParams(), seed=3)
        b = run_trial("cooperative", CFG, UserParams(), seed=3)
        assert [s.to_dict() for s in a.samples] == [s.to_dict() for s in b.samples]
        assert a.state.completed == b.state.completed

    def test_seed_changes_outcome(self):
        a = run_trial("cooperative", CFG, UserParams(), seed=3)
        b = run_trial("cooperative", CFG, UserParams(), seed=4)
        assert [s.to_dict() for s in a.samples] != [s.to_dict() for s in b.samples]

    def test_trial_log_replays_to_identical_state(self):
        log = io.StringIO()
        result = run_trial("cooperative", CFG, UserParams(), seed=7, trial_id="t",
                           log_fh=log)
        replayed = replay_trial_log(log.getvalue().splitlines())
        assert replayed.completed == result.state.completed
        assert replayed.failed == result.state.failed
        assert replayed.total_spawned == result.state.total_spawned
        assert replayed.time == result.state.time

    def test_tick_count(self):
        result = run_trial("manual", CFG, UserParams(), seed=1)
        assert result.ticks == round(CFG.trial_duration * CFG.tick_rate)
        assert result.state.tick_index == result.ticks

    def test_all_modes_run(self):
        for mode in ("manual", "slave", "autonomous", "cooperative"):
            result = run_trial(mode, GameConfig(trial_duration=5.0), UserParams(), seed=2)
            assert result.state.time > 0


class TestScreenPlane:
    def test_dimensions_follow_config(self):
        plane = screen_plane_for(CFG)
        assert plane.width == CFG.screen_width
        assert plane.height == CFG.screen_height
