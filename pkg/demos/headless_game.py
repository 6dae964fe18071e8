"""Run one headless trial of the falling-targets game with a synthetic
player in cooperative mode, then prove the run replays bit-identically.

Run: python demos/headless_game.py
"""

import io

from gazecoop import GameConfig, UserParams, performance, run_trial
from gazecoop.game import replay_trial_log

config = GameConfig(trial_duration=40.0)
params = UserParams()

log = io.StringIO()
result = run_trial("cooperative", config, params, seed=7, trial_id="demo", log_fh=log)

print(f"trial over after {result.ticks} ticks "
      f"({config.trial_duration:.0f} s at {config.tick_rate:.0f} Hz)")
print(f"task targets: {result.state.total_spawned}, "
      f"completed {result.state.completed}, failed {result.state.failed}")
print(f"performance: {performance(result.samples):.3f}")

print("\nfirst few per-target outcomes:")
for s in result.samples[:8]:
    word = "completed" if s.completed else "failed"
    print(f"  t={s.timestamp:5.2f}s  target {s.target_id:3d}  "
          f"{s.speed:5.1f} mm/s  {word}")

# the JSONL trial log pins the seed and every per-tick input, so the game
# can be reconstructed exactly
replayed = replay_trial_log(log.getvalue().splitlines())
print("\nreplay check:")
print(f"  completed {replayed.completed} (live {result.state.completed})")
print(f"  failed    {replayed.failed} (live {result.state.failed})")
assert replayed.completed == result.state.completed
assert replayed.failed == result.state.failed
assert replayed.time == result.state.time
print("  bit-identical state reproduced")
