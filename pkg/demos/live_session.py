"""Drive a live session the way the websocket server does, with a scripted
"player" sending pointer/gaze-proxy inputs, then replay the session log
headlessly and compare final scores.

Run: python demos/live_session.py

(For actual human play: `gazecoop serve --port 8000` plus the frontend/
client; this demo exercises the same session machinery without a browser.)
"""

import io
import math

from gazecoop import GameConfig, InputMessage, LiveSession, SessionConfig
from gazecoop.realtime import replay_session_log

config = SessionConfig(
    mode="cooperative",
    game=GameConfig(trial_duration=20.0),
    seed=99,
)

log = io.StringIO()
session = LiveSession(config, log_fh=log)
session.start()
print(f"session {session.id[:8]}... started in {config.mode} mode")

ticks = round(config.game.trial_duration * config.game.tick_rate)
for i in range(ticks):
    t = i / config.game.tick_rate
    # scripted pointer: sweep around the middle of the screen; gaze proxy
    # follows with a slight offset; trigger held most of the time
    u = 0.5 + 0.25 * math.sin(t * 1.7)
    v = 0.45 + 0.2 * math.sin(t * 0.9 + 1.0)
    session.ingest(
        InputMessage(
            timestamp=t,
            handle_point=(u, v),
            gaze_point=(u + 0.01, v - 0.01),
            trigger=(i % 9) != 0,
        )
    )
    snapshot = session.step()

print(f"session ended: status {snapshot.status!r}")
print(f"score: {snapshot.score}")
print(f"stale inputs dropped: {snapshot.stale_inputs}")

final = replay_session_log(log.getvalue().splitlines())
print(f"\nheadless replay of the input log: {final.score}")
assert final.score == snapshot.score
print("final score reproduced bit-exactly")
