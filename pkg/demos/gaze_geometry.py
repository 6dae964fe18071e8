"""Walk through the gaze-ray geometry: calibrate the tracker against a
screen, detach it, and lift live local gaze rays into world coordinates.

Run: python demos/gaze_geometry.py
"""

import numpy as np

from gazecoop import (
    GazeRay,
    Pose,
    ScreenPlane,
    angular_shift,
    calibrate_tracker_to_screen,
    compose,
    invert,
    local_gaze,
    ray_plane_intersection,
    world_gaze,
)
from gazecoop.geometry import SCREEN_CENTRE, TRACKER_BASE, WORLD


def rot_z(deg):
    c, s = np.cos(np.radians(deg)), np.sin(np.radians(deg))
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


# --- calibration phase: tracker attached to the screen -------------------
# Both poses are known from motion capture at this point.
world_to_screen = Pose(rot_z(10.0), [100.0, 40.0, 0.0], WORLD, SCREEN_CENTRE)
world_to_tracker = Pose(rot_z(25.0), [80.0, -30.0, 20.0], WORLD, TRACKER_BASE)

stored = calibrate_tracker_to_screen(world_to_screen, world_to_tracker)
print("stored base-to-screen translation (mm):", np.round(stored.translation, 3))

# the stored transform closes the loop: screen pose * stored == tracker pose
closure = compose(world_to_screen, stored)
print("calibration closure error:",
      np.abs(closure.as_matrix() - world_to_tracker.as_matrix()).max())

# --- live phase: tracker detached, carried by the robot ------------------
# The tracker reports eye positions and the on-screen hit in its own
# (virtual) screen frame; combine with the live base pose to get world rays.
live_world_to_tracker = Pose(rot_z(-15.0), [250.0, 60.0, 35.0], WORLD, TRACKER_BASE)

ray_local = local_gaze(
    eye_left=[-32.0, 5.0, 640.0],
    eye_right=[30.0, 4.0, 642.0],
    screen_point=[120.0, -80.0, 0.0],
)
print("\nlocal ray origin:", np.round(ray_local.origin, 2))
print("local ray direction:", np.round(ray_local.direction, 4))

ray_world = world_gaze(live_world_to_tracker, stored, ray_local)
print("world ray origin:", np.round(ray_world.origin, 2))
print("world ray direction:", np.round(ray_world.direction, 4))

# angles survive the rigid transform
second_local = local_gaze([-32.0, 5.0, 640.0], [30.0, 4.0, 642.0], [-200.0, 60.0, 0.0])
second_world = world_gaze(live_world_to_tracker, stored, second_local)
print("\ngaze shift between the two fixations:")
print("  in the screen frame:", round(angular_shift(ray_local, second_local), 4), "deg")
print("  in the world frame: ", round(angular_shift(ray_world, second_world), 4), "deg")

# --- projecting a ray onto a game screen ----------------------------------
screen = ScreenPlane(Pose(np.eye(3), np.zeros(3), WORLD, SCREEN_CENTRE), 915.0, 515.0)
ray = GazeRay([50.0, 20.0, 700.0], [0.05, -0.1, -1.0], WORLD)
print("\nscreen hit (mm from centre):", np.round(ray_plane_intersection(ray, screen), 2))
print("parallel ray misses:", ray_plane_intersection(GazeRay([0, 0, 700], [1, 0, 0], WORLD), screen))
