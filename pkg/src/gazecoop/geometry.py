"""Frames, rigid transforms and gaze-ray construction.

Conventions used throughout the package:
  * lengths in millimetres, angles in degrees at the API surface
  * a ``Pose`` with ``from_frame=A, to_frame=B`` is the rigid transform
    that maps coordinates expressed in B into A ("the pose of B seen
    from A"), so transform chains read left to right:
    ``compose(world_to_tracker, tracker_to_screen)`` maps screen -> world.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateRayError, FrameMismatchError

# Canonical frame labels (FrameId is any string; these three always exist).
WORLD = "world"
TRACKER_BASE = "tracker_base"
SCREEN_CENTRE = "screen_centre"

ORTHONORMAL_TOL = 1e-9
PARALLEL_TOL = 1e-9


def _check_rotation(r: np.ndarray) -> None:
    if r.shape != (3, 3):
        raise ValueError(f"rotation must be 3x3, got {r.shape}")
    err = np.abs(r @ r.T - np.eye(3)).max()
    if err > ORTHONORMAL_TOL:
        raise ValueError(f"rotation not orthonormal (max |R R^T - I| = {err:.3e})")
    det = np.linalg.det(r)
    if abs(det - 1.0) > ORTHONORMAL_TOL:
        raise ValueError(f"rotation determinant {det} != +1")


@dataclass(frozen=True, eq=False)
class Pose:
    """Rigid transform mapping ``to_frame`` coordinates into ``from_frame``."""

    rotation: np.ndarray
    translation: np.ndarray
    from_frame: str = WORLD
    to_frame: str = WORLD

    def __eq__(self, other):
        if not isinstance(other, Pose):
            return NotImplemented
        return (
            self.from_frame == other.from_frame
            and self.to_frame == other.to_frame
            and np.array_equal(self.rotation, other.rotation)
            and np.array_equal(self.translation, other.translation)
        )

    def __post_init__(self):
        r = np.asarray(self.rotation, dtype=float)
        t = np.asarray(self.translation, dtype=float).reshape(3)
        _check_rotation(r)
        r.setflags(write=False)
        t.setflags(write=False)
        object.__setattr__(self, "rotation", r)
        object.__setattr__(self, "translation", t)

    @classmethod
    def identity(cls, frame: str = WORLD) -> "Pose":
        return cls(np.eye(3), np.zeros(3), frame, frame)

    @classmethod
    def from_quaternion(cls, q, translation, from_frame: str, to_frame: str) -> "Pose":
        """Boundary constructor: unit-normalizes ``q = (w, x, y, z)``."""
        w, x, y, z = (float(v) for v in q)
        n = math.sqrt(w * w + x * x + y * y + z * z)
        if n == 0.0:
            raise ValueError("zero quaternion")
        w, x, y, z = w / n, x / n, y / n, z / n
        r = np.array([
            [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
            [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
            [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
        ])
        return cls(r, translation, from_frame, to_frame)

    def as_matrix(self) -> np.ndarray:
        """4x4 homogeneous matrix."""
        m = np.eye(4)
        m[:3, :3] = self.rotation
        m[:3, 3] = self.translation
        return m

    def transform_point(self, point) -> np.ndarray:
        """Map a point in ``to_frame`` coordinates into ``from_frame``."""
        return self.rotation @ np.asarray(point, dtype=float) + self.translation

    def transform_direction(self, direction) -> np.ndarray:
        """Rotate a direction vector (no translation)."""
        return self.rotation @ np.asarray(direction, dtype=float)


@dataclass(frozen=True, eq=False)
class GazeRay:
    """Half-line from the eye midpoint along the viewing direction.

    ``degraded`` flags monocular samples (one eye visible); the direction
    is still usable but downstream consumers may want to know.
    """

    origin: np.ndarray
    direction: np.ndarray
    frame: str = WORLD
    degraded: bool = False

    def __eq__(self, other):
        if not isinstance(other, GazeRay):
            return NotImplemented
        return (
            self.frame == other.frame
            and self.degraded == other.degraded
            and np.array_equal(self.origin, other.origin)
            and np.array_equal(self.direction, other.direction)
        )

    def __post_init__(self):
        o = np.asarray(self.origin, dtype=float).reshape(3)
        d = np.asarray(self.direction, dtype=float).reshape(3)
        n = np.linalg.norm(d)
        if abs(n - 1.0) > ORTHONORMAL_TOL:
            if n < 1e-12:
                raise DegenerateRayError("zero-length gaze direction")
            d = d / n
        o.setflags(write=False)
        d.setflags(write=False)
        object.__setattr__(self, "origin", o)
        object.__setattr__(self, "direction", d)

    def point_at(self, lam: float) -> np.ndarray:
        """Point ``origin + lam * direction``; lam must be >= 0."""
        if lam < 0:
            raise ValueError("ray parameter must be >= 0")
        return self.origin + lam * self.direction


@dataclass(frozen=True)
class ScreenPlane:
    """Finite rectangle; ``pose`` places the screen centre in a parent frame.

    Local axes: x right, y up, z = outward normal of the front face.
    """

    pose: Pose
    width: float
    height: float

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise ValueError("screen width/height must be positive")

    @property
    def frame(self) -> str:
        return self.pose.from_frame


def compose(a: Pose, b: Pose) -> Pose:
    """Chain two poses; equivalent to the 4x4 homogeneous product a @ b."""
    if a.to_frame != b.from_frame:
        raise FrameMismatchError(
            f"cannot compose {a.from_frame}<-{a.to_frame} with {b.from_frame}<-{b.to_frame}"
        )
    return Pose(
        a.rotation @ b.rotation,
        a.rotation @ b.translation + a.translation,
        a.from_frame,
        b.to_frame,
    )


def invert(p: Pose) -> Pose:
    """Inverse transform; swaps the frame pair."""
    rt = p.rotation.T
    return Pose(rt, -(rt @ p.translation), p.to_frame, p.from_frame)


def local_gaze(eye_left, eye_right, screen_point, frame: str = SCREEN_CENTRE) -> GazeRay:
    """Gaze ray in the tracker's screen frame.

    The origin is the midpoint of the two eye positions; the direction
    points from that midpoint toward the on-screen gaze intersection.
    Pass ``eye_right=None`` for a monocular sample: the single visible
    eye is used and the ray is flagged ``degraded``.
    """
    left = np.asarray(eye_left, dtype=float)
    degraded = eye_right is None
    midpoint = left if degraded else 0.5 * (left + np.asarray(eye_right, dtype=float))
    direction = np.asarray(screen_point, dtype=float) - midpoint
    if np.linalg.norm(direction) < 1e-12:
        raise DegenerateRayError("screen point coincides with the eye midpoint")
    return GazeRay(midpoint, direction, frame, degraded=degraded)


def calibrate_tracker_to_screen(world_to_screen: Pose, world_to_tracker: Pose) -> Pose:
    """One-off calibration while the tracker is attached to the screen.

    Returns the stored base-to-screen transform, i.e. the pose satisfying
    ``compose(world_to_screen, stored) == world_to_tracker``. It stays
    valid after the tracker detaches because base and (virtual) screen
    frame are rigidly coupled.
    """
    if world_to_screen.from_frame != world_to_tracker.from_frame:
        raise FrameMismatchError(
            f"calibration poses must share a reference frame, got "
            f"{world_to_screen.from_frame!r} vs {world_to_tracker.from_frame!r}"
        )
    return compose(invert(world_to_screen), world_to_tracker)


def world_gaze(world_to_tracker: Pose, stored_base_to_screen: Pose, local: GazeRay) -> GazeRay:
    """Lift a screen-frame gaze ray into world coordinates in real time.

    The current screen pose is recovered from the live tracker-base pose
    and the stored calibration, then applied to the local ray.
    """
    if local.frame != stored_base_to_screen.from_frame:
        raise FrameMismatchError(
            f"local ray is in {local.frame!r}, calibration stores "
            f"{stored_base_to_screen.from_frame!r}"
        )
    world_to_screen = compose(world_to_tracker, invert(stored_base_to_screen))
    return GazeRay(
        world_to_screen.transform_point(local.origin),
        world_to_screen.transform_direction(local.direction),
        world_to_screen.from_frame,
        degraded=local.degraded,
    )


def angular_shift(g1: GazeRay, g2: GazeRay) -> float:
    """Angle between two gaze directions, in degrees.

    The cosine is clamped to [-1, 1] so rounding never produces NaN.
    """
    if g1.frame != g2.frame:
        raise FrameMismatchError(f"rays in different frames: {g1.frame!r} vs {g2.frame!r}")
    c = float(np.dot(g1.direction, g2.direction))
    return math.degrees(math.acos(max(-1.0, min(1.0, c))))


def ray_plane_intersection(ray: GazeRay, plane: ScreenPlane):
    """In-plane hit coordinates (mm, relative to the screen centre) or None.

    None when the ray is parallel to the plane, hits behind its origin,
    approaches from the back face, or lands outside the screen bounds.
    """
    if ray.frame != plane.frame:
        raise FrameMismatchError(f"ray in {ray.frame!r}, plane in {plane.frame!r}")
    r = plane.pose.rotation
    centre = plane.pose.translation
    normal = r[:, 2]
    denom = float(np.dot(ray.direction, normal))
    if abs(denom) < PARALLEL_TOL:
        return None
    if denom > 0:  # back face
        return None
    lam = float(np.dot(centre - ray.origin, normal)) / denom
    if lam < 0:
        return None
    hit = ray.origin + lam * ray.direction
    rel = hit - centre
    u = float(np.dot(rel, r[:, 0]))
    v = float(np.dot(rel, r[:, 1]))
    if abs(u) > plane.width / 2 or abs(v) > plane.height / 2:
        return None
    return np.array([u, v])
