"""Core geometric and image-plane primitives shared by every module.

Conventions (fixed once, used everywhere):
  * world frame: right-handed, x forward at theta=0, y left, theta CCW-positive
  * image frame: row 0 at top, column 0 at left, 512x320 (width x height)
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import IntEnum

IMAGE_WIDTH = 512   # pixels
IMAGE_HEIGHT = 320  # pixels


class ObjectClass(IntEnum):
    """Object-branch segmentation classes. Integer codes are part of the
    mask file format and must stay stable."""

    BACKGROUND = 0
    PEDESTRIAN = 1
    AMBER_LIGHT = 2
    RED_LIGHT = 3
    GREEN_LIGHT = 4
    OBSTACLE = 5


N_OBJECT_CLASSES = 6
N_DRIVABLE_CLASSES = 2  # 0=background, 1=drivable
N_LANE_CLASSES = 2      # 0=background, 1=lane marking


def normalize_angle(theta: float) -> float:
    """Wrap an angle to (-pi, pi]."""
    r = math.remainder(theta, math.tau)
    if r <= -math.pi:
        r += math.tau
    return r


@dataclass(frozen=True)
class Pose2D:
    """Vehicle pose in the world frame. theta is normalized to (-pi, pi]."""

    x: float = 0.0      # m
    y: float = 0.0      # m
    theta: float = 0.0  # rad, CCW-positive

    def __post_init__(self):
        object.__setattr__(self, "theta", normalize_angle(self.theta))


@dataclass(frozen=True)
class Twist:
    """Body-frame velocity command: longitudinal, transverse (left-positive),
    angular (CCW-positive)."""

    vx: float = 0.0     # m/s
    vy: float = 0.0     # m/s
    omega: float = 0.0  # rad/s

    def __post_init__(self):
        if not (math.isfinite(self.vx) and math.isfinite(self.vy)
                and math.isfinite(self.omega)):
            raise ValueError(f"non-finite twist ({self.vx}, {self.vy}, {self.omega})")


@dataclass(frozen=True)
class BoundingBox:
    """Axis-aligned detection box in pixel edge coordinates.

    x_max/y_max are exclusive, so (x_max - x_min) * (y_max - y_min) is the
    pixel area of the box.
    """

    class_id: int
    score: float
    x_min: int
    y_min: int
    x_max: int
    y_max: int

    def __post_init__(self):
        if not 0.0 <= self.score <= 1.0:
            raise ValueError(f"score {self.score} outside [0, 1]")
        if self.x_min >= self.x_max or self.y_min >= self.y_max:
            raise ValueError("degenerate box")
        if self.x_min < 0 or self.y_min < 0 \
                or self.x_max > IMAGE_WIDTH or self.y_max > IMAGE_HEIGHT:
            raise ValueError("box outside image bounds")

    @property
    def area(self) -> int:
        return (self.x_max - self.x_min) * (self.y_max - self.y_min)


def iou_boxes(a: BoundingBox, b: BoundingBox) -> float:
    """Intersection-over-union of two boxes; 0.0 when disjoint."""
    iw = min(a.x_max, b.x_max) - max(a.x_min, b.x_min)
    ih = min(a.y_max, b.y_max) - max(a.y_min, b.y_min)
    if iw <= 0 or ih <= 0:
        return 0.0
    inter = iw * ih
    return inter / (a.area + b.area - inter)


def pose_integrate(p: Pose2D, t: Twist, dt: float) -> Pose2D:
    """Apply a constant body twist over dt seconds.

    Uses the exact SE(2) exponential (circular-arc integration); falls back
    to first-order Euler when |omega|*dt is below 1e-9, where the arc and
    the chord coincide to machine precision.
    """
    if dt <= 0:
        raise ValueError("dt must be > 0")
    x, y, th = _pose_step(p.x, p.y, p.theta, t.vx, t.vy, t.omega, dt)
    return Pose2D(x, y, th)


def _pose_step(x: float, y: float, th: float,
               vx: float, vy: float, omega: float, dt: float):
    """Scalar pose update shared with the batched plant kernels. Any change
    here must be mirrored in kernels.py to keep both paths bit-identical."""
    if abs(omega) * dt < 1e-9:
        c, s = math.cos(th), math.sin(th)
        return (x + (vx * c - vy * s) * dt,
                y + (vx * s + vy * c) * dt,
                th + omega * dt)
    th1 = th + omega * dt
    ds = math.sin(th1) - math.sin(th)
    dc = math.cos(th1) - math.cos(th)
    return (x + (vx * ds + vy * dc) / omega,
            y + (-vx * dc + vy * ds) / omega,
            th1)
