"""Mecanum wheel kinematics: body twist <-> four wheel angular velocities.

Wheel layout is the standard X configuration (45 degree rollers), wheels
ordered front-left, front-right, rear-left, rear-right. Positive wheel speed
drives the vehicle forward.
"""

from __future__ import annotations

from dataclasses import dataclass

from .geometry import Twist


@dataclass(frozen=True)
class ChassisGeometry:
    """Chassis dimensions. Only wheel_radius and the sum L+W enter the
    velocity map; L and W are kept separate for footprint bookkeeping."""

    wheel_radius: float = 0.040    # m (80 mm wheels)
    half_wheelbase: float = 0.075  # m, L: wheel axle to chassis center, longitudinal
    half_track: float = 0.075      # m, W: wheel center to chassis center, lateral

    def __post_init__(self):
        if self.wheel_radius <= 0 or self.half_wheelbase <= 0 or self.half_track <= 0:
            raise ValueError("chassis dimensions must be positive")

    @property
    def lw_sum(self) -> float:
        return self.half_wheelbase + self.half_track


@dataclass(frozen=True)
class WheelSpeeds:
    """Angular velocities of the four wheels, rad/s at the output shaft."""

    fl: float
    fr: float
    rl: float
    rr: float

    def as_tuple(self):
        return (self.fl, self.fr, self.rl, self.rr)


def inverse_kinematics(t: Twist, g: ChassisGeometry = ChassisGeometry()) -> WheelSpeeds:
    """Wheel speeds that realize a body twist exactly (rollers ideal)."""
    r = g.wheel_radius
    k = g.lw_sum
    return WheelSpeeds(
        fl=(t.vx - t.vy - k * t.omega) / r,
        fr=(t.vx + t.vy + k * t.omega) / r,
        rl=(t.vx + t.vy - k * t.omega) / r,
        rr=(t.vx - t.vy + k * t.omega) / r,
    )


def forward_kinematics(w: WheelSpeeds, g: ChassisGeometry = ChassisGeometry()) -> Twist:
    """Body twist from wheel speeds, least-squares pseudo-inverse of the
    wheel map. Inconsistent wheel sets project onto the realizable subspace
    (the null-space component is discarded)."""
    r = g.wheel_radius
    k = g.lw_sum
    return Twist(
        vx=r * (w.fl + w.fr + w.rl + w.rr) / 4.0,
        vy=r * (-w.fl + w.fr + w.rl - w.rr) / 4.0,
        omega=r * (-w.fl + w.fr - w.rl + w.rr) / (4.0 * k),
    )
