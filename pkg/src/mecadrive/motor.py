"""Microcontroller-side motor control simulation.

Four DC motors behind 150:1 gearboxes, each modelled as a first-order lag
from PWM duty to output-shaft angular velocity. Encoders are quantized
counters; a PID loop runs on a fixed 0.1 s tick and measures velocity from
encoder count differences, exactly like the real interrupt-driven firmware.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .kinematics import WheelSpeeds

CONTROL_DT = 0.1  # s, fixed control tick


@dataclass(frozen=True)
class MotorModel:
    """First-order plant: d(omega)/dt = (gain*duty - omega) / time_constant."""

    gain: float = 20.0          # (rad/s) per unit duty at steady state
    time_constant: float = 0.2  # s
    cpr: int = 1800             # encoder counts per output revolution (12 x 150 gear)
    duty_limit: float = 1.0

    def __post_init__(self):
        if self.gain <= 0 or self.time_constant <= 0 or self.cpr < 1:
            raise ValueError("invalid motor model")


@dataclass(frozen=True)
class MotorState:
    """True mechanical state of one motor."""

    omega_true: float = 0.0  # rad/s at the output shaft
    theta: float = 0.0       # rad, accumulated
    pwm_duty: float = 0.0    # [-1, 1], last applied duty


def encoder_count(theta: float, cpr: int) -> int:
    """Counter value for an accumulated shaft angle."""
    return math.floor(theta * cpr / math.tau)


def encoder_sample(m: MotorState, model: MotorModel) -> int:
    """Snapshot of the motor's encoder counter."""
    return encoder_count(m.theta, model.cpr)


def measure_velocity(count_now: int, count_prev: int, dt: float, cpr: int) -> float:
    """Angular velocity from two counter readings one tick apart.

    Quantization bounds the error against the true mean velocity over the
    window by 2 counts, i.e. 2*2pi/(cpr*dt).
    """
    if dt <= 0:
        raise ValueError("dt must be > 0")
    return (count_now - count_prev) * math.tau / (cpr * dt)


def motor_step(m: MotorState, duty: float, model: MotorModel, dt: float) -> MotorState:
    """Advance the plant by dt with duty held constant.

    The first-order response is integrated in closed form, so the step is
    exact for any dt; 1 ms substeps are used in simulation only to keep the
    pose integration accurate.
    """
    if dt <= 0:
        raise ValueError("dt must be > 0")
    duty = _clamp(duty, model.duty_limit)
    alpha = math.exp(-dt / model.time_constant)
    omega_ss = model.gain * duty
    dev = m.omega_true - omega_ss
    omega_new = omega_ss + dev * alpha
    theta_new = m.theta + omega_ss * dt + dev * model.time_constant * (1.0 - alpha)
    return MotorState(omega_true=omega_new, theta=theta_new, pwm_duty=duty)


@dataclass(frozen=True)
class PidGains:
    kp: float = 0.1
    ki: float = 0.0  # the firmware uses only the P and D terms by default
    kd: float = 0.01

    def __post_init__(self):
        if self.kp < 0 or self.ki < 0 or self.kd < 0:
            raise ValueError("gains must be >= 0")


# PI(D) gains for the closed-loop simulation profiles. The P-D firmware
# defaults cannot reach 2% steady-state accuracy at 0.1 s sampling, so the
# vehicle-level configs enable the integral path.
SIM_PID_GAINS = PidGains(kp=0.1, ki=1.0, kd=0.01)


@dataclass(frozen=True)
class PidState:
    setpoint: float = 0.0       # rad/s
    prev_error: float = 0.0     # rad/s
    integral: float = 0.0       # rad*s/s, clamped to the anti-windup bound
    prev_measured: float = 0.0  # rad/s, last velocity measurement


def pid_step(s: PidState, g: PidGains, measured: float, dt: float,
             duty_limit: float = 1.0) -> tuple[float, PidState]:
    """One controller update: returns (duty, next state).

    Derivative acts on the error. The integral is clamped to duty_limit/ki
    (anti-windup) before it contributes.
    """
    error = s.setpoint - measured
    if g.ki > 0.0:
        bound = duty_limit / g.ki
        integral = _clamp(s.integral + error * dt, bound)
    else:
        integral = s.integral + error * dt
    duty = g.kp * error + g.ki * integral + g.kd * (error - s.prev_error) / dt
    duty = _clamp(duty, duty_limit)
    return duty, PidState(setpoint=s.setpoint, prev_error=error,
                          integral=integral, prev_measured=measured)


class QuadController:
    """Per-motor PID controllers plus the previous encoder snapshot,
    mirroring the firmware's 0.1 s interrupt routine."""

    def __init__(self, gains: PidGains, model: MotorModel):
        self.gains = gains
        self.model = model
        self.pid = [PidState() for _ in range(4)]
        self.prev_counts = [0, 0, 0, 0]

    def set_setpoints(self, w: WheelSpeeds) -> None:
        sp = w.as_tuple()
        self.pid = [replace(s, setpoint=v) for s, v in zip(self.pid, sp)]

    def control_tick(self, motors: list[MotorState],
                     dt: float = CONTROL_DT) -> tuple[list[float], list[float]]:
        """Sample encoders, measure velocities, run one PID update per motor.

        Returns (duties, measured velocities)."""
        duties = []
        measured_all = []
        for i, m in enumerate(motors):
            count = encoder_sample(m, self.model)
            measured = measure_velocity(count, self.prev_counts[i], dt, self.model.cpr)
            self.prev_counts[i] = count
            duty, self.pid[i] = pid_step(self.pid[i], self.gains, measured, dt,
                                         self.model.duty_limit)
            duties.append(duty)
            measured_all.append(measured)
        return duties, measured_all


def _clamp(v: float, limit: float) -> float:
    return -limit if v < -limit else (limit if v > limit else v)
