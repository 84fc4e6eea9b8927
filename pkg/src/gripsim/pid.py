"""PID pressure servo used during training-data collection."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class PidState:
    k_p: float = 4e-5      # (m/s) per s.p.u.
    k_i: float = 4e-4
    k_d: float = 0.0
    clamp: float = 0.008   # m/s; kept below the movement labeling threshold
    settle_band: float = 3.0  # s.p.u. floor so noise cannot stall low targets
    integral: float = 0.0
    prev_error: float | None = None
    settled_for: float = 0.0


def pid_pressure_servo(target: float, measured: float, state: PidState, dt: float) -> float:
    """Normal-direction velocity command (positive presses in), clamped.

    Tracks its own settle timer: settled once |error| stays within the wider
    of 5% of target and the absolute settle band for 0.2 s.
    """
    error = target - measured
    deriv = 0.0 if state.prev_error is None else (error - state.prev_error) / dt
    state.prev_error = error
    out = state.k_p * error + state.k_i * state.integral + state.k_d * deriv
    if -state.clamp < out < state.clamp:
        state.integral += error * dt   # anti-windup: freeze while saturated
    out = max(-state.clamp, min(state.clamp, out))
    if abs(error) < max(0.05 * abs(target), state.settle_band):
        state.settled_for += dt
    else:
        state.settled_for = 0.0
    return out


def pid_settled(state: PidState, hold: float = 0.2) -> bool:
    return state.settled_for >= hold
