"""Independent per-finger grip stabilization.

Each finger runs the same law with no access to any other finger's state:
predicted slip drives a leaky integrator whose output sets the fingertip
velocity along the contact normal; the integrator value at the first
transition into a slip prediction after a stable period is latched as the
finger's minimum response.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .physics import ContactClass
from .prediction import Classifier, extract_features
from .sensor import SensorFrame


@dataclass
class ControllerConfig:
    leakage: float = 0.99        # alpha, per 10 ms tick
    v_max: float = 0.045         # m/s at integrator output 1
    init_fraction: float = 0.75  # beta: integrator value at activation
    y_floor: float = 0.005       # pre-learning minimum output
    stable_ticks: int = 20       # consecutive contact predictions = "stable period"

    def __post_init__(self):
        if not 0.0 < self.leakage < 1.0:
            raise ValueError("leakage must be in (0, 1)")
        if self.v_max <= 0.0:
            raise ValueError("v_max must be > 0")
        if not 0.0 < self.init_fraction <= 1.0:
            raise ValueError("init fraction must be in (0, 1]")
        if not 0.0 <= self.y_floor < 1.0:
            raise ValueError("y_floor must be in [0, 1)")


@dataclass
class ControllerState:
    y: float
    y_min: float | None = None
    prev_class: ContactClass | None = None
    seen_stable: bool = False
    contact_run: int = 0         # consecutive contact predictions so far


def init_controller(config: ControllerConfig) -> ControllerState:
    return ControllerState(y=config.init_fraction)


def integrator_input(c_pred: ContactClass) -> float:
    return 1.0 if c_pred is ContactClass.SLIP else 0.0


def update_integrator(y_prev: float, load: float, leakage: float) -> float:
    return leakage * y_prev + (1.0 - leakage) * load


def update_y_min(
    state: ControllerState, c_pred: ContactClass, y_pre: float, config: ControllerConfig
) -> None:
    """Latch the pre-update integrator value at the first transition into a
    slip prediction after a stable period.

    The pre-update value is the grip level at which the warning fired,
    before the integrator reacts to it; that is the per-object minimum
    response worth remembering."""
    if (
        state.y_min is None
        and state.seen_stable
        and state.prev_class is not None
        and state.prev_class is not ContactClass.SLIP
        and c_pred is ContactClass.SLIP
    ):
        state.y_min = y_pre
    if c_pred is ContactClass.CONTACT:
        state.contact_run += 1
        if state.contact_run >= config.stable_ticks:
            state.seen_stable = True
    else:
        state.contact_run = 0
    state.prev_class = c_pred


def command_velocity(
    y: float,
    y_min: float | None,
    normal: tuple[float, float] | None,
    config: ControllerConfig,
) -> tuple[float, float]:
    """Tip velocity pressing into the surface: v_max * max(y, y_eff) * (-N)."""
    if normal is None:
        return (0.0, 0.0)
    nx, ny = normal
    mag = math.hypot(nx, ny)
    if abs(mag - 1.0) > 1e-6:
        raise ValueError(f"contact normal must be a unit vector, |N| = {mag}")
    y_eff = y_min if y_min is not None else config.y_floor
    speed = config.v_max * max(y, y_eff)
    return (-speed * nx, -speed * ny)


def controller_tick(
    state: ControllerState,
    prev_frame: SensorFrame | None,
    frame: SensorFrame,
    classifier: Classifier,
    normal: tuple[float, float] | None,
    config: ControllerConfig,
    prev_command: tuple[float, float] = (0.0, 0.0),
) -> tuple[tuple[float, float], ControllerState]:
    """One control tick: predict, integrate, latch the minimum, command.

    On a sensor gap (missing previous frame) the previous command is held.
    Reads nothing about other fingers or the object.
    """
    if prev_frame is None:
        return prev_command, state
    c_pred = classifier.predict(extract_features(prev_frame, frame))
    load = integrator_input(c_pred)
    y_pre = state.y
    y = update_integrator(y_pre, load, config.leakage)
    state.y = y
    update_y_min(state, c_pred, y_pre, config)
    return command_velocity(y, state.y_min, normal, config), state
