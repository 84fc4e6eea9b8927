"""Synthetic 44-channel tactile stream at 100 Hz.

Channel layout per frame (fixed order in logs): P_dc, P_ac[0..22), E[0..19),
T_dc, T_ac. P_ac carries the incipient-slip signal: its batch amplitude grows
once the friction-cone utilization passes an onset threshold, and a large
transient burst is injected on overt-slip ticks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .physics import ContactMode, ContactState

N_ELECTRODES = 19
PAC_BATCH = 22
N_CHANNELS = 2 + PAC_BATCH + N_ELECTRODES + 1  # P_dc + P_ac batch + E + T_dc + T_ac = 44


@dataclass
class SensorConfig:
    pressure_gain: float = 400.0       # s.p.u. per newton
    sigma_p_dc: float = 0.5
    sigma_p_ac: float = 0.3
    sigma_e: float = 0.2
    sigma_t: float = 0.05
    vibration_onset: float = 0.85      # utilization u_0 where micro-vibration starts
    vibration_saturation: float = 0.88  # utilization where the amplitude tops out
    vibration_max: float = 8.0         # saturated a(u) amplitude, s.p.u.
    slip_burst: float = 2.0            # extra transient amplitude on overt-slip ticks
    electrode_kappa: float = 8.0       # angular falloff of the electrode response
    baseline_mean: float = 2000.0      # raw channel offset level
    baseline_spread: float = 150.0     # per-finger, per-channel offset spread

    def __post_init__(self):
        if self.pressure_gain <= 0.0:
            raise ValueError("pressure gain must be > 0")
        if min(self.sigma_p_dc, self.sigma_p_ac, self.sigma_e, self.sigma_t) < 0.0:
            raise ValueError("noise sigmas must be >= 0")
        if not 0.0 < self.vibration_onset < 1.0:
            raise ValueError("vibration onset must be in (0, 1)")
        if not self.vibration_onset < self.vibration_saturation <= 1.0:
            raise ValueError("vibration saturation must be in (onset, 1]")


ELECTRODE_ANGLES = tuple(2.0 * math.pi * k / N_ELECTRODES for k in range(N_ELECTRODES))


@dataclass
class SensorFrame:
    tick: int
    p_dc: float
    p_ac: list[float]
    electrodes: list[float]
    t_dc: float
    t_ac: float

    def __post_init__(self):
        if len(self.p_ac) != PAC_BATCH:
            raise ValueError(f"P_ac batch must have {PAC_BATCH} samples")
        if len(self.electrodes) != N_ELECTRODES:
            raise ValueError(f"expected {N_ELECTRODES} electrode values")

    def channels(self) -> list[float]:
        """All 44 scalars in the documented order."""
        return [self.p_dc, *self.p_ac, *self.electrodes, self.t_dc, self.t_ac]


@dataclass
class Baseline:
    offsets: list[float]               # 44 per-channel offsets
    source_window: tuple[int, int]     # [first_tick, last_tick]

    def __post_init__(self):
        if len(self.offsets) != N_CHANNELS:
            raise ValueError(f"baseline must have {N_CHANNELS} offsets")


def make_finger_baseline_offsets(config: SensorConfig, rng: np.random.Generator) -> list[float]:
    """Per-finger raw channel offsets, randomized at construction."""
    return list(config.baseline_mean + config.baseline_spread * rng.standard_normal(N_CHANNELS))


def vibration_amplitude(utilization: float, config: SensorConfig) -> float:
    """Micro-vibration amplitude: zero below the onset utilization, then a
    linear ramp that saturates once micro-slip is fully developed."""
    u0 = config.vibration_onset
    u1 = config.vibration_saturation
    return config.vibration_max * min(1.0, max(0.0, (utilization - u0) / (u1 - u0)))


def sample_sensor(
    contact: ContactState,
    contact_angle: float,
    offsets: list[float],
    config: SensorConfig,
    rng: np.random.Generator,
    tick: int,
    transmitted_burst: bool = False,
) -> SensorFrame:
    """One raw 100 Hz frame from the current control-tick contact state.

    `transmitted_burst` raises the micro-vibration amplitude to its
    developed level even when this finger's own contact sticks: a free
    object slipping at any contact vibrates as a whole, and every touching
    finger feels it."""
    gain = config.pressure_gain
    f_n = contact.f_n if contact.in_contact else 0.0
    u = contact.utilization if contact.in_contact else 0.0

    noise = rng.standard_normal(N_CHANNELS)
    p_dc = offsets[0] + gain * f_n + config.sigma_p_dc * noise[0]

    amp = vibration_amplitude(u, config)
    if transmitted_burst and contact.in_contact:
        amp = max(amp, config.vibration_max)
    batch = config.sigma_p_ac * noise[1 : 1 + PAC_BATCH]
    if amp > 0.0:
        batch = batch + amp * rng.standard_normal(PAC_BATCH)
    if contact.mode is ContactMode.SLIP:
        batch = batch + config.slip_burst * rng.standard_normal(PAC_BATCH)
    p_ac = [offsets[1 + i] + batch[i] for i in range(PAC_BATCH)]

    electrodes = []
    for i in range(N_ELECTRODES):
        d = math.atan2(
            math.sin(ELECTRODE_ANGLES[i] - contact_angle),
            math.cos(ELECTRODE_ANGLES[i] - contact_angle),
        )
        response = gain * f_n * math.exp(-config.electrode_kappa * d * d)
        electrodes.append(
            offsets[1 + PAC_BATCH + i] + response + config.sigma_e * noise[1 + PAC_BATCH + i]
        )

    t_dc = offsets[N_CHANNELS - 2] + config.sigma_t * noise[N_CHANNELS - 2]
    t_ac = offsets[N_CHANNELS - 1] + config.sigma_t * noise[N_CHANNELS - 1]
    return SensorFrame(tick=tick, p_dc=p_dc, p_ac=p_ac, electrodes=electrodes, t_dc=t_dc, t_ac=t_ac)


def capture_baseline(frames: list[SensorFrame], contact_flags: list[bool]) -> Baseline:
    """Per-channel mean over a pre-contact window of at least 10 frames."""
    if len(frames) < 10:
        raise ValueError("baseline window needs >= 10 frames")
    if any(contact_flags):
        raise ValueError("baseline window contains an in-contact frame")
    stack = np.array([f.channels() for f in frames])
    return Baseline(
        offsets=list(stack.mean(axis=0)),
        source_window=(frames[0].tick, frames[-1].tick),
    )


def ground_frame(frame: SensorFrame, baseline: Baseline) -> SensorFrame:
    off = baseline.offsets
    return SensorFrame(
        tick=frame.tick,
        p_dc=frame.p_dc - off[0],
        p_ac=[frame.p_ac[i] - off[1 + i] for i in range(PAC_BATCH)],
        electrodes=[frame.electrodes[i] - off[1 + PAC_BATCH + i] for i in range(N_ELECTRODES)],
        t_dc=frame.t_dc - off[N_CHANNELS - 2],
        t_ac=frame.t_ac - off[N_CHANNELS - 1],
    )
