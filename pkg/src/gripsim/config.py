"""Structured run configuration: physics, sensor, controller, protocol."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .controller import ControllerConfig
from .physics import PhysicsConfig
from .prediction import TrainConfig
from .sensor import SensorConfig

CONTROL_TICK = 0.01          # 10 ms control / sensor tick
SUBSTEPS = 10                # physics steps per control tick


@dataclass
class ProtocolConfig:
    target_pressures: list[float] = field(
        default_factory=lambda: [20, 40, 60, 80, 100, 150, 200, 250, 300]
    )
    trials_per_pressure: int = 3
    survey_speed_min: float = 0.015    # m/s, supra-threshold survey range
    survey_speed_max: float = 0.04
    survey_duration: float = 2.0       # s
    load_duration: float = 0.25        # s, fast cone-loading leg
    creep_duration: float = 0.15       # s, slow leg ending just short of the cone
    t_contact: float = 10.0            # labeling pressure threshold, s.p.u.
    t_movement: float = 0.01           # labeling speed threshold, m/s
    horizon: int = 10                  # prediction horizon, ticks

    def __post_init__(self):
        ps = self.target_pressures
        if any(p <= 0 for p in ps) or sorted(ps) != list(ps):
            raise ValueError("target pressures must be positive and ascending")
        if self.trials_per_pressure < 1:
            raise ValueError("trials per pressure must be >= 1")


@dataclass
class RunConfig:
    physics: PhysicsConfig = field(default_factory=PhysicsConfig)
    sensor: SensorConfig = field(default_factory=SensorConfig)
    controller: ControllerConfig = field(default_factory=ControllerConfig)
    protocol: ProtocolConfig = field(default_factory=ProtocolConfig)
    training: TrainConfig = field(default_factory=TrainConfig)


_SECTIONS = {
    "physics": PhysicsConfig,
    "sensor": SensorConfig,
    "controller": ControllerConfig,
    "protocol": ProtocolConfig,
    "training": TrainConfig,
}


def load_config(path: str | Path | None) -> RunConfig:
    """Build a RunConfig from a YAML file; missing sections keep defaults."""
    if path is None:
        return RunConfig()
    doc = yaml.safe_load(Path(path).read_text()) or {}
    unknown = set(doc) - set(_SECTIONS)
    if unknown:
        raise ValueError(f"unknown config sections: {sorted(unknown)}")
    kwargs = {}
    for name, cls in _SECTIONS.items():
        section = doc.get(name, {})
        valid = {f.name for f in dataclasses.fields(cls)}
        bad = set(section) - valid
        if bad:
            raise ValueError(f"unknown keys in [{name}]: {sorted(bad)}")
        kwargs[name] = cls(**section)
    return RunConfig(**kwargs)


def dump_config(config: RunConfig, path: str | Path) -> None:
    doc = {
        name: dataclasses.asdict(getattr(config, name)) for name in _SECTIONS
    }
    Path(path).write_text(yaml.safe_dump(doc, sort_keys=False))
