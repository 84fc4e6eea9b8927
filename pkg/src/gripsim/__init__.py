"""Deterministic planar grasp simulator with per-finger slip-predictive
grip controllers."""

from .config import CONTROL_TICK, SUBSTEPS, RunConfig, load_config
from .controller import ControllerConfig, ControllerState, controller_tick, init_controller
from .geometry import Box, Disk, RegularPolygon
from .physics import (
    ContactClass,
    ContactMode,
    ContactState,
    FingertipState,
    ObjectSpec,
    PhysicsConfig,
    SimulationDiverged,
    WorldState,
    step_physics,
)
from .prediction import Classifier, FingerRecord, TrainConfig, build_dataset, evaluate, train
from .sensor import N_CHANNELS, SensorConfig, SensorFrame, sample_sensor
from .trials import GraspEngine, TrialResult, run_grasp_trial

__version__ = "0.1.0"

__all__ = [
    "CONTROL_TICK",
    "SUBSTEPS",
    "RunConfig",
    "load_config",
    "ControllerConfig",
    "ControllerState",
    "controller_tick",
    "init_controller",
    "Box",
    "Disk",
    "RegularPolygon",
    "ContactClass",
    "ContactMode",
    "ContactState",
    "FingertipState",
    "ObjectSpec",
    "PhysicsConfig",
    "SimulationDiverged",
    "WorldState",
    "step_physics",
    "Classifier",
    "FingerRecord",
    "TrainConfig",
    "build_dataset",
    "evaluate",
    "train",
    "N_CHANNELS",
    "SensorConfig",
    "SensorFrame",
    "sample_sensor",
    "GraspEngine",
    "TrialResult",
    "run_grasp_trial",
]
