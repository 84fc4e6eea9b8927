"""Grasp trials: engine shared by batch experiments and the live session.

A GraspEngine owns one object, N fingertips and one independent controller
per finger. It runs a fixed phase sequence: sensor baseline capture with the
fingers free, approach until every finger touches the supported object, then
activation (support faded out, controllers engaged). Scheduled wrenches and
per-finger command overrides (master-slave) plug into the same tick loop.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .config import CONTROL_TICK, SUBSTEPS, RunConfig
from .controller import ControllerState, controller_tick, init_controller, integrator_input
from .geometry import shape_bounding_radius, surface_query
from .physics import (
    ContactClass,
    ContactMode,
    ContactState,
    FingertipState,
    ObjectSpec,
    WorldState,
    WrenchEvent,
    ground_truth_contact_class,
    scheduled_wrench,
    step_physics,
)
from .prediction import Classifier
from .sensor import (
    Baseline,
    SensorFrame,
    capture_baseline,
    ground_frame,
    make_finger_baseline_offsets,
    sample_sensor,
)

BASELINE_TICKS = 20          # free-air ticks used for grounding
APPROACH_SPEED = 0.008       # m/s
TOUCH_FORCE = 0.3            # N: approach stops pressing hard once reached
HOLD_SPEED = 0.0008          # m/s light press while waiting for the others
PRELOAD_TICKS = 50           # grip build-up at the initial command before release
RELEASE_FADE_TICKS = 200     # support force ramp-down after activation
FINGER_RADIUS = 0.01
PLACEMENT_CLEARANCE = 0.004


def contact_angles(n_fingers: int) -> list[float]:
    """Opposition placement: horizontal pinch for 2 fingers, equiangular
    (one finger on top) otherwise."""
    if n_fingers < 2 or n_fingers > 5:
        raise ValueError("supported grasps use 2..5 fingers")
    if n_fingers == 2:
        return [0.0, math.pi]
    return [math.pi / 2.0 + 2.0 * math.pi * k / n_fingers for k in range(n_fingers)]


def place_finger(spec: ObjectSpec, angle: float) -> tuple[float, float, tuple[float, float]]:
    """Initial fingertip center and inward approach direction for one angle."""
    ox, oy, _ = spec.initial_pose
    d = (math.cos(angle), math.sin(angle))
    far = (ox + 2.5 * shape_bounding_radius(spec.shape) * d[0] + d[0],
           oy + 2.5 * shape_bounding_radius(spec.shape) * d[1] + d[1])
    _, surface, _ = surface_query(spec.shape, spec.initial_pose, far[0], far[1])
    x = surface[0] + d[0] * (FINGER_RADIUS + PLACEMENT_CLEARANCE)
    y = surface[1] + d[1] * (FINGER_RADIUS + PLACEMENT_CLEARANCE)
    return x, y, (-d[0], -d[1])


def sensing_angle(contact: ContactState) -> float:
    """Direction from the fingertip center toward the contact patch."""
    if not contact.in_contact:
        return 0.0
    return math.atan2(-contact.normal[1], -contact.normal[0])


@dataclass
class Override:
    finger_id: int
    t_start: float               # relative to activation
    t_end: float
    velocity: tuple[float, float]

    def active(self, t_rel: float) -> bool:
        return self.t_start <= t_rel < self.t_end


@dataclass
class _FingerRig:
    rng: np.random.Generator
    offsets: list[float]
    approach_dir: tuple[float, float]
    baseline: Baseline | None = None
    free_frames: list[SensorFrame] = field(default_factory=list)
    prev_frame: SensorFrame | None = None
    frame: SensorFrame | None = None
    raw_frame: SensorFrame | None = None
    controller: ControllerState | None = None
    last_normal: tuple[float, float] | None = None
    touched: bool = False
    command: tuple[float, float] = (0.0, 0.0)
    overridden: bool = False


class GraspEngine:
    """Tick-stepped grasp stabilization session."""

    def __init__(
        self,
        spec: ObjectSpec,
        n_fingers: int,
        classifier: Classifier,
        run_config: RunConfig,
        seed: int,
        update_order: list[int] | None = None,
    ):
        self.spec = spec
        self.classifier = classifier
        self.cfg = run_config
        self.seed = seed
        self.update_order = update_order or list(range(n_fingers))
        if sorted(self.update_order) != list(range(n_fingers)):
            raise ValueError("update order must be a permutation of finger ids")

        seq = np.random.SeedSequence(seed)
        finger_seqs = seq.spawn(n_fingers + 1)
        self.trial_rng = np.random.default_rng(finger_seqs[n_fingers])

        angles = contact_angles(n_fingers)
        fingers = []
        self.rigs: list[_FingerRig] = []
        for i in range(n_fingers):
            x, y, inward = place_finger(spec, angles[i])
            fingers.append(FingertipState(x=x, y=y, radius=FINGER_RADIUS))
            rng = np.random.default_rng(finger_seqs[i])
            self.rigs.append(
                _FingerRig(
                    rng=rng,
                    offsets=make_finger_baseline_offsets(run_config.sensor, rng),
                    approach_dir=inward,
                )
            )
        self.world = WorldState(
            time=0.0,
            pose=spec.initial_pose,
            twist=(0.0, 0.0, 0.0),
            fingers=fingers,
            contacts=[ContactState() for _ in range(n_fingers)],
            object_fixed=True,
        )
        self.tick_index = 0
        self._preload_left = PRELOAD_TICKS
        self._fade_left = 0
        self.activation_time: float | None = None
        self.schedule: list[WrenchEvent] = []
        self.overrides: list[Override] = []
        self.manual_overrides: dict[int, tuple[float, float]] = {}
        self.trace: list[dict] = []

    # -- session controls -------------------------------------------------

    @property
    def time(self) -> float:
        return self.world.time

    @property
    def active(self) -> bool:
        return self.activation_time is not None

    def apply_wrench(self, wrench: tuple[float, float, float], duration: float) -> WrenchEvent:
        ev = WrenchEvent(t_start=self.time, wrench=wrench, duration=duration)
        self.schedule.append(ev)
        return ev

    def set_override(self, finger_id: int, velocity: tuple[float, float]) -> None:
        self.manual_overrides[finger_id] = velocity

    def clear_override(self, finger_id: int) -> None:
        self.manual_overrides.pop(finger_id, None)

    # -- tick loop --------------------------------------------------------

    def _sense(self) -> None:
        # A free object slipping at any contact vibrates as a whole; every
        # touching finger picks the transient up. A fixated object sheds the
        # vibration into its mount instead.
        burst = not self.world.object_fixed and any(
            c.in_contact and c.mode is ContactMode.SLIP for c in self.world.contacts
        )
        for i, rig in enumerate(self.rigs):
            contact = self.world.contacts[i]
            raw = sample_sensor(
                contact,
                sensing_angle(contact),
                rig.offsets,
                self.cfg.sensor,
                rig.rng,
                self.tick_index,
                transmitted_burst=burst,
            )
            rig.raw_frame = raw
            if rig.baseline is None:
                if not contact.in_contact and len(rig.free_frames) < BASELINE_TICKS:
                    rig.free_frames.append(raw)
                if len(rig.free_frames) >= BASELINE_TICKS:
                    rig.baseline = capture_baseline(
                        rig.free_frames, [False] * len(rig.free_frames)
                    )
            if rig.baseline is not None:
                rig.prev_frame = rig.frame
                rig.frame = ground_frame(raw, rig.baseline)

    def _script_velocity(self, i: int) -> tuple[float, float] | None:
        if i in self.manual_overrides:
            return self.manual_overrides[i]
        if self.activation_time is not None:
            t_rel = self.time - self.activation_time
            for ov in self.overrides:
                if ov.finger_id == i and ov.active(t_rel):
                    return ov.velocity
        return None

    def _command(self) -> None:
        if not self.active:
            # Approach: press in until touching, hold lightly until every
            # finger touches, then build the initial grip before release.
            all_ready = True
            for i, rig in enumerate(self.rigs):
                contact = self.world.contacts[i]
                if contact.in_contact and contact.f_n >= TOUCH_FORCE:
                    rig.touched = True
                if rig.baseline is None:
                    rig.command = (0.0, 0.0)
                    all_ready = False
                elif rig.touched:
                    dx, dy = rig.approach_dir
                    rig.command = (dx * HOLD_SPEED, dy * HOLD_SPEED)
                else:
                    dx, dy = rig.approach_dir
                    rig.command = (dx * APPROACH_SPEED, dy * APPROACH_SPEED)
                    all_ready = False
            if all_ready:
                v_init = self.cfg.controller.init_fraction * self.cfg.controller.v_max
                for rig in self.rigs:
                    dx, dy = rig.approach_dir
                    rig.command = (dx * v_init, dy * v_init)
                self._preload_left -= 1
                if self._preload_left <= 0:
                    self._activate()
            return

        for i in self.update_order:
            rig = self.rigs[i]
            scripted = self._script_velocity(i)
            if scripted is not None:
                rig.command = scripted
                rig.overridden = True
                continue
            rig.overridden = False
            contact = self.world.contacts[i]
            # Keep pressing along the last contact normal when contact is
            # lost, so a displaced object gets re-acquired instead of the
            # finger freezing in place.
            if contact.in_contact:
                rig.last_normal = contact.normal
            if rig.last_normal is None:
                dx, dy = rig.approach_dir
                rig.last_normal = (-dx, -dy)
            normal = rig.last_normal
            rig.command, rig.controller = controller_tick(
                rig.controller,
                rig.prev_frame,
                rig.frame,
                self.classifier,
                normal,
                self.cfg.controller,
                prev_command=rig.command,
            )

    def _activate(self) -> None:
        self.activation_time = self.time
        self.world.object_fixed = False
        self._fade_left = RELEASE_FADE_TICKS
        v_init = self.cfg.controller.init_fraction * self.cfg.controller.v_max
        for rig in self.rigs:
            rig.controller = init_controller(self.cfg.controller)
            dx, dy = rig.approach_dir
            rig.command = (dx * v_init, dy * v_init)

    def tick(self) -> dict:
        self._sense()
        self._command()
        for i, rig in enumerate(self.rigs):
            f = self.world.fingers[i]
            f.cmd_vx, f.cmd_vy = rig.command
        # Fade the support out instead of dropping it at once, so the grip
        # takes up the weight quasi-statically.
        if self._fade_left > 0:
            frac = self._fade_left / RELEASE_FADE_TICKS
            support = frac * self.spec.mass * self.cfg.physics.gravity
            self.world.external_wrench = (0.0, support, 0.0)
            self._fade_left -= 1
        else:
            self.world.external_wrench = (0.0, 0.0, 0.0)
        for _ in range(SUBSTEPS):
            self.world = step_physics(self.world, self.spec, self.cfg.physics, self.schedule)
        record = self._record()
        self.trace.append(record)
        self.tick_index += 1
        return record

    def _record(self) -> dict:
        fingers = []
        for i, rig in enumerate(self.rigs):
            c = self.world.contacts[i]
            f = self.world.fingers[i]
            st = rig.controller
            c_pred = st.prev_class.value if st is not None and st.prev_class else None
            fingers.append(
                {
                    "id": i,
                    "pos": [f.x, f.y],
                    "f_n": c.f_n,
                    "f_t": c.f_t,
                    "mode": c.mode.value,
                    "util": c.utilization,
                    "gt": ground_truth_contact_class(c, self.cfg.physics).value,
                    "c_pred": c_pred,
                    "L": integrator_input(st.prev_class) if st and st.prev_class else 0.0,
                    "y": st.y if st else None,
                    "y_min": st.y_min if st else None,
                    "overridden": rig.overridden,
                    "cmd": list(rig.command),
                }
            )
        return {
            "t": self.world.time,
            "tick": self.tick_index,
            "pose": list(self.world.pose),
            "twist": list(self.world.twist),
            "fingers": fingers,
            "wrench": list(scheduled_wrench(self.schedule, self.world.time - CONTROL_TICK)),
        }

    def snapshot(self) -> dict:
        fingers = []
        for i, rig in enumerate(self.rigs):
            c = self.world.contacts[i]
            f = self.world.fingers[i]
            st = rig.controller
            fingers.append(
                {
                    "id": i,
                    "pos": [f.x, f.y],
                    "radius": f.radius,
                    "f_n": c.f_n,
                    "f_t": c.f_t,
                    "mode": c.mode.value,
                    "y": st.y if st else 0.0,
                    "y_min": st.y_min if st else None,
                    "c_pred": st.prev_class.value if st and st.prev_class else None,
                    "cmd": [f.cmd_vx, f.cmd_vy],
                }
            )
        return {
            "type": "state",
            "tick": self.tick_index,
            "t": self.world.time,
            "object": {
                "pose": list(self.world.pose),
                "twist": list(self.world.twist),
                "shape": _shape_summary(self.spec),
            },
            "fingers": fingers,
            "applied_wrench": list(
                scheduled_wrench(self.schedule, self.world.time)
            ),
            "active": self.active,
        }


def _shape_summary(spec: ObjectSpec) -> dict:
    from .geometry import Box, Disk, RegularPolygon

    s = spec.shape
    if isinstance(s, Disk):
        return {"kind": "disk", "radius": s.radius}
    if isinstance(s, Box):
        return {"kind": "box", "width": s.width, "height": s.height}
    return {"kind": "polygon", "n_sides": s.n_sides, "circumradius": s.circumradius}


@dataclass
class TrialResult:
    trial_id: str
    object_name: str
    n_fingers: int
    seed: int
    stable: bool
    drop_time: float | None
    activation_time: float
    duration: float
    trace: list[dict]
    schedule: list[dict] = field(default_factory=list)
    diverged: bool = False

    def active_records(self) -> list[dict]:
        return [r for r in self.trace if r["t"] > self.activation_time]

    def steady_mean_fn(self, window: float = 2.0) -> list[float]:
        """Per-finger mean normal force over the last `window` seconds."""
        t_end = self.trace[-1]["t"]
        recs = [r for r in self.trace if r["t"] >= t_end - window]
        means = []
        for i in range(self.n_fingers):
            vals = [r["fingers"][i]["f_n"] for r in recs]
            means.append(sum(vals) / len(vals))
        return means

    def finger_series(self, i: int, key: str) -> list:
        return [r["fingers"][i][key] for r in self.trace]


MAX_APPROACH_TIME = 4.0


def run_engine_trial(
    engine: GraspEngine,
    duration: float,
    trial_id: str,
    schedule_rel: list[tuple[float, tuple[float, float, float], float]] | None = None,
    fall_threshold: float = 0.05,
) -> TrialResult:
    """Drive an engine from approach through `duration` seconds of active
    stabilization; stops early once the object is clearly dropped."""
    schedule_rel = sorted(schedule_rel or [], key=lambda e: e[0])
    pending = list(schedule_rel)
    applied: list[dict] = []
    drop_time: float | None = None
    init_height: float | None = None
    contact_loss = 0.0

    while True:
        if not engine.active and engine.time > MAX_APPROACH_TIME:
            raise RuntimeError(f"trial {trial_id}: contact never achieved")
        if engine.active:
            t_rel = engine.time - engine.activation_time
            if t_rel >= duration:
                break
            while pending and pending[0][0] <= t_rel:
                t0, wrench, dur = pending.pop(0)
                ev = engine.apply_wrench(wrench, dur)
                applied.append(
                    {"t_rel": t0, "t": ev.t_start, "wrench": list(wrench), "duration": dur}
                )
        engine.tick()
        if engine.active:
            if init_height is None:
                init_height = engine.world.pose[1]
            h = engine.world.pose[1]
            touching = sum(1 for c in engine.world.contacts if c.f_n > 0.0)
            contact_loss = contact_loss + CONTROL_TICK if touching == 0 else 0.0
            if drop_time is None and (
                h < init_height - fall_threshold or contact_loss > 0.1
            ):
                drop_time = engine.time - engine.activation_time
            if h < init_height - max(2 * fall_threshold, 0.1):
                break  # clearly gone; no need to integrate the free fall

    return TrialResult(
        trial_id=trial_id,
        object_name=engine.spec.name,
        n_fingers=len(engine.rigs),
        seed=engine.seed,
        stable=drop_time is None,
        drop_time=drop_time,
        activation_time=engine.activation_time,
        duration=duration,
        trace=engine.trace,
        schedule=applied,
    )


def run_grasp_trial(
    spec: ObjectSpec,
    n_fingers: int,
    classifier: Classifier,
    run_config: RunConfig,
    seed: int,
    duration: float = 10.0,
    update_order: list[int] | None = None,
    trial_id: str | None = None,
) -> TrialResult:
    engine = GraspEngine(spec, n_fingers, classifier, run_config, seed, update_order)
    tid = trial_id or f"grasp-{spec.name}-f{n_fingers}-s{seed}"
    return run_engine_trial(engine, duration, tid)


def gen_perturbation_schedule(
    rng: np.random.Generator,
    n_pulses: int = 8,
    start: float = 3.0,
    magnitude: tuple[float, float] = (1.5, 3.0),
    duration: tuple[float, float] = (0.1, 1.0),
    gap: tuple[float, float] = (1.0, 2.3),
) -> list[tuple[float, tuple[float, float, float], float]]:
    """Irregular pulse train: uniform directions, magnitudes and gaps.

    Gaps are capped at 2.3 s so eight pulses and their recovery windows fit
    a 30 s recording; the magnitude floor keeps every pulse strong enough
    to actually threaten a settled grip.
    """
    events = []
    t = start
    for _ in range(n_pulses):
        mag = rng.uniform(*magnitude)
        ang = rng.uniform(0.0, 2.0 * math.pi)
        dur = rng.uniform(*duration)
        events.append((t, (mag * math.cos(ang), mag * math.sin(ang), 0.0), dur))
        t += dur + rng.uniform(*gap)
    return events


def run_perturbation_trial(
    spec: ObjectSpec,
    n_fingers: int,
    classifier: Classifier,
    run_config: RunConfig,
    seed: int,
    schedule: list[tuple[float, tuple[float, float, float], float]] | None = None,
    duration: float = 30.0,
    trial_id: str | None = None,
) -> TrialResult:
    engine = GraspEngine(spec, n_fingers, classifier, run_config, seed)
    if schedule is None:
        schedule = gen_perturbation_schedule(engine.trial_rng)
    tid = trial_id or f"perturb-{spec.name}-f{n_fingers}-s{seed}"
    return run_engine_trial(engine, duration, tid, schedule_rel=schedule)


def run_master_slave(
    spec: ObjectSpec,
    n_fingers: int,
    classifier: Classifier,
    run_config: RunConfig,
    seed: int,
    script: list[Override],
    duration: float = 10.0,
    trial_id: str | None = None,
) -> TrialResult:
    engine = GraspEngine(spec, n_fingers, classifier, run_config, seed)
    engine.overrides = list(script)
    tid = trial_id or f"master-slave-{spec.name}-f{n_fingers}-s{seed}"
    return run_engine_trial(engine, duration, tid)
