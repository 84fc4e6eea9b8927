"""Training-data collection: PID pressure servo plus surface surveys.

Per trial, three fingers approach a fixated object, servo to a target
pressure, then survey the surface tangentially at a per-trial random
velocity. The tangential profile has two sub-threshold legs that load the
friction cone gradually before the supra-threshold survey leg, so the
micro-vibration signature precedes the labeled slip onset by roughly the
prediction horizon.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .config import CONTROL_TICK, SUBSTEPS, RunConfig
from .physics import ContactState, FingertipState, ObjectSpec, WorldState, step_physics
from .pid import PidState, pid_pressure_servo, pid_settled
from .prediction import FingerRecord, auto_label
from .sensor import (
    Baseline,
    SensorFrame,
    capture_baseline,
    ground_frame,
    make_finger_baseline_offsets,
    sample_sensor,
)
from .trials import (
    BASELINE_TICKS,
    FINGER_RADIUS,
    contact_angles,
    place_finger,
    sensing_angle,
)

APPROACH_SPEED = 0.008
HOLD_AFTER_SETTLE = 0.3
RETRACT_SPEED = 0.02
RETRACT_DURATION = 0.4
SERVO_TIMEOUT = 4.0
LOAD_FRACTION = 0.8     # cone utilization reached by the fast loading leg
CREEP_FRACTION = 0.97   # utilization at the end of the slow leg


@dataclass
class CollectionTrial:
    trial_id: str
    object_name: str
    target_pressure: float
    survey_speed: float
    seed: int
    failed: bool
    records: list[FingerRecord]
    raw_frames: list[list[SensorFrame]] = field(default_factory=list)
    positions: list[list[tuple[float, float]]] = field(default_factory=list)


def _tangent(normal: tuple[float, float]) -> tuple[float, float]:
    return (-normal[1], normal[0])


def run_collection_trial(
    spec: ObjectSpec,
    target_pressure: float,
    run_config: RunConfig,
    seed: int,
    trial_id: str,
    n_fingers: int = 3,
) -> CollectionTrial:
    cfg = run_config
    proto = cfg.protocol
    phys = cfg.physics
    seq = np.random.SeedSequence(seed)
    finger_seqs = seq.spawn(n_fingers + 1)
    trial_rng = np.random.default_rng(finger_seqs[n_fingers])

    survey_speed = float(trial_rng.uniform(proto.survey_speed_min, proto.survey_speed_max))
    directions = [1.0 if trial_rng.random() < 0.5 else -1.0 for _ in range(n_fingers)]

    f_target = target_pressure / cfg.sensor.pressure_gain
    d_slip = spec.friction * f_target / phys.k_t
    v_load = LOAD_FRACTION * d_slip / proto.load_duration
    v_creep = (CREEP_FRACTION - LOAD_FRACTION) * d_slip / proto.creep_duration

    angles = contact_angles(n_fingers)
    fingers = []
    rngs = []
    offsets = []
    inward = []
    for i in range(n_fingers):
        x, y, d = place_finger(spec, angles[i])
        fingers.append(FingertipState(x=x, y=y, radius=FINGER_RADIUS))
        rng = np.random.default_rng(finger_seqs[i])
        rngs.append(rng)
        offsets.append(make_finger_baseline_offsets(cfg.sensor, rng))
        inward.append(d)

    world = WorldState(
        time=0.0,
        pose=spec.initial_pose,
        twist=(0.0, 0.0, 0.0),
        fingers=fingers,
        contacts=[ContactState() for _ in range(n_fingers)],
        object_fixed=True,
    )

    baselines: list[Baseline | None] = [None] * n_fingers
    free_frames: list[list[SensorFrame]] = [[] for _ in range(n_fingers)]
    pids = [PidState() for _ in range(n_fingers)]
    raw_log: list[list[SensorFrame]] = [[] for _ in range(n_fingers)]
    grounded_log: list[list[SensorFrame]] = [[] for _ in range(n_fingers)]
    pos_log: list[list[tuple[float, float]]] = [[] for _ in range(n_fingers)]

    # Phase timeline after every finger settles at the target pressure.
    survey_start = HOLD_AFTER_SETTLE + proto.load_duration + proto.creep_duration
    survey_end = survey_start + proto.survey_duration
    retract_end = survey_end + RETRACT_DURATION

    settle_time: float | None = None
    touched = [False] * n_fingers
    failed = False
    tick = 0
    while True:
        t = world.time
        # Sense.
        for i in range(n_fingers):
            contact = world.contacts[i]
            raw = sample_sensor(contact, sensing_angle(contact), offsets[i], cfg.sensor, rngs[i], tick)
            raw_log[i].append(raw)
            if baselines[i] is None:
                if not contact.in_contact and len(free_frames[i]) < BASELINE_TICKS:
                    free_frames[i].append(raw)
                if len(free_frames[i]) >= BASELINE_TICKS:
                    baselines[i] = capture_baseline(free_frames[i], [False] * BASELINE_TICKS)
            grounded_log[i].append(
                ground_frame(raw, baselines[i]) if baselines[i] is not None else raw
            )
            f = world.fingers[i]
            pos_log[i].append((f.x, f.y))

        # Command.
        done = False
        for i in range(n_fingers):
            contact = world.contacts[i]
            f = world.fingers[i]
            dx, dy = inward[i]
            if baselines[i] is None:
                cmd = (0.0, 0.0)
            elif settle_time is None:
                if not contact.in_contact and not touched[i]:
                    cmd = (dx * APPROACH_SPEED, dy * APPROACH_SPEED)
                else:
                    # After first touch, close any re-opened gap through the
                    # servo too: a low target otherwise bang-bangs between
                    # the coarse approach step and a full retract.
                    touched[i] = True
                    p_meas = grounded_log[i][-1].p_dc
                    v_n = pid_pressure_servo(target_pressure, p_meas, pids[i], CONTROL_TICK)
                    if contact.in_contact:
                        nx, ny = contact.normal
                    else:
                        nx, ny = -dx, -dy
                    cmd = (-nx * v_n, -ny * v_n)
            else:
                t_rel = t - settle_time
                if t_rel >= retract_end:
                    done = True
                    cmd = (0.0, 0.0)
                elif t_rel >= survey_end:
                    cmd = (dx * -RETRACT_SPEED, dy * -RETRACT_SPEED)
                else:
                    v_tan = 0.0
                    if HOLD_AFTER_SETTLE <= t_rel < HOLD_AFTER_SETTLE + proto.load_duration:
                        v_tan = v_load
                    elif (
                        HOLD_AFTER_SETTLE + proto.load_duration
                        <= t_rel
                        < survey_start
                    ):
                        v_tan = v_creep
                    elif survey_start <= t_rel < survey_end:
                        v_tan = survey_speed
                    if contact.in_contact:
                        nx, ny = contact.normal
                        tx, ty = _tangent((nx, ny))
                        p_meas = grounded_log[i][-1].p_dc
                        v_n = pid_pressure_servo(target_pressure, p_meas, pids[i], CONTROL_TICK)
                        cmd = (
                            -nx * v_n + directions[i] * v_tan * tx,
                            -ny * v_n + directions[i] * v_tan * ty,
                        )
                    else:
                        cmd = (dx * APPROACH_SPEED, dy * APPROACH_SPEED)
            f.cmd_vx, f.cmd_vy = cmd

        if settle_time is None and all(pid_settled(p) for p in pids):
            settle_time = t
        if settle_time is None and t > SERVO_TIMEOUT:
            failed = True
            break
        if done:
            break

        for _ in range(SUBSTEPS):
            world = step_physics(world, spec, phys)
        tick += 1

    records = []
    if not failed:
        for i in range(n_fingers):
            # Re-ground the whole trace with the settled baseline so the
            # pre-baseline ticks (logged raw while the reference was still
            # being captured) label correctly as free air.
            grounded_log[i] = [ground_frame(fr, baselines[i]) for fr in raw_log[i]]
            p_dc = [fr.p_dc for fr in grounded_log[i]]
            labels = auto_label(
                p_dc, pos_log[i], CONTROL_TICK, proto.t_contact, proto.t_movement
            )
            records.append(
                FingerRecord(
                    trial_id=trial_id,
                    finger_id=i,
                    frames=grounded_log[i],
                    labels=labels,
                )
            )
    return CollectionTrial(
        trial_id=trial_id,
        object_name=spec.name,
        target_pressure=target_pressure,
        survey_speed=survey_speed,
        seed=seed,
        failed=failed,
        records=records,
        raw_frames=raw_log,
        positions=pos_log,
    )


def collect_training_data(
    run_config: RunConfig,
    seed: int,
    objects: list[ObjectSpec] | None = None,
    n_fingers: int = 3,
) -> tuple[list[CollectionTrial], list[FingerRecord]]:
    """Full protocol: trials_per_pressure x pressures x objects.

    With defaults: 3 x 9 x 4 = 108 trials, each contributing one record per
    finger (324 single-finger records)."""
    from .objects import training_objects

    objects = objects if objects is not None else training_objects()
    proto = run_config.protocol
    trials: list[CollectionTrial] = []
    records: list[FingerRecord] = []
    idx = 0
    for obj in objects:
        for pressure in proto.target_pressures:
            for rep in range(proto.trials_per_pressure):
                trial_seed = seed * 100003 + idx
                trial_id = f"collect-{obj.name}-p{pressure:g}-r{rep}"
                trial = run_collection_trial(
                    obj, pressure, run_config, trial_seed, trial_id, n_fingers
                )
                trials.append(trial)
                records.extend(trial.records)
                idx += 1
    return trials, records
