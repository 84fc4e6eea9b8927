"""Fixed-timestep planar rigid-body world: one object, N fingertips.

The object is a free rigid body driven by gravity, scheduled external
wrenches and per-finger contact forces. Fingertips are velocity-commanded
servo tips: they track their commanded velocity exactly in free space, while
in contact the normal reaction pushes back through a small servo admittance.
That admittance is what turns a sustained pressing velocity into a bounded,
sustained normal force (and lets the force relax when the press backs off).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum

from .geometry import Disk, Shape, shape_inertia, surface_query


class ContactMode(Enum):
    FREE = "free"
    STICK = "stick"
    SLIP = "slip"


class ContactClass(Enum):
    """3-class contact label; enum order is the prediction tie-break order."""

    SLIP = "slip"
    CONTACT = "contact"
    NO_CONTACT = "no-contact"


class SimulationDiverged(RuntimeError):
    """Raised when any state component stops being finite."""


@dataclass(frozen=True)
class ObjectSpec:
    shape: Shape
    mass: float
    friction: float
    inertia: float | None = None
    initial_pose: tuple[float, float, float] = (0.0, 0.0, 0.0)
    name: str = "object"

    def __post_init__(self):
        if self.mass <= 0.0:
            raise ValueError("mass must be > 0")
        if self.friction <= 0.0:
            raise ValueError("friction coefficient must be > 0")
        if isinstance(self.shape, Disk) and self.shape.radius <= 0.0:
            raise ValueError("shape dimensions must be > 0")
        if self.inertia is not None and self.inertia <= 0.0:
            raise ValueError("inertia must be > 0")

    @property
    def moment_of_inertia(self) -> float:
        if self.inertia is not None:
            return self.inertia
        return shape_inertia(self.shape, self.mass)


@dataclass
class PhysicsConfig:
    dt: float = 0.001
    gravity: float = 9.81
    k_n: float = 5000.0            # contact normal stiffness, N/m
    d_n: float = 50.0              # normal damping, N*s/m
    k_t: float = 2000.0            # tangential (stick) stiffness, N/m
    d_t: float = 10.0              # tangential damping while sticking, N*s/m
    mu_static_ratio: float = 1.0   # static/kinetic friction ratio
    v_slip: float = 0.002          # ground-truth slip velocity threshold, m/s
    admittance: float = 0.004      # fingertip servo give, (m/s)/N along the normal
    v_cap: float = 0.2             # physics safety cap on fingertip speed, m/s

    def __post_init__(self):
        if self.dt <= 0.0:
            raise ValueError("dt must be > 0")
        if self.k_n <= 0.0 or self.k_t <= 0.0:
            raise ValueError("contact stiffnesses must be > 0")


@dataclass
class FingertipState:
    x: float
    y: float
    vx: float = 0.0
    vy: float = 0.0
    cmd_vx: float = 0.0
    cmd_vy: float = 0.0
    radius: float = 0.01

    def __post_init__(self):
        if self.radius <= 0.0:
            raise ValueError("fingertip radius must be > 0")


@dataclass
class ContactState:
    in_contact: bool = False
    penetration: float = 0.0
    normal: tuple[float, float] = (0.0, 0.0)   # unit, object -> finger
    f_n: float = 0.0
    f_t: float = 0.0                           # signed, along the contact tangent
    mode: ContactMode = ContactMode.FREE
    v_t: float = 0.0                           # relative tangential velocity, m/s
    spring_disp: float = 0.0                   # tangential spring stretch, m
    contact_point: tuple[float, float] = (0.0, 0.0)
    f_n_mu: float = 0.0                        # mu * f_n cached at computation time

    @property
    def utilization(self) -> float:
        return 0.0 if self.f_n <= 0.0 else abs(self.f_t) / (1e-12 + self.f_n_mu)


@dataclass
class WorldState:
    time: float
    pose: tuple[float, float, float]
    twist: tuple[float, float, float]
    fingers: list[FingertipState]
    contacts: list[ContactState]
    external_wrench: tuple[float, float, float] = (0.0, 0.0, 0.0)
    object_fixed: bool = False   # fixated by a support (training / pre-activation)


@dataclass(frozen=True)
class WrenchEvent:
    t_start: float
    wrench: tuple[float, float, float]
    duration: float

    def __post_init__(self):
        if self.duration <= 0.0:
            raise ValueError("duration must be > 0")

    def active(self, t: float) -> bool:
        return self.t_start <= t < self.t_start + self.duration


def scheduled_wrench(schedule: list[WrenchEvent], t: float) -> tuple[float, float, float]:
    """Sum of all schedule entries active at time t (overlaps add up)."""
    fx = fy = tau = 0.0
    for ev in schedule:
        if ev.active(t):
            fx += ev.wrench[0]
            fy += ev.wrench[1]
            tau += ev.wrench[2]
    return fx, fy, tau


def compute_contact(
    finger: FingertipState,
    pose: tuple[float, float, float],
    spec: ObjectSpec,
    obj_twist: tuple[float, float, float],
    prev: ContactState,
    config: PhysicsConfig,
) -> ContactState:
    """Contact force between one fingertip disk and the object.

    Normal: linear spring-damper on penetration, clamped >= 0. Tangential: a
    spring on the accumulated relative tangential displacement, clamped to the
    friction cone; stick -> slip when the unclamped demand exceeds the cone,
    slip -> stick when the relative tangential speed falls below v_slip / 2.
    """
    dist, cpoint, normal = surface_query(spec.shape, pose, finger.x, finger.y)
    penetration = finger.radius - dist
    if penetration <= 0.0:
        return ContactState()

    nx, ny = normal
    tx, ty = -ny, nx
    # Object surface velocity at the contact point.
    ovx, ovy, om = obj_twist
    rx, ry = cpoint[0] - pose[0], cpoint[1] - pose[1]
    pvx, pvy = ovx - om * ry, ovy + om * rx
    relvx, relvy = finger.vx - pvx, finger.vy - pvy
    v_n = relvx * nx + relvy * ny          # finger approaching: v_n < 0
    v_t = relvx * tx + relvy * ty

    pen_rate = -v_n
    f_n = config.k_n * penetration + config.d_n * pen_rate
    if f_n < 0.0:
        f_n = 0.0

    mu = spec.friction
    cone = mu * f_n
    static_cone = cone * config.mu_static_ratio

    spring = prev.spring_disp + v_t * config.dt
    mode = prev.mode
    demand = config.k_t * spring + config.d_t * v_t
    if mode is not ContactMode.SLIP:
        if abs(demand) > static_cone:
            mode = ContactMode.SLIP
        else:
            mode = ContactMode.STICK
    else:
        if abs(v_t) < config.v_slip / 2.0 and abs(demand) <= static_cone:
            mode = ContactMode.STICK

    if mode is ContactMode.SLIP:
        sign = math.copysign(1.0, demand if demand != 0.0 else v_t)
        f_t = sign * cone
        spring = 0.0 if config.k_t == 0.0 else sign * cone / config.k_t
    else:
        f_t = demand
        if f_t > cone:
            f_t = cone
        elif f_t < -cone:
            f_t = -cone

    if f_n == 0.0:
        mode = ContactMode.FREE
        f_t = 0.0
        spring = 0.0

    return ContactState(
        in_contact=True,
        penetration=penetration,
        normal=(nx, ny),
        f_n=f_n,
        f_t=f_t,
        mode=mode,
        v_t=v_t,
        spring_disp=spring,
        contact_point=cpoint,
        f_n_mu=cone,
    )


def ground_truth_contact_class(contact: ContactState, config: PhysicsConfig) -> ContactClass:
    if contact.f_n <= 0.0:
        return ContactClass.NO_CONTACT
    if abs(contact.v_t) > config.v_slip:
        return ContactClass.SLIP
    return ContactClass.CONTACT


def step_physics(
    world: WorldState,
    spec: ObjectSpec,
    config: PhysicsConfig,
    schedule: list[WrenchEvent] | None = None,
) -> WorldState:
    """Advance the world by one dt.

    Fingertips move by their commanded velocity plus the admittance give from
    the previous step's normal reaction; the object integrates contact forces,
    gravity and any scheduled external wrench with semi-implicit Euler.
    """
    dt = config.dt
    ox, oy, theta = world.pose
    ovx, ovy, om = world.twist
    mass = spec.mass
    inertia = spec.moment_of_inertia

    # Move fingertips (servo admittance along the previous contact normal).
    new_fingers: list[FingertipState] = []
    for finger, contact in zip(world.fingers, world.contacts):
        vx, vy = finger.cmd_vx, finger.cmd_vy
        if contact.in_contact and contact.f_n > 0.0:
            give = config.admittance * contact.f_n
            vx += give * contact.normal[0]
            vy += give * contact.normal[1]
        speed = math.hypot(vx, vy)
        if speed > config.v_cap:
            scale = config.v_cap / speed
            vx *= scale
            vy *= scale
        new_fingers.append(
            FingertipState(
                x=finger.x + vx * dt,
                y=finger.y + vy * dt,
                vx=vx,
                vy=vy,
                cmd_vx=finger.cmd_vx,
                cmd_vy=finger.cmd_vy,
                radius=finger.radius,
            )
        )

    # Contacts against the current object pose.
    new_contacts: list[ContactState] = []
    fx_sum = 0.0
    fy_sum = 0.0
    tau_sum = 0.0
    n_touch = sum(1 for c in world.contacts if c.in_contact)
    # Per-contact damping clamp keeps light objects stable at this dt.
    d_cap = 0.25 * mass / (max(1, n_touch) * dt)
    damped_cfg = config
    if config.d_n > d_cap or config.d_t > d_cap:
        damped_cfg = replace(config, d_n=min(config.d_n, d_cap), d_t=min(config.d_t, d_cap))

    for finger, prev in zip(new_fingers, world.contacts):
        contact = compute_contact(
            finger, world.pose, spec, world.twist, prev, damped_cfg
        )
        new_contacts.append(contact)
        if contact.f_n > 0.0:
            nx, ny = contact.normal
            tx, ty = -ny, nx
            # Reaction on the object: pressed along -n, dragged along +t.
            cfx = -contact.f_n * nx + contact.f_t * tx
            cfy = -contact.f_n * ny + contact.f_t * ty
            fx_sum += cfx
            fy_sum += cfy
            rx = contact.contact_point[0] - ox
            ry = contact.contact_point[1] - oy
            tau_sum += rx * cfy - ry * cfx

    ext = world.external_wrench
    if schedule:
        sfx, sfy, stau = scheduled_wrench(schedule, world.time)
        ext = (ext[0] + sfx, ext[1] + sfy, ext[2] + stau)

    if world.object_fixed:
        new_pose = world.pose
        new_twist = (0.0, 0.0, 0.0)
    else:
        ax = (fx_sum + ext[0]) / mass
        ay = (fy_sum + ext[1]) / mass - config.gravity
        aw = (tau_sum + ext[2]) / inertia
        nvx, nvy, nom = ovx + ax * dt, ovy + ay * dt, om + aw * dt
        new_twist = (nvx, nvy, nom)
        new_pose = (ox + nvx * dt, oy + nvy * dt, theta + nom * dt)

    for v in (*new_pose, *new_twist):
        if not math.isfinite(v):
            raise SimulationDiverged(f"non-finite object state at t={world.time:.4f}")
    for f in new_fingers:
        if not (math.isfinite(f.x) and math.isfinite(f.y)):
            raise SimulationDiverged(f"non-finite fingertip state at t={world.time:.4f}")

    return WorldState(
        time=world.time + dt,
        pose=new_pose,
        twist=new_twist,
        fingers=new_fingers,
        contacts=new_contacts,
        external_wrench=world.external_wrench,
        object_fixed=world.object_fixed,
    )


def detect_drop(
    heights: list[float],
    contact_counts: list[int],
    initial_height: float,
    dt: float,
    fall_threshold: float = 0.05,
    contact_loss_s: float = 0.1,
) -> bool:
    """True iff the COM fell below the threshold or all contacts were lost
    for longer than contact_loss_s consecutively."""
    if not heights:
        raise ValueError("empty trajectory")
    loss_run = 0
    max_loss = 0
    for h, n in zip(heights, contact_counts):
        if h < initial_height - fall_threshold:
            return True
        loss_run = loss_run + 1 if n == 0 else 0
        max_loss = max(max_loss, loss_run)
    return max_loss * dt > contact_loss_s
