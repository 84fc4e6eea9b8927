"""Object catalogs: the four training objects and a parametric test set.

The physical test set cannot be mirrored here; a parametric generator spans
the same mass range (10 g to 400 g) and a spread of friction coefficients
and shapes instead. Reports state this substitution.
"""

from __future__ import annotations

import math

from .geometry import Box, Disk, RegularPolygon
from .physics import ObjectSpec


def training_objects(friction: float = 0.5) -> list[ObjectSpec]:
    return [
        ObjectSpec(Disk(0.030), mass=0.050, friction=friction, name="ball"),
        ObjectSpec(Box(0.060, 0.040), mass=0.100, friction=friction, name="tea-box"),
        ObjectSpec(Disk(0.0425), mass=0.170, friction=friction, name="tuna-can"),
        ObjectSpec(Box(0.050, 0.070), mass=0.020, friction=friction, name="cup-proxy"),
    ]


def generated_test_objects() -> list[ObjectSpec]:
    """12 objects: 4 masses spanning 10 g - 400 g x 3 friction coefficients."""
    masses = [0.01, 0.05, 0.15, 0.4]
    frictions = [0.3, 0.5, 0.8]
    shapes = [Disk(0.030), Box(0.055, 0.045), RegularPolygon(6, 0.032)]
    specs = []
    for i, mass in enumerate(masses):
        for j, mu in enumerate(frictions):
            shape = shapes[(i + j) % len(shapes)]
            specs.append(
                ObjectSpec(
                    shape,
                    mass=mass,
                    friction=mu,
                    name=f"gen-m{int(round(mass * 1000))}g-mu{mu:g}",
                )
            )
    return specs


def two_finger_min_force(spec: ObjectSpec, gravity: float = 9.81) -> float:
    """Analytic statics minimum normal force per finger for a symmetric
    horizontal two-finger pinch: mg / (2 mu)."""
    return spec.mass * gravity / (2.0 * spec.friction)
