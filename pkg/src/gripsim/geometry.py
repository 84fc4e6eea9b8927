"""Planar shape geometry: signed distances, surface points and inertia."""

from __future__ import annotations

import math
from dataclasses import dataclass, field


@dataclass(frozen=True)
class Disk:
    radius: float


@dataclass(frozen=True)
class Box:
    width: float
    height: float


@dataclass(frozen=True)
class RegularPolygon:
    n_sides: int
    circumradius: float


Shape = Disk | Box | RegularPolygon


def shape_vertices(shape: Shape) -> list[tuple[float, float]]:
    """Vertices in the body frame (counter-clockwise). Empty for disks."""
    if isinstance(shape, Disk):
        return []
    if isinstance(shape, Box):
        hw, hh = shape.width / 2.0, shape.height / 2.0
        return [(hw, hh), (-hw, hh), (-hw, -hh), (hw, -hh)]
    if isinstance(shape, RegularPolygon):
        n = shape.n_sides
        return [
            (
                shape.circumradius * math.cos(2.0 * math.pi * k / n + math.pi / 2.0),
                shape.circumradius * math.sin(2.0 * math.pi * k / n + math.pi / 2.0),
            )
            for k in range(n)
        ]
    raise TypeError(f"unknown shape {shape!r}")


def shape_inertia(shape: Shape, mass: float) -> float:
    """Moment of inertia about the centroid, kg*m^2."""
    if isinstance(shape, Disk):
        return 0.5 * mass * shape.radius**2
    if isinstance(shape, Box):
        return mass * (shape.width**2 + shape.height**2) / 12.0
    # Exact polygon integral about the centroid.
    verts = shape_vertices(shape)
    num = 0.0
    den = 0.0
    for i in range(len(verts)):
        x0, y0 = verts[i]
        x1, y1 = verts[(i + 1) % len(verts)]
        cross = x0 * y1 - x1 * y0
        num += cross * (x0 * x0 + x0 * x1 + x1 * x1 + y0 * y0 + y0 * y1 + y1 * y1)
        den += cross
    return mass * num / (6.0 * den)


def shape_bounding_radius(shape: Shape) -> float:
    if isinstance(shape, Disk):
        return shape.radius
    if isinstance(shape, Box):
        return math.hypot(shape.width, shape.height) / 2.0
    return shape.circumradius


def _closest_point_on_segment(
    px: float, py: float, ax: float, ay: float, bx: float, by: float
) -> tuple[float, float]:
    abx, aby = bx - ax, by - ay
    denom = abx * abx + aby * aby
    t = 0.0 if denom == 0.0 else ((px - ax) * abx + (py - ay) * aby) / denom
    t = min(1.0, max(0.0, t))
    return ax + t * abx, ay + t * aby


def _point_in_polygon(px: float, py: float, verts: list[tuple[float, float]]) -> bool:
    # CCW convex polygon: inside iff left of every edge.
    for i in range(len(verts)):
        ax, ay = verts[i]
        bx, by = verts[(i + 1) % len(verts)]
        if (bx - ax) * (py - ay) - (by - ay) * (px - ax) < 0.0:
            return False
    return True


def surface_query(
    shape: Shape,
    pose: tuple[float, float, float],
    px: float,
    py: float,
) -> tuple[float, tuple[float, float], tuple[float, float]]:
    """Query the object surface from a world-frame point.

    Returns (signed_distance, closest_surface_point, outward_normal), all in
    the world frame. The distance is negative when the point lies inside the
    shape; the normal always points out of the object toward the query side.
    """
    ox, oy, theta = pose
    c, s = math.cos(theta), math.sin(theta)
    # World -> body.
    lx = c * (px - ox) + s * (py - oy)
    ly = -s * (px - ox) + c * (py - oy)

    if isinstance(shape, Disk):
        r = math.hypot(lx, ly)
        if r < 1e-12:
            nlx, nly = 1.0, 0.0
        else:
            nlx, nly = lx / r, ly / r
        dist = r - shape.radius
        cxl, cyl = nlx * shape.radius, nly * shape.radius
    else:
        verts = shape_vertices(shape)
        best_d2 = math.inf
        cxl = cyl = 0.0
        for i in range(len(verts)):
            ax, ay = verts[i]
            bx, by = verts[(i + 1) % len(verts)]
            qx, qy = _closest_point_on_segment(lx, ly, ax, ay, bx, by)
            d2 = (lx - qx) ** 2 + (ly - qy) ** 2
            if d2 < best_d2:
                best_d2 = d2
                cxl, cyl = qx, qy
        dist = math.sqrt(best_d2)
        if _point_in_polygon(lx, ly, verts):
            dist = -dist
        if dist > 1e-12:
            nlx, nly = (lx - cxl) / dist, (ly - cyl) / dist
        else:
            # On or inside the boundary: push out along boundary-to-point,
            # falling back to the centroid direction.
            dx, dy = lx - cxl, ly - cyl
            mag = math.hypot(dx, dy)
            if mag > 1e-12:
                nlx, nly = -dx / mag, -dy / mag
            else:
                mag = math.hypot(cxl, cyl)
                nlx, nly = (cxl / mag, cyl / mag) if mag > 1e-12 else (1.0, 0.0)

    # Body -> world.
    wx = ox + c * cxl - s * cyl
    wy = oy + s * cxl + c * cyl
    nwx = c * nlx - s * nly
    nwy = s * nlx + c * nly
    return dist, (wx, wy), (nwx, nwy)
