"""Minimal deterministic 2D world: kinematic bodies, AABB/circle shapes,
penetration resolution against static geometry, and ray queries.

All arithmetic is plain float64; a world stepped twice from the same state
with the same inputs produces bit-identical results.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field


@dataclass
class AABB:
    """Axis-aligned box given by halfwidths (hx, hy)."""

    hx: float
    hy: float


@dataclass
class Circle:
    radius: float


@dataclass
class Body:
    id: int
    tag: str
    shape: AABB | Circle
    position: tuple[float, float]
    velocity: tuple[float, float] = (0.0, 0.0)
    kinematic: bool = False  # kinematic bodies never move in integration
    z_order: int = 0

    def extent(self) -> tuple[float, float]:
        """Bounding-box halfwidths of the shape."""
        if isinstance(self.shape, AABB):
            return self.shape.hx, self.shape.hy
        return self.shape.radius, self.shape.radius


@dataclass(frozen=True)
class Contact:
    id_a: int
    id_b: int
    normal: tuple[float, float]  # pushes body a away from body b


@dataclass
class World:
    bodies: dict[int, Body] = field(default_factory=dict)
    max_speed: float | None = None
    _next_id: int = 0

    def add_body(self, tag, shape, position, velocity=(0.0, 0.0),
                 kinematic=False, z_order=0) -> Body:
        body = Body(self._next_id, tag, shape, tuple(position),
                    tuple(velocity), kinematic, z_order)
        self.bodies[body.id] = body
        self._next_id += 1
        return body

    def remove_body(self, body_id: int) -> None:
        del self.bodies[body_id]


def _overlap_aabb(pa, ea, pb, eb):
    """Penetration (dx, dy) of box a into box b, or None if separated."""
    dx = (ea[0] + eb[0]) - abs(pa[0] - pb[0])
    if dx <= 0.0:
        return None
    dy = (ea[1] + eb[1]) - abs(pa[1] - pb[1])
    if dy <= 0.0:
        return None
    return dx, dy


def resolve_against_static(body: Body, static: Body) -> Contact | None:
    """Project `body` out of `static` along the minimum translation axis.

    Shapes are treated by their bounding boxes; sufficient for the suite's
    axis-aligned arenas.
    """
    pen = _overlap_aabb(body.position, body.extent(),
                        static.position, static.extent())
    if pen is None:
        return None
    dx, dy = pen
    px, py = body.position
    vx, vy = body.velocity
    if dx <= dy:
        sign = 1.0 if px >= static.position[0] else -1.0
        body.position = (px + sign * dx, py)
        body.velocity = (0.0, vy)
        normal = (sign, 0.0)
    else:
        sign = 1.0 if py >= static.position[1] else -1.0
        body.position = (px, py + sign * dy)
        body.velocity = (vx, 0.0)
        normal = (0.0, sign)
    return Contact(body.id, static.id, normal)


def integrate_and_collide(world: World, dt: float) -> list[Contact]:
    """Advance dynamics one tick and resolve static penetrations.

    Semi-implicit Euler with an inelastic stop at static geometry.  Contact
    events are sorted by (id_a, id_b) so the list is deterministic
    regardless of dict insertion history.
    """
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    contacts: list[Contact] = []
    moving = [b for b in world.bodies.values() if not b.kinematic]
    statics = [b for b in world.bodies.values() if b.kinematic]
    moving.sort(key=lambda b: b.id)
    statics.sort(key=lambda b: b.id)
    for body in moving:
        vx, vy = body.velocity
        if world.max_speed is not None:
            speed = math.hypot(vx, vy)
            if speed > world.max_speed:
                scale = world.max_speed / speed
                vx, vy = vx * scale, vy * scale
                body.velocity = (vx, vy)
        body.position = (body.position[0] + vx * dt,
                         body.position[1] + vy * dt)
        for static in statics:
            contact = resolve_against_static(body, static)
            if contact is not None:
                contacts.append(contact)
    contacts.sort(key=lambda c: (c.id_a, c.id_b))
    return contacts


def _ray_aabb(ox, oy, dx, dy, center, ext) -> float | None:
    """Slab test; returns entry t >= 0 in ray-parameter units, or None."""
    tmin, tmax = 0.0, math.inf
    for o, d, c, e in ((ox, dx, center[0], ext[0]), (oy, dy, center[1], ext[1])):
        lo, hi = c - e, c + e
        if abs(d) < 1e-12:
            if o < lo or o > hi:
                return None
            continue
        t1, t2 = (lo - o) / d, (hi - o) / d
        if t1 > t2:
            t1, t2 = t2, t1
        tmin = max(tmin, t1)
        tmax = min(tmax, t2)
        if tmin > tmax:
            return None
    return tmin


def _ray_circle(ox, oy, dx, dy, center, radius) -> float | None:
    fx, fy = ox - center[0], oy - center[1]
    a = dx * dx + dy * dy
    b = 2.0 * (fx * dx + fy * dy)
    c = fx * fx + fy * fy - radius * radius
    if c <= 0.0:
        return 0.0  # origin inside
    disc = b * b - 4.0 * a * c
    if disc < 0.0:
        return None
    sq = math.sqrt(disc)
    t = (-b - sq) / (2.0 * a)
    if t < 0.0:
        t = (-b + sq) / (2.0 * a)
    return t if t >= 0.0 else None


def raycast_world(world: World, origin, direction, max_length: float,
                  ignore_ids: frozenset | set = frozenset()):
    """Nearest hit along a ray as (tag, fraction, body_id), or None.

    fraction is distance / max_length, clipped to [0, 1].  Origin inside a
    body yields fraction 0 against that body.  Ties broken by ascending
    body id.
    """
    dx, dy = direction
    norm = math.hypot(dx, dy)
    if norm == 0.0:
        raise ValueError("direction must be non-zero")
    dx, dy = dx / norm, dy / norm
    ox, oy = origin
    best_t = math.inf
    best: tuple[str, float, int] | None = None
    for body in sorted(world.bodies.values(), key=lambda b: b.id):
        if body.id in ignore_ids:
            continue
        if isinstance(body.shape, AABB):
            t = _ray_aabb(ox, oy, dx, dy, body.position, body.extent())
        else:
            t = _ray_circle(ox, oy, dx, dy, body.position, body.shape.radius)
        if t is not None and t <= max_length and t < best_t:
            best_t = t
            best = (body.tag, min(t / max_length, 1.0), body.id)
    return best
