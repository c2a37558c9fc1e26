"""Agent observation sensors: flat vectors, ray-cast perception, low-res
top-down renders, and temporal stacking."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .worldsim import World, raycast_world


@dataclass(frozen=True)
class ObservationSpec:
    """Shape contract for one observation stream.

    modality: "vector" | "raycast" | "visual"
    shape: vector/raycast [n]; visual [H, W, 3]
    stack: temporal stacking depth (1 = no stacking)
    """

    modality: str
    shape: tuple[int, ...]
    stack: int = 1

    def __post_init__(self):
        if self.modality not in ("vector", "raycast", "visual"):
            raise ValueError(f"unknown modality {self.modality!r}")
        if any(s <= 0 for s in self.shape):
            raise ValueError("shape entries must be positive")
        if self.stack < 1:
            raise ValueError("stack must be >= 1")

    @property
    def stacked_shape(self) -> tuple[int, ...]:
        return self.shape if self.stack == 1 else (self.stack, *self.shape)

    @property
    def flat_size(self) -> int:
        return self.stack * int(np.prod(self.shape))


@dataclass(frozen=True)
class RaycastConfig:
    """angles are radians relative to the agent heading; each ray reports a
    one-hot over detectable_tags, a no-hit flag, and distance/max_length."""

    angles: tuple[float, ...]
    max_length: float
    detectable_tags: tuple[str, ...]

    @property
    def output_size(self) -> int:
        return len(self.angles) * (len(self.detectable_tags) + 2)


def raycast_sense(world: World, position, heading: float,
                  cfg: RaycastConfig, ignore_ids=frozenset()) -> np.ndarray:
    """Cast cfg.angles rays from an agent pose into one float32 vector.

    Untagged hits (tags outside detectable_tags) terminate the ray but
    encode like a miss except for the distance fraction.
    """
    if not cfg.angles:
        raise ValueError("raycast config needs at least one ray")
    if cfg.max_length <= 0:
        raise ValueError("max_length must be positive")
    n_tags = len(cfg.detectable_tags)
    out = np.zeros(cfg.output_size, dtype=np.float32)
    for i, rel in enumerate(cfg.angles):
        ang = heading + rel
        hit = raycast_world(world, position, (math.cos(ang), math.sin(ang)),
                            cfg.max_length, ignore_ids)
        base = i * (n_tags + 2)
        if hit is None:
            out[base + n_tags] = 1.0  # no-hit flag
            out[base + n_tags + 1] = 1.0
        else:
            tag, fraction, _ = hit
            if tag in cfg.detectable_tags:
                out[base + cfg.detectable_tags.index(tag)] = 1.0
            else:
                out[base + n_tags] = 1.0
            out[base + n_tags + 1] = fraction
    return out


def grid_render(world: World, resolution: tuple[int, int],
                bounds: tuple[float, float, float, float],
                palette: dict[str, tuple[float, float, float]],
                background=(0.0, 0.0, 0.0)) -> np.ndarray:
    """Orthographic top-down rasterization to an HxWx3 float32 image.

    bounds = (xmin, ymin, xmax, ymax) maps to the full image; row 0 is the
    top (ymax) edge.  Per cell the highest z_order body covering the cell
    center wins; ties go to the higher body id.
    """
    h, w = resolution
    xmin, ymin, xmax, ymax = bounds
    img = np.empty((h, w, 3), dtype=np.float32)
    img[:] = np.asarray(background, dtype=np.float32)
    zbuf = np.full((h, w), np.iinfo(np.int64).min, dtype=np.int64)
    idbuf = np.full((h, w), -1, dtype=np.int64)
    cw = (xmax - xmin) / w
    ch = (ymax - ymin) / h
    for body in sorted(world.bodies.values(), key=lambda b: (b.z_order, b.id)):
        color = palette.get(body.tag)
        if color is None:
            continue
        ex, ey = body.extent()
        px, py = body.position
        # cells whose centers fall inside the body's bounding box
        c0 = max(0, math.ceil((px - ex - xmin) / cw - 0.5))
        c1 = min(w - 1, math.floor((px + ex - xmin) / cw - 0.5))
        r0 = max(0, math.ceil((ymax - (py + ey)) / ch - 0.5))
        r1 = min(h - 1, math.floor((ymax - (py - ey)) / ch - 0.5))
        if c1 < c0 or r1 < r0:
            continue
        zr = zbuf[r0:r1 + 1, c0:c1 + 1]
        ir = idbuf[r0:r1 + 1, c0:c1 + 1]
        mask = (zr < body.z_order) | ((zr == body.z_order) & (ir < body.id))
        img[r0:r1 + 1, c0:c1 + 1][mask] = np.asarray(color, dtype=np.float32)
        zr[mask] = body.z_order
        ir[mask] = body.id
    return img


@dataclass
class ObservationStacker:
    """Keeps the last K observations; episode start pads with zeros."""

    spec: ObservationSpec
    _buffer: list[np.ndarray] = field(default_factory=list)

    def reset(self) -> None:
        self._buffer.clear()

    def push(self, obs: np.ndarray) -> np.ndarray:
        """Append obs and return the stacked [K, *shape] view (oldest first)."""
        k = self.spec.stack
        if tuple(obs.shape) != tuple(self.spec.shape):
            raise ValueError(f"observation shape {obs.shape} != spec "
                             f"{self.spec.shape}")
        self._buffer.append(np.asarray(obs, dtype=np.float32))
        if len(self._buffer) > k:
            self._buffer.pop(0)
        if k == 1:
            return self._buffer[-1]
        out = np.zeros((k, *self.spec.shape), dtype=np.float32)
        for i, o in enumerate(reversed(self._buffer)):
            out[k - 1 - i] = o
        return out
