"""Benchmark velocity fields and signed-distance initial conditions."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..errors import DomainError


@dataclass(frozen=True)
class VelocityField:
    """Advection velocity u(t, x) on (n, 2) point arrays.

    ``time_dependent`` lets the stepping layer freeze operator assembly
    for autonomous fields.
    """

    evaluate: Callable[[float, np.ndarray], np.ndarray]
    label: str
    time_dependent: bool = True

    def __call__(self, t: float, points: np.ndarray) -> np.ndarray:
        return self.evaluate(t, points)


def vortex_velocity(T_period: float) -> VelocityField:
    """Single-vortex field, time-reversed halfway through each period.

    Vanishes on the boundary of the unit square, so there is no inflow.
    """
    if T_period <= 0:
        raise DomainError("period must be positive")

    def evaluate(t, points):
        x = points[:, 0]
        y = points[:, 1]
        sx, cx = np.sin(math.pi * x), np.cos(math.pi * x)
        sy, cy = np.sin(math.pi * y), np.cos(math.pi * y)
        mod = math.cos(math.pi * t / T_period)
        ux = -2.0 * sx * sx * sy * cy * mod
        uy = 2.0 * sy * sy * sx * cx * mod
        return np.column_stack([ux, uy])

    return VelocityField(evaluate=evaluate, label="vortex", time_dependent=True)


def signed_distance_circle(center, R: float) -> Callable[[np.ndarray], np.ndarray]:
    """Signed distance to a circle, negative inside."""
    if R <= 0:
        raise DomainError("radius must be positive")
    cx, cy = float(center[0]), float(center[1])

    def phi(points):
        points = np.atleast_2d(points)
        return np.hypot(points[:, 0] - cx, points[:, 1] - cy) - R

    return phi


def _box_signed_distance(points, x0, x1, y0, y1):
    """Signed distance to an axis-aligned box, negative inside."""
    px, py = points[:, 0], points[:, 1]
    dx = np.maximum(x0 - px, px - x1)
    dy = np.maximum(y0 - py, py - y1)
    outside = np.hypot(np.maximum(dx, 0.0), np.maximum(dy, 0.0))
    inside = np.minimum(np.maximum(dx, dy), 0.0)
    return outside + inside


def slotted_disk_distance(
    center=(0.5, 0.75),
    R: float = 0.15,
    slot_width: float = 0.05,
    slot_top_offset: float = 0.1,
) -> Callable[[np.ndarray], np.ndarray]:
    """Signed distance to a slotted disk via min/max CSG of primitives.

    The slot is cut from below the disk up to ``slot_top_offset`` above the
    disk center.  Community-standard unit-square scaling; exact distance
    except near re-entrant corners, where the CSG bound is used.
    """
    cx, cy = float(center[0]), float(center[1])
    disk = signed_distance_circle((cx, cy), R)
    half_w = slot_width / 2.0

    def phi(points):
        points = np.atleast_2d(points)
        d_disk = disk(points)
        d_slot = _box_signed_distance(
            points,
            cx - half_w,
            cx + half_w,
            cy - 2.0 * R,  # extends well below the disk
            cy + slot_top_offset,
        )
        return np.maximum(d_disk, -d_slot)

    return phi


def zalesak_setup(T_period: float):
    """Rigid rotation about the square center plus the slotted-disk field."""
    if T_period <= 0:
        raise DomainError("period must be positive")
    omega = 2.0 * math.pi / T_period

    def evaluate(t, points):
        return omega * np.column_stack(
            [0.5 - points[:, 1], points[:, 0] - 0.5]
        )

    velocity = VelocityField(
        evaluate=evaluate, label="zalesak", time_dependent=False
    )
    return velocity, slotted_disk_distance()
