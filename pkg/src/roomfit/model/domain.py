"""Intermediate domains of the transfer chain.

`LocalFurniture` is the per-item view extracted from a layout (size,
location, category distribution); `DimensionalSize` strips that down to
size alone. Both live in normalized units: plan extents relative to scene
bounds, vertical height relative to a fixed reference span.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from roomfit.geometry import Point2, RoomScene, Size3
from roomfit.model.slots import REFERENCE_HEIGHT_M


@dataclass(frozen=True, eq=False)
class LocalFurniture:
    size: Size3        # normalized
    location: Point2   # normalized
    category: np.ndarray  # [C] probability distribution

    def __post_init__(self) -> None:
        total = float(np.sum(self.category))
        if abs(total - 1.0) > 1e-6:
            raise ValueError(f"category distribution sums to {total}, not 1")
        if np.any(self.category < 0):
            raise ValueError("category distribution has negative entries")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LocalFurniture):
            return NotImplemented
        return (
            self.size == other.size
            and self.location == other.location
            and np.array_equal(self.category, other.category)
        )

    def argmax_category_index(self) -> int:
        return int(np.argmax(self.category))


@dataclass(frozen=True)
class DimensionalSize:
    size: Size3  # normalized, strictly positive (Size3 enforces)


def normalize_size(size: Size3, scene: RoomScene) -> Size3:
    b = scene.bounds
    return Size3(
        length=size.length / b.height,
        width=size.width / b.width,
        height=size.height / REFERENCE_HEIGHT_M,
    )


def denormalize_size(size: Size3, scene: RoomScene) -> Size3:
    b = scene.bounds
    return Size3(
        length=size.length * b.height,
        width=size.width * b.width,
        height=size.height * REFERENCE_HEIGHT_M,
    )


def size_to_vector(size: Size3) -> np.ndarray:
    return np.array([size.length, size.width, size.height], dtype=np.float64)


def vector_to_size(vec) -> Size3:
    return Size3(length=float(vec[0]), width=float(vec[1]), height=float(vec[2]))


def point_to_vector(p: Point2) -> np.ndarray:
    return np.array([p.x, p.y], dtype=np.float64)
