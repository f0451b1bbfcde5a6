"""Fixed-slot parametric layout encoding.

A layout is represented by K slots. Each slot carries a presence logit, C
category logits, a normalized box center and extent, and 4 orientation
logits (N, E, S, W order). Centers and extents are expressed relative to
the scene bounds, so a slot grid is only meaningful next to its scene.

The packed tensor layout (per slot, length 9 + C) is::

    [presence, category_0..C-1, cx, cy, width, length, orient_N..W]

`encode_layout` and `decode_slots` are inverse up to the presence
threshold: encoding a layout of default-size furniture and decoding it
reproduces the boxes exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from roomfit.dataset import Catalog
from roomfit.geometry import (
    FurnitureInstance,
    Layout,
    Orientation,
    Point2,
    RoomScene,
)

ORIENT_ORDER = (Orientation.NORTH, Orientation.EAST, Orientation.SOUTH, Orientation.WEST)

# Logit magnitude used when encoding exact layouts; sigmoid(12) ~ 1 - 6e-6.
ENCODE_LOGIT = 12.0

DEFAULT_SLOTS = 16

# Reference span for normalizing vertical furniture height, which has no
# scene-bounds analogue in plan view.
REFERENCE_HEIGHT_M = 3.0


def slot_width(n_categories: int) -> int:
    return 9 + n_categories


class SlotLayout:
    """Field offsets inside a packed slot vector for C categories."""

    def __init__(self, n_categories: int):
        c = n_categories
        self.n_categories = c
        self.presence = 0
        self.category = slice(1, 1 + c)
        self.cx = 1 + c
        self.cy = 2 + c
        self.width = 3 + c
        self.length = 4 + c
        self.orientation = slice(5 + c, 9 + c)
        self.width_total = slot_width(c)


@dataclass(frozen=True, eq=False)
class SlotGrid:
    """K-slot parametric layout; arrays are float64, shapes validated."""

    presence: np.ndarray    # [K] logits
    category: np.ndarray    # [K, C] logits
    center: np.ndarray      # [K, 2] normalized (x, y)
    extent: np.ndarray      # [K, 2] normalized (width, length), positive
    orientation: np.ndarray  # [K, 4] logits

    _FIELDS = ("presence", "category", "center", "extent", "orientation")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SlotGrid):
            return NotImplemented
        return all(
            np.array_equal(getattr(self, name), getattr(other, name))
            for name in self._FIELDS
        )

    def __post_init__(self) -> None:
        k = self.presence.shape[0]
        if self.presence.shape != (k,):
            raise ValueError("presence must be a [K] vector")
        if self.category.ndim != 2 or self.category.shape[0] != k:
            raise ValueError("category must be [K, C]")
        if self.center.shape != (k, 2) or self.extent.shape != (k, 2):
            raise ValueError("center and extent must be [K, 2]")
        if self.orientation.shape != (k, 4):
            raise ValueError("orientation must be [K, 4]")
        for name in ("presence", "category", "center", "extent", "orientation"):
            if not np.all(np.isfinite(getattr(self, name))):
                raise ValueError(f"{name} contains non-finite values")
        if np.any(self.extent <= 0):
            raise ValueError("extents must be strictly positive")

    @property
    def n_slots(self) -> int:
        return self.presence.shape[0]

    @property
    def n_categories(self) -> int:
        return self.category.shape[1]

    def packed(self) -> np.ndarray:
        """[K, 9 + C] float64 row per slot."""
        return np.concatenate(
            [
                self.presence[:, None],
                self.category,
                self.center,
                self.extent,
                self.orientation,
            ],
            axis=1,
        ).astype(np.float64)

    @staticmethod
    def from_packed(packed: np.ndarray, n_categories: int) -> "SlotGrid":
        f = SlotLayout(n_categories)
        packed = np.asarray(packed, dtype=np.float64)
        if packed.ndim != 2 or packed.shape[1] != f.width_total:
            raise ValueError(
                f"packed slots must be [K, {f.width_total}], got {packed.shape}"
            )
        return SlotGrid(
            presence=packed[:, f.presence].copy(),
            category=packed[:, f.category].copy(),
            center=packed[:, [f.cx, f.cy]].copy(),
            extent=packed[:, [f.width, f.length]].copy(),
            orientation=packed[:, f.orientation].copy(),
        )


def normalize_point(p: Point2, scene: RoomScene) -> tuple[float, float]:
    b = scene.bounds
    return (p.x - b.x_min) / b.width, (p.y - b.y_min) / b.height


def denormalize_point(nx: float, ny: float, scene: RoomScene) -> Point2:
    b = scene.bounds
    return Point2(b.x_min + nx * b.width, b.y_min + ny * b.height)


def encode_layout(
    layout: Layout, catalog: Catalog, n_slots: int = DEFAULT_SLOTS
) -> SlotGrid:
    """Exact slot encoding of a layout (the teacher-path representation).

    Furniture beyond `n_slots` is rejected; unused slots get strongly
    negative presence and neutral box parameters.
    """
    if len(layout.furniture) > n_slots:
        raise ValueError(
            f"layout has {len(layout.furniture)} furniture items, "
            f"more than {n_slots} slots"
        )
    c = len(catalog)
    index_of = {e.code.id: i for i, e in enumerate(catalog.entries)}
    scene = layout.scene
    presence = np.full(n_slots, -ENCODE_LOGIT)
    category = np.zeros((n_slots, c))
    center = np.full((n_slots, 2), 0.5)
    extent = np.full((n_slots, 2), 0.05)
    orientation = np.zeros((n_slots, 4))
    for i, f in enumerate(layout.furniture):
        presence[i] = ENCODE_LOGIT
        category[i, index_of[f.category.id]] = ENCODE_LOGIT
        center[i] = normalize_point(f.position, scene)
        extent[i, 0] = f.size.width / scene.bounds.width
        extent[i, 1] = f.size.length / scene.bounds.height
        orientation[i, ORIENT_ORDER.index(f.orientation)] = ENCODE_LOGIT
    return SlotGrid(
        presence=presence,
        category=category,
        center=center,
        extent=extent,
        orientation=orientation,
    )


def decode_slots(slots: SlotGrid, scene: RoomScene, catalog: Catalog) -> Layout:
    """Threshold slots into a default-size furniture layout.

    Slots with presence probability > 0.5 become instances of their argmax
    category, at the catalog default size, positioned at the denormalized
    slot center.
    """
    if slots.n_categories != len(catalog):
        raise ValueError(
            f"slot grid has {slots.n_categories} categories, catalog {len(catalog)}"
        )
    furniture = []
    for k in range(slots.n_slots):
        if slots.presence[k] <= 0:  # sigmoid(p) > 0.5 iff p > 0
            continue
        entry = catalog.entries[int(np.argmax(slots.category[k]))]
        furniture.append(
            FurnitureInstance(
                category=entry.code,
                position=denormalize_point(
                    float(slots.center[k, 0]), float(slots.center[k, 1]), scene
                ),
                size=entry.default_size,
                orientation=ORIENT_ORDER[int(np.argmax(slots.orientation[k]))],
                default_size=entry.default_size,
                size_range=entry.size_range,
                customized=entry.code.customized,
            )
        )
    return Layout(scene=scene, furniture=tuple(furniture))
