"""Geometric data model for furniture layouts.

Everything in this module is deterministic plain arithmetic over immutable
values: rooms, furniture boxes, axis-aligned bounding boxes, IoU, and the
five size-growth modes applied to customized furniture.

Conventions: coordinates are meters, the origin is the bottom-left corner of
the room bounding box and y grows "up" in plan view. Furniture positions are
box centers. `length` is the plan-view up/down extent of a furniture item in
its default (North-facing) orientation, `width` the left/right extent, and
`height` the vertical extent (carried through, unused by 2D geometry).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum


class GeometryError(ValueError):
    """Raised when a geometric value violates its invariants."""


def _require_finite(name: str, *values: float) -> None:
    for v in values:
        if not math.isfinite(v):
            raise GeometryError(f"{name} must be finite, got {v!r}")


class Orientation(Enum):
    """Axis-aligned facing direction of a furniture item in plan view."""

    NORTH = "N"
    EAST = "E"
    SOUTH = "S"
    WEST = "W"


class SizeCode(Enum):
    """The five growth modes a customized furniture item supports.

    ``DEFAULT`` keeps the catalog size. The width modes double the width and
    grow toward the named side; the length modes double the plan-view length
    and grow up or down. The edge opposite the growth direction stays fixed.
    """

    DEFAULT = "Default"
    WIDTH_LEFT = "WidthLeft"
    WIDTH_RIGHT = "WidthRight"
    LENGTH_UP = "LengthUp"
    LENGTH_DOWN = "LengthDown"


class RoomType(Enum):
    """The seven supported room types."""

    BALCONY = "balcony"
    BEDROOM = "bedroom"
    KITCHEN = "kitchen"
    BATHROOM = "bathroom"
    LIVING_DINING = "living-dining"
    STUDY = "study"
    TATAMI = "tatami"


@dataclass(frozen=True)
class Point2:
    """Plan-view point in meters."""

    x: float
    y: float

    def __post_init__(self) -> None:
        _require_finite("Point2", self.x, self.y)


@dataclass(frozen=True)
class Size3:
    """Furniture size: length (plan up/down), width (plan left/right), height."""

    length: float
    width: float
    height: float

    def __post_init__(self) -> None:
        _require_finite("Size3", self.length, self.width, self.height)
        if self.length <= 0 or self.width <= 0 or self.height <= 0:
            raise GeometryError(f"Size3 components must be positive: {self}")

    def plan_area(self) -> float:
        return self.length * self.width


@dataclass(frozen=True)
class SizeRange:
    """Per-axis admissible size interval for a customized furniture item."""

    length_min: float
    length_max: float
    width_min: float
    width_max: float
    height_min: float
    height_max: float

    def __post_init__(self) -> None:
        for lo, hi, axis in (
            (self.length_min, self.length_max, "length"),
            (self.width_min, self.width_max, "width"),
            (self.height_min, self.height_max, "height"),
        ):
            _require_finite("SizeRange", lo, hi)
            if lo <= 0:
                raise GeometryError(f"SizeRange {axis} min must be > 0, got {lo}")
            if lo > hi:
                raise GeometryError(f"SizeRange {axis} min {lo} > max {hi}")

    def contains(self, size: Size3, tol: float = 1e-9) -> bool:
        return (
            self.length_min - tol <= size.length <= self.length_max + tol
            and self.width_min - tol <= size.width <= self.width_max + tol
            and self.height_min - tol <= size.height <= self.height_max + tol
        )

    def clamp(self, size: Size3) -> Size3:
        return Size3(
            length=min(max(size.length, self.length_min), self.length_max),
            width=min(max(size.width, self.width_min), self.width_max),
            height=min(max(size.height, self.height_min), self.height_max),
        )

    @staticmethod
    def exact(size: Size3) -> "SizeRange":
        """Degenerate range pinning every axis to `size` (finished furniture)."""
        return SizeRange(
            size.length, size.length, size.width, size.width, size.height, size.height
        )


@dataclass(frozen=True)
class CategoryCode:
    """Furniture category: stable integer id, display name, customizable flag."""

    id: int
    name: str
    customized: bool

    def __post_init__(self) -> None:
        if self.id < 0:
            raise GeometryError(f"category id must be >= 0, got {self.id}")


@dataclass(frozen=True)
class AABB:
    """Axis-aligned box in plan view, meters."""

    x_min: float
    y_min: float
    x_max: float
    y_max: float

    def __post_init__(self) -> None:
        _require_finite("AABB", self.x_min, self.y_min, self.x_max, self.y_max)
        if self.x_min > self.x_max or self.y_min > self.y_max:
            raise GeometryError(f"AABB min exceeds max: {self}")

    @property
    def width(self) -> float:
        return self.x_max - self.x_min

    @property
    def height(self) -> float:
        return self.y_max - self.y_min

    def area(self) -> float:
        return self.width * self.height

    def center(self) -> Point2:
        return Point2((self.x_min + self.x_max) / 2, (self.y_min + self.y_max) / 2)

    def contains_box(self, other: "AABB", tol: float = 1e-9) -> bool:
        return (
            self.x_min - tol <= other.x_min
            and self.y_min - tol <= other.y_min
            and other.x_max <= self.x_max + tol
            and other.y_max <= self.y_max + tol
        )

    def intersection_area(self, other: "AABB") -> float:
        w = min(self.x_max, other.x_max) - max(self.x_min, other.x_min)
        h = min(self.y_max, other.y_max) - max(self.y_min, other.y_min)
        if w <= 0 or h <= 0:
            return 0.0
        return w * h


@dataclass(frozen=True)
class FurnitureInstance:
    """A placed furniture item.

    `size` must lie within `size_range`; non-customized items must keep
    `size == default_size`.
    """

    category: CategoryCode
    position: Point2
    size: Size3
    orientation: Orientation
    default_size: Size3
    size_range: SizeRange
    customized: bool

    def __post_init__(self) -> None:
        if not self.size_range.contains(self.size):
            raise GeometryError(
                f"size {self.size} outside range {self.size_range} "
                f"for {self.category.name}"
            )
        if not self.customized and self.size != self.default_size:
            raise GeometryError(
                f"non-customized {self.category.name} must keep its default size"
            )


@dataclass(frozen=True)
class WallSegment:
    """Axis-aligned wall centerline with a thickness, meters."""

    x0: float
    y0: float
    x1: float
    y1: float
    thickness: float

    def __post_init__(self) -> None:
        _require_finite("WallSegment", self.x0, self.y0, self.x1, self.y1, self.thickness)
        if self.thickness <= 0:
            raise GeometryError("wall thickness must be positive")
        if self.x0 != self.x1 and self.y0 != self.y1:
            raise GeometryError("wall segments must be axis-aligned")

    def footprint(self) -> AABB:
        """The painted rectangle: centerline expanded by half the thickness."""
        half = self.thickness / 2
        return AABB(
            min(self.x0, self.x1) - half,
            min(self.y0, self.y1) - half,
            max(self.x0, self.x1) + half,
            max(self.y0, self.y1) + half,
        )


@dataclass(frozen=True)
class RoomScene:
    """An empty indoor scene: walls, doors, windows, and the plan bounds."""

    room_type: RoomType
    bounds: AABB
    walls: tuple[WallSegment, ...]
    doors: tuple[AABB, ...]
    windows: tuple[AABB, ...]

    def __post_init__(self) -> None:
        if self.bounds.area() <= 0:
            raise GeometryError("scene bounds must have positive area")
        for wall in self.walls:
            if not self.bounds.contains_box(wall.footprint(), tol=1e-6):
                raise GeometryError(f"wall {wall} extends past the scene bounds")
        for kind, boxes in (("door", self.doors), ("window", self.windows)):
            for box in boxes:
                if not any(w.footprint().intersection_area(box) > 0 for w in self.walls):
                    raise GeometryError(f"{kind} {box} does not lie on any wall")
                if not self.bounds.contains_box(box, tol=1e-6):
                    raise GeometryError(f"{kind} {box} extends past the scene bounds")


@dataclass(frozen=True)
class Layout:
    """A room scene plus its placed furniture, in paint order."""

    scene: RoomScene
    furniture: tuple[FurnitureInstance, ...]

    def __post_init__(self) -> None:
        for f in self.furniture:
            if self.scene.bounds.intersection_area(aabb(f)) <= 0:
                raise GeometryError(
                    f"furniture {f.category.name} at {f.position} lies entirely "
                    "outside the scene bounds"
                )


@dataclass(frozen=True)
class LayoutVariant:
    """A layout re-derived from a base by growing one customized item."""

    base: Layout
    target_category: CategoryCode
    size_code: SizeCode
    result: Layout

    def __post_init__(self) -> None:
        if len(self.result.furniture) != len(self.base.furniture):
            raise GeometryError("variant must keep the base furniture count")
        changed = [
            i
            for i, (b, r) in enumerate(zip(self.base.furniture, self.result.furniture))
            if b != r
        ]
        if len(changed) > 1:
            raise GeometryError("variant may differ from its base in one item only")
        if changed and (
            self.base.furniture[changed[0]].category.id != self.target_category.id
        ):
            raise GeometryError("variant changed a non-targeted furniture item")


@dataclass(frozen=True)
class Violation:
    """One validation finding: which furniture, what rule, human message."""

    kind: str  # "out_of_bounds" | "overlap"
    indices: tuple[int, ...]
    message: str


def aabb(f: FurnitureInstance) -> AABB:
    """Plan-view bounding box of a furniture item.

    The box is centered on the item position. For North/South facings the
    x-extent is the width and the y-extent the length; East/West facings
    swap the two.
    """
    if f.orientation in (Orientation.EAST, Orientation.WEST):
        half_x, half_y = f.size.length / 2, f.size.width / 2
    else:
        half_x, half_y = f.size.width / 2, f.size.length / 2
    return AABB(
        f.position.x - half_x,
        f.position.y - half_y,
        f.position.x + half_x,
        f.position.y + half_y,
    )


def iou(a: AABB, b: AABB) -> float:
    """Intersection over union of two boxes; 0 when the union has zero area."""
    inter = a.intersection_area(b)
    union = a.area() + b.area() - inter
    if union <= 0:
        return 0.0
    return inter / union


def _growth_half_axis(code: SizeCode) -> tuple[str, int]:
    """Map a growth code to (size axis, world growth sign along that axis).

    The size axis is the furniture dimension that grows ("width" or
    "length"). The sign says which way the box's world-space extent on that
    axis moves: -1 grows toward smaller coordinates (the opposite edge is
    anchored), +1 toward larger ones. Facing East/West swaps which world
    axis a size axis maps to, but the grown dimension is always the named
    size field.
    """
    if code in (SizeCode.WIDTH_LEFT, SizeCode.WIDTH_RIGHT):
        axis = "width"
        sign = -1 if code is SizeCode.WIDTH_LEFT else 1
    else:
        axis = "length"
        sign = 1 if code is SizeCode.LENGTH_UP else -1
    return axis, sign


def grown_size(f: FurnitureInstance, code: SizeCode) -> Size3:
    """The target size for a growth code, before clamping: one axis doubled."""
    if code is SizeCode.DEFAULT:
        return f.default_size
    axis, _ = _growth_half_axis(code)
    if axis == "width":
        return Size3(f.default_size.length, f.default_size.width * 2, f.default_size.height)
    return Size3(f.default_size.length * 2, f.default_size.width, f.default_size.height)


def resize_anchored(
    f: FurnitureInstance, new_size: Size3, code: SizeCode
) -> FurnitureInstance:
    """Resize a furniture item, keeping the anchor edge implied by `code` fixed.

    `new_size` is clamped to the item's size range first; the anchor rule is
    applied to the clamped size. For the growth axis the edge opposite the
    growth direction stays put; every other axis keeps the box center.
    ``DEFAULT`` keeps the center on all axes.
    """
    clamped = f.size_range.clamp(new_size)
    cx, cy = f.position.x, f.position.y
    if code is not SizeCode.DEFAULT:
        axis, sign = _growth_half_axis(code)
        old_extent = getattr(f.size, axis)
        new_extent = getattr(clamped, axis)
        shift = sign * (new_extent - old_extent) / 2
        # Which world axis the grown size axis occupies depends on facing.
        swapped = f.orientation in (Orientation.EAST, Orientation.WEST)
        moves_x = (axis == "width") != swapped
        if moves_x:
            cx += shift
        else:
            cy += shift
    return replace(
        f, position=Point2(cx, cy), size=clamped, customized=True
    )


def apply_size_code(f: FurnitureInstance, code: SizeCode) -> FurnitureInstance:
    """Grow a customized furniture item per one of the five size codes.

    ``DEFAULT`` is an exact identity. The width modes double the width, the
    length modes double the plan-view length; the result is clamped per axis
    to the item's size range and the edge opposite the growth direction is
    anchored. Vertical height is never changed.
    """
    if not f.customized:
        raise GeometryError(
            f"size codes apply to customized furniture only, got {f.category.name}"
        )
    if f.size != f.default_size:
        raise GeometryError("apply_size_code expects an item at its default size")
    if code is SizeCode.DEFAULT:
        return f
    return resize_anchored(f, grown_size(f, code), code)


def validate_layout(layout: Layout, allow_overlap: bool) -> list[Violation]:
    """Report furniture protruding past the scene bounds and, unless
    `allow_overlap`, pairwise AABB overlaps above a 1 cm^2 tolerance."""
    violations: list[Violation] = []
    boxes = [aabb(f) for f in layout.furniture]
    for i, (f, box) in enumerate(zip(layout.furniture, boxes)):
        if not layout.scene.bounds.contains_box(box, tol=1e-6):
            violations.append(
                Violation(
                    kind="out_of_bounds",
                    indices=(i,),
                    message=f"{f.category.name} #{i} extends outside the room bounds",
                )
            )
    if not allow_overlap:
        for i in range(len(boxes)):
            for j in range(i + 1, len(boxes)):
                overlap = boxes[i].intersection_area(boxes[j])
                if overlap > 1e-4:  # 1 cm^2
                    violations.append(
                        Violation(
                            kind="overlap",
                            indices=(i, j),
                            message=(
                                f"{layout.furniture[i].category.name} #{i} overlaps "
                                f"{layout.furniture[j].category.name} #{j} "
                                f"by {overlap:.4f} m^2"
                            ),
                        )
                    )
    return violations
