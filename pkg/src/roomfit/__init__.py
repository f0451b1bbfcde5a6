"""roomfit: furniture layout generation with custom-size growth.

The package is organized as a library first:

- `roomfit.geometry`: boxes, IoU, size-code growth, layout validation
- `roomfit.dataset`: corpus schema, loader, splits, synthetic fixtures
- `roomfit.raster`: hard and soft (differentiable) top-down rendering
- `roomfit.model`: slot encoding, networks, losses, training, inference
- `roomfit.metrics`: the four layout quality metrics and report generation
- `roomfit.service`: HTTP inference service
- `roomfit.cli`: train / eval / render / serve entry points
"""

from roomfit.geometry import (
    AABB,
    CategoryCode,
    FurnitureInstance,
    Layout,
    LayoutVariant,
    Orientation,
    Point2,
    RoomScene,
    RoomType,
    Size3,
    SizeCode,
    SizeRange,
    WallSegment,
    aabb,
    apply_size_code,
    iou,
    validate_layout,
)

__version__ = "0.1.0"

__all__ = [
    "AABB",
    "CategoryCode",
    "FurnitureInstance",
    "Layout",
    "LayoutVariant",
    "Orientation",
    "Point2",
    "RoomScene",
    "RoomType",
    "Size3",
    "SizeCode",
    "SizeRange",
    "WallSegment",
    "aabb",
    "apply_size_code",
    "iou",
    "validate_layout",
    "__version__",
]
