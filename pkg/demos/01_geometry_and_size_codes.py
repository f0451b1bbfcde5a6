"""Boxes, IoU, and the five size-growth modes.

Walks through the geometric core: how furniture boxes are derived from
position/size/orientation, how IoU behaves, and what each of the five
growth codes does to a customized cabinet (including clamping at the
size-range limit and the anchored-edge rule).
"""

from dataclasses import replace

from roomfit.geometry import (
    AABB,
    CategoryCode,
    FurnitureInstance,
    Orientation,
    Point2,
    Size3,
    SizeCode,
    SizeRange,
    aabb,
    apply_size_code,
    iou,
)

cabinet = FurnitureInstance(
    category=CategoryCode(id=1, name="cabinet", customized=True),
    position=Point2(2.0, 2.0),
    size=Size3(length=0.5, width=1.2, height=2.2),
    orientation=Orientation.NORTH,
    default_size=Size3(length=0.5, width=1.2, height=2.2),
    size_range=SizeRange(0.25, 1.25, 0.6, 3.0, 1.1, 5.5),
    customized=True,
)

print("A cabinet, 1.2 m wide and 0.5 m deep, centered at (2, 2):")
print(f"  plan-view box: {aabb(cabinet)}")

east = replace(cabinet, orientation=Orientation.EAST)
print(f"  same cabinet facing East (extents swap): {aabb(east)}")

print("\nIoU between two unit boxes sliding apart:")
a = AABB(0, 0, 1, 1)
for shift in (0.0, 0.25, 0.5, 1.0):
    b = AABB(shift, 0, shift + 1, 1)
    print(f"  shift {shift:4.2f} m -> IoU {iou(a, b):.4f}")

print("\nThe five growth modes applied to the cabinet:")
print(f"  {'mode':<12} {'size (LxW)':<14} {'center':<16} anchored edge")
for code in SizeCode:
    grown = apply_size_code(cabinet, code)
    box_before, box_after = aabb(cabinet), aabb(grown)
    anchored = {
        SizeCode.DEFAULT: "all (identity)",
        SizeCode.WIDTH_LEFT: f"right edge x={box_after.x_max:.2f}",
        SizeCode.WIDTH_RIGHT: f"left edge x={box_after.x_min:.2f}",
        SizeCode.LENGTH_UP: f"bottom edge y={box_after.y_min:.2f}",
        SizeCode.LENGTH_DOWN: f"top edge y={box_after.y_max:.2f}",
    }[code]
    print(
        f"  {code.value:<12} {grown.size.length:.2f} x {grown.size.width:.2f}    "
        f"({grown.position.x:.2f}, {grown.position.y:.2f})     {anchored}"
    )

print("\nClamping: growing width with a tight range (max 1.8 m):")
tight = replace(cabinet, size_range=SizeRange(0.25, 1.25, 0.6, 1.8, 1.1, 5.5))
grown = apply_size_code(tight, SizeCode.WIDTH_LEFT)
print(f"  requested 2.4 m, got {grown.size.width:.2f} m; "
      f"right edge stays at x={aabb(grown).x_max:.2f}")
