import numpy as np
import pytest

from roomfit.geometry import (
    AABB,
    CategoryCode,
    FurnitureInstance,
    Orientation,
    Point2,
    RoomScene,
    RoomType,
    Size3,
    SizeRange,
    WallSegment,
)


def make_room(
    width: float = 4.0,
    height: float = 4.0,
    room_type: RoomType = RoomType.BEDROOM,
) -> RoomScene:
    """A rectangular room with one door (south wall) and one window (east)."""
    from roomfit.dataset import rectangular_room

    return rectangular_room(
        width_mm=int(round(width * 1000)),
        depth_mm=int(round(height * 1000)),
        room_type=room_type,
    )


def make_furniture(
    cx: float = 2.0,
    cy: float = 2.0,
    width: float = 1.0,
    length: float = 2.0,
    height: float = 0.5,
    orientation: Orientation = Orientation.NORTH,
    customized: bool = True,
    category: CategoryCode | None = None,
    width_max: float | None = None,
    length_max: float | None = None,
) -> FurnitureInstance:
    cat = category or CategoryCode(id=0, name="bed", customized=customized)
    size = Size3(length=length, width=width, height=height)
    rng = SizeRange(
        length_min=length * 0.25,
        length_max=length_max if length_max is not None else length * 4,
        width_min=width * 0.25,
        width_max=width_max if width_max is not None else width * 4,
        height_min=height * 0.5,
        height_max=height * 2,
    )
    return FurnitureInstance(
        category=cat,
        position=Point2(cx, cy),
        size=size,
        orientation=orientation,
        default_size=size,
        size_range=rng,
        customized=customized,
    )


def small_catalog():
    """Three-category catalog for fast model tests."""
    from roomfit.dataset import Catalog, CatalogEntry

    def entry(cid, name, customized):
        default = Size3(0.8, 1.0, 0.5)
        return CatalogEntry(
            code=CategoryCode(id=cid, name=name, customized=customized),
            default_size=default,
            size_range=SizeRange(0.4, 2.0, 0.5, 2.5, 0.25, 1.25),
        )

    return Catalog((entry(0, "bed", True), entry(1, "desk", True), entry(2, "chair", False)))


def small_model_config(**overrides):
    from roomfit.model.nets import ModelConfig

    defaults = dict(
        n_slots=4,
        image_size=16,
        conv_channels=(4, 8),
        generator_fc=24,
        discriminator_fc=16,
        transfer_width=16,
        transfer_depth=2,
    )
    defaults.update(overrides)
    return ModelConfig(**defaults)


@pytest.fixture
def room() -> RoomScene:
    return make_room()


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240817)
