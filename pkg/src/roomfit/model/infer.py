"""Inference: empty scene + size requests -> final layout.

The full pipeline rasterizes the scene, proposes a default-size layout,
and then, per request, runs the transfer chain (extract -> project ->
grow) and recomposes the grown size into the layout.
"""

from __future__ import annotations

import logging

from roomfit.dataset import DatasetError, target_instance_index
from roomfit.geometry import (
    CategoryCode,
    Layout,
    RoomScene,
    SizeCode,
    resize_anchored,
)
from roomfit.model.domain import DimensionalSize, LocalFurniture, denormalize_size
from roomfit.model.nets import (
    ModelParams,
    extract_furniture,
    generate_slots,
    grow_size,
    project_size,
)
from roomfit.model.slots import SlotGrid, decode_slots
from roomfit.raster import rasterize_scene

logger = logging.getLogger(__name__)

Request = tuple[int, SizeCode]  # (category id, growth code)


def compose_custom_layout(
    base: Layout,
    label: CategoryCode,
    ls2: DimensionalSize,
    code: SizeCode,
) -> Layout:
    """Recompose a layout with the targeted instance grown to `ls2`.

    The dimensional size is denormalized against the scene bounds, clamped
    to the instance's size range, and re-anchored with the growth code's
    anchor rule. With several customized instances of the target category
    the largest-by-default-area one is used (a warning is logged).
    """
    idx = target_instance_index(base, label.id)
    n_candidates = sum(
        1 for f in base.furniture if f.customized and f.category.id == label.id
    )
    if n_candidates > 1:
        logger.warning(
            "layout holds %d customized %r instances; growing the largest",
            n_candidates,
            label.name,
        )
    target = base.furniture[idx]
    world_size = denormalize_size(ls2.size, base.scene)
    resized = resize_anchored(target, world_size, code)
    furniture = list(base.furniture)
    furniture[idx] = resized
    return Layout(scene=base.scene, furniture=tuple(furniture))


class InferenceModel:
    """Reentrant inference over one immutable parameter set."""

    def __init__(self, params: ModelParams):
        self.params = params.eval()
        self._render_cfg = params.render_config()

    def predict_slots(self, scene: RoomScene) -> SlotGrid:
        image = rasterize_scene(scene, self._render_cfg)
        return generate_slots(self.params, image)

    def predict_layout(self, scene: RoomScene) -> Layout:
        """Default-size layout proposal for an empty scene."""
        return decode_slots(self.predict_slots(scene), scene, self.params.catalog)

    def predict_local(self, scene: RoomScene, label: CategoryCode) -> LocalFurniture:
        return extract_furniture(self.params, self.predict_slots(scene), label)

    def predict_grown(
        self, scene: RoomScene, label: CategoryCode, code: SizeCode
    ) -> DimensionalSize:
        """Chained grown-size prediction in the dimensional domain."""
        tp1 = self.predict_local(scene, label)
        return grow_size(self.params, project_size(self.params, tp1), code)

    def generate(self, scene: RoomScene, requests: list[Request]) -> Layout:
        """The end-to-end model: scene + requests -> composed layout."""
        slots = self.predict_slots(scene)
        layout = decode_slots(slots, scene, self.params.catalog)
        for category_id, code in requests:
            label = self.params.catalog.entry(category_id).code
            tp1 = extract_furniture(self.params, slots, label)
            ls2 = grow_size(self.params, project_size(self.params, tp1), code)
            layout = compose_custom_layout(layout, label, ls2, code)
        return layout


def infer(
    params: ModelParams, scene: RoomScene, requests: list[Request]
) -> Layout:
    """Functional form of `InferenceModel.generate`."""
    return InferenceModel(params).generate(scene, requests)


__all__ = [
    "InferenceModel",
    "Request",
    "compose_custom_layout",
    "infer",
    "DatasetError",
]
