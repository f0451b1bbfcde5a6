"""Top-down rendering of scenes and layouts.

Two rasterizers share one world-to-pixel mapping:

- the hard rasterizer paints exact flat-color boxes (dataset images,
  thumbnails, CLI output) and is palette-decodable;
- the soft rasterizer is differentiable end to end: every slot contributes
  presence-weighted sigmoid box masks alpha-composited over the scene, so
  image-space losses propagate back to slot parameters.

The mapping preserves aspect ratio and centers the room in the image
(letterboxing); pixel (r, c) covers the world rectangle whose pixel-space
center is (c + 0.5, r + 0.5), with row 0 at the top of the image.
"""

from __future__ import annotations

import hashlib
import io
import json
from dataclasses import dataclass, field

import numpy as np
import torch
from PIL import Image

from roomfit.geometry import AABB, Layout, RoomScene, aabb
from roomfit.model.slots import SlotGrid, SlotLayout


class RasterError(ValueError):
    pass


RGB = tuple[int, int, int]


@dataclass(frozen=True)
class Palette:
    """Bijective color table for scene elements and furniture categories."""

    background: RGB = (255, 255, 255)
    wall: RGB = (0, 0, 0)
    door: RGB = (255, 128, 0)
    window: RGB = (0, 176, 255)
    categories: dict[int, RGB] = field(default_factory=dict)

    def __post_init__(self) -> None:
        colors = [self.background, self.wall, self.door, self.window]
        colors.extend(self.categories.values())
        if len(set(colors)) != len(colors):
            raise RasterError("palette colors must be pairwise distinct")

    def category_color(self, category_id: int) -> RGB:
        try:
            return self.categories[category_id]
        except KeyError:
            raise RasterError(f"palette has no color for category {category_id}") from None

    def to_json(self) -> str:
        payload = {
            "background": list(self.background),
            "wall": list(self.wall),
            "door": list(self.door),
            "window": list(self.window),
            "categories": {str(k): list(v) for k, v in sorted(self.categories.items())},
        }
        return json.dumps(payload, sort_keys=True)

    def hash(self) -> str:
        return hashlib.sha256(self.to_json().encode("utf-8")).hexdigest()

    @staticmethod
    def from_json(text: str) -> "Palette":
        raw = json.loads(text)
        return Palette(
            background=tuple(raw["background"]),
            wall=tuple(raw["wall"]),
            door=tuple(raw["door"]),
            window=tuple(raw["window"]),
            categories={int(k): tuple(v) for k, v in raw["categories"].items()},
        )


DEFAULT_PALETTE = Palette(
    categories={
        0: (220, 20, 20),     # bed
        1: (0, 150, 0),       # cabinet
        2: (30, 30, 230),     # desk
        3: (240, 0, 240),     # table
        4: (150, 75, 20),     # sofa
        5: (240, 220, 0),     # counter
        6: (0, 150, 150),     # platform
        7: (140, 0, 255),     # vanity
        8: (255, 170, 190),   # chair
        9: (130, 130, 0),     # nightstand
        10: (90, 220, 210),   # toilet
        11: (0, 70, 160),     # shower
        12: (120, 120, 120),  # fridge
        13: (0, 240, 80),     # plant
        14: (170, 110, 60),   # tv_stand
        15: (230, 190, 140),  # shelf
        16: (100, 60, 140),   # bench
    }
)


@dataclass(frozen=True)
class RenderConfig:
    image_height: int = 256
    image_width: int = 256
    palette: Palette = DEFAULT_PALETTE
    softness: float = 0.02  # soft-edge falloff in meters

    def __post_init__(self) -> None:
        if self.image_height < 1 or self.image_width < 1:
            raise RasterError("image dimensions must be positive")
        if self.softness <= 0:
            raise RasterError("softness must be positive")


@dataclass(frozen=True)
class RenderedImage:
    pixels: np.ndarray  # [H, W, 3] float in [0, 1]
    config: RenderConfig

    def __post_init__(self) -> None:
        expected = (self.config.image_height, self.config.image_width, 3)
        if self.pixels.shape != expected:
            raise RasterError(f"pixel buffer {self.pixels.shape} != config {expected}")


@dataclass(frozen=True)
class PixelMap:
    """Aspect-preserving, letterboxed world-to-pixel mapping."""

    x_min: float
    y_min: float
    scale: float  # pixels per meter
    offset_x: float
    offset_y: float
    height: int
    width: int

    @staticmethod
    def fit(bounds: AABB, cfg: RenderConfig) -> "PixelMap":
        if bounds.area() <= 0:
            raise RasterError(f"cannot rasterize degenerate bounds {bounds}")
        scale = min(cfg.image_width / bounds.width, cfg.image_height / bounds.height)
        return PixelMap(
            x_min=bounds.x_min,
            y_min=bounds.y_min,
            scale=scale,
            offset_x=(cfg.image_width - bounds.width * scale) / 2,
            offset_y=(cfg.image_height - bounds.height * scale) / 2,
            height=cfg.image_height,
            width=cfg.image_width,
        )

    def to_px(self, wx: float, wy: float) -> tuple[float, float]:
        """World point -> pixel-space (px, py); py runs top-down."""
        px = (wx - self.x_min) * self.scale + self.offset_x
        py = self.height - ((wy - self.y_min) * self.scale + self.offset_y)
        return px, py

    def col_centers_world(self) -> np.ndarray:
        cols = np.arange(self.width) + 0.5
        return self.x_min + (cols - self.offset_x) / self.scale

    def row_centers_world(self) -> np.ndarray:
        rows = np.arange(self.height) + 0.5
        return self.y_min + (self.height - rows - self.offset_y) / self.scale

    def box_mask(self, box: AABB) -> np.ndarray:
        """[H, W] bool: pixel centers covered by a world box (half-open)."""
        xs = self.col_centers_world()
        ys = self.row_centers_world()
        in_x = (xs >= box.x_min) & (xs < box.x_max)
        in_y = (ys >= box.y_min) & (ys < box.y_max)
        return in_y[:, None] & in_x[None, :]


def _paint(pixels: np.ndarray, mask: np.ndarray, color: RGB) -> None:
    pixels[mask] = np.asarray(color, dtype=np.float64) / 255.0


def rasterize_scene(scene: RoomScene, cfg: RenderConfig = RenderConfig()) -> RenderedImage:
    """Walls, doors, and windows painted flat over the background."""
    pm = PixelMap.fit(scene.bounds, cfg)
    pixels = np.empty((cfg.image_height, cfg.image_width, 3), dtype=np.float64)
    pixels[:] = np.asarray(cfg.palette.background, dtype=np.float64) / 255.0
    for wall in scene.walls:
        _paint(pixels, pm.box_mask(wall.footprint()), cfg.palette.wall)
    for door in scene.doors:
        _paint(pixels, pm.box_mask(door), cfg.palette.door)
    for window in scene.windows:
        _paint(pixels, pm.box_mask(window), cfg.palette.window)
    return RenderedImage(pixels=pixels, config=cfg)


def rasterize_layout(layout: Layout, cfg: RenderConfig = RenderConfig()) -> RenderedImage:
    """Scene raster plus furniture boxes; later furniture paints over earlier."""
    image = rasterize_scene(layout.scene, cfg)
    pm = PixelMap.fit(layout.scene.bounds, cfg)
    pixels = image.pixels
    for f in layout.furniture:
        _paint(pixels, pm.box_mask(aabb(f)), cfg.palette.category_color(f.category.id))
    return RenderedImage(pixels=pixels, config=cfg)


def palette_decode(image: RenderedImage, category_ids: list[int]) -> np.ndarray:
    """Inverse palette lookup: [H, W] int array of category ids, -1 elsewhere."""
    cfg = image.config
    rgb = np.rint(image.pixels * 255).astype(np.int64)
    out = np.full(rgb.shape[:2], -1, dtype=np.int64)
    for cid in category_ids:
        color = np.asarray(cfg.palette.category_color(cid), dtype=np.int64)
        out[(rgb == color).all(axis=2)] = cid
    return out


# --- differentiable rendering -------------------------------------------------


def category_colors_tensor(
    palette: Palette, category_ids: list[int], dtype=torch.float64
) -> torch.Tensor:
    """[C, 3] colors in [0, 1], row order matching `category_ids`."""
    table = [palette.category_color(cid) for cid in category_ids]
    return torch.tensor(table, dtype=dtype) / 255.0


def pixel_center_grids(
    bounds: AABB, cfg: RenderConfig, dtype=torch.float64
) -> tuple[torch.Tensor, torch.Tensor]:
    """World coordinates of pixel centers as [H, W] tensors (X, Y)."""
    pm = PixelMap.fit(bounds, cfg)
    xs = torch.from_numpy(pm.col_centers_world()).to(dtype)
    ys = torch.from_numpy(pm.row_centers_world()).to(dtype)
    return xs.expand(cfg.image_height, -1), ys[:, None].expand(-1, cfg.image_width)


def soft_rasterize_batch(
    packed_slots: torch.Tensor,
    base: torch.Tensor,
    grid_x: torch.Tensor,
    grid_y: torch.Tensor,
    origins: torch.Tensor,
    spans: torch.Tensor,
    cfg: RenderConfig,
    category_colors: torch.Tensor,
) -> torch.Tensor:
    """Differentiable composite of slot boxes over base images, batched.

    `packed_slots` is [B, K, 9 + C] (see `roomfit.model.slots`), `base`
    [B, H, W, 3], `grid_x`/`grid_y` [B, H, W] world coordinates of pixel
    centers, `origins` [B, 2] the (x_min, y_min) of each scene's bounds and
    `spans` [B, 2] its (width, height). Box edges fall off over
    `cfg.softness` meters through sigmoids and orientation mixing uses
    softmax weights, so the output is differentiable in every slot
    parameter. Output values stay in [0, 1].
    """
    n_categories = category_colors.shape[0]
    f = SlotLayout(n_categories)
    if packed_slots.ndim != 3 or packed_slots.shape[2] != f.width_total:
        raise RasterError(
            f"packed slots must be [B, K, {f.width_total}], got {tuple(packed_slots.shape)}"
        )
    tau = cfg.softness
    # grids come from `pixel_center_grids`, so they are separable: every row
    # of grid_x and every column of grid_y is identical, and box masks
    # factor into per-axis sigmoids blown up by an outer product.
    xs = grid_x[:, 0, :]  # [B, W]
    ys = grid_y[:, :, 0]  # [B, H]

    presence = torch.sigmoid(packed_slots[..., f.presence])  # [B, K]
    colors = torch.softmax(packed_slots[..., f.category], dim=2) @ category_colors
    orient = torch.softmax(packed_slots[..., f.orientation], dim=2)
    p_swap = orient[..., 1] + orient[..., 3]  # East + West swap plan extents

    cx = origins[:, None, 0] + packed_slots[..., f.cx] * spans[:, None, 0]
    cy = origins[:, None, 1] + packed_slots[..., f.cy] * spans[:, None, 1]
    w_world = packed_slots[..., f.width] * spans[:, None, 0]
    l_world = packed_slots[..., f.length] * spans[:, None, 1]
    half_x = ((1 - p_swap) * w_world + p_swap * l_world) / 2  # [B, K]
    half_y = ((1 - p_swap) * l_world + p_swap * w_world) / 2

    mask_x = torch.sigmoid((xs[:, None, :] - (cx - half_x)[..., None]) / tau) * torch.sigmoid(
        (((cx + half_x))[..., None] - xs[:, None, :]) / tau
    )  # [B, K, W]
    mask_y = torch.sigmoid((ys[:, None, :] - (cy - half_y)[..., None]) / tau) * torch.sigmoid(
        (((cy + half_y))[..., None] - ys[:, None, :]) / tau
    )  # [B, K, H]
    mask_y = mask_y * presence[:, :, None]

    # Painter's order as one blend: slot k is visible where nothing later
    # covers it, so its weight is m_k * prod_{j>k} (1 - m_j); the base shows
    # through with weight prod_j (1 - m_j). Per-slot masks are built from
    # the 1D factors inside the loop to keep autograd buffers small.
    batch, k_slots = packed_slots.shape[0], packed_slots.shape[1]
    height, width = grid_y.shape[1], grid_x.shape[2]
    visibility: list[torch.Tensor | None] = [None] * k_slots
    acc = torch.ones(batch, height, width, dtype=packed_slots.dtype)
    for k in range(k_slots - 1, -1, -1):
        m = mask_y[:, k, :, None] * mask_x[:, k, None, :]  # [B, H, W]
        visibility[k] = m * acc
        acc = acc * (1 - m)
    weights = torch.stack(visibility, dim=1).view(batch, k_slots, height * width)
    blended = torch.bmm(weights.transpose(1, 2), colors)  # [B, H*W, 3]
    return base * acc[..., None] + blended.view(batch, height, width, 3)


def soft_rasterize_tensor(
    packed_slots: torch.Tensor,
    base: torch.Tensor,
    bounds: AABB,
    cfg: RenderConfig,
    category_colors: torch.Tensor,
    grids: tuple[torch.Tensor, torch.Tensor] | None = None,
) -> torch.Tensor:
    """Single-image form of `soft_rasterize_batch` ([K, 9+C] over [H, W, 3])."""
    if grids is None:
        grids = pixel_center_grids(bounds, cfg, dtype=packed_slots.dtype)
    grid_x, grid_y = grids
    origins = torch.tensor([[bounds.x_min, bounds.y_min]], dtype=packed_slots.dtype)
    spans = torch.tensor([[bounds.width, bounds.height]], dtype=packed_slots.dtype)
    return soft_rasterize_batch(
        packed_slots.unsqueeze(0),
        base.unsqueeze(0),
        grid_x.unsqueeze(0),
        grid_y.unsqueeze(0),
        origins,
        spans,
        cfg,
        category_colors,
    )[0]


def soft_rasterize(
    slots: SlotGrid,
    scene: RoomScene,
    cfg: RenderConfig = RenderConfig(),
    category_ids: list[int] | None = None,
) -> RenderedImage:
    """Soft rendering of a slot grid over its scene.

    `category_ids` maps slot category columns to palette entries; by
    default the columns are assumed to be palette category ids 0..C-1.
    """
    if category_ids is None:
        category_ids = list(range(slots.n_categories))
    if len(category_ids) != slots.n_categories:
        raise RasterError("category_ids length must match the slot grid")
    base_np = rasterize_scene(scene, cfg).pixels
    out = soft_rasterize_tensor(
        torch.from_numpy(slots.packed()),
        torch.from_numpy(base_np),
        scene.bounds,
        cfg,
        category_colors_tensor(cfg.palette, category_ids),
    )
    return RenderedImage(pixels=out.numpy(), config=cfg)


# --- image IO ------------------------------------------------------------------


def to_png_bytes(image: RenderedImage) -> bytes:
    arr = np.clip(np.rint(image.pixels * 255), 0, 255).astype(np.uint8)
    buf = io.BytesIO()
    Image.fromarray(arr, mode="RGB").save(buf, format="PNG")
    return buf.getvalue()


def save_png(image: RenderedImage, path) -> None:
    with open(path, "wb") as fh:
        fh.write(to_png_bytes(image))


def png_to_image(data: bytes, cfg: RenderConfig) -> RenderedImage:
    arr = np.asarray(Image.open(io.BytesIO(data)).convert("RGB"), dtype=np.float64)
    return RenderedImage(pixels=arr / 255.0, config=cfg)
