"""The five learnable modules and their functional surface.

- `LayoutGenerator`: empty-room image -> slot grid (the layout proposal)
- `LayoutDiscriminator`: rendered layout image -> real/fake logit
- `FurnitureExtractor`: slot features + category one-hot -> local furniture
- `SizeProjector`: local furniture -> size-only dimensional view
- `SizeGrower`: default dimensional size + growth code -> grown size

Numpy-facing wrappers (`generate_slots`, `discriminate`, ...) expose the
modules over the library's domain types; training and gradient checks run
on the underlying tensors.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import torch
from torch import nn

from roomfit.dataset import Catalog
from roomfit.geometry import CategoryCode, Point2, SizeCode
from roomfit.model.domain import DimensionalSize, LocalFurniture, vector_to_size
from roomfit.model.slots import SlotGrid, SlotLayout
from roomfit.raster import Palette, DEFAULT_PALETTE, RenderConfig, RenderedImage

SIZE_CODE_ORDER = (
    SizeCode.DEFAULT,
    SizeCode.WIDTH_LEFT,
    SizeCode.WIDTH_RIGHT,
    SizeCode.LENGTH_UP,
    SizeCode.LENGTH_DOWN,
)

_EXTENT_FLOOR = 1e-4
_PROB_EPS = 1e-7


class ModelError(ValueError):
    pass


@dataclass(frozen=True)
class ModelConfig:
    """Architecture hyperparameters; every width is a config value."""

    n_slots: int = 16
    image_size: int = 64
    conv_channels: tuple[int, ...] = (16, 32, 64, 128)
    generator_fc: int = 512
    discriminator_fc: int = 256
    transfer_width: int = 256
    transfer_depth: int = 2

    def __post_init__(self) -> None:
        if self.image_size % (2 ** len(self.conv_channels)) != 0:
            raise ModelError(
                "image_size must be divisible by 2^len(conv_channels) "
                f"({self.image_size} vs {self.conv_channels})"
            )

    def render_config(self, palette: Palette) -> RenderConfig:
        return RenderConfig(
            image_height=self.image_size, image_width=self.image_size, palette=palette
        )


def _conv_stack(channels: tuple[int, ...]) -> nn.Sequential:
    layers: list[nn.Module] = []
    prev = 3
    for ch in channels:
        layers += [nn.Conv2d(prev, ch, kernel_size=3, stride=2, padding=1), nn.GELU()]
        prev = ch
    return nn.Sequential(*layers)


def _mlp(in_dim: int, width: int, depth: int, out_dim: int) -> nn.Sequential:
    layers: list[nn.Module] = []
    prev = in_dim
    for _ in range(depth):
        layers += [nn.Linear(prev, width), nn.GELU()]
        prev = width
    layers.append(nn.Linear(prev, out_dim))
    return nn.Sequential(*layers)


class LayoutGenerator(nn.Module):
    """Convolutional encoder with a fixed-slot head.

    Returns packed slots [B, K, 9+C]: presence and category/orientation
    logits raw, centers squashed through sigmoid, extents through softplus
    (strictly positive).
    """

    def __init__(self, cfg: ModelConfig, n_categories: int):
        super().__init__()
        self.cfg = cfg
        self.n_categories = n_categories
        self.fields = SlotLayout(n_categories)
        self.encoder = _conv_stack(cfg.conv_channels)
        spatial = cfg.image_size // (2 ** len(cfg.conv_channels))
        flat = cfg.conv_channels[-1] * spatial * spatial
        self.head = nn.Sequential(
            nn.Linear(flat, cfg.generator_fc),
            nn.GELU(),
            nn.Linear(cfg.generator_fc, cfg.n_slots * self.fields.width_total),
        )

    def forward(self, images: torch.Tensor) -> torch.Tensor:
        if images.ndim != 4 or images.shape[1] != 3:
            raise ModelError(f"expected [B, 3, H, W] images, got {tuple(images.shape)}")
        if images.shape[2] != self.cfg.image_size or images.shape[3] != self.cfg.image_size:
            raise ModelError(
                f"image size {tuple(images.shape[2:])} does not match the model "
                f"({self.cfg.image_size})"
            )
        raw = self.head(self.encoder(images).flatten(1))
        raw = raw.view(-1, self.cfg.n_slots, self.fields.width_total)
        f = self.fields
        packed = raw.clone()
        packed[..., [f.cx, f.cy]] = torch.sigmoid(raw[..., [f.cx, f.cy]])
        packed[..., [f.width, f.length]] = (
            nn.functional.softplus(raw[..., [f.width, f.length]]) + _EXTENT_FLOOR
        )
        return packed


class LayoutDiscriminator(nn.Module):
    """Convolutional real/fake classifier over rendered layout images."""

    def __init__(self, cfg: ModelConfig):
        super().__init__()
        self.cfg = cfg
        self.encoder = _conv_stack(cfg.conv_channels)
        spatial = cfg.image_size // (2 ** len(cfg.conv_channels))
        flat = cfg.conv_channels[-1] * spatial * spatial
        self.head = nn.Sequential(
            nn.Linear(flat, cfg.discriminator_fc),
            nn.GELU(),
            nn.Linear(cfg.discriminator_fc, 1),
        )

    def forward(self, images: torch.Tensor) -> torch.Tensor:
        if images.ndim != 4 or images.shape[1] != 3:
            raise ModelError(f"expected [B, 3, H, W] images, got {tuple(images.shape)}")
        if images.shape[2] != self.cfg.image_size or images.shape[3] != self.cfg.image_size:
            raise ModelError(
                f"image size {tuple(images.shape[2:])} does not match the model "
                f"({self.cfg.image_size})"
            )
        return self.head(self.encoder(images).flatten(1)).squeeze(-1)


def slot_features(packed: torch.Tensor, n_categories: int) -> torch.Tensor:
    """Bounded slot representation fed to the extractor.

    Presence logits become probabilities and category/orientation logits
    softmax weights, so teacher-encoded layouts and generator outputs live
    on the same scale.
    """
    f = SlotLayout(n_categories)
    feats = packed.clone()
    feats[..., f.presence] = torch.sigmoid(packed[..., f.presence])
    feats[..., f.category] = torch.softmax(packed[..., f.category], dim=-1)
    feats[..., f.orientation] = torch.softmax(packed[..., f.orientation], dim=-1)
    return feats


class FurnitureExtractor(nn.Module):
    """Slot grid + target category -> (size, location, category logits)."""

    def __init__(self, cfg: ModelConfig, n_categories: int):
        super().__init__()
        self.n_categories = n_categories
        in_dim = cfg.n_slots * SlotLayout(n_categories).width_total + n_categories
        self.body = _mlp(in_dim, cfg.transfer_width, cfg.transfer_depth, cfg.transfer_width)
        self.size_head = nn.Linear(cfg.transfer_width, 3)
        self.loc_head = nn.Linear(cfg.transfer_width, 2)
        self.cat_head = nn.Linear(cfg.transfer_width, n_categories)

    def forward(
        self, packed_slots: torch.Tensor, label_onehot: torch.Tensor
    ) -> tuple[torch.Tensor, torch.Tensor, torch.Tensor]:
        feats = slot_features(packed_slots, self.n_categories).flatten(1)
        h = nn.functional.gelu(self.body(torch.cat([feats, label_onehot], dim=1)))
        size = nn.functional.softplus(self.size_head(h)) + _EXTENT_FLOOR
        loc = torch.sigmoid(self.loc_head(h))
        return size, loc, self.cat_head(h)


class SizeProjector(nn.Module):
    """Local furniture -> dimensional (size-only) view, strictly positive."""

    def __init__(self, cfg: ModelConfig, n_categories: int):
        super().__init__()
        self.body = _mlp(3 + 2 + n_categories, cfg.transfer_width, cfg.transfer_depth, 3)

    def forward(
        self, size: torch.Tensor, loc: torch.Tensor, cat_probs: torch.Tensor
    ) -> torch.Tensor:
        raw = self.body(torch.cat([size, loc, cat_probs], dim=1))
        return nn.functional.softplus(raw) + _EXTENT_FLOOR


class SizeGrower(nn.Module):
    """Default dimensional size + growth-code one-hot -> grown size."""

    def __init__(self, cfg: ModelConfig):
        super().__init__()
        self.body = _mlp(3 + len(SIZE_CODE_ORDER), cfg.transfer_width, cfg.transfer_depth, 3)

    def forward(self, ls1: torch.Tensor, code_onehot: torch.Tensor) -> torch.Tensor:
        raw = self.body(torch.cat([ls1, code_onehot], dim=1))
        return nn.functional.softplus(raw) + _EXTENT_FLOOR


@dataclass
class ModelParams:
    """Everything a trained model needs to run: modules, catalog, palette."""

    config: ModelConfig
    catalog: Catalog
    palette: Palette
    seed: int
    generator: LayoutGenerator
    discriminator: LayoutDiscriminator
    extractor: FurnitureExtractor
    projector: SizeProjector
    grower: SizeGrower

    def modules(self) -> dict[str, nn.Module]:
        return {
            "generator": self.generator,
            "discriminator": self.discriminator,
            "extractor": self.extractor,
            "projector": self.projector,
            "grower": self.grower,
        }

    def eval(self) -> "ModelParams":
        for m in self.modules().values():
            m.eval()
        return self

    def all_finite(self) -> bool:
        return all(
            torch.isfinite(p).all().item()
            for m in self.modules().values()
            for p in m.parameters()
        )

    def category_index(self, category_id: int) -> int:
        for i, e in enumerate(self.catalog.entries):
            if e.code.id == category_id:
                return i
        raise ModelError(f"unknown category id {category_id}")

    def render_config(self) -> RenderConfig:
        return self.config.render_config(self.palette)


def build_model(
    config: ModelConfig,
    catalog: Catalog,
    palette: Palette = DEFAULT_PALETTE,
    seed: int = 0,
) -> ModelParams:
    """Deterministically initialized model for a catalog."""
    torch.manual_seed(seed)
    c = len(catalog)
    return ModelParams(
        config=config,
        catalog=catalog,
        palette=palette,
        seed=seed,
        generator=LayoutGenerator(config, c),
        discriminator=LayoutDiscriminator(config),
        extractor=FurnitureExtractor(config, c),
        projector=SizeProjector(config, c),
        grower=SizeGrower(config),
    )


# --- numpy-facing functional surface -------------------------------------------


def _image_tensor(image: RenderedImage, like: nn.Module) -> torch.Tensor:
    dtype = next(like.parameters()).dtype
    return torch.from_numpy(image.pixels).to(dtype).permute(2, 0, 1).unsqueeze(0)


def generate_slots(params: ModelParams, image: RenderedImage) -> SlotGrid:
    """Layout proposal for an empty-room image (inference mode)."""
    params.eval()
    with torch.no_grad():
        packed = params.generator(_image_tensor(image, params.generator))[0]
    return SlotGrid.from_packed(packed.double().numpy(), len(params.catalog))


def discriminate(params: ModelParams, image: RenderedImage) -> float:
    """Probability that a rendered layout image is a ground-truth render."""
    params.eval()
    with torch.no_grad():
        logit = params.discriminator(_image_tensor(image, params.discriminator))[0]
    return float(np.clip(torch.sigmoid(logit).item(), _PROB_EPS, 1 - _PROB_EPS))


def label_onehot(params: ModelParams, category_id: int) -> torch.Tensor:
    vec = torch.zeros(1, len(params.catalog))
    vec[0, params.category_index(category_id)] = 1.0
    return vec


def code_onehot(code: SizeCode) -> torch.Tensor:
    vec = torch.zeros(1, len(SIZE_CODE_ORDER))
    vec[0, SIZE_CODE_ORDER.index(code)] = 1.0
    return vec


def extract_furniture(
    params: ModelParams, slots: SlotGrid, label: CategoryCode
) -> LocalFurniture:
    """Pull the targeted customized furniture out of a layout encoding."""
    if not params.catalog.has(label.id):
        raise ModelError(f"unknown category id {label.id}")
    params.eval()
    dtype = next(params.extractor.parameters()).dtype
    with torch.no_grad():
        size, loc, cat_logits = params.extractor(
            torch.from_numpy(slots.packed()).to(dtype).unsqueeze(0),
            label_onehot(params, label.id).to(dtype),
        )
        probs = torch.softmax(cat_logits[0].double(), dim=0).numpy()
    probs = probs / probs.sum()
    return LocalFurniture(
        size=vector_to_size(size[0].double().numpy()),
        location=Point2(float(loc[0, 0]), float(loc[0, 1])),
        category=probs,
    )


def project_size(params: ModelParams, tp1: LocalFurniture) -> DimensionalSize:
    """Strip a local furniture view down to the dimensional domain."""
    params.eval()
    dtype = next(params.projector.parameters()).dtype
    with torch.no_grad():
        out = params.projector(
            torch.tensor([[tp1.size.length, tp1.size.width, tp1.size.height]], dtype=dtype),
            torch.tensor([[tp1.location.x, tp1.location.y]], dtype=dtype),
            torch.from_numpy(tp1.category).to(dtype).unsqueeze(0),
        )
    return DimensionalSize(size=vector_to_size(out[0].double().numpy()))


def grow_size(
    params: ModelParams, ls1: DimensionalSize, code: SizeCode
) -> DimensionalSize:
    """Grown size for a growth code, in the dimensional domain."""
    params.eval()
    dtype = next(params.grower.parameters()).dtype
    with torch.no_grad():
        out = params.grower(
            torch.tensor([[ls1.size.length, ls1.size.width, ls1.size.height]], dtype=dtype),
            code_onehot(code).to(dtype),
        )
    return DimensionalSize(size=vector_to_size(out[0].double().numpy()))
