"""End-to-end training of the full pipeline.

Each step alternates a discriminator update (binary cross-entropy over
soft-rendered real and generated layouts, fakes detached) with a joint
update of the generator and the three transfer modules. The joint
objective is the generator loss plus the auxiliary-weighted transfer and
growth losses, all evaluated on the chained predictions (never
teacher-forced): the extractor reads the generator's slots, the projector
the extractor's output, and the grower the projector's.

Training is single-threaded and bit-deterministic given (corpus, config).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import torch

from roomfit.dataset import Corpus, target_instance_index
from roomfit.model import losses
from roomfit.model.domain import normalize_size, size_to_vector
from roomfit.model.nets import (
    SIZE_CODE_ORDER,
    ModelConfig,
    ModelParams,
    build_model,
)
from roomfit.model.slots import encode_layout, normalize_point
from roomfit.raster import (
    DEFAULT_PALETTE,
    category_colors_tensor,
    pixel_center_grids,
    rasterize_scene,
    soft_rasterize_batch,
)


class TrainError(RuntimeError):
    pass


class TrainingDiverged(TrainError):
    """A loss went non-finite; message carries the step and loss values."""


@dataclass(frozen=True)
class TrainConfig:
    steps: int = 1000
    batch_size: int = 32
    learning_rate: float = 1e-4
    lambda_adv: float = 0.01   # weight of the adversarial term
    alpha: float = 1.0         # weight of the transfer/growth losses
    seed: int = 0

    def __post_init__(self) -> None:
        if self.steps < 0 or self.batch_size < 1:
            raise TrainError("steps must be >= 0 and batch_size >= 1")
        # zero learning rate / weights are allowed for diagnostics
        if self.learning_rate < 0 or self.lambda_adv < 0 or self.alpha < 0:
            raise TrainError("learning rate and loss weights must be >= 0")


@dataclass(frozen=True)
class LossRecord:
    step: int
    discriminator: float
    generator: float
    extraction: float
    projection: float
    growth: float

    def joint(self, alpha: float) -> float:
        return self.generator + alpha * (self.extraction + self.projection + self.growth)


@dataclass
class TrainResult:
    params: ModelParams
    history: list[LossRecord]


def loss_history_csv(history: list[LossRecord]) -> str:
    """Loss history in the canonical CSV layout."""
    lines = ["step,L_D,L_G,L_trans1,L_trans2,L_size"]
    for r in history:
        lines.append(
            f"{r.step},{r.discriminator:.10g},{r.generator:.10g},"
            f"{r.extraction:.10g},{r.projection:.10g},{r.growth:.10g}"
        )
    return "\n".join(lines) + "\n"


class _PreparedSample:
    """Tensors a training step needs, all computed once up front."""

    __slots__ = (
        "image", "base", "grid_x", "grid_y", "origin", "span",
        "gt_packed", "n_gt", "real_image",
        "has_target", "label_index", "tp1_size", "tp1_loc",
        "variant_codes", "variant_sizes",
    )


def _prepare(corpus: Corpus, params: ModelParams, dtype: torch.dtype) -> list[_PreparedSample]:
    cfg = params.render_config()
    colors = category_colors_tensor(
        params.palette, [e.code.id for e in params.catalog.entries], dtype=dtype
    )
    index_of = {e.code.id: i for i, e in enumerate(params.catalog.entries)}
    prepared = []
    for sample in corpus.samples:
        scene = sample.scene
        p = _PreparedSample()
        base = torch.from_numpy(rasterize_scene(scene, cfg).pixels).to(dtype)
        p.base = base
        p.image = base.permute(2, 0, 1)
        gx, gy = pixel_center_grids(scene.bounds, cfg, dtype=dtype)
        p.grid_x, p.grid_y = gx.contiguous(), gy.contiguous()
        p.origin = torch.tensor([scene.bounds.x_min, scene.bounds.y_min], dtype=dtype)
        p.span = torch.tensor([scene.bounds.width, scene.bounds.height], dtype=dtype)
        grid = encode_layout(sample.layout, params.catalog, params.config.n_slots)
        p.gt_packed = torch.from_numpy(grid.packed()).to(dtype)
        p.n_gt = len(sample.layout.furniture)
        with torch.no_grad():
            p.real_image = soft_rasterize_batch(
                p.gt_packed.unsqueeze(0),
                base.unsqueeze(0),
                p.grid_x.unsqueeze(0),
                p.grid_y.unsqueeze(0),
                p.origin.unsqueeze(0),
                p.span.unsqueeze(0),
                cfg,
                colors,
            )[0].permute(2, 0, 1)

        p.has_target = bool(sample.variants)
        if p.has_target:
            target_cat = sample.variants[0].target_category
            idx = target_instance_index(sample.layout, target_cat.id)
            target = sample.layout.furniture[idx]
            p.label_index = index_of[target_cat.id]
            p.tp1_size = torch.tensor(
                size_to_vector(normalize_size(target.size, scene)), dtype=dtype
            )
            p.tp1_loc = torch.tensor(
                normalize_point(target.position, scene), dtype=dtype
            )
            p.variant_codes = torch.tensor(
                [SIZE_CODE_ORDER.index(v.size_code) for v in sample.variants]
            )
            p.variant_sizes = torch.stack(
                [
                    torch.tensor(
                        size_to_vector(
                            normalize_size(
                                v.result.furniture[
                                    target_instance_index(v.result, target_cat.id)
                                ].size,
                                scene,
                            )
                        ),
                        dtype=dtype,
                    )
                    for v in sample.variants
                ]
            )
        prepared.append(p)
    return prepared


def train(
    corpus: Corpus,
    cfg: TrainConfig,
    model_cfg: ModelConfig | None = None,
    params: ModelParams | None = None,
) -> TrainResult:
    """Train all modules end to end on a corpus; returns params + history."""
    if len(corpus) == 0:
        raise TrainError("training corpus is empty")
    if not any(s.variants for s in corpus.samples):
        raise TrainError("training corpus has no size variants")
    model_cfg = model_cfg or ModelConfig()
    n_threads = torch.get_num_threads()
    torch.set_num_threads(1)
    try:
        torch.manual_seed(cfg.seed)
        if params is None:
            params = build_model(model_cfg, corpus.catalog, DEFAULT_PALETTE, seed=cfg.seed)
        dtype = next(params.generator.parameters()).dtype
        render_cfg = params.render_config()
        colors = category_colors_tensor(
            params.palette, [e.code.id for e in params.catalog.entries], dtype=dtype
        )
        prepared = _prepare(corpus, params, dtype)
        n_categories = len(params.catalog)
        n_codes = len(SIZE_CODE_ORDER)

        for m in params.modules().values():
            m.train()
        gen_modules = [params.generator, params.extractor, params.projector, params.grower]
        opt_g = torch.optim.Adam(
            [p for m in gen_modules for p in m.parameters()], lr=cfg.learning_rate
        )
        opt_d = torch.optim.Adam(params.discriminator.parameters(), lr=cfg.learning_rate)
        sampler = torch.Generator().manual_seed(cfg.seed + 1)

        history: list[LossRecord] = []
        full_batch = cfg.batch_size >= len(prepared)
        for step in range(cfg.steps):
            if full_batch:
                idx = torch.arange(len(prepared))
            else:
                idx = torch.randint(len(prepared), (cfg.batch_size,), generator=sampler)
            batch = [prepared[int(i)] for i in idx]
            images = torch.stack([p.image for p in batch])
            bases = torch.stack([p.base for p in batch])
            grid_x = torch.stack([p.grid_x for p in batch])
            grid_y = torch.stack([p.grid_y for p in batch])
            origins = torch.stack([p.origin for p in batch])
            spans = torch.stack([p.span for p in batch])
            gt_packed = torch.stack([p.gt_packed for p in batch])
            n_gt = torch.tensor([p.n_gt for p in batch])
            real_images = torch.stack([p.real_image for p in batch])

            # (a) discriminator step, fakes hard-detached
            with torch.no_grad():
                fake_detached = soft_rasterize_batch(
                    params.generator(images), bases, grid_x, grid_y,
                    origins, spans, render_cfg, colors,
                ).permute(0, 3, 1, 2)
            d_loss = losses.discriminator_loss_t(
                params.discriminator(real_images),
                params.discriminator(fake_detached),
            )
            opt_d.zero_grad()
            d_loss.backward()
            opt_d.step()

            # (b) joint generator + transfer step on the chained predictions
            pred = params.generator(images)
            fake = soft_rasterize_batch(
                pred, bases, grid_x, grid_y, origins, spans, render_cfg, colors
            ).permute(0, 3, 1, 2)
            adv = losses.adversarial_loss_t(params.discriminator(fake))
            layout_loss = losses.layout_loss_t(pred, gt_packed, n_gt, n_categories)
            g_loss = layout_loss + cfg.lambda_adv * adv

            targeted = [i for i, p in enumerate(batch) if p.has_target]
            if targeted:
                sel = torch.tensor(targeted)
                onehot = torch.zeros(len(targeted), n_categories, dtype=dtype)
                for row, i in enumerate(targeted):
                    onehot[row, batch[i].label_index] = 1.0
                size_p, loc_p, cat_logits = params.extractor(pred[sel], onehot)
                t1_loss = losses.extraction_loss_t(
                    size_p,
                    loc_p,
                    cat_logits,
                    torch.stack([batch[i].tp1_size for i in targeted]),
                    torch.stack([batch[i].tp1_loc for i in targeted]),
                    torch.tensor([batch[i].label_index for i in targeted]),
                )
                tp2 = params.projector(size_p, loc_p, torch.softmax(cat_logits, dim=1))
                t2_loss = losses.size_l1_t(
                    tp2, torch.stack([batch[i].tp1_size for i in targeted])
                )
                repeat_idx = []
                code_rows = []
                gt_rows = []
                for row, i in enumerate(targeted):
                    for v in range(batch[i].variant_codes.shape[0]):
                        repeat_idx.append(row)
                        code_rows.append(int(batch[i].variant_codes[v]))
                        gt_rows.append(batch[i].variant_sizes[v])
                code_onehot = torch.zeros(len(code_rows), n_codes, dtype=dtype)
                code_onehot[torch.arange(len(code_rows)), code_rows] = 1.0
                grown = params.grower(tp2[repeat_idx], code_onehot)
                size_loss = losses.size_l1_t(grown, torch.stack(gt_rows))
            else:
                t1_loss = pred.new_zeros(())
                t2_loss = pred.new_zeros(())
                size_loss = pred.new_zeros(())

            joint = g_loss + cfg.alpha * (t1_loss + t2_loss + size_loss)
            opt_g.zero_grad()
            joint.backward()
            opt_g.step()

            record = LossRecord(
                step=step,
                discriminator=d_loss.detach().item(),
                generator=g_loss.detach().item(),
                extraction=t1_loss.detach().item(),
                projection=t2_loss.detach().item(),
                growth=size_loss.detach().item(),
            )
            values = [
                record.discriminator, record.generator,
                record.extraction, record.projection, record.growth,
            ]
            if not all(math.isfinite(v) for v in values):
                raise TrainingDiverged(
                    f"non-finite loss at step {step}: "
                    f"L_D={record.discriminator} L_G={record.generator} "
                    f"L_trans1={record.extraction} L_trans2={record.projection} "
                    f"L_size={record.growth}"
                )
            history.append(record)

        params.eval()
        if not params.all_finite():
            raise TrainingDiverged("non-finite parameters after training")
        return TrainResult(params=params, history=history)
    finally:
        torch.set_num_threads(n_threads)
