"""Training objectives.

The adversarial pair is standard binary cross-entropy over rendered layout
images (label 1 for ground-truth renders). The layout loss matches
predicted slots to ground-truth items greedily (same category first, then
nearest center) and sums L1 box terms with category/orientation
cross-entropy and a presence BCE over all slots. The three transfer
losses are L1 distances, with a category cross-entropy term for the
local-furniture stage.

Tensor functions (suffix `_t`) carry gradients and are what training uses;
the plain-float wrappers expose the same math over the library's domain
types.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import torch
from torch.nn import functional as F

from roomfit.dataset import Catalog
from roomfit.geometry import Layout
from roomfit.model.domain import DimensionalSize, LocalFurniture
from roomfit.model.slots import SlotGrid, SlotLayout, encode_layout

# Constant cost per ground-truth item that cannot be matched because every
# slot is taken; keeps the objective honest when layouts overflow the grid.
MISS_PENALTY = 1.0

_LOG_EPS = 1e-12


# --- discriminator / adversarial ------------------------------------------------


def discriminator_loss_t(real_logits: torch.Tensor, fake_logits: torch.Tensor) -> torch.Tensor:
    """Mean of -log D(real) - log(1 - D(fake)), computed on logits."""
    return (F.softplus(-real_logits) + F.softplus(fake_logits)).mean()


def adversarial_loss_t(fake_logits: torch.Tensor) -> torch.Tensor:
    """Mean of -log D(fake); pushes the generator toward 'real' verdicts."""
    return F.softplus(-fake_logits).mean()


def discriminator_loss(d_real, d_fake) -> float:
    """BCE over probabilities: -log(d_real) - log(1 - d_fake), batch mean."""
    d_real = np.clip(np.asarray(d_real, dtype=np.float64), _LOG_EPS, 1 - _LOG_EPS)
    d_fake = np.clip(np.asarray(d_fake, dtype=np.float64), _LOG_EPS, 1 - _LOG_EPS)
    return float(np.mean(-np.log(d_real) - np.log(1 - d_fake)))


# --- layout matching loss -------------------------------------------------------


def match_indices(
    pred_packed: torch.Tensor, gt_packed: torch.Tensor, n_gt: int, n_categories: int
) -> list[int]:
    """Greedy slot assignment for one sample.

    Each ground-truth item takes the nearest-center unmatched slot from the
    first nonempty tier: same argmax category and positive presence logit,
    then same category, then positive presence, then any unmatched slot.
    Returns one slot index per ground-truth item (-1 when every slot is
    taken).
    """
    f = SlotLayout(n_categories)
    with torch.no_grad():
        pred_cat = pred_packed[:, f.category].argmax(dim=1)
        visible = pred_packed[:, f.presence] > 0
        gt_cat = gt_packed[:n_gt, f.category].argmax(dim=1)
        pred_centers = pred_packed[:, [f.cx, f.cy]]
        gt_centers = gt_packed[:n_gt, [f.cx, f.cy]]
        taken = torch.zeros(pred_packed.shape[0], dtype=torch.bool)
        out: list[int] = []
        for i in range(n_gt):
            dists = (pred_centers - gt_centers[i]).pow(2).sum(dim=1)
            same_cat = pred_cat == gt_cat[i]
            free = ~taken
            tiers = (same_cat & visible & free, same_cat & free, visible & free, free)
            pool = next((t for t in tiers if bool(t.any())), None)
            if pool is None:
                out.append(-1)
                continue
            k = int(dists.masked_fill(~pool, float("inf")).argmin())
            taken[k] = True
            out.append(k)
    return out


def layout_loss_terms_t(
    pred: torch.Tensor, gt: torch.Tensor, n_gt: torch.Tensor, n_categories: int
) -> dict[str, torch.Tensor]:
    """Per-batch-mean components of the layout loss.

    `pred` and `gt` are packed slots [B, K, 9+C]; `n_gt` the ground-truth
    item count per sample. The box term is the per-sample sum of L1
    distances over matched centers and extents.
    """
    f = SlotLayout(n_categories)
    batch = pred.shape[0]
    zero = pred.new_zeros(())
    box = zero.clone()
    category = zero.clone()
    orientation = zero.clone()
    presence = zero.clone()
    miss = zero.clone()
    for b in range(batch):
        n = int(n_gt[b])
        assign = match_indices(pred[b], gt[b], n, n_categories)
        matched = [(i, k) for i, k in enumerate(assign) if k >= 0]
        miss = miss + MISS_PENALTY * (n - len(matched))
        target_presence = pred.new_zeros(pred.shape[1])
        if matched:
            gt_idx = torch.tensor([i for i, _ in matched])
            slot_idx = torch.tensor([k for _, k in matched])
            target_presence[slot_idx] = 1.0
            pred_boxes = pred[b][slot_idx][:, [f.cx, f.cy, f.width, f.length]]
            gt_boxes = gt[b][gt_idx][:, [f.cx, f.cy, f.width, f.length]]
            box = box + (pred_boxes - gt_boxes).abs().sum()
            category = category + F.cross_entropy(
                pred[b][slot_idx][:, f.category],
                gt[b][gt_idx][:, f.category].argmax(dim=1),
                reduction="sum",
            )
            orientation = orientation + F.cross_entropy(
                pred[b][slot_idx][:, f.orientation],
                gt[b][gt_idx][:, f.orientation].argmax(dim=1),
                reduction="sum",
            )
        presence = presence + F.binary_cross_entropy_with_logits(
            pred[b][:, f.presence], target_presence, reduction="sum"
        )
    scale = 1.0 / batch
    return {
        "box": box * scale,
        "category": category * scale,
        "orientation": orientation * scale,
        "presence": presence * scale,
        "miss": miss * scale,
    }


def layout_loss_t(
    pred: torch.Tensor, gt: torch.Tensor, n_gt: torch.Tensor, n_categories: int
) -> torch.Tensor:
    terms = layout_loss_terms_t(pred, gt, n_gt, n_categories)
    return terms["box"] + terms["category"] + terms["orientation"] + terms["presence"] + terms["miss"]


@dataclass(frozen=True)
class GeneratorLossBreakdown:
    box: float
    category: float
    orientation: float
    presence: float
    miss: float
    adversarial: float
    lambda_adv: float

    @property
    def layout(self) -> float:
        return self.box + self.category + self.orientation + self.presence + self.miss

    @property
    def total(self) -> float:
        return self.layout + self.lambda_adv * self.adversarial


def generator_loss(
    slots: SlotGrid,
    target: Layout,
    d_fake: float,
    catalog: Catalog,
    lambda_adv: float = 0.01,
) -> GeneratorLossBreakdown:
    """Full generator objective against one target layout."""
    gt = encode_layout(target, catalog, n_slots=slots.n_slots)
    pred_t = torch.from_numpy(slots.packed())
    gt_t = torch.from_numpy(gt.packed())
    terms = layout_loss_terms_t(
        pred_t.unsqueeze(0),
        gt_t.unsqueeze(0),
        torch.tensor([len(target.furniture)]),
        slots.n_categories,
    )
    adv = -float(np.log(max(d_fake, _LOG_EPS)))
    return GeneratorLossBreakdown(
        box=float(terms["box"]),
        category=float(terms["category"]),
        orientation=float(terms["orientation"]),
        presence=float(terms["presence"]),
        miss=float(terms["miss"]),
        adversarial=adv,
        lambda_adv=lambda_adv,
    )


# --- transfer losses ------------------------------------------------------------


def extraction_loss_t(
    size_pred: torch.Tensor,
    loc_pred: torch.Tensor,
    cat_logits: torch.Tensor,
    size_gt: torch.Tensor,
    loc_gt: torch.Tensor,
    cat_idx_gt: torch.Tensor,
) -> torch.Tensor:
    """L1 over (size, location) plus category cross-entropy, batch mean."""
    l1 = (size_pred - size_gt).abs().sum(dim=1) + (loc_pred - loc_gt).abs().sum(dim=1)
    ce = F.cross_entropy(cat_logits, cat_idx_gt, reduction="none")
    return (l1 + ce).mean()


def size_l1_t(pred: torch.Tensor, gt: torch.Tensor) -> torch.Tensor:
    return (pred - gt).abs().sum(dim=1).mean()


def extraction_loss(pred: LocalFurniture, gt: LocalFurniture) -> float:
    """Distance to the ground-truth local furniture (size + location + category)."""
    l1 = (
        abs(pred.size.length - gt.size.length)
        + abs(pred.size.width - gt.size.width)
        + abs(pred.size.height - gt.size.height)
        + abs(pred.location.x - gt.location.x)
        + abs(pred.location.y - gt.location.y)
    )
    ce = -float(np.sum(gt.category * np.log(np.clip(pred.category, _LOG_EPS, 1.0))))
    return l1 + ce


def projection_loss(pred: DimensionalSize, gt: DimensionalSize) -> float:
    """L1 distance in the dimensional domain."""
    return (
        abs(pred.size.length - gt.size.length)
        + abs(pred.size.width - gt.size.width)
        + abs(pred.size.height - gt.size.height)
    )


def growth_loss(pred: DimensionalSize, gt: DimensionalSize) -> float:
    """L1 distance between the grown size and its ground truth."""
    return projection_loss(pred, gt)
