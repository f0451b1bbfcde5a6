"""Layout quality metrics and report generation.

Four dataset-level ratios, each in [0, 1]:

- mode accuracy: how much of the ground-truth furniture inventory the
  predictions reproduce, by category multiset intersection;
- mean IoU: box agreement of per-category greedy max-IoU matched
  instances, counting unmatched ground truth as zero;
- transfer accuracy: correct category identification in the
  local-furniture domain;
- size accuracy: grown sizes classified to the right growth mode in the
  dimensional domain. Width-doubling modes are indistinguishable from
  each other there (as are length-doubling modes), so classification is
  by axis group; growth direction is checked in layout space through the
  anchored edge.

`evaluate` aggregates all four per room type over a test corpus, with mean
and standard deviation across fixed-size evaluation batches.
"""

from __future__ import annotations

import hashlib
import json
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Protocol

import numpy as np

from roomfit.dataset import Catalog, Corpus, target_instance_index
from roomfit.geometry import (
    CategoryCode,
    FurnitureInstance,
    Layout,
    Orientation,
    Point2,
    RoomScene,
    RoomType,
    Size3,
    SizeCode,
    aabb,
    iou,
)
from roomfit.model.domain import DimensionalSize, LocalFurniture, normalize_size
from roomfit.model.slots import normalize_point


class MetricsError(ValueError):
    pass


# --- the four metrics -----------------------------------------------------------


def _paired(preds, gts) -> None:
    if len(preds) != len(gts):
        raise MetricsError(f"paired lists differ in length: {len(preds)} vs {len(gts)}")


def mode_accuracy(preds: list[Layout], gts: list[Layout]) -> float:
    """Category-inventory agreement: sum_i N_i^matched / sum_i N_i^total."""
    _paired(preds, gts)
    matched = 0
    total = 0
    for pred, gt in zip(preds, gts):
        pred_counts = Counter(f.category.id for f in pred.furniture)
        gt_counts = Counter(f.category.id for f in gt.furniture)
        total += sum(gt_counts.values())
        matched += sum((pred_counts & gt_counts).values())
    if total == 0:
        return 1.0
    return matched / total


def _greedy_iou_pairs(pred_boxes: list, gt_boxes: list) -> list[tuple[int, int, float]]:
    """Globally greedy max-IoU matching inside one category."""
    pairs = sorted(
        (
            (iou(p, g), pi, gi)
            for pi, p in enumerate(pred_boxes)
            for gi, g in enumerate(gt_boxes)
        ),
        key=lambda t: (-t[0], t[1], t[2]),
    )
    used_p: set[int] = set()
    used_g: set[int] = set()
    out = []
    for value, pi, gi in pairs:
        if pi in used_p or gi in used_g:
            continue
        used_p.add(pi)
        used_g.add(gi)
        out.append((pi, gi, value))
    return out


def mean_iou(preds: list[Layout], gts: list[Layout]) -> float:
    """Mean IoU over ground-truth instances, matched greedily per category."""
    _paired(preds, gts)
    total_gt = 0
    iou_sum = 0.0
    for pred, gt in zip(preds, gts):
        total_gt += len(gt.furniture)
        by_cat_pred: dict[int, list] = {}
        by_cat_gt: dict[int, list] = {}
        for f in pred.furniture:
            by_cat_pred.setdefault(f.category.id, []).append(aabb(f))
        for f in gt.furniture:
            by_cat_gt.setdefault(f.category.id, []).append(aabb(f))
        for cid, gt_boxes in by_cat_gt.items():
            for _, _, value in _greedy_iou_pairs(by_cat_pred.get(cid, []), gt_boxes):
                iou_sum += value
    if total_gt == 0:
        return 1.0
    return iou_sum / total_gt


def transfer_accuracy(
    pred_locals: list[LocalFurniture],
    gt_categories: list[CategoryCode],
    catalog: Catalog | None = None,
) -> float:
    """Fraction of local-domain extractions naming the right category.

    Predicted distributions are indexed by catalog position; when a catalog
    is given, ground-truth category ids are translated through it,
    otherwise ids are taken as positions directly.
    """
    _paired(pred_locals, gt_categories)
    if not pred_locals:
        raise MetricsError("transfer_accuracy needs at least one sample")
    if catalog is not None:
        index_of = {e.code.id: i for i, e in enumerate(catalog.entries)}
        targets = [index_of[c.id] for c in gt_categories]
    else:
        targets = [c.id for c in gt_categories]
    correct = sum(
        1
        for tp1, want in zip(pred_locals, targets)
        if tp1.argmax_category_index() == want
    )
    return correct / len(pred_locals)


class SizeModeGroup(Enum):
    """What a dimensional-domain size reveals about the growth mode."""

    DEFAULT = "default"
    WIDTH_DOUBLED = "width_doubled"
    LENGTH_DOUBLED = "length_doubled"


GROUP_OF_CODE = {
    SizeCode.DEFAULT: SizeModeGroup.DEFAULT,
    SizeCode.WIDTH_LEFT: SizeModeGroup.WIDTH_DOUBLED,
    SizeCode.WIDTH_RIGHT: SizeModeGroup.WIDTH_DOUBLED,
    SizeCode.LENGTH_UP: SizeModeGroup.LENGTH_DOUBLED,
    SizeCode.LENGTH_DOWN: SizeModeGroup.LENGTH_DOUBLED,
}


def classify_size_mode(
    pred: DimensionalSize, default: DimensionalSize, rel_tol: float = 0.10
) -> SizeModeGroup:
    """Nearest growth-mode group by per-axis ratio to the default size.

    Width and length ratios are compared against 1 and 2 with the given
    relative tolerance; anything ambiguous falls back to the default group.
    Scale-invariant: rescaling `pred` and `default` together changes nothing.
    """

    def near(ratio: float, target: float) -> bool:
        return abs(ratio - target) <= rel_tol * target

    r_w = pred.size.width / default.size.width
    r_l = pred.size.length / default.size.length
    if near(r_w, 2.0) and near(r_l, 1.0):
        return SizeModeGroup.WIDTH_DOUBLED
    if near(r_l, 2.0) and near(r_w, 1.0):
        return SizeModeGroup.LENGTH_DOUBLED
    return SizeModeGroup.DEFAULT


def size_accuracy(
    pred_sizes: list[tuple[DimensionalSize, DimensionalSize]],
    gt_codes: list[SizeCode],
) -> float:
    """Fraction of (predicted, default) size pairs classified to the gt mode."""
    _paired(pred_sizes, gt_codes)
    if not pred_sizes:
        raise MetricsError("size_accuracy needs at least one sample")
    correct = sum(
        1
        for (pred, default), code in zip(pred_sizes, gt_codes)
        if classify_size_mode(pred, default) is GROUP_OF_CODE[code]
    )
    return correct / len(pred_sizes)


# --- evaluation harness ---------------------------------------------------------


class LayoutPredictor(Protocol):
    """What `evaluate` needs from a model (neural, oracle, or baseline)."""

    def predict_layout(self, scene: RoomScene) -> Layout: ...

    def predict_local(self, scene: RoomScene, label: CategoryCode) -> LocalFurniture: ...

    def predict_grown(
        self, scene: RoomScene, label: CategoryCode, code: SizeCode
    ) -> DimensionalSize: ...


@dataclass(frozen=True)
class EvalConfig:
    batch_size: int = 100

    def __post_init__(self) -> None:
        if self.batch_size < 1:
            raise MetricsError("batch_size must be >= 1")


@dataclass(frozen=True)
class MetricSummary:
    mean: float
    std: float
    batches: int


@dataclass(frozen=True)
class RoomReport:
    samples: int
    mode: MetricSummary
    mean_iou: MetricSummary
    transfer: MetricSummary
    size: MetricSummary


@dataclass(frozen=True)
class EvalReport:
    rooms: dict[RoomType, RoomReport]
    overall: RoomReport

    def to_json(self) -> str:
        def summary(s: MetricSummary) -> dict:
            return {"mean": s.mean, "std": s.std, "batches": s.batches}

        def room(r: RoomReport) -> dict:
            return {
                "samples": r.samples,
                "mode": summary(r.mode),
                "iou": summary(r.mean_iou),
                "transfer": summary(r.transfer),
                "size": summary(r.size),
            }

        return json.dumps(
            {
                "rooms": {
                    rt.value: room(r)
                    for rt, r in sorted(self.rooms.items(), key=lambda kv: kv[0].value)
                },
                "overall": room(self.overall),
            },
            indent=2,
        )

    def to_table(self) -> str:
        """Fixed-width table: one row per room type, one column per metric."""
        header = (
            f"{'Room':<14}{'Samples':>8} | {'Mode':>15} | {'IoU':>15} | "
            f"{'Transfer':>15} | {'Size':>15}"
        )
        lines = [header, "-" * len(header)]

        def cell(s: MetricSummary) -> str:
            return f"{s.mean:.3f} ± {s.std:.3f}"

        def row(name: str, r: RoomReport) -> str:
            return (
                f"{name:<14}{r.samples:>8} | {cell(r.mode):>15} | "
                f"{cell(r.mean_iou):>15} | {cell(r.transfer):>15} | {cell(r.size):>15}"
            )

        for rt, r in sorted(self.rooms.items(), key=lambda kv: kv[0].value):
            lines.append(row(rt.value, r))
        lines.append(row("overall", self.overall))
        return "\n".join(lines)


REPORT_JSON_SCHEMA = {
    "type": "object",
    "required": ["rooms", "overall"],
    "properties": {
        "rooms": {
            "type": "object",
            "additionalProperties": {"$ref": "#/$defs/room"},
        },
        "overall": {"$ref": "#/$defs/room"},
    },
    "$defs": {
        "summary": {
            "type": "object",
            "required": ["mean", "std", "batches"],
            "properties": {
                "mean": {"type": "number", "minimum": 0, "maximum": 1},
                "std": {"type": "number", "minimum": 0},
                "batches": {"type": "integer", "minimum": 1},
            },
        },
        "room": {
            "type": "object",
            "required": ["samples", "mode", "iou", "transfer", "size"],
            "properties": {
                "samples": {"type": "integer", "minimum": 0},
                "mode": {"$ref": "#/$defs/summary"},
                "iou": {"$ref": "#/$defs/summary"},
                "transfer": {"$ref": "#/$defs/summary"},
                "size": {"$ref": "#/$defs/summary"},
            },
        },
    },
}


@dataclass
class _Collected:
    pred_layout: Layout
    gt_layout: Layout
    locals_pred: list[LocalFurniture] = field(default_factory=list)
    locals_gt_index: list[int] = field(default_factory=list)
    sizes: list[tuple[DimensionalSize, DimensionalSize]] = field(default_factory=list)
    codes: list[SizeCode] = field(default_factory=list)


def _summarize(values: list[float]) -> MetricSummary:
    arr = np.asarray(values, dtype=np.float64)
    return MetricSummary(mean=float(arr.mean()), std=float(arr.std()), batches=len(values))


def _batched(items: list, size: int):
    for i in range(0, len(items), size):
        yield items[i : i + size]


def _report_for(collected: list[_Collected], cfg: EvalConfig) -> RoomReport:
    mode_vals, iou_vals, transfer_vals, size_vals = [], [], [], []
    for chunk in _batched(collected, cfg.batch_size):
        preds = [c.pred_layout for c in chunk]
        gts = [c.gt_layout for c in chunk]
        mode_vals.append(mode_accuracy(preds, gts))
        iou_vals.append(mean_iou(preds, gts))
        locals_pred = [tp1 for c in chunk for tp1 in c.locals_pred]
        locals_gt = [
            CategoryCode(id=i, name=f"slot-{i}", customized=True)
            for c in chunk
            for i in c.locals_gt_index
        ]
        if locals_pred:
            transfer_vals.append(transfer_accuracy(locals_pred, locals_gt))
        sizes = [s for c in chunk for s in c.sizes]
        codes = [code for c in chunk for code in c.codes]
        if sizes:
            size_vals.append(size_accuracy(sizes, codes))
    return RoomReport(
        samples=len(collected),
        mode=_summarize(mode_vals),
        mean_iou=_summarize(iou_vals),
        transfer=_summarize(transfer_vals or [0.0]),
        size=_summarize(size_vals or [0.0]),
    )


def evaluate(
    model: LayoutPredictor, test: Corpus, cfg: EvalConfig = EvalConfig()
) -> EvalReport:
    """Run the model over a test corpus and compute all four metrics.

    Mode and IoU compare the default-size layout proposal against the
    ground-truth layout. Transfer and size run the chain once per sample /
    per variant against the sample's target category and its ground-truth
    default size. Results aggregate per room type in fixed sample order,
    in batches of `cfg.batch_size`.
    """
    if len(test) == 0:
        raise MetricsError("evaluation corpus is empty")
    index_of = {e.code.id: i for i, e in enumerate(test.catalog.entries)}

    by_type: dict[RoomType, list[_Collected]] = {}
    everything: list[_Collected] = []
    for sample in test.samples:
        scene = sample.scene
        c = _Collected(pred_layout=model.predict_layout(scene), gt_layout=sample.layout)
        if sample.variants:
            label = sample.variants[0].target_category
            c.locals_pred.append(model.predict_local(scene, label))
            c.locals_gt_index.append(index_of[label.id])
            target = sample.layout.furniture[
                target_instance_index(sample.layout, label.id)
            ]
            gt_default = DimensionalSize(normalize_size(target.default_size, scene))
            for variant in sample.variants:
                pred = model.predict_grown(scene, label, variant.size_code)
                c.sizes.append((pred, gt_default))
                c.codes.append(variant.size_code)
        by_type.setdefault(scene.room_type, []).append(c)
        everything.append(c)

    rooms = {rt: _report_for(chunk, cfg) for rt, chunk in by_type.items()}
    return EvalReport(rooms=rooms, overall=_report_for(everything, cfg))


# --- reference predictors -------------------------------------------------------


class OracleModel:
    """Plays back ground truth; every metric must hit 1.0 on its corpus."""

    def __init__(self, corpus: Corpus):
        self._catalog = corpus.catalog
        self._index_of = {e.code.id: i for i, e in enumerate(corpus.catalog.entries)}
        self._by_scene = {s.scene: s for s in corpus.samples}

    def _sample_for(self, scene: RoomScene):
        try:
            return self._by_scene[scene]
        except KeyError:
            raise MetricsError("oracle has no sample for this scene") from None

    def predict_layout(self, scene: RoomScene) -> Layout:
        return self._sample_for(scene).layout

    def predict_local(self, scene: RoomScene, label: CategoryCode) -> LocalFurniture:
        sample = self._sample_for(scene)
        target = sample.layout.furniture[target_instance_index(sample.layout, label.id)]
        probs = np.zeros(len(self._catalog))
        probs[self._index_of[label.id]] = 1.0
        nx, ny = normalize_point(target.position, scene)
        return LocalFurniture(
            size=normalize_size(target.size, scene),
            location=Point2(nx, ny),
            category=probs,
        )

    def predict_grown(
        self, scene: RoomScene, label: CategoryCode, code: SizeCode
    ) -> DimensionalSize:
        sample = self._sample_for(scene)
        for variant in sample.variants:
            if variant.size_code is code and variant.target_category.id == label.id:
                grown = variant.result.furniture[
                    target_instance_index(variant.result, label.id)
                ]
                return DimensionalSize(normalize_size(grown.size, scene))
        raise MetricsError(f"oracle has no {code.value} variant for this scene")


def _stable_rng(*key_parts) -> np.random.Generator:
    text = "|".join(str(p) for p in key_parts)
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return np.random.default_rng(int.from_bytes(digest[:8], "little"))


class RandomBaseline:
    """Frozen random placement: uniform boxes, categories, and sizes.

    Deterministic across processes given (seed, scene), so its metric
    values are a stable reference to compare trained models against.
    """

    def __init__(self, catalog: Catalog, seed: int = 0):
        self._catalog = catalog
        self._seed = seed

    def _rng(self, scene: RoomScene, salt) -> np.random.Generator:
        return _stable_rng(
            self._seed,
            salt,
            round(scene.bounds.x_max * 1000),
            round(scene.bounds.y_max * 1000),
            scene.room_type.value,
        )

    def predict_layout(self, scene: RoomScene) -> Layout:
        rng = self._rng(scene, "layout")
        entries = self._catalog.entries
        b = scene.bounds
        furniture = []
        for _ in range(int(rng.integers(2, 7))):
            e = entries[int(rng.integers(0, len(entries)))]
            furniture.append(
                FurnitureInstance(
                    category=e.code,
                    position=Point2(
                        b.x_min + float(rng.uniform(0.1, 0.9)) * b.width,
                        b.y_min + float(rng.uniform(0.1, 0.9)) * b.height,
                    ),
                    size=e.default_size,
                    orientation=list(Orientation)[int(rng.integers(0, 4))],
                    default_size=e.default_size,
                    size_range=e.size_range,
                    customized=e.code.customized,
                )
            )
        return Layout(scene=scene, furniture=tuple(furniture))

    def predict_local(self, scene: RoomScene, label: CategoryCode) -> LocalFurniture:
        rng = self._rng(scene, "local")
        probs = rng.uniform(0.05, 1.0, size=len(self._catalog))
        probs /= probs.sum()
        raw = rng.uniform(0.05, 0.8, size=3)
        return LocalFurniture(
            size=Size3(float(raw[0]), float(raw[1]), float(raw[2])),
            location=Point2(float(rng.uniform(0, 1)), float(rng.uniform(0, 1))),
            category=probs,
        )

    def predict_grown(
        self, scene: RoomScene, label: CategoryCode, code: SizeCode
    ) -> DimensionalSize:
        rng = self._rng(scene, f"grown-{code.value}")
        raw = rng.uniform(0.05, 0.9, size=3)
        return DimensionalSize(Size3(float(raw[0]), float(raw[1]), float(raw[2])))
