"""Acceptance gate: every criterion at its stated tolerance.

Each test prints one `[PASS]`/`[FAIL]` line (visible with `pytest -s`).
The two smoke experiments train real models and dominate the runtime;
everything is seeded, single-threaded and deterministic.
"""

import json
import math
import statistics
import time

import numpy as np
import pytest
import torch
from fastapi.testclient import TestClient

from roomfit.dataset import DEFAULT_CATALOG, make_fixture_corpus, save_corpus
from roomfit.geometry import (
    AABB,
    Layout,
    Orientation,
    SizeCode,
    aabb,
    apply_size_code,
    grown_size,
    iou,
)
from roomfit.metrics import (
    EvalConfig,
    RandomBaseline,
    evaluate,
    mean_iou,
    mode_accuracy,
    size_accuracy,
    transfer_accuracy,
)
from roomfit.model import losses
from roomfit.model.checkpoint import save_checkpoint
from roomfit.model.infer import InferenceModel
from roomfit.model.nets import ModelConfig, build_model
from roomfit.model.slots import encode_layout
from roomfit.model.train import TrainConfig, loss_history_csv, train
from roomfit.raster import (
    PixelMap,
    RenderConfig,
    category_colors_tensor,
    palette_decode,
    pixel_center_grids,
    rasterize_layout,
    rasterize_scene,
    soft_rasterize_batch,
    soft_rasterize_tensor,
)
from roomfit.service import create_app

from .conftest import make_furniture, make_room
from .grad_utils import max_relative_grad_error
from .metric_oracles import (
    oracle_mean_iou,
    oracle_mode_accuracy,
    oracle_size_accuracy,
    oracle_transfer_accuracy,
    random_paired_layouts,
)


def report(name: str, ok: bool, detail: str) -> None:
    print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    assert ok, f"{name}: {detail}"


# --- shared heavy fixtures ------------------------------------------------------


@pytest.fixture(scope="module")
def overfit_run():
    """The overfit smoke experiment: 32 fixtures, 2000 steps, seed 7."""
    corpus = make_fixture_corpus(32, seed=7)
    started = time.monotonic()
    result = train(
        corpus,
        TrainConfig(steps=2000, batch_size=32, learning_rate=1e-3, seed=7),
        ModelConfig(image_size=64),
    )
    elapsed = time.monotonic() - started
    return {"corpus": corpus, "result": result, "train_seconds": elapsed}


@pytest.fixture(scope="module")
def service_client(overfit_run, tmp_path_factory):
    root = tmp_path_factory.mktemp("acceptance-service")
    ckpt = root / "model.ckpt"
    save_checkpoint(overfit_run["result"].params, ckpt)
    fixtures = root / "fixtures"
    save_corpus(overfit_run["corpus"], fixtures)
    return TestClient(create_app(model_path=str(ckpt), fixtures_path=str(fixtures)))


# --- criterion: metric oracle equivalence ---------------------------------------


def test_metric_oracle_equivalence(rng):
    started = time.monotonic()
    room = make_room(4.5, 3.5)
    pairs = random_paired_layouts(rng, room, 200)
    preds = [p for p, _ in pairs]
    gts = [g for _, g in pairs]
    checks = [
        ("mode", mode_accuracy(preds, gts), oracle_mode_accuracy(preds, gts)),
        ("iou", mean_iou(preds, gts), oracle_mean_iou(preds, gts)),
    ]

    locals_, gt_idx, cats = [], [], []
    for _ in range(200):
        idx = int(rng.integers(0, 5))
        probs = np.full(5, 0.03)
        probs[int(rng.integers(0, 5))] = 1 - 0.03 * 4
        from roomfit.geometry import CategoryCode, Point2, Size3
        from roomfit.model.domain import LocalFurniture

        locals_.append(
            LocalFurniture(size=Size3(0.2, 0.2, 0.2), location=Point2(0.5, 0.5),
                           category=probs)
        )
        gt_idx.append(idx)
        cats.append(CategoryCode(id=idx, name="x", customized=True))
    checks.append(
        ("transfer", transfer_accuracy(locals_, cats),
         oracle_transfer_accuracy(locals_, gt_idx))
    )

    from roomfit.geometry import Size3
    from roomfit.model.domain import DimensionalSize

    sizes, codes = [], []
    for _ in range(200):
        default = DimensionalSize(
            Size3(float(rng.uniform(0.2, 0.8)), float(rng.uniform(0.2, 0.8)), 0.2)
        )
        code = list(SizeCode)[int(rng.integers(0, 5))]
        fl = 2.0 if code in (SizeCode.LENGTH_UP, SizeCode.LENGTH_DOWN) else 1.0
        fw = 2.0 if code in (SizeCode.WIDTH_LEFT, SizeCode.WIDTH_RIGHT) else 1.0
        noise = rng.uniform(0.82, 1.22, size=2)
        sizes.append(
            (
                DimensionalSize(
                    Size3(default.size.length * fl * noise[0],
                          default.size.width * fw * noise[1], 0.2)
                ),
                default,
            )
        )
        codes.append(code)
    checks.append(("size", size_accuracy(sizes, codes), oracle_size_accuracy(sizes, codes)))

    elapsed = time.monotonic() - started
    worst = max(abs(got - want) for _, got, want in checks)
    ok = worst < 1e-9 and elapsed < 30
    report(
        "metric-oracle-equivalence",
        ok,
        f"max |metric - oracle| = {worst:.2e} over 200 paired layouts, "
        f"{elapsed:.1f}s (< 30s)",
    )


# --- criterion: geometry suite ---------------------------------------------------


def test_geometry_suite(rng):
    started = time.monotonic()
    anchored_edge = {
        SizeCode.WIDTH_LEFT: ("width", "max"),
        SizeCode.WIDTH_RIGHT: ("width", "min"),
        SizeCode.LENGTH_UP: ("length", "min"),
        SizeCode.LENGTH_DOWN: ("length", "max"),
    }
    worst_edge = 0.0
    for _ in range(1000):
        width = float(rng.uniform(0.2, 2.5))
        length = float(rng.uniform(0.2, 2.5))
        f = make_furniture(
            cx=float(rng.uniform(-5, 5)),
            cy=float(rng.uniform(-5, 5)),
            width=width,
            length=length,
            orientation=list(Orientation)[int(rng.integers(0, 4))],
            width_max=width * float(rng.uniform(1.0, 3.0)),
            length_max=length * float(rng.uniform(1.0, 3.0)),
        )
        for code in SizeCode:
            if code is SizeCode.DEFAULT:
                assert apply_size_code(f, code) is f  # exact identity
                continue
            target = grown_size(f, code)
            doubled_w = target.width == pytest.approx(2 * f.size.width, rel=1e-12)
            doubled_l = target.length == pytest.approx(2 * f.size.length, rel=1e-12)
            assert doubled_w != doubled_l and target.height == f.size.height
            g = apply_size_code(f, code)
            assert f.size_range.contains(g.size)
            size_axis, edge = anchored_edge[code]
            swapped = f.orientation in (Orientation.EAST, Orientation.WEST)
            world_axis = "x" if (size_axis == "width") != swapped else "y"
            attr = f"{world_axis}_{edge}"
            err = abs(getattr(aabb(g), attr) - getattr(aabb(f), attr))
            worst_edge = max(worst_edge, err)
    elapsed = time.monotonic() - started
    ok = worst_edge < 1e-9 and elapsed < 10
    report(
        "geometry-suite",
        ok,
        f"1000 boxes x 5 codes; worst anchored-edge drift {worst_edge:.2e} m, "
        f"{elapsed:.1f}s (< 10s)",
    )


# --- criterion: IoU properties ----------------------------------------------------


def test_iou_properties(rng):
    started = time.monotonic()
    vals = rng.uniform(-5, 5, size=(10_000, 8))
    violations = 0
    for row in vals:
        a = AABB(min(row[0], row[1]), min(row[2], row[3]),
                 max(row[0], row[1]), max(row[2], row[3]))
        b = AABB(min(row[4], row[5]), min(row[6], row[7]),
                 max(row[4], row[5]), max(row[6], row[7]))
        v, w = iou(a, b), iou(b, a)
        if v != w or not (0.0 <= v <= 1.0):
            violations += 1
        if a.area() > 0 and iou(a, a) != 1.0:
            violations += 1
    hand_exact = iou(AABB(0, 0, 2, 2), AABB(1, 1, 3, 3)) == 1.0 / 7.0
    elapsed = time.monotonic() - started
    ok = violations == 0 and hand_exact and elapsed < 10
    report(
        "iou-properties",
        ok,
        f"10000 random pairs, {violations} violations, 1/7 case exact: {hand_exact}, "
        f"{elapsed:.1f}s (< 10s)",
    )


# --- criterion: gradient checks ----------------------------------------------------


def _grad_config():
    return ModelConfig(
        n_slots=2,
        image_size=8,
        conv_channels=(2, 4),
        generator_fc=8,
        discriminator_fc=8,
        transfer_width=8,
        transfer_depth=2,
    )


def _grad_catalog():
    from .conftest import small_catalog

    return small_catalog()


def _random_gt(seed, k=2, c=3):
    g = torch.Generator().manual_seed(seed)
    gt = torch.zeros(2, k, 9 + c, dtype=torch.float64)
    gt[..., 0] = -12.0
    for b in range(2):
        for i in range(k):
            gt[b, i, 0] = 12.0
            gt[b, i, 1 + int(torch.randint(c, (1,), generator=g))] = 12.0
            gt[b, i, 1 + c : 3 + c] = torch.rand(2, generator=g, dtype=torch.float64)
            gt[b, i, 3 + c : 5 + c] = 0.1 + 0.4 * torch.rand(2, generator=g, dtype=torch.float64)
            gt[b, i, 5 + c + int(torch.randint(4, (1,), generator=g))] = 12.0
    return gt


def test_gradient_checks(rng):
    started = time.monotonic()
    room = make_room(4.0, 3.0)
    cfg_img = RenderConfig(image_height=8, image_width=8, softness=0.05)
    worst: dict[str, float] = {}

    for seed in range(5):
        torch.manual_seed(seed)
        params = build_model(_grad_config(), _grad_catalog(), seed=seed)
        for m in params.modules().values():
            m.double()
        render_cfg = params.render_config()
        colors = category_colors_tensor(
            params.palette, [e.code.id for e in params.catalog.entries]
        )
        images = torch.rand(2, 3, 8, 8, dtype=torch.float64)
        real = torch.rand(2, 3, 8, 8, dtype=torch.float64)
        gt = _random_gt(seed)
        n_gt = torch.tensor([2, 2])
        gx, gy = pixel_center_grids(room.bounds, render_cfg)
        base = torch.zeros(2, 8, 8, 3, dtype=torch.float64)
        grid_x = gx.unsqueeze(0).expand(2, -1, -1).contiguous()
        grid_y = gy.unsqueeze(0).expand(2, -1, -1).contiguous()
        origins = torch.tensor([[room.bounds.x_min, room.bounds.y_min]] * 2,
                               dtype=torch.float64)
        spans = torch.tensor([[room.bounds.width, room.bounds.height]] * 2,
                             dtype=torch.float64)

        def d_loss():
            return losses.discriminator_loss_t(
                params.discriminator(real), params.discriminator(images)
            )

        def g_loss():
            pred = params.generator(images)
            fake = soft_rasterize_batch(
                pred, base, grid_x, grid_y, origins, spans, render_cfg, colors
            ).permute(0, 3, 1, 2)
            return losses.layout_loss_t(pred, gt, n_gt, 3) + 0.01 * losses.adversarial_loss_t(
                params.discriminator(fake)
            )

        onehot = torch.zeros(2, 3, dtype=torch.float64)
        onehot[:, seed % 3] = 1.0
        size_gt = 0.1 + torch.rand(2, 3, dtype=torch.float64)
        loc_gt = torch.rand(2, 2, dtype=torch.float64)
        cat_gt = torch.tensor([seed % 3, (seed + 1) % 3])
        code_onehot = torch.zeros(2, 5, dtype=torch.float64)
        code_onehot[0, seed % 5] = 1.0
        code_onehot[1, (seed + 2) % 5] = 1.0

        def t1_loss():
            size, loc, logits = params.extractor(gt, onehot)
            return losses.extraction_loss_t(size, loc, logits, size_gt, loc_gt, cat_gt)

        def t2_loss():
            size, loc, logits = params.extractor(gt, onehot)
            tp2 = params.projector(size, loc, torch.softmax(logits, dim=1))
            return losses.size_l1_t(tp2, size_gt)

        def size_loss():
            size, loc, logits = params.extractor(gt, onehot)
            tp2 = params.projector(size, loc, torch.softmax(logits, dim=1))
            return losses.size_l1_t(params.grower(tp2, code_onehot), size_gt)

        for name, fn, modules in (
            ("L_D", d_loss, [params.discriminator]),
            ("L_G", g_loss, [params.generator]),
            ("L_trans1", t1_loss, [params.extractor]),
            ("L_trans2", t2_loss, [params.extractor, params.projector]),
            ("L_size", size_loss, [params.extractor, params.projector, params.grower]),
        ):
            err = max_relative_grad_error(fn, modules)
            worst[name] = max(worst.get(name, 0.0), err)

        # soft rasterizer w.r.t. every slot parameter
        packed = np.concatenate(
            [
                rng.normal(0, 2, size=(2, 1)),
                rng.normal(0, 2, size=(2, 3)),
                rng.uniform(0.2, 0.8, size=(2, 2)),
                rng.uniform(0.1, 0.5, size=(2, 2)),
                rng.normal(0, 2, size=(2, 4)),
            ],
            axis=1,
        )
        cc = torch.tensor([[1.0, 0, 0], [0, 1.0, 0], [0, 0, 1.0]], dtype=torch.float64)
        grids = pixel_center_grids(room.bounds, cfg_img)
        zero_base = torch.zeros(8, 8, 3, dtype=torch.float64)

        def raster_mean(t: torch.Tensor) -> torch.Tensor:
            return soft_rasterize_tensor(t, zero_base, room.bounds, cfg_img, cc, grids).mean()

        t = torch.tensor(packed, dtype=torch.float64, requires_grad=True)
        raster_mean(t).backward()
        analytic = t.grad.numpy()
        h = 1e-6
        numeric = np.zeros_like(packed)
        for idx in np.ndindex(packed.shape):
            plus, minus = packed.copy(), packed.copy()
            plus[idx] += h
            minus[idx] -= h
            numeric[idx] = (
                raster_mean(torch.tensor(plus, dtype=torch.float64)).item()
                - raster_mean(torch.tensor(minus, dtype=torch.float64)).item()
            ) / (2 * h)
        err = np.abs(analytic - numeric).max() / max(np.abs(numeric).max(), 1e-12)
        worst["soft_rasterize"] = max(worst.get("soft_rasterize", 0.0), err)

    elapsed = time.monotonic() - started
    bad = {k: v for k, v in worst.items() if v >= 1e-4}
    ok = not bad and elapsed < 120
    report(
        "gradient-checks",
        ok,
        "max rel err "
        + " ".join(f"{k}={v:.1e}" for k, v in worst.items())
        + f", {elapsed:.0f}s (< 120s)",
    )


# --- criterion: overfit smoke -------------------------------------------------------


def test_overfit_smoke(overfit_run):
    result = overfit_run["result"]
    corpus = overfit_run["corpus"]
    elapsed = overfit_run["train_seconds"]
    history = result.history
    initial = history[0].joint(1.0)
    final = history[-1].joint(1.0)
    finite = result.params.all_finite()
    rep = evaluate(InferenceModel(result.params), corpus, EvalConfig()).overall
    ok = (
        rep.mode.mean >= 0.95
        and rep.mean_iou.mean >= 0.80
        and rep.transfer.mean >= 0.95
        and rep.size.mean >= 0.95
        and final < 0.1 * initial
        and finite
        and elapsed < 15 * 60
    )
    report(
        "overfit-smoke",
        ok,
        f"Mode={rep.mode.mean:.3f} (>=0.95) IoU={rep.mean_iou.mean:.3f} (>=0.80) "
        f"Transfer={rep.transfer.mean:.3f} (>=0.95) Size={rep.size.mean:.3f} (>=0.95) "
        f"joint {initial:.2f}->{final:.2f} (<0.1x) params finite={finite}, "
        f"{elapsed/60:.1f} min (< 15 min)",
    )


def test_overfit_op_examples(overfit_run):
    """Trained-model behaviors the operation contracts promise.

    Checked on the same overfit model: per-sample transfer extraction names
    the target category, the projection stage recovers the default size,
    width growth lands at ~2x, and Default-code requests compose back to
    catalog defaults.
    """
    from roomfit.dataset import target_instance_index
    from roomfit.model.domain import size_to_vector, normalize_size
    from roomfit.model.nets import project_size

    params = overfit_run["result"].params
    corpus = overfit_run["corpus"]
    model = InferenceModel(params)

    transfer_hits = 0
    proj_l1 = []
    ratios = []
    default_l1 = []
    composed_ok = 0
    for sample in corpus.samples:
        scene = sample.scene
        label = sample.variants[0].target_category
        tp1 = model.predict_local(scene, label)
        if tp1.argmax_category_index() == params.category_index(label.id):
            transfer_hits += 1
        target = sample.layout.furniture[target_instance_index(sample.layout, label.id)]
        gt_default = size_to_vector(normalize_size(target.default_size, scene))
        tp2 = project_size(params, tp1)
        proj_l1.append(float(np.abs(size_to_vector(tp2.size) - gt_default).sum()))
        grown = model.predict_grown(scene, label, SizeCode.WIDTH_LEFT)
        ratios.append(grown.size.width / gt_default[1])
        ls2_default = model.predict_grown(scene, label, SizeCode.DEFAULT)
        default_l1.append(float(np.abs(size_to_vector(ls2_default.size) - gt_default).sum()))
        composed = model.generate(scene, [(label.id, SizeCode.DEFAULT)])
        got = composed.furniture[target_instance_index(composed, label.id)]
        if all(
            0.9 <= g / d <= 1.1
            for g, d in (
                (got.size.length, target.default_size.length),
                (got.size.width, target.default_size.width),
                (got.size.height, target.default_size.height),
            )
        ):
            composed_ok += 1

    n = len(corpus.samples)
    in_band = sum(1 for r in ratios if 1.9 <= r <= 2.1)
    mean_ratio = float(np.mean(ratios))
    ok = (
        transfer_hits >= 0.95 * n
        and float(np.mean(proj_l1)) < 0.01
        and 1.9 <= mean_ratio <= 2.1
        and in_band >= 0.9 * n
        and max(default_l1) < 0.02
        and composed_ok >= 0.95 * n
    )
    report(
        "overfit-op-examples",
        ok,
        f"transfer {transfer_hits}/{n}, projection L1 mean {np.mean(proj_l1):.4f} (<0.01), "
        f"width ratio mean {mean_ratio:.3f} with {in_band}/{n} in [1.9,2.1], "
        f"Default-code L1 max {max(default_l1):.4f} (<0.02), "
        f"Default compose within 10%: {composed_ok}/{n}",
    )


# --- criterion: generalization smoke --------------------------------------------------


def test_generalization_smoke():
    started = time.monotonic()
    train_corpus = make_fixture_corpus(256, seed=101)
    held_out = make_fixture_corpus(64, seed=202)
    result = train(
        train_corpus,
        TrainConfig(steps=3000, batch_size=32, learning_rate=1e-3, seed=11),
        ModelConfig(image_size=64),
    )
    trained = evaluate(InferenceModel(result.params), held_out).overall
    baseline = evaluate(RandomBaseline(held_out.catalog, seed=0), held_out).overall
    elapsed = time.monotonic() - started
    margins = {
        "Mode": trained.mode.mean - baseline.mode.mean,
        "IoU": trained.mean_iou.mean - baseline.mean_iou.mean,
        "Transfer": trained.transfer.mean - baseline.transfer.mean,
        "Size": trained.size.mean - baseline.size.mean,
    }
    ok = all(m >= 0.2 for m in margins.values()) and elapsed < 45 * 60
    report(
        "generalization-smoke",
        ok,
        "margins over frozen baseline "
        + " ".join(f"{k}={v:+.3f}" for k, v in margins.items())
        + f" (each >= +0.2), {elapsed/60:.1f} min (< 45 min)",
    )


# --- criterion: rasterizer decode -----------------------------------------------------


def test_rasterizer_decode(rng):
    cfg = RenderConfig()
    failures = 0
    for _ in range(100):
        room = make_room(float(rng.uniform(3.0, 6.0)), float(rng.uniform(3.0, 6.0)))
        # rejection-sample non-overlapping furniture with distinct categories,
        # so each decoded mask belongs to exactly one box
        placed = []
        wanted = int(rng.integers(2, 6))
        for entry_idx in rng.permutation(len(DEFAULT_CATALOG.entries)).tolist():
            if len(placed) >= wanted:
                break
            e = DEFAULT_CATALOG.entries[entry_idx]
            for _ in range(8):  # retry positions for this category
                f = make_furniture(
                    cx=float(rng.uniform(0.8, room.bounds.x_max - 0.8)),
                    cy=float(rng.uniform(0.8, room.bounds.y_max - 0.8)),
                    width=e.default_size.width,
                    length=e.default_size.length,
                    orientation=list(Orientation)[int(rng.integers(0, 4))],
                    category=e.code,
                )
                if all(aabb(f).intersection_area(aabb(g)) == 0 for g in placed):
                    placed.append(f)
                    break
        layout = Layout(scene=room, furniture=tuple(placed))
        image = rasterize_layout(layout, cfg)
        pm = PixelMap.fit(room.bounds, cfg)
        decoded = palette_decode(image, [f.category.id for f in placed])
        band = 1.5 / pm.scale
        for f in placed:
            box = aabb(f)
            got = decoded == f.category.id
            dilated = pm.box_mask(
                AABB(box.x_min - band, box.y_min - band, box.x_max + band, box.y_max + band)
            )
            eroded = pm.box_mask(
                AABB(
                    box.x_min + band,
                    box.y_min + band,
                    max(box.x_min + band, box.x_max - band),
                    max(box.y_min + band, box.y_max - band),
                )
            )
            if (got & ~dilated).any() or (eroded & ~got).any():
                failures += 1
    ok = failures == 0
    report(
        "rasterizer-decode",
        ok,
        f"100 random layouts palette-decoded within a 1px band, {failures} failures",
    )


# --- criterion: determinism -----------------------------------------------------------


def test_determinism_training_and_service(service_client, overfit_run):
    corpus = make_fixture_corpus(8, seed=5)
    cfg = TrainConfig(steps=60, batch_size=8, learning_rate=1e-3, seed=4)
    model_cfg = ModelConfig(image_size=32, n_slots=8, conv_channels=(8, 16))
    csv_a = loss_history_csv(train(corpus, cfg, model_cfg).history)
    csv_b = loss_history_csv(train(corpus, cfg, model_cfg).history)
    training_ok = csv_a == csv_b

    payload = {
        "scene_id": overfit_run["corpus"].samples[0].id,
        "requests": [{"category_id": 0, "size_code": "WidthRight"}],
        "render": True,
    }
    a = service_client.post("/api/v1/layout", json=payload).json()
    b = service_client.post("/api/v1/layout", json=payload).json()
    bytes_a = json.dumps(a["layout"], sort_keys=True).encode()
    bytes_b = json.dumps(b["layout"], sort_keys=True).encode()
    service_ok = bytes_a == bytes_b and a["image"] == b["image"]

    ok = training_ok and service_ok
    report(
        "determinism",
        ok,
        f"identical training CSVs: {training_ok}; "
        f"byte-identical service layout payloads: {service_ok}",
    )


# --- criterion: service latency ---------------------------------------------------------


def test_service_latency(service_client, overfit_run):
    scene_id = overfit_run["corpus"].samples[1].id
    payload = {
        "scene_id": scene_id,
        "requests": [{"category_id": 0, "size_code": "LengthUp"}],
        "render": True,
    }
    for _ in range(3):  # warm up
        assert service_client.post("/api/v1/layout", json=payload).status_code == 200
    samples = []
    for _ in range(50):
        t0 = time.perf_counter()
        resp = service_client.post("/api/v1/layout", json=payload)
        samples.append((time.perf_counter() - t0) * 1000)
        assert resp.status_code == 200
    median = statistics.median(samples)
    ok = median < 500.0
    report(
        "service-latency",
        ok,
        f"median {median:.1f} ms over 50 render=true requests at 256x256 (< 500 ms)",
    )
