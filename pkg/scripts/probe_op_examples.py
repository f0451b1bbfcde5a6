"""Measure op-example quantities on the overfit-smoke model."""

import numpy as np

from roomfit.dataset import make_fixture_corpus, target_instance_index
from roomfit.geometry import SizeCode
from roomfit.metrics import mean_iou
from roomfit.model.checkpoint import save_checkpoint
from roomfit.model.domain import normalize_size, size_to_vector
from roomfit.model.infer import InferenceModel
from roomfit.model.nets import ModelConfig
from roomfit.model.train import TrainConfig, train

corpus = make_fixture_corpus(32, seed=7)
result = train(
    corpus,
    TrainConfig(steps=2000, batch_size=32, learning_rate=1e-3, seed=7),
    ModelConfig(image_size=64),
)
save_checkpoint(result.params, "/tmp/overfit-probe.ckpt")
model = InferenceModel(result.params)

ious, transfer_hits, t2_l1, width_ratios, default_l1 = [], [], [], [], []
for sample in corpus.samples:
    scene = sample.scene
    pred = model.predict_layout(scene)
    ious.append(mean_iou([pred], [sample.layout]))
    label = sample.variants[0].target_category
    tp1 = model.predict_local(scene, label)
    idx = result.params.category_index(label.id)
    transfer_hits.append(tp1.argmax_category_index() == idx)

    target = sample.layout.furniture[target_instance_index(sample.layout, label.id)]
    gt_default = size_to_vector(normalize_size(target.default_size, scene))
    from roomfit.model.nets import project_size

    tp2 = project_size(result.params, tp1)
    t2_l1.append(float(np.abs(size_to_vector(tp2.size) - gt_default).sum()))

    grown_w = model.predict_grown(scene, label, SizeCode.WIDTH_LEFT)
    width_ratios.append(grown_w.size.width / gt_default[1])
    grown_d = model.predict_grown(scene, label, SizeCode.DEFAULT)
    default_l1.append(float(np.abs(size_to_vector(grown_d.size) - gt_default).sum()))

print(f"per-sample IoU: min={min(ious):.3f} mean={np.mean(ious):.3f}")
print(f"transfer argmax correct: {sum(transfer_hits)}/{len(transfer_hits)}")
print(f"projection L1 to gt default: max={max(t2_l1):.4f} mean={np.mean(t2_l1):.4f}")
print(f"WidthLeft width ratio: min={min(width_ratios):.3f} max={max(width_ratios):.3f}")
print(f"Default-code L1(ls2, ls1_gt): max={max(default_l1):.4f} mean={np.mean(default_l1):.4f}")
