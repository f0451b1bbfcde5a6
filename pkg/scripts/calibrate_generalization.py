"""Calibration run for the generalization smoke experiment."""

import sys
import time

from roomfit.dataset import make_fixture_corpus
from roomfit.metrics import EvalConfig, RandomBaseline, evaluate
from roomfit.model.infer import InferenceModel
from roomfit.model.nets import ModelConfig
from roomfit.model.train import TrainConfig, train


def show(tag, report):
    o = report.overall
    print(f"{tag}: Mode={o.mode.mean:.3f} IoU={o.mean_iou.mean:.3f} "
          f"Transfer={o.transfer.mean:.3f} Size={o.size.mean:.3f}")
    return o


def main():
    steps = int(sys.argv[1]) if len(sys.argv) > 1 else 3000
    lr = float(sys.argv[2]) if len(sys.argv) > 2 else 1e-3
    train_corpus = make_fixture_corpus(256, seed=101)
    eval_corpus = make_fixture_corpus(64, seed=202)
    baseline = show("baseline", evaluate(RandomBaseline(eval_corpus.catalog, seed=0), eval_corpus))
    t0 = time.time()
    result = train(
        train_corpus,
        TrainConfig(steps=steps, batch_size=32, learning_rate=lr, seed=11),
        ModelConfig(image_size=64),
    )
    print(f"train: {time.time()-t0:.0f}s, "
          f"joint {result.history[0].joint(1.0):.3f} -> {result.history[-1].joint(1.0):.3f}")
    trained = show("trained", evaluate(InferenceModel(result.params), eval_corpus))
    train_eval = show("train-set", evaluate(InferenceModel(result.params), train_corpus))
    for name in ("mode", "mean_iou", "transfer", "size"):
        b = getattr(baseline, name).mean
        t = getattr(trained, name).mean
        ok = "OK " if t - b >= 0.2 else "FAIL"
        print(f"  {ok} {name}: trained {t:.3f} vs baseline {b:.3f} (margin {t-b:+.3f})")


if __name__ == "__main__":
    main()
