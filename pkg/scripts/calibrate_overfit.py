"""Calibration run for the overfit smoke experiment."""

import sys
import time

from roomfit.dataset import make_fixture_corpus
from roomfit.metrics import EvalConfig, evaluate
from roomfit.model.infer import InferenceModel
from roomfit.model.nets import ModelConfig
from roomfit.model.train import TrainConfig, train


def main():
    steps = int(sys.argv[1]) if len(sys.argv) > 1 else 2000
    lr = float(sys.argv[2]) if len(sys.argv) > 2 else 1e-3
    image = int(sys.argv[3]) if len(sys.argv) > 3 else 64
    corpus = make_fixture_corpus(32, seed=7)
    cfg = TrainConfig(steps=steps, batch_size=32, learning_rate=lr, seed=7)
    model_cfg = ModelConfig(image_size=image)
    t0 = time.time()
    result = train(corpus, cfg, model_cfg)
    train_s = time.time() - t0
    h = result.history
    init = h[0].joint(cfg.alpha)
    final = h[-1].joint(cfg.alpha)
    print(f"steps={steps} lr={lr} img={image} train_time={train_s:.1f}s")
    print(f"joint initial={init:.4f} final={final:.4f} ratio={final/init:.4f}")
    for i in (0, len(h)//4, len(h)//2, 3*len(h)//4, len(h)-1):
        r = h[i]
        print(f"  step {r.step:5d} D={r.discriminator:.3f} G={r.generator:.3f} "
              f"t1={r.extraction:.3f} t2={r.projection:.3f} size={r.growth:.3f}")
    t0 = time.time()
    report = evaluate(InferenceModel(result.params), corpus, EvalConfig())
    print(f"eval_time={time.time()-t0:.1f}s")
    o = report.overall
    print(f"Mode={o.mode.mean:.3f} IoU={o.mean_iou.mean:.3f} "
          f"Transfer={o.transfer.mean:.3f} Size={o.size.mean:.3f}")


if __name__ == "__main__":
    main()
