"""Differentiable rendering: soft box splats and their gradients.

Shows that the soft rasterizer converges to the hard rasterizer as the
edge softness shrinks, and that pixel losses propagate useful gradients
back to slot parameters (the mechanism that lets an image-space
discriminator train the layout generator).
"""

from pathlib import Path

import numpy as np
import torch

from roomfit.dataset import make_fixture_corpus
from roomfit.model.slots import encode_layout
from roomfit.raster import (
    RenderConfig,
    category_colors_tensor,
    rasterize_layout,
    rasterize_scene,
    save_png,
    soft_rasterize,
    soft_rasterize_tensor,
)

out_dir = Path(__file__).parent / "output"
out_dir.mkdir(exist_ok=True)

corpus = make_fixture_corpus(1, seed=9)
sample = corpus.samples[0]
grid = encode_layout(sample.layout, corpus.catalog)

print("softness sweep (max |soft - hard| over all pixels):")
hard = rasterize_layout(sample.layout, RenderConfig())
for softness in (0.1, 0.05, 0.02, 0.005, 0.0005):
    cfg = RenderConfig(softness=softness)
    soft = soft_rasterize(grid, sample.scene, cfg)
    diff = np.abs(soft.pixels - hard.pixels).max()
    print(f"  softness {softness:6.4f} m -> max deviation {diff:.4f}")
    save_png(soft, out_dir / f"soft_{softness:.4f}.png")
save_png(hard, out_dir / "hard.png")

# Gradient of mean pixel intensity with respect to a box center: positive
# when moving the (dark-on-white) box off the white letterbox... here we
# just show it is nonzero and finite for every slot parameter.
cfg = RenderConfig(image_height=64, image_width=64)
base = torch.from_numpy(rasterize_scene(sample.scene, cfg).pixels)
colors = category_colors_tensor(cfg.palette, [e.code.id for e in corpus.catalog.entries])
packed = torch.from_numpy(grid.packed()).requires_grad_(True)
soft_rasterize_tensor(packed, base, sample.scene.bounds, cfg, colors).mean().backward()
g = packed.grad
print("\ngradient of mean intensity w.r.t. slot parameters:")
print(f"  shape {tuple(g.shape)}, finite: {bool(torch.isfinite(g).all())}")
f0 = sample.layout.furniture[0].category.name
print(f"  d(mean)/d(center_x) of the {f0} slot: {g[0, 1 + len(corpus.catalog)]:.3e}")
print(f"\nPNGs written to {out_dir}/")
