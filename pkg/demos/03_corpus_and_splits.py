"""The corpus lifecycle: generate, save, reload, split.

Builds a synthetic fixture corpus (every sample carries all five size-code
variants of its target furniture), round-trips it through the on-disk
schema, and splits it 90/10 stratified by room type.
"""

import tempfile
from pathlib import Path

from roomfit.dataset import SplitSpec, load_corpus, make_fixture_corpus, save_corpus, split

corpus = make_fixture_corpus(70, seed=5)
print(f"generated {len(corpus)} samples across room types:")
for room_type, count in sorted(corpus.per_type_counts.items(), key=lambda kv: kv[0].value):
    print(f"  {room_type.value:<14} {count}")

sample = corpus.samples[0]
print(f"\nsample {sample.id}: {sample.scene.room_type.value}, "
      f"{len(sample.layout.furniture)} furniture, {len(sample.variants)} variants")
for variant in sample.variants:
    target = variant.result.furniture[0]
    print(f"  {variant.size_code.value:<12} target size "
          f"{target.size.length:.2f} x {target.size.width:.2f} m")

with tempfile.TemporaryDirectory() as tmp:
    root = Path(tmp) / "corpus"
    save_corpus(corpus, root)
    n_files = len(list((root / "samples").glob("*.txt")))
    print(f"\nsaved to {n_files} record files + manifest.json")
    reloaded = load_corpus(root)
    print(f"reload identical: {reloaded == corpus}")

train, test = split(corpus, SplitSpec(train_fraction=0.9, seed=1))
print(f"\n90/10 split: {len(train)} train / {len(test)} test")
for room_type in sorted(train.per_type_counts, key=lambda rt: rt.value):
    print(f"  {room_type.value:<14} {train.per_type_counts[room_type]:>3} / "
          f"{test.per_type_counts.get(room_type, 0)}")
