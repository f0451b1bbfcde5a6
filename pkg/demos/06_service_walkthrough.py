"""The inference service, exercised in-process.

Trains a tiny checkpoint, mounts the HTTP app with a fixture corpus, and
walks the full designer loop: list scenes, read the catalog, request
layouts under different size codes, and save the returned renders.
"""

import base64
import tempfile
import time
from pathlib import Path

from fastapi.testclient import TestClient

from roomfit.dataset import make_fixture_corpus, save_corpus
from roomfit.model.checkpoint import save_checkpoint
from roomfit.model.nets import ModelConfig
from roomfit.model.train import TrainConfig, train
from roomfit.service import create_app

out_dir = Path(__file__).parent / "output"
out_dir.mkdir(exist_ok=True)

corpus = make_fixture_corpus(8, seed=15)
print("training a small checkpoint (400 steps)...")
result = train(
    corpus,
    TrainConfig(steps=400, batch_size=8, learning_rate=1e-3, seed=3),
    ModelConfig(image_size=64),
)

with tempfile.TemporaryDirectory() as tmp:
    ckpt = Path(tmp) / "model.ckpt"
    fixtures = Path(tmp) / "fixtures"
    save_checkpoint(result.params, ckpt)
    save_corpus(corpus, fixtures)
    client = TestClient(create_app(model_path=str(ckpt), fixtures_path=str(fixtures)))

    health = client.get("/healthz").json()
    print(f"healthz: model_loaded={health['model_loaded']} "
          f"checkpoint={health['checkpoint_hash'][:12]}...")

    scenes = client.get("/api/v1/scenes").json()
    print(f"{len(scenes)} fixture scenes; first: {scenes[0]['id']} "
          f"({scenes[0]['room_type']})")

    catalog = client.get("/api/v1/catalog").json()
    customizable = [c for c in catalog["categories"] if c["customized"]]
    print(f"catalog: {len(catalog['categories'])} categories, "
          f"{len(customizable)} customizable, {len(catalog['size_codes'])} size codes")

    scene_id = scenes[0]["id"]
    target = next(c for c in customizable if c["name"] == "bed")
    for code in ("Default", "WidthLeft", "LengthUp"):
        t0 = time.perf_counter()
        resp = client.post("/api/v1/layout", json={
            "scene_id": scene_id,
            "requests": [{"category_id": target["id"], "size_code": code}],
            "render": True,
        })
        body = resp.json()
        ms = (time.perf_counter() - t0) * 1000
        png = base64.b64decode(body["image"])
        (out_dir / f"service_{code}.png").write_bytes(png)
        beds = [f["size"]["width"] for f in body["layout"]["furniture"]
                if f["category"] == "bed"]
        note = body["warnings"][0]["message"] if body["warnings"] else ""
        width = f"bed width {beds[0]:.2f} m" if beds else "bed not placed"
        print(f"  {code:<10} -> {resp.status_code}, {width}, "
              f"{len(png)} PNG bytes, {ms:.0f} ms round trip {note}")

print(f"\nrenders written to {out_dir}/")
