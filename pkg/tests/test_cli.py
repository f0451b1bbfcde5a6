import json
import os
import signal
import socket
import subprocess
import sys
import time
from pathlib import Path

import pytest
from PIL import Image

from roomfit.cli import EXIT_DATA, EXIT_OK, EXIT_USAGE, main
from roomfit.dataset import make_fixture_corpus, save_corpus


TRAIN_FAST = [
    "--steps", "4", "--batch", "4", "--lr", "0.001",
    "--image-size", "32", "--slots", "8",
]


@pytest.fixture(scope="module")
def corpus_dir(tmp_path_factory) -> Path:
    root = tmp_path_factory.mktemp("cli-corpus")
    save_corpus(make_fixture_corpus(6, seed=11), root)
    return root


@pytest.fixture(scope="module")
def trained(tmp_path_factory, corpus_dir) -> Path:
    out = tmp_path_factory.mktemp("cli-train") / "model.ckpt"
    code = main(["train", "--corpus", str(corpus_dir), "--out", str(out), *TRAIN_FAST])
    assert code == EXIT_OK
    return out


class TestTrain:
    def test_fixture_training_writes_artifacts(self, tmp_path):
        out = tmp_path / "m.ckpt"
        code = main(["train", "--fixture", "4", "--seed", "7", "--out", str(out), *TRAIN_FAST])
        assert code == EXIT_OK
        assert out.exists()
        csv = tmp_path / "m.ckpt.losses.csv"
        assert csv.exists()
        lines = csv.read_text().splitlines()
        assert lines[0] == "step,L_D,L_G,L_trans1,L_trans2,L_size"
        assert len(lines) == 5

    def test_missing_corpus_is_data_error(self, tmp_path):
        code = main(["train", "--corpus", str(tmp_path / "nope"), "--out",
                     str(tmp_path / "m.ckpt")])
        assert code == EXIT_DATA

    def test_corpus_and_fixture_conflict(self, tmp_path):
        code = main(["train", "--corpus", "x", "--fixture", "4", "--out",
                     str(tmp_path / "m.ckpt")])
        assert code == EXIT_USAGE

    def test_zero_lr_constant_csv(self, tmp_path):
        out = tmp_path / "m.ckpt"
        code = main(["train", "--fixture", "4", "--seed", "3", "--lr", "0",
                     "--steps", "5", "--batch", "8", "--image-size", "32",
                     "--slots", "8", "--out", str(out)])
        assert code == EXIT_OK
        rows = (tmp_path / "m.ckpt.losses.csv").read_text().splitlines()[1:]
        tails = {row.split(",", 1)[1] for row in rows}
        assert len(tails) == 1

    def test_determinism_identical_csvs(self, tmp_path):
        args = ["--fixture", "5", "--seed", "9", *TRAIN_FAST]
        a, b = tmp_path / "a.ckpt", tmp_path / "b.ckpt"
        assert main(["train", *args, "--out", str(a)]) == EXIT_OK
        assert main(["train", *args, "--out", str(b)]) == EXIT_OK
        csv_a = (tmp_path / "a.ckpt.losses.csv").read_bytes()
        csv_b = (tmp_path / "b.ckpt.losses.csv").read_bytes()
        assert csv_a == csv_b


class TestEval:
    def test_oracle_report_is_all_ones(self, tmp_path, corpus_dir):
        out = tmp_path / "report.json"
        code = main(["eval", "--corpus", str(corpus_dir), "--oracle", "--out", str(out)])
        assert code == EXIT_OK
        report = json.loads(out.read_text())
        for room in list(report["rooms"].values()) + [report["overall"]]:
            assert room["mode"]["mean"] == pytest.approx(1.0)
            assert room["iou"]["mean"] == pytest.approx(1.0)
            assert room["transfer"]["mean"] == pytest.approx(1.0)
            assert room["size"]["mean"] == pytest.approx(1.0)
        assert out.with_suffix(".json.txt").exists()

    def test_report_validates_against_schema(self, tmp_path, corpus_dir, trained):
        import jsonschema

        from roomfit.metrics import REPORT_JSON_SCHEMA

        out = tmp_path / "report.json"
        code = main(["eval", "--corpus", str(corpus_dir), "--ckpt", str(trained),
                     "--out", str(out)])
        assert code == EXIT_OK
        jsonschema.validate(json.loads(out.read_text()), REPORT_JSON_SCHEMA)

    def test_missing_checkpoint_is_data_error(self, tmp_path, corpus_dir):
        code = main(["eval", "--corpus", str(corpus_dir), "--ckpt",
                     str(tmp_path / "nope.ckpt"), "--out", str(tmp_path / "r.json")])
        assert code == EXIT_DATA


class TestRender:
    def test_scene_only(self, tmp_path, corpus_dir):
        record = corpus_dir / "samples" / "00000.txt"
        out = tmp_path / "scene.png"
        assert main(["render", "--scene", str(record), "--out", str(out)]) == EXIT_OK
        img = Image.open(out)
        assert img.size == (256, 256)

    def test_layout_render_uses_manifest(self, tmp_path, corpus_dir):
        record = corpus_dir / "samples" / "00001.txt"
        out = tmp_path / "layout.png"
        code = main(["render", "--scene", str(record), "--layout", str(record),
                     "--out", str(out), "--size", "128x192"])
        assert code == EXIT_OK
        img = Image.open(out)
        assert img.size == (192, 128)  # PIL reports (width, height)

    def test_scene_matches_library_rasterizer(self, tmp_path, corpus_dir):
        import numpy as np

        from roomfit.dataset import load_scene
        from roomfit.raster import RenderConfig, rasterize_scene, to_png_bytes

        record = corpus_dir / "samples" / "00002.txt"
        out = tmp_path / "scene.png"
        assert main(["render", "--scene", str(record), "--out", str(out)]) == EXIT_OK
        direct = to_png_bytes(rasterize_scene(load_scene(record), RenderConfig()))
        assert out.read_bytes() == direct

    def test_bad_size_is_usage_error(self, tmp_path, corpus_dir):
        record = corpus_dir / "samples" / "00000.txt"
        code = main(["render", "--scene", str(record), "--out",
                     str(tmp_path / "x.png"), "--size", "banana"])
        assert code == EXIT_USAGE

    def test_unknown_subcommand_is_usage_error(self):
        assert main(["frobnicate"]) == EXIT_USAGE


def _free_port() -> int:
    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        return s.getsockname()[1]


class TestServe:
    def test_occupied_port_is_runtime_error(self, trained):
        from roomfit.cli import EXIT_RUNTIME

        with socket.socket() as blocker:
            blocker.bind(("127.0.0.1", 0))
            port = blocker.getsockname()[1]
            blocker.listen(1)
            code = main(["serve", "--ckpt", str(trained), "--port", str(port)])
            assert code == EXIT_RUNTIME

    def test_missing_ckpt_flag_is_usage_error(self, monkeypatch):
        monkeypatch.delenv("MODEL_PATH", raising=False)
        assert main(["serve", "--ckpt", ""]) == EXIT_USAGE

    def test_serve_answers_health_and_stops_on_sigterm(self, trained, corpus_dir):
        import httpx

        port = _free_port()
        proc = subprocess.Popen(
            [
                sys.executable, "-m", "roomfit.cli", "serve",
                "--ckpt", str(trained), "--fixtures", str(corpus_dir),
                "--port", str(port),
            ],
            stdout=subprocess.PIPE,
            stderr=subprocess.STDOUT,
            env={**os.environ, "LOG_LEVEL": "warning"},
        )
        try:
            deadline = time.monotonic() + 30
            url = f"http://127.0.0.1:{port}/healthz"
            while True:
                try:
                    resp = httpx.get(url, timeout=1.0)
                    if resp.status_code == 200:
                        break
                except httpx.TransportError:
                    pass
                if time.monotonic() > deadline:
                    proc.kill()
                    out = proc.stdout.read().decode() if proc.stdout else ""
                    pytest.fail(f"service never became healthy: {out[-2000:]}")
                time.sleep(0.2)
            scenes = httpx.get(f"http://127.0.0.1:{port}/api/v1/scenes", timeout=5.0)
            assert scenes.status_code == 200 and len(scenes.json()) == 6

            proc.send_signal(signal.SIGTERM)
            stopped_at = time.monotonic()
            proc.wait(timeout=5)
            assert time.monotonic() - stopped_at < 5.0
        finally:
            if proc.poll() is None:
                proc.kill()
                proc.wait()
