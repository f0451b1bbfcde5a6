"""Command-line entry point.

Subcommands: `train`, `eval`, `render`, `serve`. Exit codes: 0 success,
1 usage error, 2 data error (missing or malformed inputs), 3 runtime
failure (divergence, port in use, unexpected errors).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_RUNTIME = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # exit code 1 instead of argparse's 2
        raise UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="roomfit", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p_train = sub.add_parser("train", help="train a model on a corpus")
    p_train.add_argument("--corpus", help="corpus directory")
    p_train.add_argument("--fixture", type=int, metavar="N",
                         help="train on N generated fixture samples instead")
    p_train.add_argument("--out", required=True, help="checkpoint output path")
    p_train.add_argument("--steps", type=int, default=1000)
    p_train.add_argument("--seed", type=int, default=0)
    p_train.add_argument("--lambda-adv", type=float, default=0.01)
    p_train.add_argument("--alpha", type=float, default=1.0)
    p_train.add_argument("--lr", type=float, default=1e-4)
    p_train.add_argument("--batch", type=int, default=32)
    p_train.add_argument("--image-size", type=int, default=64)
    p_train.add_argument("--slots", type=int, default=16)

    p_eval = sub.add_parser("eval", help="evaluate a checkpoint on a corpus")
    p_eval.add_argument("--corpus", help="corpus directory")
    p_eval.add_argument("--fixture", type=int, metavar="N",
                        help="evaluate on N generated fixture samples instead")
    p_eval.add_argument("--fixture-seed", type=int, default=0)
    p_eval.add_argument("--ckpt", help="checkpoint file")
    p_eval.add_argument("--out", required=True, help="report JSON output path")
    p_eval.add_argument("--oracle", action="store_true",
                        help="score ground truth against itself (all metrics 1.0)")

    p_render = sub.add_parser("render", help="render a scene or layout to PNG")
    p_render.add_argument("--scene", required=True, help="sample record file")
    p_render.add_argument("--layout", help="sample record whose layout to render "
                          "(needs a corpus manifest.json next to or above it)")
    p_render.add_argument("--out", required=True, help="PNG output path")
    p_render.add_argument("--size", default="256x256", metavar="HxW")

    p_serve = sub.add_parser("serve", help="start the inference service")
    p_serve.add_argument("--ckpt", default=os.environ.get("MODEL_PATH"),
                         help="checkpoint file (or MODEL_PATH env)")
    p_serve.add_argument("--port", type=int,
                         default=int(os.environ.get("PORT", "8080")))
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--fixtures", default=os.environ.get("FIXTURES_PATH"),
                         help="fixture corpus directory (or FIXTURES_PATH env)")
    return parser


def _corpus_for(args, seed: int):
    from roomfit.dataset import load_corpus, make_fixture_corpus

    if args.fixture is not None and args.corpus:
        raise UsageError("--corpus and --fixture are mutually exclusive")
    if args.fixture is not None:
        if args.fixture < 1:
            raise UsageError("--fixture needs N >= 1")
        return make_fixture_corpus(args.fixture, seed=seed)
    if not args.corpus:
        raise UsageError("one of --corpus or --fixture is required")
    return load_corpus(args.corpus)


def _cmd_train(args) -> int:
    from roomfit.model.checkpoint import save_checkpoint
    from roomfit.model.nets import ModelConfig
    from roomfit.model.train import TrainConfig, loss_history_csv, train

    corpus = _corpus_for(args, seed=args.seed)
    cfg = TrainConfig(
        steps=args.steps,
        batch_size=args.batch,
        learning_rate=args.lr,
        lambda_adv=args.lambda_adv,
        alpha=args.alpha,
        seed=args.seed,
    )
    model_cfg = ModelConfig(image_size=args.image_size, n_slots=args.slots)
    result = train(corpus, cfg, model_cfg)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    save_checkpoint(result.params, out)
    csv_path = out.with_name(out.name + ".losses.csv")
    csv_path.write_text(loss_history_csv(result.history), encoding="utf-8")
    print(f"checkpoint written to {out}")
    print(f"loss history written to {csv_path}")
    return EXIT_OK


def _cmd_eval(args) -> int:
    from roomfit.metrics import OracleModel, evaluate
    from roomfit.model.checkpoint import load_checkpoint
    from roomfit.model.infer import InferenceModel

    corpus = _corpus_for(args, seed=args.fixture_seed)
    if args.oracle:
        model = OracleModel(corpus)
    else:
        if not args.ckpt:
            raise UsageError("--ckpt is required unless --oracle is given")
        model = InferenceModel(load_checkpoint(args.ckpt))
    report = evaluate(model, corpus)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(report.to_json() + "\n", encoding="utf-8")
    table = report.to_table()
    out.with_suffix(out.suffix + ".txt").write_text(table + "\n", encoding="utf-8")
    print(table)
    print(f"report written to {out}")
    return EXIT_OK


def _parse_size(text: str) -> tuple[int, int]:
    try:
        h_str, w_str = text.lower().split("x")
        h, w = int(h_str), int(w_str)
    except ValueError:
        raise UsageError(f"--size must look like 256x256, got {text!r}") from None
    if h < 1 or w < 1:
        raise UsageError("--size dimensions must be positive")
    return h, w


def _find_manifest(record: Path) -> Path | None:
    for parent in record.resolve().parents:
        candidate = parent / "manifest.json"
        if candidate.is_file():
            return candidate
    return None


def _cmd_render(args) -> int:
    from roomfit.dataset import catalog_from_json_list, load_sample, load_scene
    from roomfit.raster import RenderConfig, rasterize_layout, rasterize_scene, save_png

    h, w = _parse_size(args.size)
    cfg = RenderConfig(image_height=h, image_width=w)
    if args.layout:
        record = Path(args.layout)
        manifest = _find_manifest(record)
        if manifest is None:
            raise FileNotFoundError(
                f"no manifest.json found above {record}; cannot resolve the catalog"
            )
        catalog = catalog_from_json_list(
            json.loads(manifest.read_text(encoding="utf-8"))["catalog"], str(manifest)
        )
        image = rasterize_layout(load_sample(record, catalog).layout, cfg)
    else:
        image = rasterize_scene(load_scene(args.scene), cfg)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    save_png(image, out)
    print(f"rendered {out}")
    return EXIT_OK


def _cmd_serve(args) -> int:
    import uvicorn

    from roomfit.service import create_app

    if not args.ckpt:
        raise UsageError("--ckpt (or MODEL_PATH) is required")
    app = create_app(model_path=args.ckpt, fixtures_path=args.fixtures)
    log_level = os.environ.get("LOG_LEVEL", "info").lower()
    config = uvicorn.Config(
        app, host=args.host, port=args.port, log_level=log_level, workers=1
    )
    server = uvicorn.Server(config)
    try:
        server.run()
    except SystemExit as exc:  # uvicorn exits nonzero on failed startup
        if exc.code not in (0, None):
            print(f"runtime error: server failed to start (port in use?)",
                  file=sys.stderr)
            return EXIT_RUNTIME
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    from roomfit.dataset import DatasetError
    from roomfit.model.checkpoint import CheckpointError
    from roomfit.model.train import TrainError

    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        handler = {
            "train": _cmd_train,
            "eval": _cmd_eval,
            "render": _cmd_render,
            "serve": _cmd_serve,
        }[args.command]
        return handler(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (FileNotFoundError, DatasetError, CheckpointError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except TrainError as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


def console_main() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console_main()
