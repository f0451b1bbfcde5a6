"""HTTP inference service.

JSON over HTTP/1.1. The model is loaded once at startup; every request is
served from the same immutable parameter set, so identical requests yield
identical layout payloads. Errors are `{"code": ..., "message": ...}`.

Endpoints:

- `POST /api/v1/layout`: scene (inline or fixture id) + size requests ->
  layout, validator findings, optional base64 PNG render
- `GET /api/v1/scenes`: fixture scene summaries with thumbnail links
- `GET /api/v1/scenes/{id}/thumbnail.png`
- `GET /api/v1/catalog`: categories with default sizes, ranges, palette colors
- `GET /healthz`

Configuration comes from MODEL_PATH, FIXTURES_PATH, PORT, and LOG_LEVEL.
"""

from __future__ import annotations

import base64
import logging
import os
import time
from dataclasses import dataclass

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse, Response
from pydantic import BaseModel, Field

from roomfit.dataset import Corpus, MissingManifestError, load_corpus
from roomfit.geometry import (
    AABB,
    GeometryError,
    Layout,
    RoomScene,
    RoomType,
    SizeCode,
    WallSegment,
    validate_layout,
)
from roomfit.model.checkpoint import checkpoint_hash, load_checkpoint
from roomfit.model.infer import InferenceModel, compose_custom_layout
from roomfit.model.nets import extract_furniture, grow_size, project_size
from roomfit.model.slots import decode_slots
from roomfit.raster import RenderConfig, rasterize_layout, rasterize_scene, to_png_bytes

logger = logging.getLogger(__name__)

_THUMBNAIL_SIZE = 128
_RENDER_SIZE = 256


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message


class SizeRequestBody(BaseModel):
    category_id: int
    size_code: str


class LayoutRequestBody(BaseModel):
    scene: dict | None = None
    scene_id: str | None = None
    requests: list[SizeRequestBody] = Field(default_factory=list)
    render: bool = False


# --- JSON <-> domain ------------------------------------------------------------


def scene_to_payload(scene: RoomScene) -> dict:
    return {
        "room_type": scene.room_type.value,
        "bounds": [scene.bounds.x_min, scene.bounds.y_min,
                   scene.bounds.x_max, scene.bounds.y_max],
        "walls": [[w.x0, w.y0, w.x1, w.y1, w.thickness] for w in scene.walls],
        "doors": [[d.x_min, d.y_min, d.x_max, d.y_max] for d in scene.doors],
        "windows": [[w.x_min, w.y_min, w.x_max, w.y_max] for w in scene.windows],
    }


def scene_from_payload(raw: dict) -> RoomScene:
    try:
        return RoomScene(
            room_type=RoomType(raw["room_type"]),
            bounds=AABB(*[float(v) for v in raw["bounds"]]),
            walls=tuple(WallSegment(*[float(v) for v in w]) for w in raw.get("walls", [])),
            doors=tuple(AABB(*[float(v) for v in d]) for d in raw.get("doors", [])),
            windows=tuple(AABB(*[float(v) for v in w]) for w in raw.get("windows", [])),
        )
    except (KeyError, TypeError, ValueError, GeometryError) as exc:
        raise ApiError(400, "bad_scene", f"invalid scene payload: {exc}") from None


def layout_to_payload(layout: Layout) -> dict:
    return {
        "room_type": layout.scene.room_type.value,
        "bounds": [layout.scene.bounds.x_min, layout.scene.bounds.y_min,
                   layout.scene.bounds.x_max, layout.scene.bounds.y_max],
        "furniture": [
            {
                "category_id": f.category.id,
                "category": f.category.name,
                "customized": f.customized,
                "position": [f.position.x, f.position.y],
                "size": {
                    "length": f.size.length,
                    "width": f.size.width,
                    "height": f.size.height,
                },
                "orientation": f.orientation.value,
            }
            for f in layout.furniture
        ],
    }


# --- app state -------------------------------------------------------------------


@dataclass
class ServiceState:
    model: InferenceModel | None = None
    model_version: str = ""
    fixtures: Corpus | None = None
    started_at: float = 0.0


def create_app(
    model_path: str | None = None, fixtures_path: str | None = None
) -> FastAPI:
    app = FastAPI(title="roomfit inference service")
    state = ServiceState(started_at=time.monotonic())
    app.state.service = state

    if model_path:
        params = load_checkpoint(model_path)
        state.model = InferenceModel(params)
        state.model_version = checkpoint_hash(model_path)
        logger.info("model loaded from %s (%s)", model_path, state.model_version[:12])
    if fixtures_path:
        try:
            state.fixtures = load_corpus(fixtures_path)
            logger.info("loaded %d fixture scenes", len(state.fixtures))
        except MissingManifestError:
            # an empty fixtures directory just means no scenes to offer
            logger.warning("no corpus manifest under %s; serving without fixtures",
                           fixtures_path)

    @app.exception_handler(ApiError)
    async def api_error_handler(_req: Request, exc: ApiError):
        return JSONResponse(
            status_code=exc.status, content={"code": exc.code, "message": exc.message}
        )

    @app.exception_handler(RequestValidationError)
    async def validation_handler(_req: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=400, content={"code": "bad_request", "message": str(exc.errors())}
        )

    def require_model() -> InferenceModel:
        if state.model is None:
            raise ApiError(503, "model_not_loaded", "no model checkpoint is loaded")
        return state.model

    def fixture_scene(scene_id: str) -> RoomScene:
        if state.fixtures is None:
            raise ApiError(404, "unknown_scene", f"no fixture scene {scene_id!r}")
        for sample in state.fixtures.samples:
            if sample.id == scene_id:
                return sample.scene
        raise ApiError(404, "unknown_scene", f"no fixture scene {scene_id!r}")

    @app.get("/healthz")
    async def healthz():
        loaded = state.model is not None
        body = {
            "status": "ok" if loaded else "no_model",
            "model_loaded": loaded,
            "checkpoint_hash": state.model_version,
            "uptime_s": time.monotonic() - state.started_at,
        }
        return JSONResponse(status_code=200 if loaded else 503, content=body)

    @app.get("/api/v1/scenes")
    async def scenes():
        if state.fixtures is None:
            return []
        return [
            {
                "id": sample.id,
                "room_type": sample.scene.room_type.value,
                "thumbnail": f"/api/v1/scenes/{sample.id}/thumbnail.png",
            }
            for sample in state.fixtures.samples
        ]

    @app.get("/api/v1/scenes/{scene_id}/thumbnail.png")
    async def thumbnail(scene_id: str):
        scene = fixture_scene(scene_id)
        cfg = RenderConfig(image_height=_THUMBNAIL_SIZE, image_width=_THUMBNAIL_SIZE)
        return Response(
            content=to_png_bytes(rasterize_scene(scene, cfg)), media_type="image/png"
        )

    @app.get("/api/v1/catalog")
    async def catalog():
        model = require_model()
        palette = model.params.palette
        return {
            "categories": [
                {
                    "id": e.code.id,
                    "name": e.code.name,
                    "customized": e.code.customized,
                    "default_size": {
                        "length": e.default_size.length,
                        "width": e.default_size.width,
                        "height": e.default_size.height,
                    },
                    "size_range": {
                        "length": [e.size_range.length_min, e.size_range.length_max],
                        "width": [e.size_range.width_min, e.size_range.width_max],
                        "height": [e.size_range.height_min, e.size_range.height_max],
                    },
                    "color": list(palette.category_color(e.code.id)),
                }
                for e in model.params.catalog
            ],
            "palette": {
                "background": list(palette.background),
                "wall": list(palette.wall),
                "door": list(palette.door),
                "window": list(palette.window),
                "hash": palette.hash(),
            },
            "size_codes": [c.value for c in SizeCode],
        }

    @app.post("/api/v1/layout")
    async def layout(body: LayoutRequestBody):
        started = time.perf_counter()
        model = require_model()
        if (body.scene is None) == (body.scene_id is None):
            raise ApiError(
                400, "bad_request", "provide exactly one of 'scene' or 'scene_id'"
            )
        scene = (
            scene_from_payload(body.scene)
            if body.scene is not None
            else fixture_scene(body.scene_id)
        )
        requests: list[tuple[int, SizeCode]] = []
        for item in body.requests:
            try:
                code = SizeCode(item.size_code)
            except ValueError:
                raise ApiError(
                    400, "unknown_size_code",
                    f"unknown size code {item.size_code!r}; expected one of "
                    f"{[c.value for c in SizeCode]}",
                ) from None
            if not model.params.catalog.has(item.category_id):
                raise ApiError(
                    400, "unknown_category", f"unknown category id {item.category_id}"
                )
            requests.append((item.category_id, code))

        slots = model.predict_slots(scene)
        result = decode_slots(slots, scene, model.params.catalog)
        warnings = []
        for category_id, code in requests:
            present = any(
                f.customized and f.category.id == category_id
                for f in result.furniture
            )
            if not present:
                warnings.append(
                    {
                        "code": "category_not_placed",
                        "message": (
                            f"requested category {category_id} is absent from the "
                            "generated layout; size request skipped"
                        ),
                    }
                )
                continue
            label = model.params.catalog.entry(category_id).code
            tp1 = extract_furniture(model.params, slots, label)
            ls2 = grow_size(model.params, project_size(model.params, tp1), code)
            result = compose_custom_layout(result, label, ls2, code)

        violations = [
            {"kind": v.kind, "indices": list(v.indices), "message": v.message}
            for v in validate_layout(result, allow_overlap=False)
        ]
        image_b64 = None
        if body.render:
            cfg = RenderConfig(image_height=_RENDER_SIZE, image_width=_RENDER_SIZE,
                               palette=model.params.palette)
            image_b64 = base64.b64encode(
                to_png_bytes(rasterize_layout(result, cfg))
            ).decode("ascii")
        return {
            "layout": layout_to_payload(result),
            "violations": violations,
            "warnings": warnings,
            "image": image_b64,
            "model_version": state.model_version,
            "latency_ms": (time.perf_counter() - started) * 1000.0,
        }

    return app


def create_app_from_env() -> FastAPI:
    logging.basicConfig(level=os.environ.get("LOG_LEVEL", "INFO").upper())
    return create_app(
        model_path=os.environ.get("MODEL_PATH") or None,
        fixtures_path=os.environ.get("FIXTURES_PATH") or None,
    )
