"""On-disk corpus schema, loader, split logic, and synthetic fixtures.

A corpus directory looks like::

    manifest.json
    samples/00000.txt
    samples/00001.txt
    ...

`manifest.json` carries the category catalog (id, name, customized flag,
default size and size range in integer millimeters), per-room-type sample
counts, and the sample file list. Each sample file is a line-delimited
UTF-8 record; every length is an integer millimeter count::

    room bedroom
    bounds <x_min> <y_min> <x_max> <y_max>
    wall <x0> <y0> <x1> <y1> <thickness>          (one per wall)
    door <x_min> <y_min> <x_max> <y_max>          (zero or more)
    window <x_min> <y_min> <x_max> <y_max>        (zero or more)
    furniture <cat> <cx> <cy> <len> <wid> <hei> [<orient>] <dlen> <dwid>
              <dhei> <lmin> <lmax> <wmin> <wmax> <hmin> <hmax>
    variant <cat> <code> furniture <same 15-16 fields>

`orient` is one of N/E/S/W and may be omitted (defaults to North). A
variant stores the resulting state of the targeted furniture item; the
rest of its layout is the base layout unchanged.

Values are stored in millimeters and converted to meters on load so that
parsing never introduces float drift; `save_corpus` followed by
`load_corpus` is an identity on corpora whose geometry sits on the 1 mm
grid (everything `make_fixture_corpus` produces does).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from roomfit.geometry import (
    AABB,
    CategoryCode,
    FurnitureInstance,
    GeometryError,
    Layout,
    LayoutVariant,
    Orientation,
    Point2,
    RoomScene,
    RoomType,
    Size3,
    SizeCode,
    SizeRange,
    WallSegment,
    apply_size_code,
)

SCHEMA_VERSION = 1

# Per-room-type sample counts of the production designer corpus this schema
# was sized for (710,700 layouts in total). The loader itself trusts the
# manifest of whatever corpus it is given.
PUBLISHED_ROOM_COUNTS: dict[RoomType, int] = {
    RoomType.BALCONY: 2_000,
    RoomType.BEDROOM: 22_000,
    RoomType.KITCHEN: 185_000,
    RoomType.BATHROOM: 400_000,
    RoomType.LIVING_DINING: 80_000,
    RoomType.STUDY: 1_700,
    RoomType.TATAMI: 20_000,
}


class DatasetError(Exception):
    """Base class for corpus loading/validation failures."""


class MissingManifestError(DatasetError):
    pass


class CorpusFormatError(DatasetError):
    """Malformed record; message carries file and line diagnostics."""


@dataclass(frozen=True)
class CatalogEntry:
    """A furniture category plus its catalog default size and size range."""

    code: CategoryCode
    default_size: Size3
    size_range: SizeRange

    def __post_init__(self) -> None:
        if not self.size_range.contains(self.default_size):
            raise DatasetError(
                f"catalog default size for {self.code.name} outside its range"
            )


class Catalog:
    """Immutable id-indexed collection of catalog entries."""

    def __init__(self, entries: tuple[CatalogEntry, ...] | list[CatalogEntry]):
        self._entries = tuple(entries)
        self._by_id = {e.code.id: e for e in self._entries}
        if len(self._by_id) != len(self._entries):
            raise DatasetError("catalog contains duplicate category ids")

    def __len__(self) -> int:
        return len(self._entries)

    def __iter__(self):
        return iter(self._entries)

    def __eq__(self, other) -> bool:
        return isinstance(other, Catalog) and self._entries == other._entries

    def __hash__(self) -> int:
        return hash(self._entries)

    @property
    def entries(self) -> tuple[CatalogEntry, ...]:
        return self._entries

    def entry(self, category_id: int) -> CatalogEntry:
        try:
            return self._by_id[category_id]
        except KeyError:
            raise DatasetError(f"unknown category id {category_id}") from None

    def has(self, category_id: int) -> bool:
        return category_id in self._by_id

    def customized_ids(self) -> list[int]:
        return [e.code.id for e in self._entries if e.code.customized]


@dataclass(frozen=True)
class Sample:
    """One corpus record: a scene, its ground-truth layout, size variants."""

    id: str
    layout: Layout
    variants: tuple[LayoutVariant, ...]

    @property
    def scene(self) -> RoomScene:
        return self.layout.scene


@dataclass(frozen=True)
class Corpus:
    samples: tuple[Sample, ...]
    catalog: Catalog

    def __post_init__(self) -> None:
        for s in self.samples:
            for v in s.variants:
                if not any(
                    f.customized and f.category.id == v.target_category.id
                    for f in s.layout.furniture
                ):
                    raise DatasetError(
                        f"sample {s.id}: variant targets category "
                        f"{v.target_category.id} with no customized instance"
                    )

    @property
    def per_type_counts(self) -> dict[RoomType, int]:
        counts: dict[RoomType, int] = {}
        for s in self.samples:
            counts[s.scene.room_type] = counts.get(s.scene.room_type, 0) + 1
        return counts

    def __len__(self) -> int:
        return len(self.samples)


@dataclass(frozen=True)
class SplitSpec:
    train_fraction: float = 0.9
    seed: int = 0

    def __post_init__(self) -> None:
        if not 0 < self.train_fraction < 1:
            raise DatasetError(
                f"train_fraction must be in (0, 1), got {self.train_fraction}"
            )


# --- mm <-> m conversion -----------------------------------------------------

def _mm(value_m: float) -> int:
    return int(round(value_m * 1000))


def _m(value_mm: int) -> float:
    return value_mm / 1000.0


def quantize_layout_mm(layout: Layout) -> Layout:
    """Snap all furniture geometry in a layout to the 1 mm grid."""
    snapped = []
    for f in layout.furniture:
        snapped.append(
            FurnitureInstance(
                category=f.category,
                position=Point2(_m(_mm(f.position.x)), _m(_mm(f.position.y))),
                size=Size3(_m(_mm(f.size.length)), _m(_mm(f.size.width)),
                           _m(_mm(f.size.height))),
                orientation=f.orientation,
                default_size=f.default_size,
                size_range=f.size_range,
                customized=f.customized,
            )
        )
    return Layout(scene=layout.scene, furniture=tuple(snapped))


# --- serialization -----------------------------------------------------------

_ORIENT_TOKENS = {o.value for o in Orientation}


def _furniture_tokens(f: FurnitureInstance) -> list[str]:
    s, d, r = f.size, f.default_size, f.size_range
    return [
        str(f.category.id),
        str(_mm(f.position.x)), str(_mm(f.position.y)),
        str(_mm(s.length)), str(_mm(s.width)), str(_mm(s.height)),
        f.orientation.value,
        str(_mm(d.length)), str(_mm(d.width)), str(_mm(d.height)),
        str(_mm(r.length_min)), str(_mm(r.length_max)),
        str(_mm(r.width_min)), str(_mm(r.width_max)),
        str(_mm(r.height_min)), str(_mm(r.height_max)),
    ]


def _parse_furniture(tokens: list[str], catalog: Catalog, where: str) -> FurnitureInstance:
    if len(tokens) not in (15, 16):
        raise CorpusFormatError(
            f"{where}: furniture entry needs 15 or 16 fields, got {len(tokens)}"
        )
    has_orient = len(tokens) == 16
    if has_orient and tokens[6] not in _ORIENT_TOKENS:
        raise CorpusFormatError(f"{where}: bad orientation token {tokens[6]!r}")
    orient = Orientation(tokens[6]) if has_orient else Orientation.NORTH
    nums = tokens[:6] + tokens[7:] if has_orient else tokens
    try:
        v = [int(t) for t in nums]
    except ValueError as exc:
        raise CorpusFormatError(f"{where}: non-integer field ({exc})") from None
    cat_id = v[0]
    if not catalog.has(cat_id):
        raise CorpusFormatError(f"{where}: unknown category id {cat_id}")
    code = catalog.entry(cat_id).code
    try:
        instance = FurnitureInstance(
            category=code,
            position=Point2(_m(v[1]), _m(v[2])),
            size=Size3(_m(v[3]), _m(v[4]), _m(v[5])),
            orientation=orient,
            default_size=Size3(_m(v[6]), _m(v[7]), _m(v[8])),
            size_range=SizeRange(
                _m(v[9]), _m(v[10]), _m(v[11]), _m(v[12]), _m(v[13]), _m(v[14])
            ),
            customized=code.customized,
        )
    except GeometryError as exc:
        raise CorpusFormatError(f"{where}: {exc}") from None
    if not instance.size_range.contains(instance.default_size):
        raise CorpusFormatError(
            f"{where}: default size {instance.default_size} outside the size range"
        )
    return instance


def _sample_lines(sample: Sample) -> list[str]:
    scene = sample.scene
    b = scene.bounds
    lines = [
        f"room {scene.room_type.value}",
        f"bounds {_mm(b.x_min)} {_mm(b.y_min)} {_mm(b.x_max)} {_mm(b.y_max)}",
    ]
    for w in scene.walls:
        lines.append(
            f"wall {_mm(w.x0)} {_mm(w.y0)} {_mm(w.x1)} {_mm(w.y1)} {_mm(w.thickness)}"
        )
    for d in scene.doors:
        lines.append(f"door {_mm(d.x_min)} {_mm(d.y_min)} {_mm(d.x_max)} {_mm(d.y_max)}")
    for w in scene.windows:
        lines.append(
            f"window {_mm(w.x_min)} {_mm(w.y_min)} {_mm(w.x_max)} {_mm(w.y_max)}"
        )
    for f in sample.layout.furniture:
        lines.append("furniture " + " ".join(_furniture_tokens(f)))
    for v in sample.variants:
        changed = _variant_target_instance(v)
        lines.append(
            f"variant {v.target_category.id} {v.size_code.value} furniture "
            + " ".join(_furniture_tokens(changed))
        )
    return lines


def _variant_target_instance(v: LayoutVariant) -> FurnitureInstance:
    """The result-side state of the instance a variant changed."""
    idx = target_instance_index(v.base, v.target_category.id)
    return v.result.furniture[idx]


def target_instance_index(layout: Layout, category_id: int) -> int:
    """Index of the customized instance a size request targets.

    With several customized instances of the same category the one with the
    largest default plan-view area wins (first on ties).
    """
    candidates = [
        (i, f)
        for i, f in enumerate(layout.furniture)
        if f.customized and f.category.id == category_id
    ]
    if not candidates:
        raise DatasetError(f"no customized instance of category {category_id}")
    return max(candidates, key=lambda p: (p[1].default_size.plan_area(), -p[0]))[0]


def catalog_to_json_list(catalog: Catalog) -> list[dict]:
    """Catalog as plain JSON data (sizes in integer millimeters)."""
    return [
        {
            "id": e.code.id,
            "name": e.code.name,
            "customized": e.code.customized,
            "default_size_mm": [
                _mm(e.default_size.length),
                _mm(e.default_size.width),
                _mm(e.default_size.height),
            ],
            "size_range_mm": {
                "length": [_mm(e.size_range.length_min), _mm(e.size_range.length_max)],
                "width": [_mm(e.size_range.width_min), _mm(e.size_range.width_max)],
                "height": [_mm(e.size_range.height_min), _mm(e.size_range.height_max)],
            },
        }
        for e in catalog
    ]


def save_corpus(corpus: Corpus, path: str | Path) -> None:
    """Write a corpus directory (manifest + one record file per sample)."""
    root = Path(path)
    (root / "samples").mkdir(parents=True, exist_ok=True)
    files = []
    for sample in corpus.samples:
        rel = f"samples/{sample.id}.txt"
        (root / rel).write_text("\n".join(_sample_lines(sample)) + "\n", encoding="utf-8")
        files.append(rel)
    manifest = {
        "version": SCHEMA_VERSION,
        "catalog": catalog_to_json_list(corpus.catalog),
        "room_type_counts": {
            rt.value: n for rt, n in sorted(corpus.per_type_counts.items(), key=lambda kv: kv[0].value)
        },
        "files": files,
    }
    (root / "manifest.json").write_text(
        json.dumps(manifest, indent=2) + "\n", encoding="utf-8"
    )


def catalog_from_json_list(raw: list[dict], where: str = "catalog") -> Catalog:
    return _parse_catalog(raw, where)


def _parse_catalog(raw: list[dict], where: str) -> Catalog:
    entries = []
    for item in raw:
        try:
            dl, dw, dh = item["default_size_mm"]
            rng = item["size_range_mm"]
            entries.append(
                CatalogEntry(
                    code=CategoryCode(
                        id=int(item["id"]),
                        name=str(item["name"]),
                        customized=bool(item["customized"]),
                    ),
                    default_size=Size3(_m(dl), _m(dw), _m(dh)),
                    size_range=SizeRange(
                        _m(rng["length"][0]), _m(rng["length"][1]),
                        _m(rng["width"][0]), _m(rng["width"][1]),
                        _m(rng["height"][0]), _m(rng["height"][1]),
                    ),
                )
            )
        except (KeyError, TypeError, ValueError, GeometryError) as exc:
            raise CorpusFormatError(f"{where}: bad catalog entry ({exc})") from None
    return Catalog(entries)


def _parse_sample(path: Path, catalog: Catalog) -> Sample:
    room_type: RoomType | None = None
    bounds: AABB | None = None
    walls: list[WallSegment] = []
    doors: list[AABB] = []
    windows: list[AABB] = []
    furniture: list[FurnitureInstance] = []
    variant_specs: list[tuple[int, SizeCode, FurnitureInstance]] = []

    def fail(lineno: int, msg: str) -> CorpusFormatError:
        return CorpusFormatError(f"{path}:{lineno}: {msg}")

    def ints(tokens: list[str], n: int, lineno: int) -> list[int]:
        if len(tokens) != n:
            raise fail(lineno, f"expected {n} integer fields, got {len(tokens)}")
        try:
            return [int(t) for t in tokens]
        except ValueError:
            raise fail(lineno, f"non-integer field in {tokens!r}") from None

    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        keyword, *rest = line.split()
        try:
            if keyword == "room":
                room_type = RoomType(rest[0])
            elif keyword == "bounds":
                v = ints(rest, 4, lineno)
                bounds = AABB(_m(v[0]), _m(v[1]), _m(v[2]), _m(v[3]))
            elif keyword == "wall":
                v = ints(rest, 5, lineno)
                walls.append(WallSegment(_m(v[0]), _m(v[1]), _m(v[2]), _m(v[3]), _m(v[4])))
            elif keyword in ("door", "window"):
                v = ints(rest, 4, lineno)
                box = AABB(_m(v[0]), _m(v[1]), _m(v[2]), _m(v[3]))
                (doors if keyword == "door" else windows).append(box)
            elif keyword == "furniture":
                furniture.append(_parse_furniture(rest, catalog, f"{path}:{lineno}"))
            elif keyword == "variant":
                if len(rest) < 3 or rest[2] != "furniture":
                    raise fail(lineno, "variant line must read: variant <cat> <code> furniture ...")
                cat_id = int(rest[0])
                try:
                    code = SizeCode(rest[1])
                except ValueError:
                    raise fail(lineno, f"unknown size code {rest[1]!r}") from None
                changed = _parse_furniture(rest[3:], catalog, f"{path}:{lineno}")
                if changed.category.id != cat_id:
                    raise fail(lineno, "variant furniture entry category mismatch")
                variant_specs.append((cat_id, code, changed))
            else:
                raise fail(lineno, f"unknown keyword {keyword!r}")
        except (ValueError, IndexError) as exc:
            raise fail(lineno, str(exc)) from None

    if room_type is None or bounds is None:
        raise CorpusFormatError(f"{path}: record is missing its room or bounds line")
    try:
        scene = RoomScene(
            room_type=room_type,
            bounds=bounds,
            walls=tuple(walls),
            doors=tuple(doors),
            windows=tuple(windows),
        )
        base = Layout(scene=scene, furniture=tuple(furniture))
        variants = []
        for cat_id, code, changed in variant_specs:
            idx = target_instance_index(base, cat_id)
            result_furniture = list(base.furniture)
            result_furniture[idx] = changed
            variants.append(
                LayoutVariant(
                    base=base,
                    target_category=catalog.entry(cat_id).code,
                    size_code=code,
                    result=Layout(scene=scene, furniture=tuple(result_furniture)),
                )
            )
    except (GeometryError, DatasetError) as exc:
        raise CorpusFormatError(f"{path}: {exc}") from None
    return Sample(id=path.stem, layout=base, variants=tuple(variants))


def load_scene(path: str | Path) -> RoomScene:
    """Parse only the scene block of a sample record (no catalog needed)."""
    path = Path(path)
    room_type: RoomType | None = None
    bounds: AABB | None = None
    walls: list[WallSegment] = []
    doors: list[AABB] = []
    windows: list[AABB] = []
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        keyword, *rest = line.split()
        try:
            if keyword == "room":
                room_type = RoomType(rest[0])
            elif keyword == "bounds":
                v = [int(t) for t in rest]
                bounds = AABB(_m(v[0]), _m(v[1]), _m(v[2]), _m(v[3]))
            elif keyword == "wall":
                v = [int(t) for t in rest]
                walls.append(WallSegment(_m(v[0]), _m(v[1]), _m(v[2]), _m(v[3]), _m(v[4])))
            elif keyword in ("door", "window"):
                v = [int(t) for t in rest]
                box = AABB(_m(v[0]), _m(v[1]), _m(v[2]), _m(v[3]))
                (doors if keyword == "door" else windows).append(box)
            elif keyword in ("furniture", "variant"):
                continue
            else:
                raise CorpusFormatError(f"{path}:{lineno}: unknown keyword {keyword!r}")
        except (ValueError, IndexError) as exc:
            raise CorpusFormatError(f"{path}:{lineno}: {exc}") from None
    if room_type is None or bounds is None:
        raise CorpusFormatError(f"{path}: record is missing its room or bounds line")
    try:
        return RoomScene(
            room_type=room_type,
            bounds=bounds,
            walls=tuple(walls),
            doors=tuple(doors),
            windows=tuple(windows),
        )
    except GeometryError as exc:
        raise CorpusFormatError(f"{path}: {exc}") from None


def load_sample(path: str | Path, catalog: Catalog) -> Sample:
    """Parse one sample record against a known catalog."""
    return _parse_sample(Path(path), catalog)


def load_corpus(path: str | Path) -> Corpus:
    """Load and fully validate a corpus directory."""
    root = Path(path)
    manifest_path = root / "manifest.json"
    if not manifest_path.is_file():
        raise MissingManifestError(f"missing manifest: {manifest_path}")
    try:
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise CorpusFormatError(f"{manifest_path}: invalid JSON ({exc})") from None
    if manifest.get("version") != SCHEMA_VERSION:
        raise CorpusFormatError(
            f"{manifest_path}: unsupported schema version {manifest.get('version')!r}"
        )
    catalog = _parse_catalog(manifest.get("catalog", []), str(manifest_path))
    samples = []
    for rel in manifest.get("files", []):
        sample_path = root / rel
        if not sample_path.is_file():
            raise CorpusFormatError(f"{manifest_path}: listed file missing: {rel}")
        samples.append(_parse_sample(sample_path, catalog))
    corpus = Corpus(samples=tuple(samples), catalog=catalog)
    declared = manifest.get("room_type_counts", {})
    actual = {rt.value: n for rt, n in corpus.per_type_counts.items()}
    if declared != actual:
        raise CorpusFormatError(
            f"{manifest_path}: room_type_counts {declared} disagree with samples {actual}"
        )
    return corpus


def split(corpus: Corpus, spec: SplitSpec) -> tuple[Corpus, Corpus]:
    """Deterministic stratified train/test split.

    Per room type the sample indices are shuffled with the split seed and the
    first round(train_fraction * n) go to train (clamped so both sides stay
    nonempty). Room types with fewer than 2 samples cannot be split.
    """
    rng = np.random.default_rng(spec.seed)
    by_type: dict[RoomType, list[int]] = {}
    for i, s in enumerate(corpus.samples):
        by_type.setdefault(s.scene.room_type, []).append(i)
    train_idx: list[int] = []
    test_idx: list[int] = []
    for room_type in sorted(by_type, key=lambda rt: rt.value):
        indices = by_type[room_type]
        if len(indices) < 2:
            raise DatasetError(
                f"room type {room_type.value} has {len(indices)} sample(s); "
                "need at least 2 to split"
            )
        order = rng.permutation(len(indices))
        n_train = int(round(spec.train_fraction * len(indices)))
        n_train = min(max(n_train, 1), len(indices) - 1)
        chosen = {indices[j] for j in order[:n_train]}
        train_idx.extend(i for i in indices if i in chosen)
        test_idx.extend(i for i in indices if i not in chosen)
    train = Corpus(
        samples=tuple(corpus.samples[i] for i in sorted(train_idx)),
        catalog=corpus.catalog,
    )
    test = Corpus(
        samples=tuple(corpus.samples[i] for i in sorted(test_idx)),
        catalog=corpus.catalog,
    )
    return train, test


# --- default catalog ----------------------------------------------------------

def _entry(cid: int, name: str, customized: bool, lwh_mm: tuple[int, int, int]) -> CatalogEntry:
    default = Size3(_m(lwh_mm[0]), _m(lwh_mm[1]), _m(lwh_mm[2]))
    if customized:
        rng = SizeRange(
            _m(lwh_mm[0] // 2), _m(lwh_mm[0] * 5 // 2),
            _m(lwh_mm[1] // 2), _m(lwh_mm[1] * 5 // 2),
            _m(lwh_mm[2] // 2), _m(lwh_mm[2] * 5 // 2),
        )
    else:
        rng = SizeRange.exact(default)
    return CatalogEntry(
        code=CategoryCode(id=cid, name=name, customized=customized),
        default_size=default,
        size_range=rng,
    )


# (length, width, height) in mm; lengths/widths even so growth shifts stay on
# the mm grid.
DEFAULT_CATALOG = Catalog(
    (
        _entry(0, "bed", True, (1300, 1400, 500)),
        _entry(1, "cabinet", True, (500, 1200, 2200)),
        _entry(2, "desk", True, (500, 900, 760)),
        _entry(3, "table", True, (800, 1100, 760)),
        _entry(4, "sofa", True, (800, 1600, 800)),
        _entry(5, "counter", True, (600, 1100, 900)),
        _entry(6, "platform", True, (1000, 1100, 400)),
        _entry(7, "vanity", True, (400, 700, 840)),
        _entry(8, "chair", False, (500, 500, 900)),
        _entry(9, "nightstand", False, (400, 400, 500)),
        _entry(10, "toilet", False, (700, 400, 760)),
        _entry(11, "shower", False, (900, 900, 2000)),
        _entry(12, "fridge", False, (700, 700, 1800)),
        _entry(13, "plant", False, (400, 400, 1200)),
        _entry(14, "tv_stand", False, (450, 1500, 500)),
        _entry(15, "shelf", False, (350, 900, 1900)),
        _entry(16, "bench", True, (400, 800, 450)),
    )
)


# --- fixture generator --------------------------------------------------------

_WALL_MM = 100

@dataclass(frozen=True)
class _RoomRecipe:
    width_mm: tuple[int, int]   # plan-view x extent range
    depth_mm: tuple[int, int]   # plan-view y extent range
    anchor: int                 # customized category targeted by variants
    extras: tuple[int, ...]     # placed in order as the room grows


# Room footprints are chosen so the seven types are separable from the
# rendered outline alone and the anchor can double either plan dimension in
# both directions without leaving the bounds (room extent >= 3x anchor
# extent on each axis).
_RECIPES: dict[RoomType, _RoomRecipe] = {
    RoomType.BALCONY: _RoomRecipe((2600, 3400), (1400, 1800), 16, (13, 8)),
    RoomType.BATHROOM: _RoomRecipe((2200, 2800), (2100, 2600), 7, (10, 11)),
    RoomType.STUDY: _RoomRecipe((2800, 3400), (2400, 3200), 2, (15, 8, 1, 13)),
    RoomType.KITCHEN: _RoomRecipe((3600, 4400), (2000, 2600), 5, (12, 15, 8)),
    RoomType.TATAMI: _RoomRecipe((3500, 4100), (3200, 4000), 6, (2, 1, 8)),
    RoomType.BEDROOM: _RoomRecipe((4200, 5000), (4200, 4800), 0, (1, 9, 2, 8, 13)),
    RoomType.LIVING_DINING: _RoomRecipe((5400, 6500), (4400, 5200), 4, (3, 14, 8, 13, 15)),
}

_FIXTURE_TYPE_ORDER = (
    RoomType.BEDROOM,
    RoomType.LIVING_DINING,
    RoomType.KITCHEN,
    RoomType.BATHROOM,
    RoomType.STUDY,
    RoomType.TATAMI,
    RoomType.BALCONY,
)


def rectangular_room(
    width_mm: int,
    depth_mm: int,
    room_type: RoomType,
    door_wall: str = "S",
    door_center_mm: int | None = None,
    window_wall: str = "E",
    window_center_mm: int | None = None,
    wall_mm: int = _WALL_MM,
) -> RoomScene:
    """A rectangular room whose wall ring tiles the inside of the bounds."""
    w, d, t = width_mm, depth_mm, wall_mm
    walls = (
        WallSegment(_m(t // 2), _m(t // 2), _m(w - t // 2), _m(t // 2), _m(t)),
        WallSegment(_m(w - t // 2), _m(t // 2), _m(w - t // 2), _m(d - t // 2), _m(t)),
        WallSegment(_m(w - t // 2), _m(d - t // 2), _m(t // 2), _m(d - t // 2), _m(t)),
        WallSegment(_m(t // 2), _m(d - t // 2), _m(t // 2), _m(t // 2), _m(t)),
    )

    def opening(wall: str, center: int, half_span: int) -> AABB:
        if wall in ("S", "N"):
            lo, hi = center - half_span, center + half_span
            y0, y1 = (0, t) if wall == "S" else (d - t, d)
            return AABB(_m(lo), _m(y0), _m(hi), _m(y1))
        lo, hi = center - half_span, center + half_span
        x0, x1 = (0, t) if wall == "W" else (w - t, w)
        return AABB(_m(x0), _m(lo), _m(x1), _m(hi))

    door_center = door_center_mm if door_center_mm is not None else (
        w // 2 if door_wall in ("S", "N") else d // 2
    )
    window_center = window_center_mm if window_center_mm is not None else (
        d // 2 if window_wall in ("E", "W") else w // 2
    )
    return RoomScene(
        room_type=room_type,
        bounds=AABB(0.0, 0.0, _m(w), _m(d)),
        walls=walls,
        doors=(opening(door_wall, door_center, 450),),
        windows=(opening(window_wall, window_center, 600),),
    )


def _instance(entry: CatalogEntry, cx_mm: int, cy_mm: int, orient: Orientation) -> FurnitureInstance:
    return FurnitureInstance(
        category=entry.code,
        position=Point2(_m(cx_mm), _m(cy_mm)),
        size=entry.default_size,
        orientation=orient,
        default_size=entry.default_size,
        size_range=entry.size_range,
        customized=entry.code.customized,
    )


def _extents_mm(entry: CatalogEntry, orient: Orientation) -> tuple[int, int]:
    """(x extent, y extent) of a default-size item, mm."""
    l_mm = _mm(entry.default_size.length)
    w_mm = _mm(entry.default_size.width)
    if orient in (Orientation.EAST, Orientation.WEST):
        return l_mm, w_mm
    return w_mm, l_mm


def make_fixture_corpus(n: int, seed: int, catalog: Catalog = DEFAULT_CATALOG) -> Corpus:
    """Generate `n` deterministic synthetic samples with all five variants.

    Rooms cycle through the seven types; furniture follows scene-dependent
    placement rules (anchor against the wall opposite the door, extras on a
    per-category wall slot) with small seeded jitter, so layouts are
    predictable from the rendered empty room. Every variant stays inside
    the room bounds by construction.
    """
    if n < 1:
        raise DatasetError(f"fixture corpus needs n >= 1, got {n}")
    rng = np.random.default_rng(seed)
    samples = []
    for i in range(n):
        room_type = _FIXTURE_TYPE_ORDER[i % len(_FIXTURE_TYPE_ORDER)]
        recipe = _RECIPES[room_type]
        w = int(rng.integers(recipe.width_mm[0] // 100, recipe.width_mm[1] // 100 + 1)) * 100
        d = int(rng.integers(recipe.depth_mm[0] // 100, recipe.depth_mm[1] // 100 + 1)) * 100

        door_wall = "S" if rng.integers(0, 2) == 0 else "N"
        window_wall = "E" if rng.integers(0, 2) == 0 else "W"
        door_center = int(rng.integers(800, w - 800 + 1)) // 10 * 10
        window_center = int(rng.integers(600, d - 600 + 1)) // 10 * 10
        scene = rectangular_room(
            w, d, room_type, door_wall, door_center, window_wall, window_center
        )

        furniture: list[FurnitureInstance] = []

        # Anchor: against the wall opposite the door, facing into the room,
        # pulled in just far enough that every growth direction stays inside
        # the bounds.
        anchor_entry = catalog.entry(recipe.anchor)
        aw = _mm(anchor_entry.default_size.width)
        al = _mm(anchor_entry.default_size.length)
        x_lo, x_hi = 3 * aw // 2, w - 3 * aw // 2
        cx = (w // 2 + int(rng.integers(-300, 301))) // 10 * 10
        cx = min(max(cx, x_lo), x_hi)
        if door_wall == "S":
            cy = d - 3 * al // 2 - int(rng.integers(0, 21)) * 10
            cy = max(cy, 3 * al // 2)
            orient = Orientation.SOUTH
        else:
            cy = 3 * al // 2 + int(rng.integers(0, 21)) * 10
            cy = min(cy, d - 3 * al // 2)
            orient = Orientation.NORTH
        anchor = _instance(anchor_entry, cx, cy, orient)
        furniture.append(anchor)

        # Extras: count grows with room area; each category owns a wall slot.
        area = w * d
        amin = recipe.width_mm[0] * recipe.depth_mm[0]
        amax = recipe.width_mm[1] * recipe.depth_mm[1]
        frac = (area - amin) / max(amax - amin, 1)
        k = 1 + min(len(recipe.extras) - 1, int(frac * len(recipe.extras) * 0.999))
        k = min(k, 5)
        anchor_wall = {"S": "N", "N": "S"}[door_wall]
        wall_cycle = ["E", "W", door_wall, anchor_wall]
        for j, cat_id in enumerate(recipe.extras[:k]):
            entry = catalog.entry(cat_id)
            wall = wall_cycle[j % 4]
            facing = {"N": Orientation.SOUTH, "S": Orientation.NORTH,
                      "E": Orientation.WEST, "W": Orientation.EAST}[wall]
            ex, ey = _extents_mm(entry, facing)
            along_frac = 0.2 + 0.6 * ((0.618 * (cat_id + 1)) % 1.0)
            jitter = int(rng.integers(-100, 101)) // 10 * 10
            if wall in ("S", "N"):
                px = int(along_frac * w) // 10 * 10 + jitter
                px = min(max(px, _WALL_MM + ex // 2), w - _WALL_MM - ex // 2)
                py = _WALL_MM + ey // 2 if wall == "S" else d - _WALL_MM - ey // 2
            else:
                py = int(along_frac * d) // 10 * 10 + jitter
                py = min(max(py, _WALL_MM + ey // 2), d - _WALL_MM - ey // 2)
                px = _WALL_MM + ex // 2 if wall == "W" else w - _WALL_MM - ex // 2
            furniture.append(_instance(entry, px, py, facing))

        base = quantize_layout_mm(Layout(scene=scene, furniture=tuple(furniture)))
        anchor = base.furniture[0]
        variants = []
        for code in SizeCode:
            grown = apply_size_code(anchor, code)
            result = quantize_layout_mm(
                Layout(scene=scene, furniture=(grown,) + base.furniture[1:])
            )
            variants.append(
                LayoutVariant(
                    base=base,
                    target_category=anchor.category,
                    size_code=code,
                    result=result,
                )
            )
        samples.append(Sample(id=f"{i:05d}", layout=base, variants=tuple(variants)))
    return Corpus(samples=tuple(samples), catalog=catalog)
