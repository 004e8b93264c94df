"""Subfigure region extraction.

Two sources produce regions: ingestion of an external detector's JSONL
output (the production path) and a built-in deterministic whitespace-gutter
splitter that recursively cuts a figure along all-white rows or columns
(the desk-scale stand-in). Both yield SubfigureRegion lists in row-major
reading order.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

from .corpus import BoundingBox
from .errors import (
    IoFailure,
    MissingFile,
    MixedFigureIds,
    OutOfBounds,
    SchemaViolation,
    UnknownFigure,
)

log = logging.getLogger(__name__)

# IoU above which overlapping ingested boxes are suppressed (higher score wins)
_NMS_IOU = 0.2


@dataclass(frozen=True)
class SplitterParams:
    """Knobs of the whitespace-gutter splitter."""

    white_threshold: int = 245
    min_gutter_px: int = 6
    min_panel_px: int = 32
    max_recursion_depth: int = 6

    def __post_init__(self) -> None:
        if not 0 < self.white_threshold <= 255:
            raise ValueError(f"white_threshold must be in 1..255, got {self.white_threshold}")
        if self.min_gutter_px < 1 or self.min_panel_px < 1:
            raise ValueError("min_gutter_px and min_panel_px must be positive")
        if self.max_recursion_depth < 0:
            raise ValueError("max_recursion_depth must be non-negative")


@dataclass(eq=False)
class GrayImage:
    """Row-major luminance raster, values 0..255."""

    pixels: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.pixels, dtype=np.uint8)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError(f"pixels must be a non-empty 2-D array, got shape {arr.shape}")
        self.pixels = arr

    @property
    def width(self) -> int:
        return int(self.pixels.shape[1])

    @property
    def height(self) -> int:
        return int(self.pixels.shape[0])

    @classmethod
    def from_file(cls, path: str | Path) -> "GrayImage":
        path = Path(path)
        if not path.is_file():
            raise MissingFile(path)
        try:
            with Image.open(path) as img:
                return cls(np.asarray(img.convert("L"), dtype=np.uint8))
        except MissingFile:
            raise
        except Exception as exc:
            raise IoFailure(path, f"cannot decode image: {exc}") from exc


@dataclass(frozen=True)
class SubfigureRegion:
    """One detected or split panel, in reading order within its figure."""

    figure_id: str
    box: BoundingBox
    score: float
    order_index: int


def _content_bbox(white: np.ndarray) -> tuple[int, int, int, int] | None:
    """Tight (y0, y1, x0, x1) window around non-white pixels, or None."""
    content_rows = np.flatnonzero(~white.all(axis=1))
    content_cols = np.flatnonzero(~white.all(axis=0))
    if content_rows.size == 0 or content_cols.size == 0:
        return None
    return (
        int(content_rows[0]),
        int(content_rows[-1]) + 1,
        int(content_cols[0]),
        int(content_cols[-1]) + 1,
    )


def _white_runs(mask: np.ndarray, min_len: int) -> list[tuple[int, int]]:
    """Maximal runs of True in a 1-D mask with length ≥ min_len, as (start, len)."""
    runs: list[tuple[int, int]] = []
    start = None
    for idx, flag in enumerate(mask):
        if flag and start is None:
            start = idx
        elif not flag and start is not None:
            if idx - start >= min_len:
                runs.append((start, idx - start))
            start = None
    if start is not None and mask.shape[0] - start >= min_len:
        runs.append((start, mask.shape[0] - start))
    return runs


def _split_window(
    white: np.ndarray,
    y0: int,
    y1: int,
    x0: int,
    x1: int,
    depth: int,
    params: SplitterParams,
    out: list[tuple[int, int, int, int]],
) -> None:
    window = white[y0:y1, x0:x1]
    tight = _content_bbox(window)
    if tight is None:
        return
    ty0, ty1, tx0, tx1 = (tight[0] + y0, tight[1] + y0, tight[2] + x0, tight[3] + x0)
    w, h = tx1 - tx0, ty1 - ty0
    if depth >= params.max_recursion_depth or w < params.min_panel_px or h < params.min_panel_px:
        out.append((ty0, ty1, tx0, tx1))
        return
    tight_window = white[ty0:ty1, tx0:tx1]
    # candidate gutters: (negative length, 0 vertical / 1 horizontal, start)
    candidates = [
        (-length, 0, start)
        for start, length in _white_runs(tight_window.all(axis=0), params.min_gutter_px)
    ]
    candidates.extend(
        (-length, 1, start)
        for start, length in _white_runs(tight_window.all(axis=1), params.min_gutter_px)
    )
    if not candidates:
        out.append((ty0, ty1, tx0, tx1))
        return
    neg_len, axis, start = min(candidates)
    cut = start + (-neg_len) // 2
    if axis == 0:
        cut += tx0
        _split_window(white, ty0, ty1, tx0, cut, depth + 1, params, out)
        _split_window(white, ty0, ty1, cut, tx1, depth + 1, params, out)
    else:
        cut += ty0
        _split_window(white, ty0, cut, tx0, tx1, depth + 1, params, out)
        _split_window(white, cut, ty1, tx0, tx1, depth + 1, params, out)


def split_compound(
    image: GrayImage, params: SplitterParams | None = None, figure_id: str = ""
) -> list[SubfigureRegion]:
    """Cut a figure into panels along whitespace gutters.

    Recursively binarizes at params.white_threshold, cuts at the midpoint
    of the longest all-white full-width or full-height run (ties: vertical
    first, then smaller coordinate), and tightens leaves to their content.
    An all-white image yields one full-image region rather than an error.
    Scores are always 1.0.
    """
    params = params or SplitterParams()
    white = image.pixels >= params.white_threshold
    windows: list[tuple[int, int, int, int]] = []
    _split_window(white, 0, image.height, 0, image.width, 0, params, windows)
    if not windows:
        boxes = [BoundingBox(0, 0, image.width, image.height)]
    else:
        boxes = [BoundingBox(x0, y0, x1 - x0, y1 - y0) for y0, y1, x0, x1 in windows]
    boxes.sort(key=lambda b: (b.y, b.x, b.w, b.h))
    return [
        SubfigureRegion(figure_id=figure_id, box=box, score=1.0, order_index=idx)
        for idx, box in enumerate(boxes)
    ]


def _require_key_set(obj: dict, keys: frozenset[str], line_no: int, what: str) -> None:
    if set(obj) != keys:
        raise SchemaViolation(
            line_no, f"{what} must have exactly fields {sorted(keys)}, got {sorted(obj)}"
        )


def _as_int(value: object, what: str, line_no: int) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise SchemaViolation(line_no, f"{what} must be an integer")
    return value


_LINE_KEYS = frozenset({"figure_id", "image_width", "image_height", "regions"})
_REGION_KEYS = frozenset({"x", "y", "w", "h", "score"})


@dataclass(frozen=True)
class DetectionEntry:
    """One figure's raw detector output plus its image dimensions."""

    figure_id: str
    width: int
    height: int
    boxes: tuple[tuple[BoundingBox, float], ...]
    line_no: int


def read_detections_file(path: str | Path) -> dict[str, DetectionEntry]:
    """Strict parse of detector interchange JSONL, keyed by figure_id."""
    path = Path(path)
    if not path.is_file():
        raise MissingFile(path)
    entries: dict[str, DetectionEntry] = {}
    for line_no, line in enumerate(path.read_text(encoding="utf-8").split("\n"), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise SchemaViolation(line_no, f"invalid JSON: {exc.msg}") from exc
        if not isinstance(obj, dict):
            raise SchemaViolation(line_no, "line must be a JSON object")
        _require_key_set(obj, _LINE_KEYS, line_no, "detections line")
        figure_id = obj["figure_id"]
        if not isinstance(figure_id, str) or not figure_id:
            raise SchemaViolation(line_no, "figure_id must be a non-empty string")
        if figure_id in entries:
            raise SchemaViolation(line_no, f"figure_id {figure_id!r} appears twice")
        width = _as_int(obj["image_width"], "image_width", line_no)
        height = _as_int(obj["image_height"], "image_height", line_no)
        if width < 1 or height < 1:
            raise SchemaViolation(line_no, "image dimensions must be positive")
        if not isinstance(obj["regions"], list):
            raise SchemaViolation(line_no, "regions must be a list")
        boxes: list[tuple[BoundingBox, float]] = []
        for region in obj["regions"]:
            if not isinstance(region, dict):
                raise SchemaViolation(line_no, "region must be a JSON object")
            _require_key_set(region, _REGION_KEYS, line_no, "region")
            score = region["score"]
            if isinstance(score, bool) or not isinstance(score, (int, float)):
                raise SchemaViolation(line_no, "score must be a number")
            if not 0.0 <= score <= 1.0:
                raise SchemaViolation(line_no, f"score must be in [0,1], got {score}")
            try:
                box = BoundingBox(*(_as_int(region[k], k, line_no) for k in ("x", "y", "w", "h")))
            except ValueError as exc:
                raise SchemaViolation(line_no, str(exc)) from exc
            boxes.append((box, float(score)))
        entries[figure_id] = DetectionEntry(figure_id, width, height, tuple(boxes), line_no)
    return entries


def regions_from_entry(entry: DetectionEntry, min_score: float) -> list[SubfigureRegion]:
    """Score-filter, bounds-check, and deduplicate one figure's detections.

    Boxes under min_score are dropped before bounds checking. Survivors
    overlapping a higher-score survivor at IoU > 0.2 are suppressed with a
    warning. Remaining boxes get row-major order_index values.
    """
    survivors: list[tuple[BoundingBox, float]] = []
    for box, score in entry.boxes:
        if score < min_score:
            continue
        if box.x + box.w > entry.width or box.y + box.h > entry.height:
            raise OutOfBounds(entry.figure_id, box)
        survivors.append((box, score))
    survivors.sort(key=lambda bs: (-bs[1], bs[0].y, bs[0].x, bs[0].w, bs[0].h))
    kept: list[tuple[BoundingBox, float]] = []
    for box, score in survivors:
        if any(box.iou(other) > _NMS_IOU for other, _ in kept):
            log.warning(
                "figure %s: suppressed box %s overlapping a higher-score box",
                entry.figure_id,
                box,
            )
            continue
        kept.append((box, score))
    kept.sort(key=lambda bs: (bs[0].y, bs[0].x, bs[0].w, bs[0].h))
    return [
        SubfigureRegion(figure_id=entry.figure_id, box=box, score=score, order_index=idx)
        for idx, (box, score) in enumerate(kept)
    ]


def ingest_detections(
    detections_file: str | Path,
    image_dims: dict[str, tuple[int, int]],
    min_score: float,
) -> list[SubfigureRegion]:
    """Load detector output for figures with known dimensions.

    Every figure in the file must appear in image_dims with matching
    dimensions. Out-of-bounds boxes are errors, never clipped.
    """
    entries = read_detections_file(detections_file)
    regions: list[SubfigureRegion] = []
    for figure_id in sorted(entries):
        entry = entries[figure_id]
        if figure_id not in image_dims:
            raise UnknownFigure(figure_id)
        if image_dims[figure_id] != (entry.width, entry.height):
            raise SchemaViolation(
                entry.line_no,
                f"figure {figure_id!r}: line dimensions {(entry.width, entry.height)} "
                f"disagree with known dimensions {image_dims[figure_id]}",
            )
        regions.extend(regions_from_entry(entry, min_score))
    return regions


def is_compound(regions: list[SubfigureRegion]) -> bool:
    """True iff the regions (all of one figure) number two or more."""
    figure_ids = {region.figure_id for region in regions}
    if len(figure_ids) > 1:
        raise MixedFigureIds(sorted(figure_ids))
    return len(regions) >= 2


__all__ = [
    "DetectionEntry",
    "GrayImage",
    "SplitterParams",
    "SubfigureRegion",
    "ingest_detections",
    "is_compound",
    "read_detections_file",
    "regions_from_entry",
    "split_compound",
]
