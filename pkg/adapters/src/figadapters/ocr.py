"""Template-matching OCR backend ("template-v1").

Finds dark connected components of glyph-like size and classifies each one
against bitmaps rendered from Pillow's built-in font. Deliberately simple:
the point is a deterministic, dependency-light backend that emits the OCR
interchange format, not competitive recognition.
"""

from __future__ import annotations

import logging
import string
from functools import lru_cache
from pathlib import Path

import numpy as np
from PIL import Image, ImageDraw, ImageFont
from scipy import ndimage

from figadapters.config import OCR_MODEL, AdapterConfig
from figadapters.errors import ModelUnavailable
from figadapters.manifest_io import ocr_row, read_manifest, write_jsonl

log = logging.getLogger(__name__)

_INK_THRESHOLD = 128
_TEMPLATE_SIZE = 16
_MIN_GLYPH_AREA = 4
_MAX_GLYPH_SIDE = 48
_CHARSET = string.ascii_lowercase + string.ascii_uppercase + string.digits + "()+*"


@lru_cache(maxsize=1)
def glyph_templates() -> dict[str, np.ndarray]:
    """16x16 boolean bitmaps for every recognizable character."""
    font = ImageFont.load_default()
    templates: dict[str, np.ndarray] = {}
    for char in _CHARSET:
        canvas = Image.new("L", (32, 32), 255)
        ImageDraw.Draw(canvas).text((4, 4), char, font=font, fill=0)
        pixels = np.asarray(canvas)
        ink = pixels < _INK_THRESHOLD
        if not ink.any():
            continue
        ys, xs = np.nonzero(ink)
        crop = ink[ys.min() : ys.max() + 1, xs.min() : xs.max() + 1]
        templates[char] = _resize_bool(crop)
    return templates


def _resize_bool(mask: np.ndarray) -> np.ndarray:
    img = Image.fromarray((mask * 255).astype(np.uint8), mode="L")
    resized = img.resize((_TEMPLATE_SIZE, _TEMPLATE_SIZE), Image.NEAREST)
    return np.asarray(resized) > 127


def classify_glyph(mask: np.ndarray) -> tuple[str, float]:
    """Best-matching character and its pixel agreement score in [0, 1]."""
    normalized = _resize_bool(mask)
    best_char, best_score = "?", 0.0
    for char, template in glyph_templates().items():
        score = float(np.mean(normalized == template))
        if score > best_score:
            best_char, best_score = char, score
    return best_char, best_score


def find_glyph_boxes(pixels: np.ndarray) -> list[tuple[int, int, int, int]]:
    """Connected dark components of plausible glyph size, reading order."""
    ink = pixels < _INK_THRESHOLD
    labeled, count = ndimage.label(ink, structure=np.ones((3, 3), dtype=int))
    boxes = []
    for sl in ndimage.find_objects(labeled):
        if sl is None:
            continue
        h = sl[0].stop - sl[0].start
        w = sl[1].stop - sl[1].start
        if h > _MAX_GLYPH_SIDE or w > _MAX_GLYPH_SIDE:
            continue
        if h * w < _MIN_GLYPH_AREA:
            continue
        boxes.append((sl[1].start, sl[0].start, w, h))
    boxes.sort(key=lambda b: (b[1], b[0]))
    return boxes


def tokens_for_image(pixels: np.ndarray) -> list[dict]:
    tokens = []
    for x, y, w, h in find_glyph_boxes(pixels):
        mask = pixels[y : y + h, x : x + w] < _INK_THRESHOLD
        char, score = classify_glyph(mask)
        tokens.append(
            {
                "text": char,
                "x": x,
                "y": y,
                "w": w,
                "h": h,
                "confidence": round(min(max(score, 0.0), 1.0), 4),
            }
        )
    return tokens


def run_ocr(config: AdapterConfig) -> Path:
    """Write one OCR line per manifest record; unreadable images yield []."""
    if config.ocr_model != OCR_MODEL:
        raise ModelUnavailable(config.ocr_model)
    records, _ = read_manifest(config.manifest)
    rows = []
    for record in records:
        image_path = config.images_dir / record.image_path
        try:
            with Image.open(image_path) as img:
                pixels = np.asarray(img.convert("L"))
        except (OSError, ValueError) as exc:
            log.warning("ocr: cannot read %s (%s); emitting no tokens", image_path, exc)
            rows.append(ocr_row(record.figure_id, []))
            continue
        rows.append(ocr_row(record.figure_id, tokens_for_image(pixels)))
    write_jsonl(config.out_ocr, rows)
    return config.out_ocr
