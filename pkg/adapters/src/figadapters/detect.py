"""Projection-profile subfigure detector ("projection-v1").

Splits on empty column bands, then empty row bands inside each column
block, and tightens every cell to its content. Scores are content
densities, so confident panels score high and speckle scores low.
Unreadable images degrade to a single full-image region.
"""

from __future__ import annotations

import logging
from pathlib import Path

import numpy as np
from PIL import Image

from figadapters.config import DETECTOR_MODEL, AdapterConfig
from figadapters.errors import ModelUnavailable
from figadapters.manifest_io import detection_row, read_manifest, write_jsonl

log = logging.getLogger(__name__)

_WHITE_THRESHOLD = 245
_MIN_GAP = 4
_MIN_PANEL = 8


def _blank_gaps(profile: np.ndarray) -> list[tuple[int, int]]:
    """Intervals of consecutive zero entries, as half-open (start, stop)."""
    gaps = []
    start = None
    for i, value in enumerate(profile):
        if value == 0:
            if start is None:
                start = i
        elif start is not None:
            gaps.append((start, i))
            start = None
    if start is not None:
        gaps.append((start, len(profile)))
    return gaps


def _split_axis(profile: np.ndarray) -> list[tuple[int, int]]:
    """Content intervals after removing blank gaps of at least _MIN_GAP."""
    cuts = [g for g in _blank_gaps(profile) if g[1] - g[0] >= _MIN_GAP or g[0] == 0 or g[1] == len(profile)]
    intervals = []
    pos = 0
    for start, stop in cuts:
        if start > pos:
            intervals.append((pos, start))
        pos = stop
    if pos < len(profile):
        intervals.append((pos, len(profile)))
    return [iv for iv in intervals if profile[iv[0] : iv[1]].any()]


def detect_regions(pixels: np.ndarray) -> list[dict]:
    """Column bands, then row bands per column, tightened to content."""
    content = pixels < _WHITE_THRESHOLD
    if not content.any():
        return []
    regions = []
    col_profile = content.sum(axis=0)
    for x0, x1 in _split_axis(col_profile):
        band = content[:, x0:x1]
        row_profile = band.sum(axis=1)
        for y0, y1 in _split_axis(row_profile):
            cell = band[y0:y1, :]
            ys, xs = np.nonzero(cell)
            left, right = x0 + xs.min(), x0 + xs.max() + 1
            top, bottom = y0 + ys.min(), y0 + ys.max() + 1
            w, h = right - left, bottom - top
            if w < _MIN_PANEL or h < _MIN_PANEL:
                continue
            density = float(cell.sum()) / float(w * h)
            regions.append(
                {
                    "x": int(left),
                    "y": int(top),
                    "w": int(w),
                    "h": int(h),
                    "score": round(min(max(density, 0.0), 1.0), 4),
                }
            )
    regions.sort(key=lambda r: (r["y"], r["x"]))
    return regions


def run_detector(config: AdapterConfig) -> Path:
    """Write one detections line per manifest record."""
    if config.detector_model != DETECTOR_MODEL:
        raise ModelUnavailable(config.detector_model)
    records, _ = read_manifest(config.manifest)
    rows = []
    for record in records:
        image_path = config.images_dir / record.image_path
        width, height = 1, 1
        regions: list[dict] | None = None
        try:
            with Image.open(image_path) as img:
                width, height = img.size
                pixels = np.asarray(img.convert("L"))
            regions = detect_regions(pixels)
        except (OSError, ValueError) as exc:
            log.warning("detect: cannot read %s (%s); using full-image fallback", image_path, exc)
        if not regions:
            # fallback rule: a single full-image region, maximum confidence
            regions = [{"x": 0, "y": 0, "w": width, "h": height, "score": 1.0}]
        rows.append(detection_row(record.figure_id, width, height, regions))
    write_jsonl(config.out_detections, rows)
    return config.out_detections
