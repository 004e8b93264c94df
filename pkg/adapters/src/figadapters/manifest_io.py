"""Readers and writers for the pipeline interchange formats.

The downstream pipeline documents four JSONL shapes: corpus manifests
(record and pair lines), detections, OCR tokens, and embeddings. This
module speaks those formats directly so the adapters depend on the
documented files, not on the pipeline's internals.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

from figadapters.errors import FormatError


@dataclass(frozen=True)
class RecordRow:
    figure_id: str
    image_path: str
    caption: str


@dataclass(frozen=True)
class PairRow:
    pair_id: str
    figure_id: str
    bbox: tuple[int, int, int, int] | None
    text: str


def _iter_lines(path: Path):
    text = path.read_text(encoding="utf-8")
    for line_no, line in enumerate(text.split("\n"), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise FormatError(line_no, f"invalid JSON: {exc.msg}") from exc
        if not isinstance(obj, dict):
            raise FormatError(line_no, "line must be a JSON object")
        yield line_no, obj


def read_manifest(path: str | Path) -> tuple[list[RecordRow], list[PairRow]]:
    """Pull the fields the adapters need out of a corpus manifest."""
    records: list[RecordRow] = []
    pairs: list[PairRow] = []
    for line_no, obj in _iter_lines(Path(path)):
        kind = obj.get("kind")
        if kind == "record":
            for key in ("figure_id", "image_path", "caption"):
                if not isinstance(obj.get(key), str):
                    raise FormatError(line_no, f"record needs a string {key!r}")
            records.append(RecordRow(obj["figure_id"], obj["image_path"], obj["caption"]))
        elif kind == "pair":
            for key in ("pair_id", "figure_id", "text"):
                if not isinstance(obj.get(key), str):
                    raise FormatError(line_no, f"pair needs a string {key!r}")
            bbox = obj.get("bbox")
            if bbox is not None:
                if not (isinstance(bbox, list) and len(bbox) == 4):
                    raise FormatError(line_no, "pair bbox must be [x, y, w, h]")
                bbox = tuple(int(v) for v in bbox)
            pairs.append(PairRow(obj["pair_id"], obj["figure_id"], bbox, obj["text"]))
        else:
            raise FormatError(line_no, f"unknown line kind {kind!r}")
    return records, pairs


def write_jsonl(path: str | Path, rows: Iterable[dict]) -> None:
    """One compact JSON object per line, newline-terminated, atomic-ish."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    body = "".join(
        json.dumps(row, ensure_ascii=False, separators=(",", ":")) + "\n" for row in rows
    )
    path.write_text(body, encoding="utf-8")


def detection_row(figure_id: str, width: int, height: int, regions: list[dict]) -> dict:
    return {
        "figure_id": figure_id,
        "image_width": width,
        "image_height": height,
        "regions": regions,
    }


def ocr_row(figure_id: str, tokens: list[dict]) -> dict:
    return {"figure_id": figure_id, "tokens": tokens}


def embedding_row(vector_id: str, vector: list[float]) -> dict:
    return {"id": vector_id, "vector": vector}
