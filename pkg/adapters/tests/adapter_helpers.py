"""Scene builders shared by the adapter tests."""

from __future__ import annotations

import json
import string
from pathlib import Path

from PIL import Image, ImageDraw, ImageFont

_STRIP = string.punctuation + string.whitespace


def normalized_letter(text: str) -> str | None:
    """Strip-and-fold rule restated locally: one ASCII letter or nothing."""
    core = text.strip(_STRIP)
    if len(core) == 1 and core.isascii() and core.isalpha():
        return core.lower()
    return None


def draw_composite(path: Path, labels: tuple[str, ...], panel=90, gutter=20, margin=10):
    """Horizontal panel row, each panel tagged with a drawn (x) glyph label.

    Returns {label: glyph_block_center} for the drawn text blocks.
    """
    path.parent.mkdir(parents=True, exist_ok=True)
    font = ImageFont.load_default()
    count = len(labels)
    width = margin * 2 + count * panel + (count - 1) * gutter
    height = margin * 2 + panel
    img = Image.new("L", (width, height), 255)
    d = ImageDraw.Draw(img)
    centers = {}
    for i, label in enumerate(labels):
        x0 = margin + i * (panel + gutter)
        d.rectangle([x0, margin, x0 + panel - 1, margin + panel - 1], fill=185)
        text = f"({label})"
        origin = (x0 + 4, margin + 3)
        d.text(origin, text, font=font, fill=0)
        bbox = d.textbbox(origin, text, font=font)
        centers[label] = ((bbox[0] + bbox[2]) / 2, (bbox[1] + bbox[3]) / 2)
    img.save(path)
    return centers


def draw_singleton(path: Path, side=80, fill=140):
    path.parent.mkdir(parents=True, exist_ok=True)
    img = Image.new("L", (side, side), 255)
    ImageDraw.Draw(img).rectangle([6, 6, side - 7, side - 7], fill=fill)
    img.save(path)


def draw_blank(path: Path, side=64):
    path.parent.mkdir(parents=True, exist_ok=True)
    Image.new("L", (side, side), 255).save(path)


def write_records_manifest(path: Path, records: list[dict]) -> None:
    lines = []
    for rec in records:
        row = {"kind": "record"}
        row.update(rec)
        lines.append(json.dumps(row, ensure_ascii=False, separators=(",", ":")))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def sample_scene(root: Path, composites=4, singletons=5, blanks=1):
    """A small corpus with drawn glyph labels; returns (manifest_path, metadata).

    metadata maps figure_id -> dict(kind, labels, glyph_centers).
    """
    (root / "images").mkdir(parents=True, exist_ok=True)
    records = []
    metadata = {}
    index = 0
    label_cycle = [("a", "b"), ("a", "b", "c"), ("a", "b"), ("a", "b", "c", "d")]
    for i in range(composites):
        fid = f"fig{index:03d}"
        labels = label_cycle[i % len(label_cycle)]
        centers = draw_composite(root / f"images/{fid}.png", labels)
        caption = " ".join(f"({lab}) Panel {lab} view of the brain." for lab in labels)
        records.append({"figure_id": fid, "image_path": f"images/{fid}.png", "caption": caption})
        metadata[fid] = {"kind": "composite", "labels": labels, "glyph_centers": centers}
        index += 1
    for _ in range(singletons):
        fid = f"fig{index:03d}"
        draw_singleton(root / f"images/{fid}.png")
        records.append(
            {"figure_id": fid, "image_path": f"images/{fid}.png", "caption": "Single brain view."}
        )
        metadata[fid] = {"kind": "singleton", "labels": (), "glyph_centers": {}}
        index += 1
    for _ in range(blanks):
        fid = f"fig{index:03d}"
        draw_blank(root / f"images/{fid}.png")
        records.append(
            {"figure_id": fid, "image_path": f"images/{fid}.png", "caption": "Blank placeholder."}
        )
        metadata[fid] = {"kind": "blank", "labels": (), "glyph_centers": {}}
        index += 1
    manifest = root / "manifest.jsonl"
    write_records_manifest(manifest, records)
    return manifest, metadata


def adapter_config_dict(root: Path, manifest_name="manifest.jsonl") -> dict:
    return {
        "images_dir": ".",
        "manifest": manifest_name,
        "out_detections": "det.jsonl",
        "out_ocr": "ocr.jsonl",
        "out_image_emb": "img_emb.jsonl",
        "out_text_emb": "txt_emb.jsonl",
    }


def write_config(root: Path, overrides=None, name="config.json") -> Path:
    cfg = adapter_config_dict(root)
    if overrides:
        cfg.update(overrides)
    path = root / name
    path.write_text(json.dumps(cfg))
    return path
