"""Deterministic synthetic corpora.

Builds grid-layout figure images with known panel geometry, captions whose
label markers and phrases are known, and OCR token files with controlled
noise (clean, missing, wrong-letter, ambiguous). Everything derives from
one seeded RNG, so a given seed always produces the same corpus, and every
generated fact is returned as ground truth for independent verification.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

from .corpus import BoundingBox, CorpusManifest, FigureRecord, save_manifest

# share of compound panels per OCR outcome; cumulative rolls
_P_CLEAN = 0.75
_P_MISSING = 0.85
_P_WRONG = 0.92

_GRID_SHAPES = ((1, 2), (2, 1), (1, 3), (3, 1), (2, 2))
_VIEWS = ("Axial", "Coronal", "Sagittal", "Oblique")
_MODALITIES = ("T1", "T2", "FLAIR", "CT", "DWI", "MRA")
_TARGETS = ("brain", "brainstem", "left brain hemisphere", "brain after contrast")
_JOURNALS = ("J Neuroimaging", "Brain Res", "Radiol Case Rep")
_CLEAN_TOKEN_FORMS = ("({letter})", "{letter})", "{letter}.", "{letter}", "{upper}")
_WRONG_LETTERS = "wxyz"


def make_grid_image(
    rng: random.Random,
    rows: int,
    cols: int,
    panel_w: int,
    panel_h: int,
    gutter: int,
    margin: int,
) -> tuple[np.ndarray, list[BoundingBox]]:
    """White canvas with a rows×cols grid of solid gray panels.

    Returns the pixel array and the exact panel boxes in row-major order.
    """
    width = 2 * margin + cols * panel_w + (cols - 1) * gutter
    height = 2 * margin + rows * panel_h + (rows - 1) * gutter
    pixels = np.full((height, width), 255, dtype=np.uint8)
    boxes: list[BoundingBox] = []
    for row in range(rows):
        for col in range(cols):
            x = margin + col * (panel_w + gutter)
            y = margin + row * (panel_h + gutter)
            pixels[y : y + panel_h, x : x + panel_w] = rng.randint(30, 180)
            boxes.append(BoundingBox(x, y, panel_w, panel_h))
    return pixels, boxes


@dataclass(frozen=True)
class PanelTruth:
    """Ground truth for one panel: geometry, caption letter, OCR outcome."""

    box: BoundingBox
    letter: str | None
    phrase: str | None
    ocr_case: str
    token_letters: tuple[str, ...]


@dataclass(frozen=True)
class FigureTruth:
    figure_id: str
    caption: str
    compound: bool
    caption_letters: tuple[str, ...]
    panels: tuple[PanelTruth, ...]


@dataclass
class CorpusTruth:
    """Paths of a generated corpus plus everything known about it."""

    out_dir: Path
    manifest_path: Path
    ocr_path: Path
    images_dir: Path
    figures: list[FigureTruth]


def _phrase(rng: random.Random) -> str:
    view = rng.choice(_VIEWS)
    modality = rng.choice(_MODALITIES)
    target = rng.choice(_TARGETS)
    return f"{view} {modality} image of the {target}."


def _token(text: str, x: int, y: int, w: int, h: int, confidence: float) -> dict:
    return {"text": text, "x": x, "y": y, "w": w, "h": h, "confidence": confidence}


def _confidence(rng: random.Random) -> float:
    return round(0.85 + rng.random() * 0.14, 3)


def _panel_tokens(
    rng: random.Random,
    box: BoundingBox,
    letter: str,
    inventory: tuple[str, ...],
) -> tuple[str, tuple[str, ...], list[dict]]:
    """Roll one panel's OCR outcome; returns (case, effective letters, tokens)."""
    roll = rng.random()
    x, y = box.x + 4, box.y + 4
    if roll < _P_CLEAN:
        form = rng.choice(_CLEAN_TOKEN_FORMS)
        text = form.format(letter=letter, upper=letter.upper())
        return "clean", (letter,), [_token(text, x, y, 10, 12, _confidence(rng))]
    if roll < _P_MISSING:
        return "missing", (), []
    if roll < _P_WRONG:
        wrong = rng.choice(_WRONG_LETTERS)
        return "wrong", (wrong,), [_token(wrong, x, y, 10, 12, _confidence(rng))]
    other = next(cand for cand in inventory if cand != letter)
    tokens = [
        _token(letter, x, y, 10, 12, _confidence(rng)),
        _token(other, x, y + 16, 10, 12, _confidence(rng)),
    ]
    return "ambiguous", (letter, other), tokens


def _junk_tokens(rng: random.Random, box: BoundingBox) -> list[dict]:
    """Noise that matching must ignore: multi-letter text, low confidence."""
    tokens: list[dict] = []
    cx = box.x + box.w // 2 - 6
    cy = box.y + box.h // 2 - 5
    if rng.random() < 0.3:
        tokens.append(_token("MRI", cx, cy, 12, 10, _confidence(rng)))
    if rng.random() < 0.2:
        tokens.append(_token(rng.choice("abcd"), cx, cy + 1, 8, 8, 0.2))
    return tokens


def make_corpus(
    out_dir: str | Path,
    n_records: int = 200,
    n_compound: int = 86,
    seed: int = 20240211,
    keyword: str = "brain",
) -> CorpusTruth:
    """Write images/, manifest.jsonl (records only), and ocr.jsonl.

    Every caption contains the keyword. Compound figures are grids of 2 to
    4 solid panels with generous white gutters, so the built-in splitter
    recovers the panel boxes exactly; their captions carry one marker per
    panel. OCR outcomes per panel follow fixed probabilities (see module
    constants) and are reported in the returned ground truth.
    """
    if not 0 <= n_compound <= n_records:
        raise ValueError(f"n_compound must be in 0..{n_records}, got {n_compound}")
    out_dir = Path(out_dir)
    images_dir = out_dir / "images"
    images_dir.mkdir(parents=True, exist_ok=True)
    rng = random.Random(seed)
    compound_ids = set(rng.sample(range(n_records), n_compound))
    figures: list[FigureTruth] = []
    records: list[FigureRecord] = []
    ocr_lines: list[str] = []
    for index in range(n_records):
        figure_id = f"fig{index:04d}"
        image_rel = f"images/{figure_id}.png"
        journal = rng.choice((*_JOURNALS, None))
        year = rng.choice((None, rng.randint(1995, 2018)))
        article_type = rng.choice(("case report", None))
        if index in compound_ids:
            rows, cols = rng.choice(_GRID_SHAPES)
            panel_w = rng.randint(40, 80)
            panel_h = rng.randint(40, 80)
            gutter = rng.randint(8, 16)
            margin = rng.randint(4, 10)
            pixels, boxes = make_grid_image(rng, rows, cols, panel_w, panel_h, gutter, margin)
            inventory = tuple(chr(ord("a") + i) for i in range(len(boxes)))
            phrases = [_phrase(rng) for _ in boxes]
            caption = " ".join(
                f"({letter}) {phrase}" for letter, phrase in zip(inventory, phrases)
            )
            panels: list[PanelTruth] = []
            tokens: list[dict] = []
            for box, letter, phrase in zip(boxes, inventory, phrases):
                case, letters, panel_tokens = _panel_tokens(rng, box, letter, inventory)
                tokens.extend(panel_tokens)
                tokens.extend(_junk_tokens(rng, box))
                panels.append(
                    PanelTruth(
                        box=box, letter=letter, phrase=phrase, ocr_case=case, token_letters=letters
                    )
                )
            if cols >= 2 and rng.random() < 0.25:
                # a token stranded in the gutter, outside every panel
                first = boxes[0]
                tokens.append(
                    _token("+", first.x + panel_w + 1, first.y + 4, max(2, gutter - 2), 8, 0.9)
                )
            ocr_lines.append(
                json.dumps(
                    {"figure_id": figure_id, "tokens": tokens},
                    ensure_ascii=False,
                    separators=(",", ":"),
                )
            )
            figures.append(
                FigureTruth(
                    figure_id=figure_id,
                    caption=caption,
                    compound=True,
                    caption_letters=inventory,
                    panels=tuple(panels),
                )
            )
        else:
            side_w = rng.randint(60, 120)
            side_h = rng.randint(60, 120)
            margin = rng.randint(4, 10)
            pixels, boxes = make_grid_image(rng, 1, 1, side_w, side_h, 8, margin)
            view = rng.choice(_VIEWS)
            modality = rng.choice(_MODALITIES)
            target = rng.choice(_TARGETS)
            caption = f"{view} {modality} scan of the {target}."
            figures.append(
                FigureTruth(
                    figure_id=figure_id,
                    caption=caption,
                    compound=False,
                    caption_letters=(),
                    panels=(
                        PanelTruth(
                            box=boxes[0], letter=None, phrase=None, ocr_case="none", token_letters=()
                        ),
                    ),
                )
            )
        Image.fromarray(pixels, mode="L").save(images_dir / f"{figure_id}.png")
        records.append(
            FigureRecord(
                figure_id=figure_id,
                image_path=image_rel,
                caption=caption,
                journal=journal,
                year=year,
                article_type=article_type,
            )
        )
    manifest_path = out_dir / "manifest.jsonl"
    save_manifest(CorpusManifest.build(records, []), manifest_path)
    ocr_path = out_dir / "ocr.jsonl"
    ocr_path.write_text("".join(line + "\n" for line in ocr_lines), encoding="utf-8")
    assert all(keyword in f.caption for f in figures)
    return CorpusTruth(
        out_dir=out_dir,
        manifest_path=manifest_path,
        ocr_path=ocr_path,
        images_dir=out_dir,
        figures=figures,
    )


__all__ = [
    "CorpusTruth",
    "FigureTruth",
    "PanelTruth",
    "make_corpus",
    "make_grid_image",
]
