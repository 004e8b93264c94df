"""OCR-label matching.

Binds subfigure regions to subcaption segments: OCR tokens are normalized
to single-letter label candidates, assigned to the region containing them,
and each region's candidate set is intersected with the caption's label
inventory. Exactly one common letter pairs the region with that segment;
zero or several fall back to the whole caption.
"""

from __future__ import annotations

import json
import string
from dataclasses import dataclass
from pathlib import Path

from .captions import SubcaptionSegment
from .corpus import (
    STATUS_FALLBACK,
    STATUS_SINGLETON,
    STATUS_UNIQUE_LABEL,
    AlignedPair,
    BoundingBox,
)
from .errors import EmptyRegions, MissingFile, MixedFigureIds, SchemaViolation
from .splitter import SubfigureRegion

_STRIP_CHARS = string.punctuation + string.whitespace


@dataclass(frozen=True)
class OcrToken:
    """One piece of recognized text inside a figure, in figure coordinates."""

    figure_id: str
    text: str
    box: BoundingBox
    confidence: float


@dataclass(frozen=True)
class RegionLabelSet:
    """A region together with the label letters OCR found inside it."""

    region: SubfigureRegion
    candidate_labels: frozenset[str]


def normalize_token(token: OcrToken, min_confidence: float) -> str | None:
    """Reduce a token to a lowercase label letter, or None.

    Tokens under min_confidence are rejected; surrounding punctuation,
    brackets, and whitespace are stripped; anything but a single Latin
    letter residue is rejected.
    """
    if token.confidence < min_confidence:
        return None
    residue = token.text.strip(_STRIP_CHARS)
    if len(residue) == 1 and residue.isalpha() and residue.isascii():
        return residue.lower()
    return None


def _sole_figure_id(regions: list[SubfigureRegion], tokens: list[OcrToken]) -> str | None:
    ids = {r.figure_id for r in regions} | {t.figure_id for t in tokens}
    if len(ids) > 1:
        raise MixedFigureIds(sorted(ids))
    return next(iter(ids)) if ids else None


def assign_tokens(
    regions: list[SubfigureRegion],
    tokens: list[OcrToken],
    min_confidence: float,
) -> list[RegionLabelSet]:
    """Build per-region candidate label sets from OCR tokens.

    A token goes to the region containing its box center; a center inside
    several regions goes to the nearest region center, ties to the lower
    order_index. Tokens outside all regions, or not normalizable to a
    letter, contribute nothing.
    """
    _sole_figure_id(regions, tokens)
    ordered = sorted(regions, key=lambda r: r.order_index)
    candidates: dict[int, set[str]] = {r.order_index: set() for r in ordered}
    for token in tokens:
        letter = normalize_token(token, min_confidence)
        if letter is None:
            continue
        cx, cy = token.box.center
        containing = [r for r in ordered if r.box.contains_point(cx, cy)]
        if not containing:
            continue
        if len(containing) == 1:
            target = containing[0]
        else:
            def center_dist_sq(region: SubfigureRegion) -> float:
                rx, ry = region.box.center
                return (rx - cx) ** 2 + (ry - cy) ** 2

            target = min(containing, key=lambda r: (center_dist_sq(r), r.order_index))
        candidates[target.order_index].add(letter)
    return [
        RegionLabelSet(region=r, candidate_labels=frozenset(candidates[r.order_index]))
        for r in ordered
    ]


def match_subfigures(
    label_sets: list[RegionLabelSet],
    segments: list[SubcaptionSegment],
    full_caption: str,
) -> list[AlignedPair]:
    """Pair every region with a subcaption or the whole caption.

    Intersecting a region's candidates with the caption's labels gives
    exactly one letter → that segment's text (unique_label); zero or more
    than one → the full caption (fallback_whole_caption). A lone region
    with no labeled segments at all is the whole figure (singleton).
    """
    if not label_sets:
        raise EmptyRegions()
    figure_ids = {ls.region.figure_id for ls in label_sets}
    if len(figure_ids) > 1:
        raise MixedFigureIds(sorted(figure_ids))
    figure_id = next(iter(figure_ids))
    by_label = {s.label: s for s in segments if s.label is not None}
    ordered = sorted(label_sets, key=lambda ls: ls.region.order_index)
    if len(ordered) == 1 and not by_label:
        return [
            AlignedPair(
                pair_id=f"{figure_id}#{ordered[0].region.order_index}",
                figure_id=figure_id,
                text=full_caption,
                status=STATUS_SINGLETON,
            )
        ]
    pairs: list[AlignedPair] = []
    for label_set in ordered:
        pair_id = f"{figure_id}#{label_set.region.order_index}"
        common = label_set.candidate_labels & by_label.keys()
        if len(common) == 1:
            letter = next(iter(common))
            pairs.append(
                AlignedPair(
                    pair_id=pair_id,
                    figure_id=figure_id,
                    text=by_label[letter].text,
                    status=STATUS_UNIQUE_LABEL,
                    region=label_set.region.box,
                    label=letter,
                )
            )
        else:
            pairs.append(
                AlignedPair(
                    pair_id=pair_id,
                    figure_id=figure_id,
                    text=full_caption,
                    status=STATUS_FALLBACK,
                    region=label_set.region.box,
                )
            )
    return pairs


_TOKEN_KEYS = frozenset({"text", "x", "y", "w", "h", "confidence"})
_LINE_KEYS = frozenset({"figure_id", "tokens"})


def _parse_tokens(figure_id: str, raw_tokens: object, line_no: int) -> list[OcrToken]:
    if not isinstance(raw_tokens, list):
        raise SchemaViolation(line_no, "tokens must be a list")
    tokens: list[OcrToken] = []
    for raw in raw_tokens:
        if not isinstance(raw, dict):
            raise SchemaViolation(line_no, "token must be a JSON object")
        if set(raw) != _TOKEN_KEYS:
            raise SchemaViolation(
                line_no, f"token must have exactly fields {sorted(_TOKEN_KEYS)}, got {sorted(raw)}"
            )
        text = raw["text"]
        if not isinstance(text, str) or not text:
            raise SchemaViolation(line_no, "token text must be a non-empty string")
        coords = []
        for key in ("x", "y", "w", "h"):
            value = raw[key]
            if isinstance(value, bool) or not isinstance(value, int):
                raise SchemaViolation(line_no, f"token {key} must be an integer")
            coords.append(value)
        confidence = raw["confidence"]
        if isinstance(confidence, bool) or not isinstance(confidence, (int, float)):
            raise SchemaViolation(line_no, "token confidence must be a number")
        if not 0.0 <= confidence <= 1.0:
            raise SchemaViolation(line_no, f"token confidence must be in [0,1], got {confidence}")
        try:
            box = BoundingBox(*coords)
        except ValueError as exc:
            raise SchemaViolation(line_no, str(exc)) from exc
        tokens.append(OcrToken(figure_id=figure_id, text=text, box=box, confidence=float(confidence)))
    return tokens


def _iter_ocr_lines(path: Path):
    """Yield (line_no, figure_id, raw_tokens); JSON breakage is unrecoverable."""
    for line_no, line in enumerate(path.read_text(encoding="utf-8").split("\n"), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise SchemaViolation(line_no, f"invalid JSON: {exc.msg}") from exc
        if not isinstance(obj, dict):
            raise SchemaViolation(line_no, "line must be a JSON object")
        figure_id = obj.get("figure_id")
        if not isinstance(figure_id, str) or not figure_id:
            raise SchemaViolation(line_no, "figure_id must be a non-empty string")
        yield line_no, figure_id, obj


def read_ocr_file(path: str | Path) -> dict[str, list[OcrToken]]:
    """Strict parse of OCR interchange JSONL, keyed by figure_id."""
    path = Path(path)
    if not path.is_file():
        raise MissingFile(path)
    out: dict[str, list[OcrToken]] = {}
    for line_no, figure_id, obj in _iter_ocr_lines(path):
        if set(obj) != _LINE_KEYS:
            raise SchemaViolation(
                line_no, f"OCR line must have exactly fields {sorted(_LINE_KEYS)}, got {sorted(obj)}"
            )
        if figure_id in out:
            raise SchemaViolation(line_no, f"figure_id {figure_id!r} appears twice")
        out[figure_id] = _parse_tokens(figure_id, obj["tokens"], line_no)
    return out


def read_ocr_file_tolerant(
    path: str | Path,
) -> tuple[dict[str, list[OcrToken]], dict[str, str]]:
    """Parse OCR JSONL, isolating per-figure breakage instead of raising.

    Lines whose figure_id is readable but whose content is malformed land
    in the second map (figure_id → reason) so callers can skip just those
    figures. Unattributable breakage (bad JSON) still raises.
    """
    path = Path(path)
    if not path.is_file():
        raise MissingFile(path)
    good: dict[str, list[OcrToken]] = {}
    corrupt: dict[str, str] = {}
    for line_no, figure_id, obj in _iter_ocr_lines(path):
        if figure_id in good or figure_id in corrupt:
            good.pop(figure_id, None)
            corrupt[figure_id] = f"line {line_no}: figure_id appears twice"
            continue
        try:
            if set(obj) != _LINE_KEYS:
                raise SchemaViolation(
                    line_no,
                    f"OCR line must have exactly fields {sorted(_LINE_KEYS)}, got {sorted(obj)}",
                )
            good[figure_id] = _parse_tokens(figure_id, obj["tokens"], line_no)
        except SchemaViolation as exc:
            corrupt[figure_id] = str(exc)
    return good, corrupt


__all__ = [
    "OcrToken",
    "RegionLabelSet",
    "assign_tokens",
    "match_subfigures",
    "normalize_token",
    "read_ocr_file",
    "read_ocr_file_tolerant",
]
