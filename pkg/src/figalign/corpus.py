"""Domain types and canonical JSONL manifest IO.

A manifest is a UTF-8 JSON Lines file where every line is either a figure
record or an aligned pair, discriminated by a "kind" field. Serialization
is canonical: records sorted by figure_id, pairs sorted by
(figure_id, region-absent-first, x, y, pair_id), fixed key order, compact
separators, one object per line. Equal manifests always serialize to
byte-identical files.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import (
    DanglingReference,
    DuplicateId,
    IoFailure,
    MalformedLine,
    MissingFile,
)

STATUS_UNIQUE_LABEL = "unique_label"
STATUS_FALLBACK = "fallback_whole_caption"
STATUS_SINGLETON = "singleton"
VALID_STATUSES = frozenset({STATUS_UNIQUE_LABEL, STATUS_FALLBACK, STATUS_SINGLETON})

_RECORD_KEYS = ("figure_id", "image_path", "caption", "journal", "year", "article_type")
_RECORD_REQUIRED = frozenset({"figure_id", "image_path", "caption"})
_PAIR_KEYS = ("pair_id", "figure_id", "bbox", "label", "text", "status")
_PAIR_REQUIRED = frozenset({"pair_id", "figure_id", "text", "status"})


@dataclass(frozen=True)
class BoundingBox:
    """Axis-aligned pixel box, top-left origin, positive extent."""

    x: int
    y: int
    w: int
    h: int

    def __post_init__(self) -> None:
        if self.w <= 0 or self.h <= 0:
            raise ValueError(f"box extent must be positive, got w={self.w} h={self.h}")
        if self.x < 0 or self.y < 0:
            raise ValueError(f"box origin must be non-negative, got x={self.x} y={self.y}")

    @property
    def area(self) -> int:
        return self.w * self.h

    @property
    def center(self) -> tuple[float, float]:
        return (self.x + self.w / 2.0, self.y + self.h / 2.0)

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.x, self.y, self.w, self.h)

    def contains_point(self, px: float, py: float) -> bool:
        return self.x <= px < self.x + self.w and self.y <= py < self.y + self.h

    def intersection_area(self, other: "BoundingBox") -> int:
        iw = min(self.x + self.w, other.x + other.w) - max(self.x, other.x)
        ih = min(self.y + self.h, other.y + other.h) - max(self.y, other.y)
        if iw <= 0 or ih <= 0:
            return 0
        return iw * ih

    def iou(self, other: "BoundingBox") -> float:
        inter = self.intersection_area(other)
        if inter == 0:
            return 0.0
        return inter / (self.area + other.area - inter)


@dataclass(frozen=True)
class FigureRecord:
    """One raw image-caption pair with optional provenance metadata."""

    figure_id: str
    image_path: str
    caption: str
    journal: str | None = None
    year: int | None = None
    article_type: str | None = None


@dataclass(frozen=True)
class AlignedPair:
    """One subfigure (or whole figure) bound to one text.

    The status determines which optional fields are present:
    unique_label carries a label, fallback_whole_caption carries none,
    and singleton additionally carries no region.
    """

    pair_id: str
    figure_id: str
    text: str
    status: str
    region: BoundingBox | None = None
    label: str | None = None


def validate_record(record: FigureRecord) -> list[str]:
    """Return one violation message per failed FigureRecord invariant."""
    violations: list[str] = []
    if not isinstance(record.figure_id, str) or not record.figure_id:
        violations.append("figure_id: must be a non-empty string")
    if not isinstance(record.image_path, str) or not record.image_path:
        violations.append("image_path: must be a non-empty string")
    if not isinstance(record.caption, str) or not record.caption.strip():
        violations.append("caption: must be non-empty after whitespace trimming")
    if record.journal is not None and not isinstance(record.journal, str):
        violations.append("journal: must be a string when present")
    if record.year is not None and (isinstance(record.year, bool) or not isinstance(record.year, int)):
        violations.append("year: must be an integer when present")
    if record.article_type is not None and not isinstance(record.article_type, str):
        violations.append("article_type: must be a string when present")
    return violations


def _pair_shape_violation(pair: AlignedPair) -> str | None:
    """Check the status/field-presence pattern; return a reason or None."""
    if not pair.pair_id:
        return "pair_id: must be a non-empty string"
    if not pair.figure_id:
        return "figure_id: must be a non-empty string"
    if pair.status not in VALID_STATUSES:
        return f"status: unknown value {pair.status!r}"
    if pair.label is not None and not (
        len(pair.label) == 1 and "a" <= pair.label <= "z"
    ):
        return f"label: must be a single lowercase letter, got {pair.label!r}"
    if pair.status == STATUS_SINGLETON:
        if pair.region is not None:
            return "singleton pair must not carry a region"
        if pair.label is not None:
            return "singleton pair must not carry a label"
    elif pair.status == STATUS_UNIQUE_LABEL:
        if pair.label is None:
            return "unique_label pair must carry a label"
    elif pair.status == STATUS_FALLBACK:
        if pair.label is not None:
            return "fallback_whole_caption pair must not carry a label"
    return None


def _record_sort_key(record: FigureRecord) -> str:
    return record.figure_id


def _pair_sort_key(pair: AlignedPair) -> tuple:
    if pair.region is None:
        return (pair.figure_id, 0, 0, 0, pair.pair_id)
    return (pair.figure_id, 1, pair.region.x, pair.region.y, pair.pair_id)


@dataclass
class CorpusManifest:
    """Ordered records plus the aligned pairs derived from them."""

    records: list[FigureRecord] = field(default_factory=list)
    pairs: list[AlignedPair] = field(default_factory=list)

    @classmethod
    def build(
        cls, records: list[FigureRecord], pairs: list[AlignedPair]
    ) -> "CorpusManifest":
        """Validate invariants and normalize ordering."""
        seen_records: set[str] = set()
        for record in records:
            violations = validate_record(record)
            if violations:
                raise ValueError(f"record {record.figure_id!r}: " + "; ".join(violations))
            if record.figure_id in seen_records:
                raise DuplicateId(record.figure_id)
            seen_records.add(record.figure_id)
        seen_pairs: set[str] = set()
        for pair in pairs:
            reason = _pair_shape_violation(pair)
            if reason is not None:
                raise ValueError(f"pair {pair.pair_id!r}: {reason}")
            if pair.pair_id in seen_pairs:
                raise DuplicateId(pair.pair_id)
            seen_pairs.add(pair.pair_id)
            if pair.figure_id not in seen_records:
                raise DanglingReference(pair.pair_id, pair.figure_id)
        return cls(
            records=sorted(records, key=_record_sort_key),
            pairs=sorted(pairs, key=_pair_sort_key),
        )


def _record_to_obj(record: FigureRecord) -> dict:
    obj: dict = {
        "kind": "record",
        "figure_id": record.figure_id,
        "image_path": record.image_path,
        "caption": record.caption,
    }
    if record.journal is not None:
        obj["journal"] = record.journal
    if record.year is not None:
        obj["year"] = record.year
    if record.article_type is not None:
        obj["article_type"] = record.article_type
    return obj


def _pair_to_obj(pair: AlignedPair) -> dict:
    obj: dict = {"kind": "pair", "pair_id": pair.pair_id, "figure_id": pair.figure_id}
    if pair.region is not None:
        obj["bbox"] = [pair.region.x, pair.region.y, pair.region.w, pair.region.h]
    if pair.label is not None:
        obj["label"] = pair.label
    obj["text"] = pair.text
    obj["status"] = pair.status
    return obj


def _require_str(obj: dict, key: str, line_no: int, optional: bool = False) -> str | None:
    if key not in obj:
        if optional:
            return None
        raise MalformedLine(line_no, f"missing field {key!r}")
    value = obj[key]
    if not isinstance(value, str):
        raise MalformedLine(line_no, f"field {key!r} must be a string")
    return value


def _require_int(value: object, what: str, line_no: int) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise MalformedLine(line_no, f"{what} must be an integer")
    return value


def _obj_to_record(obj: dict, line_no: int) -> FigureRecord:
    unknown = set(obj) - set(_RECORD_KEYS) - {"kind"}
    if unknown:
        raise MalformedLine(line_no, f"unexpected record fields {sorted(unknown)}")
    record = FigureRecord(
        figure_id=_require_str(obj, "figure_id", line_no),
        image_path=_require_str(obj, "image_path", line_no),
        caption=_require_str(obj, "caption", line_no),
        journal=_require_str(obj, "journal", line_no, optional=True),
        year=_require_int(obj["year"], "year", line_no) if "year" in obj else None,
        article_type=_require_str(obj, "article_type", line_no, optional=True),
    )
    violations = validate_record(record)
    if violations:
        raise MalformedLine(line_no, "; ".join(violations))
    return record


def _obj_to_pair(obj: dict, line_no: int) -> AlignedPair:
    unknown = set(obj) - set(_PAIR_KEYS) - {"kind"}
    if unknown:
        raise MalformedLine(line_no, f"unexpected pair fields {sorted(unknown)}")
    region: BoundingBox | None = None
    if "bbox" in obj:
        bbox = obj["bbox"]
        if not (isinstance(bbox, list) and len(bbox) == 4):
            raise MalformedLine(line_no, "bbox must be a [x, y, w, h] list")
        x, y, w, h = (_require_int(v, "bbox entry", line_no) for v in bbox)
        try:
            region = BoundingBox(x, y, w, h)
        except ValueError as exc:
            raise MalformedLine(line_no, str(exc)) from exc
    pair = AlignedPair(
        pair_id=_require_str(obj, "pair_id", line_no),
        figure_id=_require_str(obj, "figure_id", line_no),
        text=_require_str(obj, "text", line_no),
        status=_require_str(obj, "status", line_no),
        region=region,
        label=_require_str(obj, "label", line_no, optional=True),
    )
    reason = _pair_shape_violation(pair)
    if reason is not None:
        raise MalformedLine(line_no, reason)
    return pair


def load_manifest(path: str | Path) -> CorpusManifest:
    """Parse and validate a manifest file; ordering is normalized."""
    path = Path(path)
    if not path.is_file():
        raise MissingFile(path)
    records: list[FigureRecord] = []
    pairs: list[AlignedPair] = []
    record_lines: dict[str, int] = {}
    pair_lines: dict[str, int] = {}
    pair_refs: list[tuple[AlignedPair, int]] = []
    text = path.read_text(encoding="utf-8")
    # split on \n only: captions may contain U+0085/U+2028 which splitlines() breaks on
    for line_no, line in enumerate(text.split("\n"), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise MalformedLine(line_no, f"invalid JSON: {exc.msg}") from exc
        if not isinstance(obj, dict):
            raise MalformedLine(line_no, "line must be a JSON object")
        kind = obj.get("kind")
        if kind == "record":
            record = _obj_to_record(obj, line_no)
            if record.figure_id in record_lines:
                raise DuplicateId(record.figure_id, line_no)
            record_lines[record.figure_id] = line_no
            records.append(record)
        elif kind == "pair":
            pair = _obj_to_pair(obj, line_no)
            if pair.pair_id in pair_lines:
                raise DuplicateId(pair.pair_id, line_no)
            pair_lines[pair.pair_id] = line_no
            pairs.append(pair)
            pair_refs.append((pair, line_no))
        else:
            raise MalformedLine(line_no, f"unknown kind {kind!r}")
    for pair, line_no in pair_refs:
        if pair.figure_id not in record_lines:
            raise DanglingReference(pair.pair_id, pair.figure_id, line_no)
    return CorpusManifest.build(records, pairs)


def manifest_to_lines(manifest: CorpusManifest) -> list[str]:
    """Canonical serialization, one JSON object per entry."""
    lines = [
        json.dumps(_record_to_obj(r), ensure_ascii=False, separators=(",", ":"))
        for r in sorted(manifest.records, key=_record_sort_key)
    ]
    lines.extend(
        json.dumps(_pair_to_obj(p), ensure_ascii=False, separators=(",", ":"))
        for p in sorted(manifest.pairs, key=_pair_sort_key)
    )
    return lines


def save_manifest(manifest: CorpusManifest, path: str | Path) -> None:
    """Write the canonical form; byte-identical for equal manifests."""
    path = Path(path)
    payload = "".join(line + "\n" for line in manifest_to_lines(manifest))
    try:
        path.write_text(payload, encoding="utf-8", newline="\n")
    except OSError as exc:
        raise IoFailure(path, str(exc)) from exc


def strip_pairs(manifest: CorpusManifest) -> CorpusManifest:
    """Copy of the manifest with records only."""
    return CorpusManifest(records=list(manifest.records), pairs=[])


def with_pairs(manifest: CorpusManifest, pairs: list[AlignedPair]) -> CorpusManifest:
    """Rebuild the manifest with a new pair list (revalidates)."""
    return CorpusManifest.build(list(manifest.records), pairs)


__all__ = [
    "AlignedPair",
    "BoundingBox",
    "CorpusManifest",
    "FigureRecord",
    "STATUS_FALLBACK",
    "STATUS_SINGLETON",
    "STATUS_UNIQUE_LABEL",
    "VALID_STATUSES",
    "load_manifest",
    "manifest_to_lines",
    "save_manifest",
    "strip_pairs",
    "validate_record",
    "with_pairs",
]
