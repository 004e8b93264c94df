"""End-to-end alignment pipeline.

Filters a raw manifest by caption keyword, obtains subfigure regions for
each record (external detections or the built-in splitter), parses the
caption, assigns OCR tokens, matches, and writes the output manifest plus
a stats sidecar. Per-record failures (unreadable image, corrupt OCR entry,
bad detection box) skip that record and are counted, never aborting the
run; malformed input files fail hard.
"""

from __future__ import annotations

import json
import logging
from collections import Counter
from dataclasses import dataclass, field, fields
from pathlib import Path

from .captions import parse_caption
from .corpus import (
    STATUS_FALLBACK,
    STATUS_SINGLETON,
    STATUS_UNIQUE_LABEL,
    AlignedPair,
    CorpusManifest,
    FigureRecord,
    load_manifest,
    save_manifest,
)
from .errors import ConfigError, IoFailure, MissingFile, OutOfBounds
from .matching import assign_tokens, match_subfigures, read_ocr_file_tolerant
from .splitter import (
    GrayImage,
    SplitterParams,
    read_detections_file,
    regions_from_entry,
    split_compound,
)

log = logging.getLogger(__name__)


@dataclass
class PipelineConfig:
    """Everything one end-to-end run needs.

    Exactly one subfigure source is used: detections_file when present,
    otherwise the built-in splitter over images_dir.
    """

    input_manifest: Path
    output_manifest: Path
    ocr_file: Path
    images_dir: Path | None = None
    detections_file: Path | None = None
    keyword: str | None = None
    case_insensitive_keyword: bool = True
    article_type: str | None = None
    min_score: float = 0.5
    min_confidence: float = 0.5
    splitter: SplitterParams = field(default_factory=SplitterParams)

    def __post_init__(self) -> None:
        self.input_manifest = Path(self.input_manifest)
        self.output_manifest = Path(self.output_manifest)
        self.ocr_file = Path(self.ocr_file)
        if self.images_dir is not None:
            self.images_dir = Path(self.images_dir)
        if self.detections_file is not None:
            self.detections_file = Path(self.detections_file)

    def validate(self) -> None:
        if self.input_manifest.resolve() == self.output_manifest.resolve():
            raise ConfigError("output_manifest must differ from input_manifest")
        if self.detections_file is None and self.images_dir is None:
            raise ConfigError("a subfigure source is required: detections_file or images_dir")
        for name in ("min_score", "min_confidence"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ConfigError(f"{name} must be in [0,1], got {value}")


@dataclass
class PipelineStats:
    """Corpus-level outcome counters of one run."""

    records_in: int
    records_after_filter: int
    compound_count: int
    singleton_count: int
    pairs_out: int
    compound_fraction: float
    expansion_ratio: float
    status_histogram: dict[str, int]
    flagged_captions: int
    skipped_records: int

    def to_json_dict(self) -> dict:
        return {
            "records_in": self.records_in,
            "records_after_filter": self.records_after_filter,
            "compound_count": self.compound_count,
            "singleton_count": self.singleton_count,
            "pairs_out": self.pairs_out,
            "compound_fraction": self.compound_fraction,
            "expansion_ratio": self.expansion_ratio,
            "status_histogram": dict(sorted(self.status_histogram.items())),
            "flagged_captions": self.flagged_captions,
            "skipped_records": self.skipped_records,
        }


def _full_histogram(counts: Counter) -> dict[str, int]:
    return {
        status: counts.get(status, 0)
        for status in (STATUS_FALLBACK, STATUS_SINGLETON, STATUS_UNIQUE_LABEL)
    }


def filter_corpus(
    records: list[FigureRecord], keyword: str | None, case_insensitive: bool = True
) -> list[FigureRecord]:
    """Keep records whose caption contains the keyword; order is stable."""
    if keyword is None:
        return list(records)
    if case_insensitive:
        needle = keyword.casefold()
        return [r for r in records if needle in r.caption.casefold()]
    return [r for r in records if keyword in r.caption]


def _filter_article_type(
    records: list[FigureRecord], article_type: str | None
) -> list[FigureRecord]:
    # predicate applies only to records that carry the field
    if article_type is None:
        return records
    return [r for r in records if r.article_type is None or r.article_type == article_type]


def _warn_repeated_targets(figure_id: str, pairs: list[AlignedPair]) -> None:
    letters = Counter(p.label for p in pairs if p.label is not None)
    repeated = sorted(letter for letter, count in letters.items() if count > 1)
    if repeated:
        log.warning("figure %s: several regions matched the same label(s) %s", figure_id, repeated)


def run_pipeline(config: PipelineConfig) -> tuple[CorpusManifest, PipelineStats]:
    """Run filter → regions → parse → match, write manifest and sidecar.

    Returns the written manifest and its stats. Two runs on identical
    inputs write byte-identical files.
    """
    config.validate()
    manifest_in = load_manifest(config.input_manifest)
    filtered = filter_corpus(
        manifest_in.records, config.keyword, config.case_insensitive_keyword
    )
    filtered = _filter_article_type(filtered, config.article_type)
    ocr_tokens, corrupt_ocr = read_ocr_file_tolerant(config.ocr_file)
    detections = (
        read_detections_file(config.detections_file)
        if config.detections_file is not None
        else None
    )

    pairs: list[AlignedPair] = []
    compound_count = singleton_count = flagged = skipped = 0

    def skip(figure_id: str, reason: str) -> None:
        nonlocal skipped
        skipped += 1
        log.warning("figure %s skipped: %s", figure_id, reason)

    for record in filtered:
        fid = record.figure_id
        if fid in corrupt_ocr:
            skip(fid, f"corrupt OCR entry ({corrupt_ocr[fid]})")
            continue
        try:
            if detections is not None:
                entry = detections.get(fid)
                if entry is None:
                    skip(fid, "no detections entry")
                    continue
                regions = regions_from_entry(entry, config.min_score)
            else:
                image = GrayImage.from_file(config.images_dir / record.image_path)
                regions = split_compound(image, config.splitter, figure_id=fid)
        except (MissingFile, IoFailure, OutOfBounds) as exc:
            skip(fid, str(exc))
            continue
        if not regions:
            skip(fid, "no regions above the score threshold")
            continue
        if len(regions) == 1:
            pairs.append(
                AlignedPair(
                    pair_id=f"{fid}#0",
                    figure_id=fid,
                    text=record.caption,
                    status=STATUS_SINGLETON,
                )
            )
            singleton_count += 1
            continue
        parsed = parse_caption(record.caption)
        if parsed.flags:
            flagged += 1
        label_sets = assign_tokens(regions, ocr_tokens.get(fid, []), config.min_confidence)
        matched = match_subfigures(label_sets, list(parsed.segments), record.caption)
        _warn_repeated_targets(fid, matched)
        pairs.extend(matched)
        compound_count += 1

    manifest_out = CorpusManifest.build(filtered, pairs)
    n_filtered = len(filtered)
    stats = PipelineStats(
        records_in=len(manifest_in.records),
        records_after_filter=n_filtered,
        compound_count=compound_count,
        singleton_count=singleton_count,
        pairs_out=len(pairs),
        compound_fraction=compound_count / n_filtered if n_filtered else 0.0,
        expansion_ratio=len(pairs) / n_filtered if n_filtered else 0.0,
        status_histogram=_full_histogram(Counter(p.status for p in pairs)),
        flagged_captions=flagged,
        skipped_records=skipped,
    )
    save_manifest(manifest_out, config.output_manifest)
    write_stats_sidecar(stats, config.output_manifest)
    return manifest_out, stats


def compute_stats(manifest: CorpusManifest, records_in: int) -> PipelineStats:
    """Derive stats from a finished manifest.

    Figures are classed by pair count (≥2 compound, 1 singleton, 0
    skipped). Caption flags are not recoverable from a manifest, so
    flagged_captions is 0 here.
    """
    per_figure = Counter(p.figure_id for p in manifest.pairs)
    compound = sum(1 for n in per_figure.values() if n >= 2)
    singleton = sum(1 for n in per_figure.values() if n == 1)
    n_records = len(manifest.records)
    return PipelineStats(
        records_in=records_in,
        records_after_filter=n_records,
        compound_count=compound,
        singleton_count=singleton,
        pairs_out=len(manifest.pairs),
        compound_fraction=compound / n_records if n_records else 0.0,
        expansion_ratio=len(manifest.pairs) / n_records if n_records else 0.0,
        status_histogram=_full_histogram(Counter(p.status for p in manifest.pairs)),
        flagged_captions=0,
        skipped_records=n_records - len(per_figure),
    )


def stats_sidecar_path(output_manifest: str | Path) -> Path:
    return Path(output_manifest).with_suffix(".stats.json")


def write_stats_sidecar(stats: PipelineStats, output_manifest: str | Path) -> Path:
    path = stats_sidecar_path(output_manifest)
    payload = json.dumps(stats.to_json_dict(), sort_keys=True, indent=2) + "\n"
    try:
        path.write_text(payload, encoding="utf-8")
    except OSError as exc:
        raise IoFailure(path, str(exc)) from exc
    return path


_SPLITTER_FIELDS = {f.name for f in fields(SplitterParams)}
_CONFIG_FIELDS = {f.name for f in fields(PipelineConfig)}
_PATH_FIELDS = ("input_manifest", "output_manifest", "ocr_file", "images_dir", "detections_file")


def config_from_file(path: str | Path) -> PipelineConfig:
    """Read a JSON config whose keys mirror PipelineConfig field names.

    Relative paths are resolved against the config file's directory.
    """
    path = Path(path)
    if not path.is_file():
        raise MissingFile(path)
    try:
        obj = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON: {exc.msg}") from exc
    if not isinstance(obj, dict):
        raise ConfigError(f"{path}: config must be a JSON object")
    unknown = set(obj) - _CONFIG_FIELDS
    if unknown:
        raise ConfigError(f"{path}: unknown config keys {sorted(unknown)}")
    for key in ("input_manifest", "output_manifest", "ocr_file"):
        if key not in obj:
            raise ConfigError(f"{path}: missing required key {key!r}")
    kwargs = dict(obj)
    splitter_obj = kwargs.pop("splitter", None)
    if splitter_obj is not None:
        if not isinstance(splitter_obj, dict) or set(splitter_obj) - _SPLITTER_FIELDS:
            raise ConfigError(f"{path}: splitter must be an object with keys {sorted(_SPLITTER_FIELDS)}")
        try:
            kwargs["splitter"] = SplitterParams(**splitter_obj)
        except ValueError as exc:
            raise ConfigError(f"{path}: {exc}") from exc
    base = path.parent
    for key in _PATH_FIELDS:
        if kwargs.get(key) is not None:
            if not isinstance(kwargs[key], str):
                raise ConfigError(f"{path}: {key} must be a string path")
            kwargs[key] = base / kwargs[key]
    try:
        return PipelineConfig(**kwargs)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{path}: {exc}") from exc


__all__ = [
    "PipelineConfig",
    "PipelineStats",
    "compute_stats",
    "config_from_file",
    "filter_corpus",
    "run_pipeline",
    "stats_sidecar_path",
    "write_stats_sidecar",
]
