"""Command-line entry points.

Exit codes: 0 success, 1 usage or configuration error, 2 schema or data
error. argparse's default exit code for bad usage is remapped to 1 so the
contract holds for every failure path.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .captions import parse_caption
from .corpus import load_manifest
from .errors import ConfigError, DataError, MissingFile
from .pipeline import (
    PipelineConfig,
    compute_stats,
    config_from_file,
    run_pipeline,
)
from .retrieval import DEFAULT_KS, eval_report, load_embeddings, render_report
from .splitter import GrayImage, SplitterParams, split_compound

log = logging.getLogger(__name__)

_IMAGE_PATTERNS = ("*.png", "*.jpg", "*.jpeg")


class _Parser(argparse.ArgumentParser):
    """ArgumentParser whose usage errors exit 1 instead of 2."""

    def error(self, message: str) -> None:
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _dump(obj: dict) -> str:
    return json.dumps(obj, ensure_ascii=False, separators=(",", ":"))


def _cmd_parse_captions(args: argparse.Namespace) -> int:
    manifest = load_manifest(args.input)
    lines = []
    for record in manifest.records:
        parsed = parse_caption(record.caption)
        lines.append(
            _dump(
                {
                    "figure_id": record.figure_id,
                    "shared_context": parsed.shared_context,
                    "flags": sorted(parsed.flags),
                    "segments": [
                        {"label": s.label, "text": s.text, "span": list(s.span)}
                        for s in parsed.segments
                    ],
                }
            )
        )
    Path(args.output).write_text("".join(line + "\n" for line in lines), encoding="utf-8")
    print(f"parsed {len(manifest.records)} captions -> {args.output}")
    return 0


def _cmd_split_figures(args: argparse.Namespace) -> int:
    images_dir = Path(args.images)
    if not images_dir.is_dir():
        raise ConfigError(f"not a directory: {images_dir}")
    try:
        params = SplitterParams(
            white_threshold=args.white_threshold,
            min_gutter_px=args.min_gutter,
            min_panel_px=args.min_panel,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    paths = sorted(p for pattern in _IMAGE_PATTERNS for p in images_dir.glob(pattern))
    seen: dict[str, Path] = {}
    for path in paths:
        if path.stem in seen:
            raise ConfigError(f"duplicate figure id {path.stem!r}: {seen[path.stem]} and {path}")
        seen[path.stem] = path
    lines = []
    skipped = 0
    for path in paths:
        try:
            image = GrayImage.from_file(path)
        except (MissingFile, ConfigError) as exc:
            log.warning("skipping %s: %s", path, exc)
            skipped += 1
            continue
        regions = split_compound(image, params, figure_id=path.stem)
        lines.append(
            _dump(
                {
                    "figure_id": path.stem,
                    "image_width": image.width,
                    "image_height": image.height,
                    "regions": [
                        {
                            "x": r.box.x,
                            "y": r.box.y,
                            "w": r.box.w,
                            "h": r.box.h,
                            "score": r.score,
                        }
                        for r in regions
                    ],
                }
            )
        )
    Path(args.output).write_text("".join(line + "\n" for line in lines), encoding="utf-8")
    print(f"split {len(lines)} figures ({skipped} skipped) -> {args.output}")
    return 0


def _print_stats(stats_dict: dict) -> None:
    print(json.dumps(stats_dict, indent=2, sort_keys=True))


def _cmd_match(args: argparse.Namespace) -> int:
    config = PipelineConfig(
        input_manifest=args.input,
        output_manifest=args.output,
        ocr_file=args.ocr,
        detections_file=args.detections,
        min_score=args.min_score,
        min_confidence=args.min_confidence,
    )
    _, stats = run_pipeline(config)
    _print_stats(stats.to_json_dict())
    return 0


def _cmd_run(args: argparse.Namespace) -> int:
    config = config_from_file(args.config)
    _, stats = run_pipeline(config)
    _print_stats(stats.to_json_dict())
    return 0


def _cmd_stats(args: argparse.Namespace) -> int:
    manifest = load_manifest(args.input)
    stats = compute_stats(manifest, records_in=len(manifest.records))
    _print_stats(stats.to_json_dict())
    return 0


def _parse_ks(raw: str) -> tuple[int, ...]:
    try:
        ks = tuple(int(part) for part in raw.split(",") if part.strip())
    except ValueError:
        raise ConfigError(f"--k expects comma-separated integers, got {raw!r}") from None
    if not ks:
        raise ConfigError("--k expects at least one value")
    return ks


def _cmd_eval_retrieval(args: argparse.Namespace) -> int:
    images = load_embeddings(args.image_emb)
    texts = load_embeddings(args.text_emb)
    ks = _parse_ks(args.k) if args.k else DEFAULT_KS
    report = eval_report(images, texts, ks)
    print(render_report(report))
    if args.json:
        Path(args.json).write_text(
            json.dumps(report.to_json_dict(), indent=2) + "\n", encoding="utf-8"
        )
    return 0


def _build_parser() -> _Parser:
    parser = _Parser(prog="figalign", description="Subfigure/subcaption alignment tools.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("parse-captions", help="segment every caption of a manifest")
    p.add_argument("--input", required=True, help="input manifest JSONL")
    p.add_argument("--output", required=True, help="segments JSONL to write")
    p.set_defaults(func=_cmd_parse_captions)

    p = sub.add_parser("split-figures", help="run the whitespace-gutter splitter over a directory")
    p.add_argument("--images", required=True, help="directory of figure images")
    p.add_argument("--output", required=True, help="detections JSONL to write")
    p.add_argument("--white-threshold", type=int, default=SplitterParams.white_threshold)
    p.add_argument("--min-gutter", type=int, default=SplitterParams.min_gutter_px)
    p.add_argument("--min-panel", type=int, default=SplitterParams.min_panel_px)
    p.set_defaults(func=_cmd_split_figures)

    p = sub.add_parser("match", help="align a manifest against detections and OCR files")
    p.add_argument("--input", required=True, help="input manifest JSONL")
    p.add_argument("--detections", required=True, help="detections JSONL")
    p.add_argument("--ocr", required=True, help="OCR tokens JSONL")
    p.add_argument("--output", required=True, help="output manifest JSONL")
    p.add_argument("--min-score", type=float, default=0.5)
    p.add_argument("--min-confidence", type=float, default=0.5)
    p.set_defaults(func=_cmd_match)

    p = sub.add_parser("run", help="run the full pipeline from a JSON config")
    p.add_argument("--config", required=True, help="JSON config mirroring PipelineConfig fields")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("stats", help="print corpus statistics of a manifest")
    p.add_argument("--input", required=True, help="manifest JSONL")
    p.set_defaults(func=_cmd_stats)

    p = sub.add_parser("eval-retrieval", help="recall@k for paired image/text embeddings")
    p.add_argument("--image-emb", required=True, help="image embeddings JSONL")
    p.add_argument("--text-emb", required=True, help="text embeddings JSONL")
    p.add_argument("--k", default=None, help="comma-separated k values (default 1,10)")
    p.add_argument("--json", default=None, help="also write the report as JSON here")
    p.set_defaults(func=_cmd_eval_retrieval)

    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(stream=sys.stderr, level=logging.WARNING, format="%(levelname)s: %(message)s")
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
