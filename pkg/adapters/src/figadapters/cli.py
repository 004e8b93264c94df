"""Command line front end: adapters ocr|detect|embed --config <file>."""

from __future__ import annotations

import argparse
import logging
import sys

from figadapters.config import config_from_file
from figadapters.detect import run_detector
from figadapters.embed import embed_pairs
from figadapters.errors import AdapterError, ConfigError
from figadapters.ocr import run_ocr


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise SystemExit(1)


def build_parser() -> _Parser:
    parser = _Parser(prog="adapters", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("ocr", "emit OCR tokens for every manifest record"),
        ("detect", "emit subfigure detections for every manifest record"),
        ("embed", "emit image and text embeddings for every manifest pair"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="JSON adapter config")
    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        config = config_from_file(args.config)
        if args.command == "ocr":
            out = run_ocr(config)
            print(f"wrote {out}")
        elif args.command == "detect":
            out = run_detector(config)
            print(f"wrote {out}")
        else:
            img_out, txt_out = embed_pairs(config)
            print(f"wrote {img_out}")
            print(f"wrote {txt_out}")
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except AdapterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
