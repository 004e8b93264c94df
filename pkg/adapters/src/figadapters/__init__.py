"""Model adapters emitting the interchange files the alignment pipeline ingests."""

from figadapters.config import AdapterConfig, config_from_file
from figadapters.detect import detect_regions, run_detector
from figadapters.embed import embed_pairs, image_vector, text_vector
from figadapters.errors import (
    AdapterError,
    ConfigError,
    FormatError,
    MissingImage,
    ModelUnavailable,
)
from figadapters.ocr import run_ocr, tokens_for_image

__version__ = "0.1.0"

__all__ = [
    "AdapterConfig",
    "AdapterError",
    "ConfigError",
    "FormatError",
    "MissingImage",
    "ModelUnavailable",
    "config_from_file",
    "detect_regions",
    "embed_pairs",
    "image_vector",
    "run_detector",
    "run_ocr",
    "text_vector",
    "tokens_for_image",
    "__version__",
]
