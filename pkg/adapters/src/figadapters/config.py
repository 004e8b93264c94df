"""Adapter run configuration."""

from __future__ import annotations

import json
from dataclasses import dataclass, fields
from pathlib import Path

from figadapters.errors import ConfigError

OCR_MODEL = "template-v1"
DETECTOR_MODEL = "projection-v1"
EMBED_MODEL = "hashed-v1"

_PATH_FIELDS = (
    "images_dir",
    "manifest",
    "out_detections",
    "out_ocr",
    "out_image_emb",
    "out_text_emb",
)


@dataclass(frozen=True)
class AdapterConfig:
    images_dir: Path
    manifest: Path
    out_detections: Path
    out_ocr: Path
    out_image_emb: Path
    out_text_emb: Path
    ocr_model: str = OCR_MODEL
    detector_model: str = DETECTOR_MODEL
    embed_model: str = EMBED_MODEL

    def __post_init__(self) -> None:
        for name in _PATH_FIELDS:
            object.__setattr__(self, name, Path(getattr(self, name)))

    def validate(self) -> None:
        outputs = [
            self.out_detections.resolve(),
            self.out_ocr.resolve(),
            self.out_image_emb.resolve(),
            self.out_text_emb.resolve(),
        ]
        if len(set(outputs)) != len(outputs):
            raise ConfigError("all output paths must be distinct")
        for name in ("ocr_model", "detector_model", "embed_model"):
            if not getattr(self, name).strip():
                raise ConfigError(f"{name} must be a non-blank identifier")


def config_from_file(path: str | Path) -> AdapterConfig:
    """Load a JSON config; relative paths resolve against the file's directory."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    known = {f.name for f in fields(AdapterConfig)}
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    missing = [name for name in _PATH_FIELDS if name not in raw]
    if missing:
        raise ConfigError(f"missing config keys: {missing}")
    base = path.parent
    kwargs = {}
    for key, value in raw.items():
        if key in _PATH_FIELDS:
            if not isinstance(value, str) or not value:
                raise ConfigError(f"{key} must be a non-empty path string")
            kwargs[key] = (base / value).resolve()
        else:
            if not isinstance(value, str):
                raise ConfigError(f"{key} must be a string")
            kwargs[key] = value
    config = AdapterConfig(**kwargs)
    config.validate()
    return config
