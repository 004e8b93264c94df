"""Hashed feature embeddings ("hashed-v1").

Image side: the pair's region crop resized to 16x16 gray, flattened to 256
dimensions. Text side: character trigrams hashed into 256 bins with md5.
Both are L2-normalized and rounded so reruns are byte-identical. These are
placeholders with honest geometry, not learned representations; any real
encoder can replace them behind the same file contract.
"""

from __future__ import annotations

import hashlib
from pathlib import Path

import numpy as np
from PIL import Image

from figadapters.config import EMBED_MODEL, AdapterConfig
from figadapters.errors import MissingImage, ModelUnavailable
from figadapters.manifest_io import embedding_row, read_manifest, write_jsonl

_DIM = 256
_SIDE = 16


def _normalize(vector: np.ndarray) -> list[float]:
    norm = float(np.linalg.norm(vector))
    if norm < 1e-9:
        vector = vector.copy()
        vector[0] = 1.0
        norm = 1.0
    return [round(float(v), 6) for v in vector / norm]


def image_vector(image: Image.Image, bbox: tuple[int, int, int, int] | None) -> list[float]:
    gray = image.convert("L")
    if bbox is not None:
        x, y, w, h = bbox
        gray = gray.crop((x, y, x + w, y + h))
    small = gray.resize((_SIDE, _SIDE), Image.BILINEAR)
    flat = np.asarray(small, dtype=np.float64).reshape(-1) / 255.0
    return _normalize(flat)


def text_vector(text: str) -> list[float]:
    padded = f"^{text.casefold()}$"
    bins = np.zeros(_DIM, dtype=np.float64)
    for i in range(len(padded) - 2):
        trigram = padded[i : i + 3]
        digest = hashlib.md5(trigram.encode("utf-8")).hexdigest()
        bins[int(digest, 16) % _DIM] += 1.0
    return _normalize(bins)


def embed_pairs(config: AdapterConfig) -> tuple[Path, Path]:
    """Write image and text embedding files keyed by pair_id."""
    if config.embed_model != EMBED_MODEL:
        raise ModelUnavailable(config.embed_model)
    records, pairs = read_manifest(config.manifest)
    image_paths = {r.figure_id: r.image_path for r in records}
    image_rows = []
    text_rows = []
    opened: dict[str, Image.Image] = {}
    try:
        for pair in pairs:
            rel = image_paths.get(pair.figure_id)
            if rel is None:
                raise MissingImage(pair.pair_id, f"(no record for figure {pair.figure_id!r})")
            path = config.images_dir / rel
            if pair.figure_id not in opened:
                if not path.is_file():
                    raise MissingImage(pair.pair_id, str(path))
                opened[pair.figure_id] = Image.open(path)
                opened[pair.figure_id].load()
            image_rows.append(
                embedding_row(pair.pair_id, image_vector(opened[pair.figure_id], pair.bbox))
            )
            text_rows.append(embedding_row(pair.pair_id, text_vector(pair.text)))
    finally:
        for img in opened.values():
            img.close()
    write_jsonl(config.out_image_emb, image_rows)
    write_jsonl(config.out_text_emb, text_rows)
    return config.out_image_emb, config.out_text_emb
