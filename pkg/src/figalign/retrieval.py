"""Bidirectional image-text retrieval evaluation.

Loads image and text embeddings from JSONL, scores every pair by cosine
similarity (rows are L2-normalized on load), and reports recall@k in both
directions. Ranking ties break toward the lower column index so results
are exactly reproducible.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (
    DimensionMismatch,
    DimMismatch,
    DuplicateId,
    IdSetMismatch,
    KOutOfRange,
    MalformedLine,
    MissingFile,
    NotSquare,
    ZeroVector,
)

_ZERO_NORM = 1e-12
DEFAULT_KS = (1, 10)


@dataclass
class EmbeddingSet:
    """Named unit vectors, one row per id."""

    ids: tuple[str, ...]
    vectors: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        self.ids = tuple(self.ids)
        arr = np.asarray(self.vectors, dtype=np.float64)
        if arr.ndim != 2 or arr.shape[1] < 1:
            raise ValueError(f"vectors must be a 2-D matrix, got shape {arr.shape}")
        if arr.shape[0] != len(self.ids):
            raise ValueError(f"{len(self.ids)} ids but {arr.shape[0]} vector rows")
        if len(set(self.ids)) != len(self.ids):
            seen: set[str] = set()
            for vec_id in self.ids:
                if vec_id in seen:
                    raise DuplicateId(vec_id)
                seen.add(vec_id)
        norms = np.linalg.norm(arr, axis=1)
        small = np.flatnonzero(norms < _ZERO_NORM)
        if small.size:
            raise ZeroVector(self.ids[int(small[0])])
        self.vectors = arr / norms[:, None]

    @property
    def dim(self) -> int:
        return int(self.vectors.shape[1])

    def __len__(self) -> int:
        return len(self.ids)


def load_embeddings(path: str | Path) -> EmbeddingSet:
    """Read JSONL lines {"id": str, "vector": [float, ...]}."""
    path = Path(path)
    if not path.is_file():
        raise MissingFile(path)
    ids: list[str] = []
    seen: set[str] = set()
    rows: list[list[float]] = []
    dim: int | None = None
    for line_no, line in enumerate(path.read_text(encoding="utf-8").split("\n"), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise MalformedLine(line_no, f"invalid JSON: {exc.msg}") from exc
        if not isinstance(obj, dict) or set(obj) != {"id", "vector"}:
            raise MalformedLine(line_no, 'line must be exactly {"id": ..., "vector": ...}')
        vec_id = obj["id"]
        if not isinstance(vec_id, str) or not vec_id:
            raise MalformedLine(line_no, "id must be a non-empty string")
        vector = obj["vector"]
        if (
            not isinstance(vector, list)
            or not vector
            or any(isinstance(v, bool) or not isinstance(v, (int, float)) for v in vector)
        ):
            raise MalformedLine(line_no, "vector must be a non-empty list of numbers")
        if dim is None:
            dim = len(vector)
        elif len(vector) != dim:
            raise DimensionMismatch(line_no, dim, len(vector))
        if vec_id in seen:
            raise DuplicateId(vec_id, line_no)
        seen.add(vec_id)
        ids.append(vec_id)
        rows.append([float(v) for v in vector])
    if not ids:
        raise MalformedLine(0, "embedding file holds no vectors")
    return EmbeddingSet(ids=tuple(ids), vectors=np.asarray(rows, dtype=np.float64))


def similarity_matrix(images: EmbeddingSet, texts: EmbeddingSet) -> np.ndarray:
    """Cosine similarities, images along rows, texts matched by id.

    Text rows are reordered to the image id order, so entry (i, j) scores
    image ids[i] against the text sharing image ids[j]'s id.
    """
    if images.dim != texts.dim:
        raise DimMismatch(images.dim, texts.dim)
    image_ids, text_ids = set(images.ids), set(texts.ids)
    if image_ids != text_ids:
        raise IdSetMismatch(sorted(image_ids - text_ids), sorted(text_ids - image_ids))
    text_row = {vec_id: row for row, vec_id in enumerate(texts.ids)}
    aligned = texts.vectors[[text_row[vec_id] for vec_id in images.ids]]
    return images.vectors @ aligned.T


def recall_at_k(sim: np.ndarray, k: int, direction: str) -> float:
    """Percentage of queries whose true match ranks within the top k.

    For i2t, row i queries the columns and its truth is column i; t2i is
    the transpose case. Equal scores rank the lower column index first.
    """
    if direction not in ("i2t", "t2i"):
        raise ValueError(f"direction must be 'i2t' or 't2i', got {direction!r}")
    sim = np.asarray(sim, dtype=np.float64)
    if sim.ndim != 2 or sim.shape[0] != sim.shape[1]:
        raise NotSquare(sim.shape)
    n = sim.shape[0]
    if not 1 <= k <= n:
        raise KOutOfRange(k, n)
    scores = sim if direction == "i2t" else sim.T
    diag = np.diagonal(scores)
    beaten = (scores > diag[:, None]).sum(axis=1)
    idx = np.arange(n)
    tied_earlier = ((scores == diag[:, None]) & (idx[None, :] < idx[:, None])).sum(axis=1)
    ranks = beaten + tied_earlier
    return 100.0 * float((ranks < k).sum()) / n


@dataclass(frozen=True)
class RetrievalReport:
    """Recall percentages keyed like "i2t@1", plus the query count."""

    recalls: dict[str, float]
    n_queries: int

    def to_json_dict(self) -> dict:
        out: dict = dict(self.recalls)
        out["n_queries"] = self.n_queries
        return out


def eval_report(
    images: EmbeddingSet, texts: EmbeddingSet, ks: tuple[int, ...] = DEFAULT_KS
) -> RetrievalReport:
    """Score both directions at every k from one similarity matrix."""
    sim = similarity_matrix(images, texts)
    recalls = {
        f"{direction}@{k}": recall_at_k(sim, k, direction)
        for direction in ("i2t", "t2i")
        for k in ks
    }
    return RetrievalReport(recalls=recalls, n_queries=sim.shape[0])


def render_report(report: RetrievalReport) -> str:
    """Aligned plain-text table, one header row and one value row."""
    headers = [*report.recalls, "n"]
    values = [f"{v:.2f}" for v in report.recalls.values()] + [str(report.n_queries)]
    widths = [max(len(h), len(v)) for h, v in zip(headers, values)]
    head = "  ".join(h.ljust(w) for h, w in zip(headers, widths))
    body = "  ".join(v.ljust(w) for v, w in zip(values, widths))
    return f"{head}\n{body}"


__all__ = [
    "DEFAULT_KS",
    "EmbeddingSet",
    "RetrievalReport",
    "eval_report",
    "load_embeddings",
    "recall_at_k",
    "render_report",
    "similarity_matrix",
]
