"""Independent oracles and random-instance builders shared by the tests.

Everything here deliberately avoids the library's own arithmetic: IoU,
ranking, and manifest construction are re-derived from first principles so
the tests compare two separate implementations.
"""

from __future__ import annotations

import random

from figalign.corpus import (
    STATUS_FALLBACK,
    STATUS_SINGLETON,
    STATUS_UNIQUE_LABEL,
    AlignedPair,
    BoundingBox,
    CorpusManifest,
    FigureRecord,
)


def iou_oracle(a: tuple[int, int, int, int], b: tuple[int, int, int, int]) -> float:
    """Intersection over union from raw (x, y, w, h) tuples, double-loop free."""
    ax, ay, aw, ah = a
    bx, by, bw, bh = b
    ix = max(0, min(ax + aw, bx + bw) - max(ax, bx))
    iy = max(0, min(ay + ah, by + bh) - max(ay, by))
    inter = ix * iy
    union = aw * ah + bw * bh - inter
    return inter / union if union else 0.0


def recall_oracle(sim, k: int, direction: str) -> float:
    """Brute-force recall@k: fully sort each row by (-score, column)."""
    rows = sim if direction == "i2t" else sim.T
    n = rows.shape[0]
    hits = 0
    for i in range(n):
        order = sorted(range(n), key=lambda j: (-rows[i, j], j))
        if i in order[:k]:
            hits += 1
    return 100.0 * hits / n


_WORDS = (
    "axial", "coronal", "lesion", "contrast", "hemorrhage", "ventricle",
    "signal", "mass", "edema", "arrow", "baseline", "follow-up",
)


def random_caption(rng: random.Random) -> str:
    n = rng.randint(2, 8)
    return " ".join(rng.choice(_WORDS) for _ in range(n)).capitalize() + "."


def random_box(rng: random.Random, limit: int = 500) -> BoundingBox:
    x = rng.randint(0, limit)
    y = rng.randint(0, limit)
    return BoundingBox(x, y, rng.randint(1, limit), rng.randint(1, limit))


def random_manifest(rng: random.Random) -> CorpusManifest:
    """A structurally valid manifest with random records and pairs."""
    n_records = rng.randint(0, 12)
    records = []
    for i in range(n_records):
        records.append(
            FigureRecord(
                figure_id=f"fig{i:03d}",
                image_path=f"images/fig{i:03d}.png",
                caption=random_caption(rng),
                journal=rng.choice((None, "J Neuroimaging", "Brain Res")),
                year=rng.choice((None, rng.randint(1937, 2018))),
                article_type=rng.choice((None, "case report")),
            )
        )
    pairs = []
    for record in records:
        style = rng.random()
        if style < 0.3:
            continue
        if style < 0.55:
            pairs.append(
                AlignedPair(
                    pair_id=f"{record.figure_id}#0",
                    figure_id=record.figure_id,
                    text=record.caption,
                    status=STATUS_SINGLETON,
                )
            )
            continue
        for idx in range(rng.randint(2, 4)):
            if rng.random() < 0.5:
                pairs.append(
                    AlignedPair(
                        pair_id=f"{record.figure_id}#{idx}",
                        figure_id=record.figure_id,
                        text=random_caption(rng),
                        status=STATUS_UNIQUE_LABEL,
                        region=random_box(rng),
                        label=rng.choice("abcd"),
                    )
                )
            else:
                pairs.append(
                    AlignedPair(
                        pair_id=f"{record.figure_id}#{idx}",
                        figure_id=record.figure_id,
                        text=record.caption,
                        status=STATUS_FALLBACK,
                        region=random_box(rng),
                    )
                )
    return CorpusManifest.build(records, pairs)


def status_oracle(candidates, segment_labels):
    """The matching rule, restated directly from its textual definition.

    Returns (status, chosen_label_or_None).
    """
    common = set(candidates) & set(segment_labels)
    if len(common) == 1:
        return STATUS_UNIQUE_LABEL, next(iter(common))
    return STATUS_FALLBACK, None


# malformed manifest fixtures: file name, expected error type, expected line
MALFORMED_MANIFESTS = [
    ("bad_json.jsonl", "MalformedLine", 2),
    ("not_object.jsonl", "MalformedLine", 1),
    ("unknown_kind.jsonl", "MalformedLine", 2),
    ("missing_field.jsonl", "MalformedLine", 1),
    ("unknown_field.jsonl", "MalformedLine", 1),
    ("bad_year_type.jsonl", "MalformedLine", 1),
    ("bool_year.jsonl", "MalformedLine", 1),
    ("blank_caption.jsonl", "MalformedLine", 1),
    ("dup_record.jsonl", "DuplicateId", 3),
    ("dup_pair.jsonl", "DuplicateId", 3),
    ("dangling_pair.jsonl", "DanglingReference", 2),
    ("bad_bbox_zero_w.jsonl", "MalformedLine", 2),
    ("bbox_not_list.jsonl", "MalformedLine", 2),
    ("bad_status.jsonl", "MalformedLine", 2),
    ("singleton_with_region.jsonl", "MalformedLine", 2),
    ("unique_without_label.jsonl", "MalformedLine", 2),
    ("fallback_with_label.jsonl", "MalformedLine", 2),
    ("uppercase_label.jsonl", "MalformedLine", 2),
]
