"""Alignment of compound-figure panels with their subcaptions.

The pipeline turns raw figure/caption records into aligned subfigure and
subcaption pairs, and the retrieval module scores image-text embeddings
produced downstream. See README.md for the file formats and CLI.
"""

from .captions import (
    LabelMarker,
    ParsedCaption,
    SubcaptionSegment,
    expand_range,
    parse_caption,
    scan_labels,
    segment_caption,
)
from .corpus import (
    STATUS_FALLBACK,
    STATUS_SINGLETON,
    STATUS_UNIQUE_LABEL,
    AlignedPair,
    BoundingBox,
    CorpusManifest,
    FigureRecord,
    load_manifest,
    save_manifest,
    validate_record,
)
from .errors import ConfigError, DataError, PipelineError
from .matching import (
    OcrToken,
    RegionLabelSet,
    assign_tokens,
    match_subfigures,
    normalize_token,
    read_ocr_file,
)
from .pipeline import (
    PipelineConfig,
    PipelineStats,
    compute_stats,
    config_from_file,
    filter_corpus,
    run_pipeline,
)
from .retrieval import (
    EmbeddingSet,
    RetrievalReport,
    eval_report,
    load_embeddings,
    recall_at_k,
    similarity_matrix,
)
from .splitter import (
    GrayImage,
    SplitterParams,
    SubfigureRegion,
    ingest_detections,
    is_compound,
    split_compound,
)

__version__ = "0.1.0"

__all__ = [
    "AlignedPair",
    "BoundingBox",
    "ConfigError",
    "CorpusManifest",
    "DataError",
    "EmbeddingSet",
    "FigureRecord",
    "GrayImage",
    "LabelMarker",
    "OcrToken",
    "ParsedCaption",
    "PipelineConfig",
    "PipelineError",
    "PipelineStats",
    "RegionLabelSet",
    "RetrievalReport",
    "STATUS_FALLBACK",
    "STATUS_SINGLETON",
    "STATUS_UNIQUE_LABEL",
    "SplitterParams",
    "SubcaptionSegment",
    "SubfigureRegion",
    "assign_tokens",
    "compute_stats",
    "config_from_file",
    "eval_report",
    "expand_range",
    "filter_corpus",
    "ingest_detections",
    "is_compound",
    "load_embeddings",
    "load_manifest",
    "match_subfigures",
    "normalize_token",
    "parse_caption",
    "read_ocr_file",
    "recall_at_k",
    "run_pipeline",
    "save_manifest",
    "scan_labels",
    "segment_caption",
    "similarity_matrix",
    "split_compound",
    "validate_record",
    "__version__",
]
