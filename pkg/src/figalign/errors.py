"""Exception hierarchy shared by all pipeline stages.

Two branches matter to callers: ConfigError (bad paths, bad CLI usage,
exit code 1) and DataError (schema or content violations in an input
file, exit code 2).
"""

from __future__ import annotations


class PipelineError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(PipelineError):
    """Usage or configuration problem (CLI exit code 1)."""


class DataError(PipelineError):
    """Schema or data problem in an input file (CLI exit code 2)."""


class MissingFile(ConfigError):
    def __init__(self, path: object) -> None:
        super().__init__(f"file not found: {path}")
        self.path = str(path)


class IoFailure(ConfigError):
    def __init__(self, path: object, reason: str) -> None:
        super().__init__(f"cannot access {path}: {reason}")
        self.path = str(path)
        self.reason = reason


class MalformedLine(DataError):
    def __init__(self, line_no: int, reason: str) -> None:
        super().__init__(f"line {line_no}: {reason}")
        self.line_no = line_no
        self.reason = reason


class DuplicateId(DataError):
    def __init__(self, duplicate_id: str, line_no: int | None = None) -> None:
        where = f" (line {line_no})" if line_no is not None else ""
        super().__init__(f"duplicate id {duplicate_id!r}{where}")
        self.duplicate_id = duplicate_id
        self.line_no = line_no


class DanglingReference(DataError):
    def __init__(self, pair_id: str, figure_id: str, line_no: int | None = None) -> None:
        where = f" (line {line_no})" if line_no is not None else ""
        super().__init__(
            f"pair {pair_id!r} references unknown figure {figure_id!r}{where}"
        )
        self.pair_id = pair_id
        self.figure_id = figure_id
        self.line_no = line_no


class UnparsableBody(DataError):
    """A candidate label body is not a letter, list, or ascending range."""

    def __init__(self, body: str) -> None:
        super().__init__(f"unparsable label body: {body!r}")
        self.body = body


class SchemaViolation(DataError):
    def __init__(self, line_no: int, reason: str) -> None:
        super().__init__(f"line {line_no}: {reason}")
        self.line_no = line_no
        self.reason = reason


class UnknownFigure(DataError):
    def __init__(self, figure_id: str) -> None:
        super().__init__(f"detections reference unknown figure {figure_id!r}")
        self.figure_id = figure_id


class OutOfBounds(DataError):
    def __init__(self, figure_id: str, box: object) -> None:
        super().__init__(f"box {box} exceeds image bounds of figure {figure_id!r}")
        self.figure_id = figure_id
        self.box = box


class MixedFigureIds(DataError):
    def __init__(self, figure_ids: object) -> None:
        super().__init__(f"inputs span multiple figures: {sorted(map(str, figure_ids))}")
        self.figure_ids = figure_ids


class EmptyRegions(DataError):
    def __init__(self) -> None:
        super().__init__("matching requires at least one region")


class DimensionMismatch(DataError):
    def __init__(self, line_no: int, expected: int, got: int) -> None:
        super().__init__(f"line {line_no}: vector has dim {got}, expected {expected}")
        self.line_no = line_no
        self.expected = expected
        self.got = got


class ZeroVector(DataError):
    def __init__(self, vector_id: str) -> None:
        super().__init__(f"embedding {vector_id!r} has zero norm")
        self.vector_id = vector_id


class DimMismatch(DataError):
    def __init__(self, dim_a: int, dim_b: int) -> None:
        super().__init__(f"embedding dims differ: {dim_a} vs {dim_b}")
        self.dim_a = dim_a
        self.dim_b = dim_b


class IdSetMismatch(DataError):
    def __init__(self, only_a: set[str], only_b: set[str]) -> None:
        super().__init__(
            f"id sets differ: {len(only_a)} only in first, {len(only_b)} only in second"
        )
        self.only_a = only_a
        self.only_b = only_b


class NotSquare(DataError):
    def __init__(self, shape: tuple[int, ...]) -> None:
        super().__init__(f"similarity matrix must be square, got {shape}")
        self.shape = shape


class KOutOfRange(DataError):
    def __init__(self, k: int, n: int) -> None:
        super().__init__(f"k={k} outside valid range 1..{n}")
        self.k = k
        self.n = n
