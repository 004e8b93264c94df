"""Error types for the adapter layer.

Exit-code convention matches the downstream pipeline: configuration
problems exit 1, data or model problems exit 2.
"""


class AdapterError(Exception):
    """Base class for everything raised on purpose by this package."""


class ConfigError(AdapterError):
    """Unusable configuration; maps to exit code 1."""


class ModelUnavailable(AdapterError):
    """A configured model identifier has no registered backend."""

    def __init__(self, model_id: str) -> None:
        super().__init__(f"no backend registered for model {model_id!r}")
        self.model_id = model_id


class MissingImage(AdapterError):
    """An embedding input references an image file that does not exist."""

    def __init__(self, pair_id: str, path: str) -> None:
        super().__init__(f"pair {pair_id!r}: image file {path!r} not found")
        self.pair_id = pair_id
        self.path = path


class FormatError(AdapterError):
    """An input file does not follow its documented JSONL shape."""

    def __init__(self, line_no: int, reason: str) -> None:
        super().__init__(f"line {line_no}: {reason}")
        self.line_no = line_no
        self.reason = reason
