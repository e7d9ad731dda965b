"""Sentiment-aware evaluation and data tooling for dialectal Arabic MT."""

__version__ = "0.1.0"

from sentmt.errors import BackendError, BackendUnreachableError, InputError, SentmtError

__all__ = [
    "__version__",
    "SentmtError",
    "InputError",
    "BackendError",
    "BackendUnreachableError",
]
