"""Exception types shared across the toolkit."""


class SentmtError(Exception):
    """Base class for all toolkit errors."""


class InputError(SentmtError):
    """Bad user input: malformed files, misaligned corpora, unknown config keys.

    The CLI maps this to exit code 2.
    """


class BackendError(SentmtError):
    """A translation backend call failed after its configured retries."""


class BackendUnreachableError(BackendError):
    """The backend failed repeatedly enough to be considered down.

    Carries the triples completed before the abort so callers can persist
    partial output.
    """

    def __init__(self, message, completed=None):
        super().__init__(message)
        self.completed = list(completed) if completed is not None else []
