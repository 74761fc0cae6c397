from __future__ import annotations


class ToolkitError(ValueError):
    """Failure with a stable, machine-readable reason code.

    ``code`` (e.g. ``"undefined-wer"``, ``"pairing"``) is what the CLI puts in
    its error records; the message is for humans.
    """

    def __init__(self, code: str, message: str | None = None):
        super().__init__(message or code)
        self.code = code
