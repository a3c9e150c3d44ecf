"""Exception hierarchy shared across the pipeline.

Two broad classes matter at the CLI boundary: bad or inconsistent input
data (exit code 2) and model/transcript failures (exit code 3). Every
error raised by the package derives from PaperxError so the CLI can map
exceptions to exit codes totally.
"""

from __future__ import annotations


class PaperxError(Exception):
    """Base class for all package errors."""

    exit_code = 1


class InputError(PaperxError):
    """Invalid input data, configuration, or validation failure."""

    exit_code = 2


class LlmError(PaperxError):
    """Model, transcript, or structured-output failure."""

    exit_code = 3


# --- input side ------------------------------------------------------------

class MissingMarkdown(InputError):
    pass


class MissingImage(InputError):
    pass


class UnreadableImage(InputError):
    pass


class EmptyPaper(InputError):
    pass


class MetadataMissing(InputError):
    pass


class InvalidDag(InputError):
    def __init__(self, violations: list[str]):
        super().__init__("invalid dag: " + "; ".join(violations))
        self.violations = violations


class ParseError(InputError):
    """Malformed serialized data. ``offset`` is a character offset when known."""

    def __init__(self, reason: str, offset: int | None = None):
        loc = f" at offset {offset}" if offset is not None else ""
        super().__init__(f"parse error{loc}: {reason}")
        self.reason = reason
        self.offset = offset


class BoxTooNarrow(InputError):
    pass


class TemplateMissing(InputError):
    pass


class RendererMissing(InputError):
    pass


class RendererFailed(InputError):
    def __init__(self, message: str, stderr: str = ""):
        super().__init__(message + (f"\nstderr: {stderr}" if stderr else ""))
        self.stderr = stderr


class DimensionMismatch(InputError):
    pass


class InfeasibleAtMinimum(InputError):
    """Poster content cannot fit even at minimum font and image sizes."""

    def __init__(self, overflow_px: float):
        super().__init__(
            f"content overflows the canvas by {overflow_px:.0f}px even at "
            "minimum font and image sizes"
        )
        self.overflow_px = overflow_px


class NoLedger(InputError):
    pass


class ConfigError(InputError):
    pass


# --- model side ------------------------------------------------------------

class TransportError(LlmError):
    pass


class AuthError(LlmError):
    pass


class ReplayMiss(LlmError):
    def __init__(self, stage: str, digest: str):
        super().__init__(f"replay transcript has no entry for stage '{stage}' (digest {digest[:12]}...)")
        self.stage = stage
        self.digest = digest


class NoJsonFound(LlmError):
    pass


class ValidationExhausted(LlmError):
    def __init__(self, stage: str, violations: list[str]):
        super().__init__(
            f"stage '{stage}' failed validation after retries: " + "; ".join(violations)
        )
        self.stage = stage
        self.violations = violations


class SchemaError(LlmError):
    pass


class HallucinationError(LlmError):
    pass


class DeletionViolation(LlmError):
    pass


class SplitDriftError(LlmError):
    pass


class ReportParseError(LlmError):
    pass


class TopologyViolation(LlmError):
    pass
