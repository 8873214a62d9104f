"""Exception types shared across the toolkit.

Validation errors (bad inputs, bad files, bad specs) are distinct from
provider/runtime errors (network, malformed model output); the CLI maps the
former to exit code 1 and the latter to exit code 2.
"""

from __future__ import annotations


class ToneCapError(Exception):
    """Base class for all toolkit errors."""


# ---------------------------------------------------------------------------
# Validation errors


class SchemaError(ToneCapError):
    """A file or payload does not match its documented schema."""

    def __init__(self, message: str, *, line: int | None = None, name: str | None = None):
        self.line = line
        self.name = name
        where = f" (line {line})" if line is not None else ""
        super().__init__(f"{message}{where}")


class RangeError(ToneCapError):
    """A numeric field is outside its legal range."""

    def __init__(self, field: str, value: object, expected: str):
        self.field = field
        self.value = value
        super().__init__(f"{field}={value!r} outside {expected}")


class UnknownAttribute(ToneCapError):
    """An attribute name is not present in the bound inventory."""

    def __init__(self, name: str, kind: str = "attribute"):
        self.name = name
        self.kind = kind
        super().__init__(f"unknown {kind}: {name!r}")


class InventoryMismatch(ToneCapError):
    """Two profiles are not validated against the same inventory."""


class TemplateError(ToneCapError):
    """A prompt template is missing or references an unknown placeholder."""


class RatioError(ToneCapError):
    """Split ratios do not form a valid partition."""


class UnknownVideo(ToneCapError):
    pass


class KTooLarge(ToneCapError):
    pass


class NotEnoughCandidates(ToneCapError):
    pass


class DegenerateTarget(ToneCapError):
    """A target that would make a metric undefined (e.g. word count < 1)."""


class MissingProvenance(ToneCapError):
    """A dataset record lacks the stage captions required for export."""


class RowMismatch(ToneCapError):
    """Benchmark candidate rows do not line up with the task rows."""

    def __init__(self, message: str, video_id: str | None = None):
        self.video_id = video_id
        super().__init__(message)


class DuplicateProposal(ToneCapError):
    """A proposed style duplicates an existing inventory entry."""


# ---------------------------------------------------------------------------
# Provider / runtime errors


class ProviderError(ToneCapError):
    """Base for failures at the model-provider boundary."""


class AuthError(ProviderError):
    pass


class RateLimited(ProviderError):
    pass


class Timeout(ProviderError):
    pass


class TransportError(ProviderError):
    pass


class UpstreamError(ProviderError):
    def __init__(self, status: int, detail: str = ""):
        self.status = status
        super().__init__(f"upstream returned {status}: {detail}" if detail else f"upstream returned {status}")


class ParseError(ProviderError):
    """Provider output could not be parsed/validated, even after one repair retry."""

    def __init__(self, message: str, *, raw: str | None = None):
        self.raw = raw
        super().__init__(message)


class ExtractionError(ToneCapError):
    """Failure inside the four-step extraction pipeline, tagged with the step."""

    def __init__(self, step: int, cause: Exception):
        self.step = step
        self.cause = cause
        super().__init__(f"extraction step {step} failed: {cause}")


class AllCandidatesFailed(ProviderError):
    """Every candidate slot in a generation stage failed."""


VALIDATION_ERRORS = (
    SchemaError,
    RangeError,
    UnknownAttribute,
    InventoryMismatch,
    TemplateError,
    RatioError,
    UnknownVideo,
    KTooLarge,
    NotEnoughCandidates,
    DegenerateTarget,
    MissingProvenance,
    RowMismatch,
    DuplicateProposal,
)
