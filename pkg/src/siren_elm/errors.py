"""
Exception hierarchy for siren-elm.

Library code raises; the CLI turns exceptions into the structured envelope:
  {"success": false, "error": "...", "code": "..."}
"""

from __future__ import annotations


class SirenElmError(Exception):
    """Base class. ``code`` is the stable identifier used by the CLI envelope."""

    code = "INTERNAL_ERROR"

    def to_envelope(self) -> dict[str, object]:
        return {"success": False, "error": str(self), "code": self.code}


# ---------------------------------------------------------------------------
# Ingestion
# ---------------------------------------------------------------------------


class FormatError(SirenElmError):
    code = "FORMAT_ERROR"


class UnsupportedCodecError(FormatError):
    code = "UNSUPPORTED_CODEC"


class EmptyInputError(SirenElmError):
    code = "EMPTY_INPUT"


class IngestionError(SirenElmError):
    """A manifest row could not be turned into a clip; message names the file."""

    code = "INGESTION_ERROR"

    def __init__(self, message: str, path: str | None = None):
        super().__init__(message)
        self.path = path


class RateMismatchError(IngestionError):
    code = "RATE_MISMATCH"


class ManifestError(SirenElmError):
    code = "MANIFEST_ERROR"


# ---------------------------------------------------------------------------
# Numerics / configuration
# ---------------------------------------------------------------------------


class DomainError(SirenElmError):
    code = "DOMAIN_ERROR"


class TooShortError(SirenElmError):
    code = "TOO_SHORT"


class ConfigError(SirenElmError):
    code = "CONFIG_ERROR"


class StateError(SirenElmError):
    code = "STATE_ERROR"


class InsufficientDataError(SirenElmError):
    code = "INSUFFICIENT_DATA"


class DegenerateDataError(SirenElmError):
    code = "DEGENERATE_DATA"


class DimensionError(SirenElmError):
    code = "DIMENSION_ERROR"


class NumericError(SirenElmError):
    code = "NUMERIC_ERROR"


# ---------------------------------------------------------------------------
# Model files / CLI
# ---------------------------------------------------------------------------


class ModelFormatError(SirenElmError):
    code = "MODEL_FORMAT"


class UnsupportedVersionError(ModelFormatError):
    code = "UNSUPPORTED_VERSION"


class UnsupportedModelError(SirenElmError):
    code = "UNSUPPORTED_MODEL"


class OutputExistsError(SirenElmError):
    code = "OUTPUT_EXISTS"
