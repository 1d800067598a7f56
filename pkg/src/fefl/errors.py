"""Exception hierarchy shared across the package."""


class FeflError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(FeflError):
    """Invalid configuration value or malformed scenario file."""


class GroupSetupError(FeflError):
    """Prime/group generation failed within the retry budget."""


class CapacityError(FeflError):
    """A precomputed structure would exceed its configured memory cap."""


class DlogRangeError(FeflError):
    """No discrete log found within the requested bound.

    At the protocol level this signals a misconfigured aggregation bound:
    the decrypted sum fell outside the range the solver was told to search.
    """


class NoSlotError(FeflError):
    """All provisioned key slots are assigned."""


class DimensionError(FeflError):
    """Vector or model dimensions do not match the expected layout."""


class EncodingError(FeflError):
    """A value cannot be represented in the fixed-point integer domain."""


class ProtocolError(FeflError):
    """Messages or key material are inconsistent with protocol state."""


class KeyRequestRejected(FeflError):
    """The inference-prevention filter refused a weighted vector.

    ``reason`` is machine readable: ``"too-few-nonzero"`` or ``"non-uniform"``.
    """

    def __init__(self, reason: str, detail: str = ""):
        self.reason = reason
        super().__init__(f"function key request rejected ({reason})"
                         + (f": {detail}" if detail else ""))


class TrainingFailedError(FeflError):
    """No epoch reached quorum; carries the collected per-epoch metrics."""

    def __init__(self, message: str, metrics=None):
        self.metrics = metrics or []
        super().__init__(message)
