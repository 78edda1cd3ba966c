"""Shared exception hierarchy.

Every error raised by this package derives from :class:`CsForgeError` so
callers (the CLI in particular) can distinguish pipeline failures from
programming errors.
"""


class CsForgeError(Exception):
    """Base class for all cs-forge errors."""


class ManifestError(CsForgeError):
    """Malformed manifest file or violated manifest invariant."""


class ConfigError(CsForgeError):
    """Invalid configuration value."""


class AudioError(CsForgeError):
    """Unreadable, unsupported, or out-of-range audio."""


class RuleViolationError(CsForgeError):
    """A review decision violates the Spanish-run acceptance rule."""


class AlreadyDecidedError(CsForgeError):
    """A decision was attempted on a candidate that is no longer pending."""


class TransportError(CsForgeError):
    """A service request failed after exhausting retries."""

    def __init__(self, message: str, status: int | None = None, body: str | None = None):
        super().__init__(message)
        self.status = status
        self.body = body
