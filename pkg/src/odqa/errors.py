"""Exception types shared across the engine.

Every operation that can fail raises one of these instead of a bare
ValueError/RuntimeError, so callers (pipeline, service, CLI) can map
failure classes to distinct behaviours and exit codes.
"""


class OdqaError(Exception):
    """Base class for all engine errors."""


class DomainError(OdqaError):
    """A value is outside the domain an operation is defined on."""


class ConfigError(OdqaError):
    """Invalid or missing configuration."""


class NetworkError(OdqaError):
    """Connect failure or timeout talking to a remote service."""


class ProtocolError(OdqaError):
    """A remote service answered, but the response is not parseable."""


class AuthError(OdqaError):
    """Missing or rejected credentials (HTTP 401/403)."""


class QuotaError(OdqaError):
    """Provider rate limit or quota exhausted (HTTP 429)."""


class FixtureFormatError(OdqaError):
    """Recorded search fixtures are malformed."""


class NoContentWords(OdqaError):
    """Content-word filtering left zero query terms."""


class NonFiniteInput(OdqaError):
    """A numeric vector contains NaN or infinity."""


class NoContextTokens(OdqaError):
    """Inference output has no tokens mapped into the context."""


class BackendError(OdqaError):
    """Inference backend failure (wraps network/protocol causes)."""


class SearchFailed(OdqaError):
    """Every issued search query errored; no hits available."""


class NoResults(OdqaError):
    """Searches succeeded but the merged hit list is empty."""


class ParseError(OdqaError):
    """Corpus text is malformed; carries the offending line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class BracketError(OdqaError):
    """Unbalanced or nested bracket groups in a template."""
