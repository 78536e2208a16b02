"""Exception types shared across the package."""


class LitmineError(Exception):
    """Base class for all litmine errors."""


class InvalidInputError(LitmineError, ValueError):
    """An operation received input that violates its preconditions."""


class InvalidParameterError(LitmineError, ValueError):
    """A configuration or algorithm parameter is out of its legal range."""


class CorruptIndexError(LitmineError):
    """A serialized artifact is truncated, malformed, or version-incompatible."""


class ProviderError(LitmineError):
    """A pluggable model provider (embedder, extractor, classifier, generator) failed."""


class ConsistencyError(LitmineError):
    """Internal cross-module consistency was violated (indicates a bug upstream)."""


class SessionNotFoundError(LitmineError, KeyError):
    """A session id was not present in the session store."""
