"""Error types shared across the index variants."""


class DuplicateKeyError(ValueError):
    """Raised when an insert would reuse a coordinate that is already stored."""
