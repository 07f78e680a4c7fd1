"""Exception hierarchy shared by all modules."""


class ZhlError(Exception):
    """Base class for computation errors (CLI exit code 1)."""

    kind = "error"

    def to_dict(self):
        return {"error": self.kind, "message": str(self)}


class InvalidArgumentError(ZhlError, ValueError):
    kind = "invalid-argument"


class DomainError(ZhlError, ValueError):
    kind = "domain"


class PoleError(DomainError):
    kind = "pole"


class UnsupportedRangeError(ZhlError, ValueError):
    kind = "unsupported-range"


class ResourceLimitError(ZhlError, MemoryError):
    kind = "resource-limit"


class CacheCorruptError(ZhlError):
    kind = "cache-corrupt"


class ParseError(ZhlError, ValueError):
    kind = "parse"

    def __init__(self, message, line=None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line

    def to_dict(self):
        d = super().to_dict()
        if self.line is not None:
            d["line"] = int(self.line)
        return d


class TruncationError(ZhlError):
    """A truncated sum cannot meet its tolerance with the available primes."""

    kind = "truncation-infeasible"

    def __init__(self, message, required_limit=None):
        super().__init__(message)
        self.required_limit = required_limit

    def to_dict(self):
        d = super().to_dict()
        if self.required_limit is not None:
            d["required_limit"] = int(self.required_limit)
        return d


class NearZeroError(ZhlError):
    """|zeta(z)| is below the representable threshold; the caller should treat z as a root."""

    kind = "near-zero"


class SaddleStallError(ZhlError):
    kind = "saddle-stall"

    def __init__(self, message, trajectory=None):
        super().__init__(message)
        self.trajectory = trajectory
