"""zhlab: prime densities, zeta zeros and their spectral comparison."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    CacheCorruptError,
    DomainError,
    InvalidArgumentError,
    NearZeroError,
    ParseError,
    PoleError,
    ResourceLimitError,
    SaddleStallError,
    TruncationError,
    UnsupportedRangeError,
    ZhlError,
)

__all__ = [
    "__version__",
    "CacheCorruptError",
    "DomainError",
    "InvalidArgumentError",
    "NearZeroError",
    "ParseError",
    "PoleError",
    "ResourceLimitError",
    "SaddleStallError",
    "TruncationError",
    "UnsupportedRangeError",
    "ZhlError",
]
