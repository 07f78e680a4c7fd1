"""Segmented sieve and the on-disk prime cache.

Cache layout (little-endian)::

    magic      4 bytes  b"ZHL1"
    version    u32      1
    limit      u64      inclusive sieve bound
    count      u64      number of primes stored
    body       count x u64, ascending
"""
from __future__ import annotations

import logging
import math
import os
import struct
import tempfile
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

from . import kernels
from .errors import CacheCorruptError, InvalidArgumentError, ResourceLimitError

log = logging.getLogger(__name__)

MAGIC = b"ZHL1"
FORMAT_VERSION = 1
HEADER = struct.Struct("<4sIQQ")

DEFAULT_SEGMENT_SIZE = 1 << 20
PROFILES = {"desk": 50_000_000, "large": 1_000_000_000}
DEFAULT_MEMORY_BUDGET = 4 << 30


@dataclass(frozen=True, eq=False)
class PrimeStore:
    """All primes up to ``limit`` (inclusive), ascending, immutable."""

    limit: int
    primes: np.ndarray = field(repr=False)
    source: str = "sieved"

    def __post_init__(self):
        self.primes.setflags(write=False)

    @property
    def count(self) -> int:
        return int(self.primes.size)

    def __len__(self):
        return self.count

    @cached_property
    def squares(self) -> np.ndarray:
        """p^2 as float64 (exact while p < 2^26.5)."""
        return self.primes.astype(np.float64) ** 2

    @cached_property
    def logs(self) -> np.ndarray:
        return np.log(self.primes.astype(np.float64))

    def count_upto(self, n) -> int:
        """Number of stored primes <= n."""
        return int(np.searchsorted(self.primes, int(math.floor(n)), side="right"))

    def truncated(self, limit: int) -> "PrimeStore":
        if limit >= self.limit:
            return self
        return PrimeStore(int(limit), self.primes[: self.count_upto(limit)].copy(), self.source)


def prime_count_upper_bound(n: int) -> int:
    """Cheap upper bound on pi(n) (Rosser and Schoenfeld, n > 1)."""
    if n < 17:
        return 7
    return int(1.25506 * n / math.log(n)) + 1


def memory_estimate(limit: int, segment_size: int) -> int:
    base = math.isqrt(limit)
    return 8 * prime_count_upper_bound(limit) + segment_size + 16 * prime_count_upper_bound(max(base, 17))


def _memory_budget() -> int:
    env = os.environ.get("ZHL_MEMORY_BUDGET")
    return int(float(env)) if env else DEFAULT_MEMORY_BUDGET


def _small_primes(n: int) -> np.ndarray:
    """Odd primes 3..n by a plain (unsegmented) sieve; n is at most sqrt(limit)."""
    if n < 3:
        return np.zeros(0, dtype=np.int64)
    flags = np.ones(n + 1, dtype=bool)
    flags[:2] = False
    flags[4::2] = False
    for i in range(3, math.isqrt(n) + 1, 2):
        if flags[i]:
            flags[i * i :: 2 * i] = False
    p = np.flatnonzero(flags).astype(np.int64)
    return p[p > 2]


def sieve_segmented(limit: int, segment_size: int = DEFAULT_SEGMENT_SIZE, memory_budget: int | None = None) -> PrimeStore:
    """Sieve all primes <= ``limit`` segment by segment.

    Memory is O(sqrt(limit) + segment_size) plus the output array.  The
    result does not depend on ``segment_size``.
    """
    limit = int(limit)
    segment_size = int(segment_size)
    if limit < 2:
        raise InvalidArgumentError(f"limit must be >= 2, got {limit}")
    if segment_size < 1024:
        raise InvalidArgumentError(f"segment_size must be >= 1024, got {segment_size}")
    budget = _memory_budget() if memory_budget is None else int(memory_budget)
    need = memory_estimate(limit, segment_size)
    if need > budget:
        raise ResourceLimitError(f"sieving to {limit} needs ~{need} bytes, budget is {budget}")

    base = _small_primes(math.isqrt(limit))
    out = np.empty(prime_count_upper_bound(limit), dtype=np.int64)
    n = kernels.sieve(limit, max(segment_size // 2, 512), base, out)
    return PrimeStore(limit, out[:n].copy(), "sieved")


# ---------------------------------------------------------------------------
# cache


def write_cache(path, store: PrimeStore) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(HEADER.pack(MAGIC, FORMAT_VERSION, store.limit, store.count))
            fh.write(store.primes.astype("<u8").tobytes())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_cache(path) -> PrimeStore:
    path = Path(path)
    size = path.stat().st_size
    with open(path, "rb") as fh:
        head = fh.read(HEADER.size)
        if len(head) < HEADER.size:
            raise CacheCorruptError(f"{path}: truncated header")
        magic, version, limit, count = HEADER.unpack(head)
        if magic != MAGIC:
            raise CacheCorruptError(f"{path}: bad magic {magic!r}")
        if version != FORMAT_VERSION:
            raise CacheCorruptError(f"{path}: unsupported format version {version}")
        if size != HEADER.size + 8 * count:
            raise CacheCorruptError(f"{path}: expected {count} primes, file holds {(size - HEADER.size) / 8:g}")
        primes = np.fromfile(fh, dtype="<u8", count=count).astype(np.int64)
    if count and (primes[0] != 2 or primes[-1] > limit or np.any(np.diff(primes) <= 0)):
        raise CacheCorruptError(f"{path}: body is not an ascending prime list bounded by {limit}")
    return PrimeStore(int(limit), primes, "cache")


def default_cache_path() -> Path:
    root = os.environ.get("ZHL_CACHE_DIR")
    base = Path(root) if root else Path.home() / ".cache" / "zhlab"
    return base / "primes.zhl"


def load_or_build_cache(path, limit: int, segment_size: int = DEFAULT_SEGMENT_SIZE, force: bool = False) -> PrimeStore:
    """Load primes <= ``limit`` from ``path``, sieving and rewriting it when needed.

    A cache whose header fails validation raises :class:`CacheCorruptError`
    unless ``force`` is set, in which case it is rebuilt.
    """
    path = Path(path) if path is not None else default_cache_path()
    if path.exists():
        try:
            store = read_cache(path)
        except CacheCorruptError:
            if not force:
                raise
            log.warning("rebuilding corrupt cache %s", path)
        else:
            if store.limit >= limit:
                return store.truncated(limit)
            log.info("cache %s holds limit %d < %d; rebuilding", path, store.limit, limit)
    store = sieve_segmented(limit, segment_size)
    write_cache(path, store)
    return store
