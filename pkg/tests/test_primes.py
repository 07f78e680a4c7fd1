import math
import struct

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from zhlab.errors import CacheCorruptError, InvalidArgumentError, ResourceLimitError
from zhlab.primes import (
    HEADER,
    MAGIC,
    PrimeStore,
    load_or_build_cache,
    read_cache,
    sieve_segmented,
    write_cache,
)


def trial_division_primes(n):
    out = []
    for k in range(2, n + 1):
        if all(k % p for p in out if p * p <= k):
            out.append(k)
    return out


def test_small_counts():
    assert sieve_segmented(2).primes.tolist() == [2]
    assert sieve_segmented(3).primes.tolist() == [2, 3]
    assert sieve_segmented(30).primes.tolist() == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]


def test_pi_million(small_store):
    assert small_store.count == 78498
    assert small_store.primes[-1] == 999983


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=2, max_value=100_000))
def test_counting_oracle(limit):
    store = sieve_segmented(limit, segment_size=1024)
    if limit < 3000:
        assert store.primes.tolist() == trial_division_primes(limit)
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    for i in range(2, math.isqrt(limit) + 1):
        if flags[i]:
            flags[i * i :: i] = False
    assert store.count == int(flags.sum())


def test_segment_size_invariance():
    ref = sieve_segmented(2_000_003)
    rng = np.random.default_rng(7)
    for s in rng.integers(1024, 300_000, size=5):
        assert np.array_equal(sieve_segmented(2_000_003, int(s)).primes, ref.primes)


def test_store_immutable(small_store):
    with pytest.raises(ValueError):
        small_store.primes[0] = 4


def test_count_upto_and_truncate(small_store):
    assert small_store.count_upto(100) == 25
    t = small_store.truncated(1000)
    assert t.limit == 1000 and t.count == 168


def test_invalid_arguments():
    with pytest.raises(InvalidArgumentError):
        sieve_segmented(1)
    with pytest.raises(InvalidArgumentError):
        sieve_segmented(1000, segment_size=10)


def test_memory_budget_refused_before_allocation():
    with pytest.raises(ResourceLimitError):
        sieve_segmented(10**12, memory_budget=1 << 20)


def test_cache_round_trip(tmp_path, small_store):
    path = tmp_path / "p.zhl"
    write_cache(path, small_store)
    raw = path.read_bytes()
    magic, version, limit, count = HEADER.unpack(raw[: HEADER.size])
    assert (magic, version, limit, count) == (MAGIC, 1, 1_000_000, 78498)
    assert len(raw) == HEADER.size + 8 * count
    back = read_cache(path)
    assert np.array_equal(back.primes, small_store.primes)
    assert back.primes.astype("<u8").tobytes() == raw[HEADER.size :]


def test_load_or_build_reuses_and_truncates(tmp_path):
    path = tmp_path / "p.zhl"
    a = load_or_build_cache(path, 100_000)
    assert a.source == "sieved" and a.count == 9592
    b = load_or_build_cache(path, 10_000)
    assert b.source == "cache" and b.count == 1229
    c = load_or_build_cache(path, 200_000)
    assert c.count == 17984 and read_cache(path).limit == 200_000


@pytest.mark.parametrize(
    "mangle",
    [
        lambda b: b"XXXX" + b[4:],
        lambda b: b[:4] + struct.pack("<I", 9) + b[8:],
        lambda b: b[:-8],
        lambda b: b[:10],
        lambda b: b[: HEADER.size] + b[HEADER.size + 8 : HEADER.size + 16] + b[HEADER.size : HEADER.size + 8] + b[HEADER.size + 16 :],
    ],
    ids=["magic", "version", "short-body", "short-header", "unsorted"],
)
def test_corrupt_cache_detected(tmp_path, mangle):
    path = tmp_path / "p.zhl"
    write_cache(path, sieve_segmented(1000))
    path.write_bytes(mangle(path.read_bytes()))
    with pytest.raises(CacheCorruptError):
        read_cache(path)
    with pytest.raises(CacheCorruptError):
        load_or_build_cache(path, 1000)
    assert load_or_build_cache(path, 1000, force=True).count == 168


def test_empty_store_dataclass():
    s = PrimeStore(1, np.zeros(0, dtype=np.int64))
    assert s.count == 0 and len(s) == 0
