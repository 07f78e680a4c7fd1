"""Hot numeric kernels: segmented sieve, Gaussian-weighted prime sums, eta series.

Each kernel has a numba implementation (``*_numba``) and a pure-numpy one
(``*_numpy``).  The public wrappers dispatch on :func:`zhlab._backend.backend`.
The numba versions never use ``fastmath``: the compensated sums rely on
strict IEEE evaluation order.
"""
import cmath
import math

import numpy as np

from ._backend import backend, njit, prange

# ---------------------------------------------------------------------------
# segmented sieve over odd numbers; odd index j <-> 3 + 2j


@njit
def sieve_numba(limit, seg_odd, base, out):
    pos = 0
    if limit >= 2:
        out[0] = 2
        pos = 1
    n_odd = (limit - 1) // 2
    bits = np.zeros((seg_odd + 7) // 8, dtype=np.uint8)
    nb = base.shape[0]
    nxt = np.empty(nb, dtype=np.int64)
    for i in range(nb):
        p = base[i]
        nxt[i] = (p * p - 3) // 2
    j0 = 0
    while j0 < n_odd:
        m = min(seg_odd, n_odd - j0)
        bits[:] = 0
        hi = 3 + 2 * (j0 + m - 1)
        for i in range(nb):
            p = base[i]
            if p * p > hi:
                break
            k = nxt[i] - j0
            while k < m:
                bits[k >> 3] |= np.uint8(1 << (k & 7))
                k += p
            nxt[i] = k + j0
        for k in range(m):
            if not (bits[k >> 3] >> (k & 7)) & 1:
                out[pos] = 3 + 2 * (j0 + k)
                pos += 1
        j0 += m
    return pos


def sieve_numpy(limit, seg_odd, base, out):
    # byte-per-candidate flags; numpy has no cheap strided bit writes
    pos = 0
    if limit >= 2:
        out[0] = 2
        pos = 1
    n_odd = (limit - 1) // 2
    flags = np.empty(seg_odd, dtype=bool)
    base = [int(p) for p in base]
    nxt = [(p * p - 3) // 2 for p in base]
    j0 = 0
    while j0 < n_odd:
        m = min(seg_odd, n_odd - j0)
        seg = flags[:m]
        seg[:] = True
        hi = 3 + 2 * (j0 + m - 1)
        for i, p in enumerate(base):
            if p * p > hi:
                break
            k = nxt[i] - j0
            if k < m:
                seg[k::p] = False
                k += ((m - 1 - k) // p + 1) * p
            nxt[i] = k + j0
        idx = np.flatnonzero(seg)
        out[pos:pos + idx.size] = 3 + 2 * (j0 + idx)
        pos += idx.size
        j0 += m
    return pos


def sieve(limit, seg_odd, base, out):
    if backend() == "numba":
        return int(sieve_numba(limit, seg_odd, base, out))
    return sieve_numpy(limit, seg_odd, base, out)


# ---------------------------------------------------------------------------
# phi(x) = sum_p exp(-p^2 pi x) ln p, for many x at once


@njit(parallel=True)
def phi_sums_numba(p2, logp, a, counts, out):
    for i in prange(a.shape[0]):
        ai = a[i]
        s = 0.0
        c = 0.0
        for k in range(counts[i]):
            y = math.exp(-ai * p2[k]) * logp[k] - c
            t = s + y
            c = (t - s) - y
            s = t
        out[i] = s - c


@njit(parallel=True)
def _chunk_partials_numba(p2, logp, ai, count, chunk, part, comp):
    nchunks = part.shape[0]
    for j in prange(nchunks):
        lo = j * chunk
        hi = min(count, lo + chunk)
        s = 0.0
        c = 0.0
        for k in range(lo, hi):
            y = math.exp(-ai * p2[k]) * logp[k] - c
            t = s + y
            c = (t - s) - y
            s = t
        part[j] = s
        comp[j] = c


@njit
def _combine_numba(part, comp):
    s = 0.0
    c = 0.0
    for j in range(part.shape[0]):
        y = (part[j] - comp[j]) - c
        t = s + y
        c = (t - s) - y
        s = t
    return s - c


def phi_sums_segmented_numba(p2, logp, a, counts, out, chunk=1 << 16):
    for i in range(a.shape[0]):
        n = int(counts[i])
        nchunks = max(1, -(-n // chunk))
        part = np.zeros(nchunks)
        comp = np.zeros(nchunks)
        _chunk_partials_numba(p2, logp, float(a[i]), n, chunk, part, comp)
        out[i] = _combine_numba(part, comp)


def kahan_lanes(terms, lanes=4096):
    """Compensated sum: Kahan across ``lanes`` interleaved partial sums, exact merge."""
    terms = np.asarray(terms, dtype=np.float64)
    n = terms.size
    if n <= lanes:
        return math.fsum(terms)
    rows = -(-n // lanes)
    padded = np.zeros(rows * lanes)
    padded[:n] = terms
    grid = padded.reshape(rows, lanes)
    s = np.zeros(lanes)
    c = np.zeros(lanes)
    for row in grid:
        y = row - c
        t = s + y
        c = (t - s) - y
        s = t
    return math.fsum(np.concatenate([s, -c]))


def phi_sums_numpy(p2, logp, a, counts, out):
    for i in range(a.shape[0]):
        n = int(counts[i])
        out[i] = kahan_lanes(np.exp(-a[i] * p2[:n]) * logp[:n])


def phi_sums(p2, logp, a, counts, segmented=False):
    a = np.ascontiguousarray(a, dtype=np.float64)
    counts = np.ascontiguousarray(counts, dtype=np.int64)
    out = np.empty(a.shape[0])
    if backend() == "numba":
        if segmented:
            phi_sums_segmented_numba(p2, logp, a, counts, out)
        else:
            phi_sums_numba(p2, logp, a, counts, out)
    else:
        phi_sums_numpy(p2, logp, a, counts, out)
    return out


# ---------------------------------------------------------------------------
# accelerated alternating series: sum_k coef_k (k+1)^-s and its s-derivative


@njit
def eta_numba(s, coef, logk):
    acc = 0j
    dacc = 0j
    for k in range(coef.shape[0]):
        t = coef[k] * cmath.exp(-s * logk[k])
        acc += t
        dacc -= t * logk[k]
    return acc, dacc


def eta_numpy(s, coef, logk):
    t = coef * np.exp(-s * logk)
    return complex(t.sum()), complex(-(t * logk).sum())


def eta(s, coef, logk):
    if backend() == "numba":
        return eta_numba(complex(s), coef, logk)
    return eta_numpy(complex(s), coef, logk)
