"""Prime densities phi(x) and Phi(x), the residual R, and Chebyshev psi.

lambda is the primary coordinate, with x = exp(2 lambda) throughout.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import kernels
from .errors import DomainError, InvalidArgumentError, TruncationError
from .primes import PrimeStore
from .specfun import constant_Cm
from .zeros import ZerosTable, residue_sum_Z

DEFAULT_CUTOFF = 60.0
SINGULAR_GAP = 1e-9  # explicit formula refuses u - 1 below this
C2 = constant_Cm(2).value
C3 = constant_Cm(3).value


@dataclass(frozen=True)
class DensitySample:
    lam: float
    x: float
    phi: float
    Phi: float
    R: float
    p_max_used: int
    tail_bound: float
    terms: int


class PhiValue(NamedTuple):
    phi: float
    p_max_used: int
    tail_bound: float


def required_limit(x: float, cutoff: float = DEFAULT_CUTOFF) -> int:
    """Smallest prime bound P with P^2 pi x >= cutoff."""
    return int(math.ceil(math.sqrt(cutoff / (math.pi * x))))


def tail_bound(x: float, q: float) -> float:
    """Bound on sum_{n > q} exp(-n^2 pi x) ln n.

    The first omitted term n1 = floor(q) + 1 is kept exactly and the rest is
    bounded by the integral from n1, using ln t <= ln n1 + (t - n1)/n1 and
    exp(-a t^2) <= exp(-a n1^2 - 2 a n1 (t - n1)).  Valid once the summand
    decreases (2 a n1^2 ln n1 > 1), which the exponent cutoff guarantees.
    """
    a = math.pi * x
    n1 = float(math.floor(q) + 1)
    head = math.exp(-a * n1 * n1)
    return head * (math.log(n1) + math.log(n1) / (2.0 * a * n1) + 1.0 / (4.0 * a * a * n1 ** 3))


def _plan(x: float, store: PrimeStore, cutoff: float):
    if not (x > 0.0) or not math.isfinite(x):
        raise DomainError(f"x must be positive and finite, got {x!r}")
    if store.count == 0:
        raise InvalidArgumentError("prime store is empty")
    p_cut = math.sqrt(cutoff / (math.pi * x))
    if store.limit < p_cut:
        need = required_limit(x, cutoff)
        raise TruncationError(
            f"phi at x = {x:.6g} needs primes up to {need}, store holds primes <= {store.limit}",
            required_limit=need,
        )
    q = max(math.floor(p_cut), 2)
    count = max(store.count_upto(q), 1)
    return count, q


def _epsilon(x: float, phi: float) -> float:
    return 1e-15 * max(1.0, abs(2.0 * math.sqrt(x) * phi))


def phi_many(xs, store: PrimeStore, cutoff: float = DEFAULT_CUTOFF, segmented: bool = False):
    """phi at many x; returns (phi array, counts array, tail bound array).

    The per-x sums are compensated and run over x in parallel; within one x
    the order is fixed (ascending primes, or fixed-size chunks if ``segmented``).
    """
    xs = np.asarray(xs, dtype=np.float64).reshape(-1)
    counts = np.empty(xs.size, dtype=np.int64)
    bounds = np.empty(xs.size)
    for i, x in enumerate(xs):
        counts[i], q = _plan(float(x), store, cutoff)
        bounds[i] = tail_bound(float(x), q)
    a = math.pi * xs
    phi = kernels.phi_sums(store.squares, store.logs, a, counts, segmented=segmented)
    for i, x in enumerate(xs):
        eps = _epsilon(float(x), phi[i])
        if not bounds[i] < eps:
            raise TruncationError(f"tail bound {bounds[i]:.3g} at x = {x:.6g} exceeds {eps:.3g}; raise the cutoff")
    return phi, counts, bounds


def phi_density(x: float, store: PrimeStore, cutoff: float = DEFAULT_CUTOFF, segmented: bool = False) -> PhiValue:
    """phi(x) = sum_p exp(-p^2 pi x) ln p over primes with p^2 pi x <= cutoff."""
    phi, counts, bounds = phi_many([float(x)], store, cutoff, segmented)
    return PhiValue(float(phi[0]), int(store.primes[counts[0] - 1]), float(bounds[0]))


def _sample(lam: float, x: float, phi: float, count: int, bound: float, store: PrimeStore) -> DensitySample:
    sx = math.sqrt(x)
    quarter = math.sqrt(sx)
    Phi = (2.0 * sx * phi - 1.0) / quarter
    R = Phi - C2 - C3 * x ** (1.0 / 12.0)
    return DensitySample(lam, x, phi, Phi, R, int(store.primes[count - 1]), bound, int(count))


def Phi_batch(lams, store: PrimeStore, cutoff: float = DEFAULT_CUTOFF, segmented: bool = False) -> list:
    lams = np.asarray(lams, dtype=np.float64).reshape(-1)
    xs = np.exp(2.0 * lams)
    phi, counts, bounds = phi_many(xs, store, cutoff, segmented)
    return [
        _sample(float(l), float(x), float(p), int(c), float(b), store)
        for l, x, p, c, b in zip(lams, xs, phi, counts, bounds)
    ]


def Phi_normalized(lam: float, store: PrimeStore, cutoff: float = DEFAULT_CUTOFF) -> DensitySample:
    """Phi(x) = (2 sqrt(x) phi(x) - 1) / x^(1/4) at x = exp(2 lambda), with R = Phi - C_2 - C_3 x^(1/12)."""
    return Phi_batch([lam], store, cutoff)[0]


def theorem_prediction(lam, table: ZerosTable):
    """(+Z(lambda), -Z(lambda)): both sign conventions for the oscillatory part of R."""
    z = residue_sum_Z(table, lam)
    return z, -z


# ---------------------------------------------------------------------------
# Chebyshev functions and the explicit formula


@dataclass(frozen=True)
class ChebyshevSample:
    u: float
    psi: float
    vartheta: float
    lhs: float
    rhs_truncated: float = math.nan
    zeros_used: int = 0


def _iroot(n: int, k: int) -> int:
    """floor(n^(1/k)) in integer arithmetic."""
    if n < 2 or k == 1:
        return n
    r = int(round(n ** (1.0 / k)))
    while r ** k > n:
        r -= 1
    while (r + 1) ** k <= n:
        r += 1
    return r


def _theta_int(store: PrimeStore, n: int) -> float:
    return math.fsum(store.logs[: store.count_upto(n)])


def chebyshev_psi(u: float, store: PrimeStore) -> ChebyshevSample:
    """psi(u) = sum_{p^k <= u} ln p and vartheta(u) = sum_{p <= u} ln p."""
    u = float(u)
    if u < 2.0:
        raise DomainError(f"chebyshev_psi needs u >= 2, got {u}")
    if u > store.limit:
        raise TruncationError(f"u = {u:g} exceeds the prime store limit {store.limit}", required_limit=math.ceil(u))
    n = int(math.floor(u))
    theta = _theta_int(store, n)
    parts = [theta]
    k = 2
    while 2 ** k <= n:
        parts.append(_theta_int(store, _iroot(n, k)))
        k += 1
    psi = math.fsum(parts)
    return ChebyshevSample(u, psi, theta, (psi - u) / math.sqrt(u))


def explicit_formula_rhs(u: float, table: ZerosTable, K: int) -> float:
    """-sum_{k<=K} 2 Re(u^(z_k - 1/2) / z_k) - (ln 2 pi + ln sqrt(1 - u^-2)) / sqrt(u)."""
    u = float(u)
    if not u > 1.0:
        raise DomainError(f"explicit formula needs u > 1, got {u}")
    K = int(K)
    if K < 0 or K > len(table):
        raise InvalidArgumentError(f"K = {K} outside [0, {len(table)}]")
    lu = math.log(u)
    if u - 1.0 < SINGULAR_GAP:
        # ln sqrt(1 - u^-2) is singular at u = 1 and 1 - u^-2 loses all accuracy near it
        raise DomainError(f"u = {u!r} is too close to the singularity at u = 1")
    corr = 1.0 - u ** -2.0
    terms = []
    for e in table.entries[:K]:
        z = e.z
        terms.append(2.0 * (cmath.exp((z - 0.5) * lu) / z).real)
    zsum = math.fsum(terms)
    return -zsum - (math.log(2.0 * math.pi) + 0.5 * math.log(corr)) / math.sqrt(u)


def chebyshev_sample(u: float, store: PrimeStore, table: ZerosTable, K: int) -> ChebyshevSample:
    s = chebyshev_psi(u, store)
    rhs = explicit_formula_rhs(u, table, K)
    return ChebyshevSample(s.u, s.psi, s.vartheta, s.lhs, rhs, int(K))
