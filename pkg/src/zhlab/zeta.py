"""Riemann zeta, its derivative, the field -zeta'/zeta and the prime sum xi.

zeta(s) for Re s >= 0 comes from the alternating (eta) series with the
Chebyshev-polynomial acceleration of Borwein; the derivative is the same
series differentiated term by term.  Re s < 0 goes through the functional
equation.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import kernels
from .errors import DomainError, NearZeroError, PoleError, TruncationError, UnsupportedRangeError
from .specfun import LOG_PI, as_complex, cospi, cotpi, digamma, log_gamma, log_sinpi, sinpi

MAX_IMAG = 500.0
LOG2 = math.log(2.0)
_RATE = math.log(3.0 + math.sqrt(8.0))
_NEAR_ZERO = 1e-280


@dataclass(frozen=True)
class ZetaValue:
    z: complex
    zeta: complex
    zeta_prime: complex
    est_error: float


def _cexpm1(w: complex) -> complex:
    """exp(w) - 1 without cancellation for small |w|."""
    x, y = w.real, w.imag
    half = math.sin(0.5 * y)
    return complex(math.expm1(x) * math.cos(y) - 2.0 * half * half, math.exp(x) * math.sin(y))


@lru_cache(maxsize=64)
def _coefficients(n: int):
    """(-1)^k (d_n - d_k)/d_n for k < n, and ln(k+1)."""
    i = np.arange(n + 1, dtype=np.float64)
    # log of n (n+i-1)! 4^i / ((n-i)! (2i)!)
    from scipy.special import gammaln

    logt = math.log(n) + gammaln(n + i) + i * math.log(4.0) - gammaln(n - i + 1) - gammaln(2 * i + 1)
    t = np.exp(logt - logt.max())
    tail = np.cumsum(t[::-1])[::-1]  # tail[k] = sum_{i >= k} t_i
    e = tail[1:] / tail[0]
    coef = e * np.where(np.arange(n) % 2 == 0, 1.0, -1.0)
    logk = np.log(np.arange(1, n + 1, dtype=np.float64))
    coef.setflags(write=False)
    logk.setflags(write=False)
    return coef, logk


def _terms_for(s: complex) -> int:
    # |error| <= 2 / ((3 + sqrt 8)^n |Gamma(s)| |1 - 2^(1-s)|); aim below 1e-17
    lg = log_gamma(s).real if s != 0 else 0.0
    need = (math.log(2.0) - lg + 40.0) / _RATE
    return int(min(max(math.ceil(need), 24), 1200))


def _check(z):
    z = as_complex(z)
    if z == 1:
        raise PoleError("zeta has a pole at z = 1")
    if abs(z.imag) > MAX_IMAG:
        raise UnsupportedRangeError(f"|Im z| = {abs(z.imag):g} exceeds {MAX_IMAG:g}")
    return z


def _series(s: complex):
    n = _terms_for(s)
    coef, logk = _coefficients(n)
    eta, deta = kernels.eta(s, coef, logk)
    two = cmath.exp((1.0 - s) * LOG2)
    den = -_cexpm1((1.0 - s) * LOG2)  # 1 - 2^(1-s)
    dden = two * LOG2
    zeta = eta / den
    zeta_p = (deta * den - eta * dden) / (den * den)
    lg = log_gamma(s).real if s != 0 else 0.0
    est = 2.0 * math.exp(-n * _RATE - lg) / abs(den) + 1e-16 * math.sqrt(n) / abs(den)
    return zeta, zeta_p, est


def _reflect(s: complex):
    """zeta(s) = 2^s pi^(s-1) sin(pi s/2) Gamma(1-s) zeta(1-s), differentiated by the product rule."""
    r = 1.0 - s
    zr, zr_p, est = _series(r) if r.real >= 0 else _reflect(r)
    log_g = s * LOG2 + (s - 1.0) * LOG_PI + log_gamma(r)
    psi = digamma(r)
    if abs(s.imag) < 100.0:
        g = cmath.exp(log_g)
        sn, cs = sinpi(0.5 * s), cospi(0.5 * s)
        f = g * sn
        fp = g * ((LOG2 + LOG_PI - psi) * sn + 0.5 * math.pi * cs)
    else:
        f = cmath.exp(log_g + log_sinpi(0.5 * s))
        fp = f * (LOG2 + LOG_PI - psi + 0.5 * math.pi * cotpi(0.5 * s))
    return f * zr, fp * zr - f * zr_p, abs(f) * est


def _evaluate(z: complex):
    # the accelerated series stays accurate down to Re z = -1/2; reflecting
    # only beyond that keeps zeta(1 - z) clear of its pole
    if z.real < -0.5:
        return _reflect(z)
    if abs(-_cexpm1((1.0 - z) * LOG2)) < 1e-6 and abs(z - 1.0) > 1e-3:
        # 1 - 2^(1-z) vanishes at 1 + 2 pi i k / ln 2; reflect instead
        return _reflect(z)
    return _series(z)


def zeta_eval(z) -> ZetaValue:
    """zeta(z) and zeta'(z) for z != 1, |Im z| <= 500."""
    z = _check(z)
    zeta, zeta_p, est = _evaluate(z)
    return ZetaValue(z, zeta, zeta_p, float(est))


def zeta(z) -> complex:
    return zeta_eval(z).zeta


def zeta_derivative(z) -> complex:
    return zeta_eval(z).zeta_prime


def theta_field(z) -> complex:
    """-zeta'(z) / zeta(z)."""
    v = zeta_eval(z)
    if abs(v.zeta) < _NEAR_ZERO:
        raise NearZeroError(f"|zeta({v.z})| < {_NEAR_ZERO:g}")
    return -v.zeta_prime / v.zeta


def newton_field(z) -> complex:
    """-zeta(z) / zeta'(z), the right-hand side of the continuation flow."""
    v = zeta_eval(z)
    return -v.zeta / v.zeta_prime


def chi(s: complex) -> complex:
    """pi^(-s/2) Gamma(s/2)."""
    s = as_complex(s)
    h = 0.5 * s
    try:
        return cmath.exp(log_gamma(h) - h * LOG_PI)
    except DomainError:
        raise DomainError(f"chi has a pole at s = {s}") from None


def functional_equation_residual(z) -> float:
    """|zeta(z) - zeta(1-z) chi(1-z)/chi(z)| / (|zeta(z)| + 1e-30)."""
    z = _check(z)
    w = _check(1.0 - z)
    h, hw = 0.5 * z, 0.5 * w
    try:
        ratio = cmath.exp((log_gamma(hw) - hw * LOG_PI) - (log_gamma(h) - h * LOG_PI))
    except DomainError:
        raise DomainError(f"chi has a pole at {z} or {w}") from None
    lhs = zeta(z)
    rhs = zeta(w) * ratio
    return abs(lhs - rhs) / (abs(lhs) + 1e-30)


# ---------------------------------------------------------------------------
# prime sum xi(z) = sum_p ln(p) p^-z


def _xi_tail(z: complex, limit: int, theta_at_limit: float):
    """Tail sum_{p > L} ln p p^-z ~ L^(1-z)/(z-1) - E(L) L^-z, E = theta - identity.

    Returns (correction, bound) where ``bound`` bounds |exact tail - correction|
    using |E(t)| <= 0.2 t / ln^2 t (t >= 3594641, Dusart) or t / ln t (t >= 41).
    """
    sigma = z.real
    L = float(limit)
    lnL = math.log(L)
    err = theta_at_limit - L
    corr = cmath.exp((1.0 - z) * lnL) / (z - 1.0) - err * cmath.exp(-z * lnL)
    if limit >= 3594641:
        c = 0.2 / (lnL * lnL)
    elif limit >= 41:
        c = 1.0 / lnL
    else:
        return corr, math.inf
    bound = abs(z) * c * math.exp((1.0 - sigma) * lnL) / (sigma - 1.0)
    return corr, bound


def xi_prime_sum(z, store, tol: float = 1e-12, return_bound: bool = False):
    """sum over primes of ln(p) p^-z for Re z > 1.

    The sum over ``store`` is compensated and completed by a prime-number-
    theorem tail; the remainder bound must be below ``tol``.
    """
    z = as_complex(z)
    if z.real <= 1.0:
        raise DomainError(f"xi_prime_sum needs Re z > 1, got {z}")
    logs = store.logs
    terms = np.exp(-z * logs) * logs
    head = complex(math.fsum(terms.real), math.fsum(terms.imag))
    theta = math.fsum(logs)
    corr, bound = _xi_tail(z, store.limit, theta)
    if not bound < tol:
        raise TruncationError(
            f"xi({z}) tail bound {bound:.3g} with primes <= {store.limit} exceeds tolerance {tol:g}"
        )
    value = head + corr
    return (value, bound) if return_bound else value
