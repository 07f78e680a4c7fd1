"""Complex special functions: log-gamma, the zero weight gamma(z), Bessel J_n,
Jacobi theta and the constants C_m.

All functions take and return Python ``complex``/``float`` scalars.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InvalidArgumentError, UnsupportedRangeError

LOG_PI = math.log(math.pi)
LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)
EULER_GAMMA = 0.5772156649015329

# Lanczos approximation, g = 607/128, 15 terms
_LANCZOS_G = 607.0 / 128.0
_LANCZOS = (
    0.99999999999999709182,
    57.156235665862923517,
    -59.597960355475491248,
    14.136097974741747174,
    -0.49191381609762019978,
    0.33994649984811888699e-4,
    0.46523628927048575665e-4,
    -0.98374475304879564677e-4,
    0.15808870322491248884e-3,
    -0.21026444172410488319e-3,
    0.21743961811521264320e-3,
    -0.16431810653676389022e-3,
    0.84418223983852743293e-4,
    -0.26190838401581408670e-4,
    0.36899182659531622704e-5,
)


def as_complex(z) -> complex:
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise DomainError(f"non-finite argument {z!r}")
    return z


def _is_nonpositive_integer(z: complex) -> bool:
    return z.imag == 0.0 and z.real <= 0.0 and z.real == math.floor(z.real)


def sinpi(z: complex) -> complex:
    """sin(pi z) with the real part reduced mod 2 first."""
    x = math.fmod(z.real, 2.0)
    return cmath.sin(math.pi * complex(x, z.imag))


def cospi(z: complex) -> complex:
    x = math.fmod(z.real, 2.0)
    return cmath.cos(math.pi * complex(x, z.imag))


def cotpi(z: complex) -> complex:
    """cot(pi z), stable for large |Im z|."""
    if abs(z.imag) < 20.0:
        return cospi(z) / sinpi(z)
    if z.imag < 0:
        return cotpi(z.conjugate()).conjugate()
    q = cmath.exp(2j * math.pi * complex(math.fmod(z.real, 2.0), z.imag))
    return 1j * (q + 1.0) / (q - 1.0)


def _wrap(phase: float) -> float:
    phase = math.fmod(phase, 2.0 * math.pi)
    if phase > math.pi:
        phase -= 2.0 * math.pi
    elif phase <= -math.pi:
        phase += 2.0 * math.pi
    return phase


def log_sinpi(z: complex) -> complex:
    """Principal log of sin(pi z), without overflow for large |Im z|."""
    y = z.imag
    if abs(y) < 20.0:
        return cmath.log(sinpi(z))
    if y < 0:
        return log_sinpi(z.conjugate()).conjugate()
    # sin(pi z) = (i/2) e^{-i pi z} (1 - e^{2 i pi z}), |e^{2 i pi z}| < e^{-125}
    x = math.fmod(z.real, 2.0)
    return complex(math.pi * y - math.log(2.0), _wrap(0.5 * math.pi - math.pi * x))


def _lanczos_loggamma(z: complex) -> complex:
    z = z - 1.0
    acc = _LANCZOS[0]
    for i in range(1, 15):
        acc += _LANCZOS[i] / (z + i)
    t = z + _LANCZOS_G + 0.5
    return LOG_SQRT_2PI + (z + 0.5) * cmath.log(t) - t + cmath.log(acc)


def log_gamma(z) -> complex:
    """Principal branch of log Gamma(z), continuous off the negative real axis."""
    z = as_complex(z)
    if _is_nonpositive_integer(z):
        raise DomainError(f"log_gamma has a pole at {z.real:g}")
    if z.real >= 0.5:
        return _lanczos_loggamma(z)
    # reflection, with the 2 pi i k correction that keeps the principal branch
    k = math.floor(0.5 * z.real + 0.25)
    shift = math.copysign(2.0 * math.pi, z.imag) * k if z.imag != 0.0 else 0.0
    return complex(LOG_PI, shift) - log_sinpi(z) - _lanczos_loggamma(1.0 - z)


def gamma(z) -> complex:
    return cmath.exp(log_gamma(z))


def digamma(z) -> complex:
    """psi(z) = Gamma'(z)/Gamma(z).  Internal helper for derivatives through
    the functional equation; not part of the public surface."""
    z = as_complex(z)
    if _is_nonpositive_integer(z):
        raise DomainError(f"digamma has a pole at {z.real:g}")
    if z.real < 0.5:
        return digamma(1.0 - z) - math.pi * cotpi(z)
    acc = 0j
    while abs(z) < 15.0:
        acc -= 1.0 / z
        z += 1.0
    w = 1.0 / (z * z)
    # Bernoulli terms B_2k / (2k)
    series = w * (1 / 12 - w * (1 / 120 - w * (1 / 252 - w * (1 / 240 - w * (1 / 132 - w * (691 / 32760 - w / 12))))))
    return acc + cmath.log(z) - 0.5 / z - series


def gamma_weight(z) -> complex:
    """gamma(z) = Gamma(z/2) / pi^(z/2), evaluated in log space."""
    z = as_complex(z)
    h = 0.5 * z
    return cmath.exp(log_gamma(h) - h * LOG_PI)


# ---------------------------------------------------------------------------
# Bessel functions of the first kind, integer order, complex argument

BESSEL_MAX_ORDER = 512
BESSEL_MAX_ARG = 1.0e4


def _check_bessel(n, w):
    if n < 0 or n > BESSEL_MAX_ORDER:
        raise UnsupportedRangeError(f"Bessel order {n} outside [0, {BESSEL_MAX_ORDER}]")
    if abs(w) > BESSEL_MAX_ARG:
        raise UnsupportedRangeError(f"|w| = {abs(w):g} exceeds {BESSEL_MAX_ARG:g}")
    if abs(w.imag) > 700.0:
        raise UnsupportedRangeError(f"|Im w| = {abs(w.imag):g} overflows double precision")


def _series_ok(n: int, w: complex) -> bool:
    # cancellation in the power series grows like exp(|w|^2 / (2(n+1))) once |w| is large
    r = abs(w)
    return r <= 8.0 or r * r <= 20.0 * (n + 1)


def _bessel_series(n: int, w: complex) -> complex:
    if w == 0:
        return 1.0 + 0j if n == 0 else 0j
    q = -0.25 * w * w
    term = cmath.exp(n * cmath.log(0.5 * w) - math.lgamma(n + 1.0))
    acc = term
    k = 0
    while True:
        k += 1
        term *= q / (k * (n + k))
        acc += term
        if abs(term) <= 1e-17 * abs(acc) and k > abs(w):
            return acc
        if k > 1000:
            return acc


def _hankel01(w: complex):
    """J_0(w), J_1(w) from the large-argument expansion, Re w >= 0, |w| >= 17."""
    out = []
    for nu in (0, 1):
        mu = 4.0 * nu * nu
        p = 1.0 + 0j
        q = 0j
        a = 1.0 + 0j
        prev = math.inf
        for k in range(1, 200):
            a = a * (mu - (2 * k - 1) ** 2) / (k * 8.0 * w)
            size = abs(a)
            if size > prev:
                break
            if k % 2:
                q += a if (k // 2) % 2 == 0 else -a
            else:
                p += -a if (k // 2) % 2 else a
            prev = size
            if size < 1e-17:
                break
        chi = w - (0.5 * nu + 0.25) * math.pi
        out.append(cmath.sqrt(2.0 / (math.pi * w)) * (p * cmath.cos(chi) - q * cmath.sin(chi)))
    return out[0], out[1]


def _miller(n_max: int, w: complex) -> np.ndarray:
    """Unnormalised backward recurrence, returns values proportional to J_0..J_{n_max}."""
    r = abs(w)
    top = max(n_max, int(r)) + 30 + int(4.0 * max(n_max, r) ** (1.0 / 3.0))
    top += top % 2
    vals = np.zeros(top + 2, dtype=np.complex128)
    vals[top] = 1.0
    inv = 2.0 / w
    for k in range(top, 0, -1):
        vals[k - 1] = k * inv * vals[k] - vals[k + 1]
        if abs(vals[k - 1]) > 1e250:
            vals[k - 1 :] *= 1e-250
    return vals


def _fit_scale(m0, m1, j0, j1):
    # least-squares match of (m0, m1) to (J_0, J_1); the pair never vanishes together
    big = max(abs(m0), abs(m1))
    u0, u1 = m0 / big, m1 / big
    return (j0 * u0.conjugate() + j1 * u1.conjugate()) / (abs(u0) ** 2 + abs(u1) ** 2) / big


def bessel_j_all(n_max: int, w) -> np.ndarray:
    """Array of J_0(w) ... J_{n_max}(w)."""
    w = as_complex(w)
    n_max = int(n_max)
    _check_bessel(n_max, w)
    if w == 0:
        out = np.zeros(n_max + 1, dtype=np.complex128)
        out[0] = 1.0
        return out
    if _series_ok(0, w):
        return np.array([_bessel_series(k, w) for k in range(n_max + 1)])
    # J_n(-w) = (-1)^n J_n(w): work with Re w >= 0
    flip = w.real < 0
    ww = -w if flip else w
    vals = _miller(n_max, ww)
    m0, m1 = vals[0], vals[1]
    if abs(ww) >= 17.0:
        j0, j1 = _hankel01(ww)
        scale = _fit_scale(m0, m1, j0, j1)
    elif abs(ww.imag) <= 0.5 * abs(ww):
        # 1 = J_0 + 2 sum J_2k
        scale = 1.0 / (vals[0] + 2.0 * vals[2::2].sum())
    else:
        scale = _fit_scale(m0, m1, _bessel_series(0, ww), _bessel_series(1, ww))
    out = vals[: n_max + 1] * scale
    if flip:
        out[1::2] *= -1.0
    return out


def bessel_j(n: int, w) -> complex:
    """J_n(w) for integer 0 <= n <= 512 and complex |w| <= 1e4."""
    w = as_complex(w)
    n = int(n)
    _check_bessel(n, w)
    if _series_ok(n, w):
        return complex(_bessel_series(n, w))
    return complex(bessel_j_all(n, w)[n])


# ---------------------------------------------------------------------------
# Jacobi theta


def jacobi_theta(x: float):
    """Return (theta(x), theta1(x)) with theta = sum_n exp(-n^2 pi x), theta1 = (theta - 1)/2.

    For x < 1 the sum is evaluated at 1/x and mapped back with
    theta(x) = theta(1/x) / sqrt(x).
    """
    x = float(x)
    if not (x > 0.0) or not math.isfinite(x):
        raise DomainError(f"jacobi_theta needs x > 0, got {x!r}")
    if x < 1.0:
        theta, _ = jacobi_theta(1.0 / x)
        theta = theta / math.sqrt(x)
        return theta, 0.5 * (theta - 1.0)
    tail = 0.0
    n = 1
    while True:
        term = math.exp(-n * n * math.pi * x)
        tail += term
        if term < 1e-18 * (1.0 + 2.0 * tail):
            break
        n += 1
    return 1.0 + 2.0 * tail, tail


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Constants:
    m: int
    value: float


def constant_Cm(m: int) -> Constants:
    """C_m = Gamma(1/(2m)) / (m pi^(1/(2m)))."""
    if int(m) != m or m < 1:
        raise InvalidArgumentError(f"m must be an integer >= 1, got {m!r}")
    m = int(m)
    h = 0.5 / m
    return Constants(m, math.exp(log_gamma(h).real - h * LOG_PI) / m)
