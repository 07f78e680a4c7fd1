"""Spectral comparison of Phi on the grid lambda(alpha) = lambda1 + lambda2 cos(alpha).

On this grid a single zero's term Z_i(lambda) becomes a cosine series whose
coefficients are Bessel functions (Jacobi-Anger), so each zero shows up as a
peak near n = lambda2 * y_i in the FFT of the residual R.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .density import DEFAULT_CUTOFF, Phi_batch, required_limit
from .errors import InvalidArgumentError, TruncationError, UnsupportedRangeError
from .primes import PrimeStore
from .specfun import BESSEL_MAX_ORDER, bessel_j_all
from .zeros import ZeroEntry, ZerosTable

DEFAULT_N = 4096
DEFAULT_THRESHOLD = 0.5
PAPER_WINDOW = (-26.0, -11.7756)
DESK_WINDOW = (-16.0, -11.7756)


def _is_pow2(n: int) -> bool:
    return n >= 1 and n & (n - 1) == 0


@dataclass(frozen=True)
class GridSpec:
    lambda1: float
    lambda2: float
    n_samples: int = DEFAULT_N

    def __post_init__(self):
        if not self.lambda2 > 0:
            raise InvalidArgumentError(f"lambda2 must be positive, got {self.lambda2}")
        if not self.lambda1 + self.lambda2 < 0:
            raise InvalidArgumentError(f"window [{self.lo}, {self.hi}] must lie in lambda < 0")
        if not _is_pow2(self.n_samples) or self.n_samples < 8:
            raise InvalidArgumentError(f"n_samples must be a power of two >= 8, got {self.n_samples}")

    @classmethod
    def from_window(cls, lo: float, hi: float, n_samples: int = DEFAULT_N) -> "GridSpec":
        lo, hi = float(lo), float(hi)
        if not hi > lo:
            raise InvalidArgumentError(f"empty window [{lo}, {hi}]")
        return cls(0.5 * (lo + hi), 0.5 * (hi - lo), int(n_samples))

    @property
    def lo(self) -> float:
        return self.lambda1 - self.lambda2

    @property
    def hi(self) -> float:
        return self.lambda1 + self.lambda2

    def alphas(self) -> np.ndarray:
        return 2.0 * math.pi * np.arange(self.n_samples) / self.n_samples

    def lambdas(self) -> np.ndarray:
        """lambda(alpha_j); exactly even in j since cos is evaluated on the folded index."""
        n = self.n_samples
        j = np.arange(n)
        folded = np.minimum(j, n - j)
        return self.lambda1 + self.lambda2 * np.cos(2.0 * math.pi * folded / n)


# ---------------------------------------------------------------------------
# FFT


def _bit_reverse(n: int) -> np.ndarray:
    bits = n.bit_length() - 1
    idx = np.arange(n)
    rev = np.zeros(n, dtype=np.int64)
    for b in range(bits):
        rev |= ((idx >> b) & 1) << (bits - 1 - b)
    return rev


def fft(values) -> np.ndarray:
    """Iterative radix-2 decimation-in-time DFT, X_n = sum_j v_j exp(-2 pi i j n / N)."""
    x = np.asarray(values, dtype=np.complex128)
    n = x.size
    if not _is_pow2(n):
        raise InvalidArgumentError(f"FFT length must be a power of two, got {n}")
    x = x[_bit_reverse(n)].copy()
    size = 2
    while size <= n:
        half = size // 2
        k = np.arange(half)
        tw = np.exp(-2j * math.pi * k / size)
        blocks = x.reshape(n // size, size)
        a = blocks[:, :half].copy()
        b = blocks[:, half:] * tw
        blocks[:, :half] = a + b
        blocks[:, half:] = a - b
        size *= 2
    return x


def fft_cosine_coefficients(values) -> np.ndarray:
    """c_0..c_{N/2} with v_j = c_0/2 + sum_{n>=1} c_n cos(n alpha_j) for even input.

    c_n = (2/N) Re X_n for n < N/2 and c_{N/2} = (1/N) Re X_{N/2}, the Nyquist
    term appearing once in the cosine expansion.
    """
    v = np.asarray(values)
    if np.iscomplexobj(v):
        raise InvalidArgumentError("cosine coefficients need real input")
    v = v.astype(np.float64)
    n = v.size
    if not _is_pow2(n) or n < 2:
        raise InvalidArgumentError(f"length must be a power of two >= 2, got {n}")
    X = fft(v)
    c = (2.0 / n) * X[: n // 2 + 1].real
    c[n // 2] *= 0.5
    return c


def cosine_series(c, alphas) -> np.ndarray:
    """Evaluate c_0/2 + sum_n c_n cos(n alpha)."""
    c = np.asarray(c, dtype=np.float64)
    alphas = np.asarray(alphas, dtype=np.float64)
    n = np.arange(1, c.size)
    return 0.5 * c[0] + np.cos(np.outer(alphas, n)) @ c[1:]


def parseval_sides(values, c):
    """(mean of v^2, c_0^2/4 + 1/2 sum_{0<n<N/2} c_n^2 + c_{N/2}^2)."""
    v = np.asarray(values, dtype=np.float64)
    lhs = math.fsum(v * v) / v.size
    rhs = 0.25 * c[0] ** 2 + 0.5 * math.fsum(c[1:-1] ** 2) + c[-1] ** 2
    return lhs, rhs


# ---------------------------------------------------------------------------
# analytic per-zero coefficients

EXACT = "exact"
LITERAL = "literal"


def analytic_coefficients(zero: ZeroEntry, grid: GridSpec, n_max: int, variant: str = EXACT) -> np.ndarray:
    """Signed cosine coefficients c_{n,i}, n = 0..n_max, of Z_i(lambda(alpha)).

    ``exact``:   c_n = 4 Re{i^n gamma e^{-lambda1 (z - 1/2)} J_n(i lambda2 (z - 1/2))}, which
                 reconstructs Z_i = 2 Re{gamma e^{-lambda (z - 1/2)}} term by term.
    ``literal``: c_n = 2 Re{(-i)^n gamma e^{-i lambda1 z} J_n(-lambda2 z)}, kept for comparison.

    Orders above the Bessel limit are returned as zero when they are past the
    decay point (n well beyond |w|), otherwise an unsupported-range error is raised.
    """
    n_max = int(n_max)
    if n_max < 0:
        raise InvalidArgumentError(f"n_max must be >= 0, got {n_max}")
    z = zero.z
    if variant == EXACT:
        w = 1j * grid.lambda2 * (z - 0.5)
        pref = 4.0 * zero.gamma * cmath.exp(-grid.lambda1 * (z - 0.5))
        rot = 1j
    elif variant == LITERAL:
        w = -grid.lambda2 * z
        pref = 2.0 * zero.gamma * cmath.exp(-1j * grid.lambda1 * z)
        rot = -1j
    else:
        raise InvalidArgumentError(f"unknown variant {variant!r}")
    top = min(n_max, BESSEL_MAX_ORDER)
    if top < n_max and abs(w) + 40.0 + 6.0 * abs(w) ** (1.0 / 3.0) > BESSEL_MAX_ORDER:
        raise UnsupportedRangeError(f"orders up to {n_max} at |w| = {abs(w):.4g} exceed the Bessel range")
    J = bessel_j_all(top, w)
    phase = rot ** (np.arange(top + 1) % 4)
    out = np.zeros(n_max + 1)
    out[: top + 1] = (pref * phase * J).real
    return out


def reconstruct(coeffs, grid: GridSpec) -> np.ndarray:
    return cosine_series(coeffs, grid.alphas())


# ---------------------------------------------------------------------------
# sampling and matching


def sample_on_grid(grid: GridSpec, store: PrimeStore, table: ZerosTable | None = None, cutoff: float = DEFAULT_CUTOFF):
    """DensitySample at every alpha_j; only j <= N/2 is computed, the rest mirrors it."""
    x_lo = math.exp(2.0 * grid.lo)
    if store.limit ** 2 * math.pi * x_lo < cutoff:
        need = required_limit(x_lo, cutoff)
        raise TruncationError(
            f"grid reaches lambda = {grid.lo:.6g}, which needs primes up to {need} (store holds {store.limit})",
            required_limit=need,
        )
    lam = grid.lambdas()
    n = grid.n_samples
    half = Phi_batch(lam[: n // 2 + 1], store, cutoff)
    return [half[min(j, n - j)] for j in range(n)]


@dataclass(frozen=True)
class Match:
    zero_index: int
    y: float
    peak_n: int  # analytic peak
    computed_peak_n: int
    rel_err: float
    sign: float  # projection of computed onto analytic coefficients near the peak
    dominant: bool = True


@dataclass
class SpectrumResult:
    grid: GridSpec
    computed_c: np.ndarray  # |c_n|, n = 0..N/2
    analytic_c: dict  # zero index -> |c_{n,i}|
    analytic_signed: dict = field(default_factory=dict, repr=False)
    computed_signed: np.ndarray | None = field(default=None, repr=False)
    zeros: dict = field(default_factory=dict, repr=False)  # zero index -> ZeroEntry
    matches: list = field(default_factory=list)
    harmonics_identified: int = 0
    match_threshold: float = DEFAULT_THRESHOLD

    def analytic_total(self) -> np.ndarray:
        """|sum_i c_{n,i}|."""
        if not self.analytic_signed:
            return np.zeros_like(self.computed_c)
        return np.abs(sum(self.analytic_signed.values()))

    def best_zero(self) -> np.ndarray:
        """Per n, the zero index with the largest |c_{n,i}| (0 when no zeros)."""
        keys = sorted(self.analytic_c)
        if not keys:
            return np.zeros(self.computed_c.size, dtype=np.int64)
        stack = np.vstack([self.analytic_c[k] for k in keys])
        return np.asarray(keys)[np.argmax(stack, axis=0)]


def build_result(grid: GridSpec, computed_signed, table: ZerosTable, max_zeros: int | None = None) -> SpectrumResult:
    """Attach analytic coefficients for the zeros whose peaks fall inside the spectrum."""
    computed_signed = np.asarray(computed_signed, dtype=np.float64)
    n_top = computed_signed.size - 1
    analytic, signed, zeros = {}, {}, {}
    for k, e in enumerate(table):
        if max_zeros is not None and k >= max_zeros:
            break
        if grid.lambda2 * e.y * abs(complex(1.0, (e.a - 0.5) / e.y)) > min(n_top, BESSEL_MAX_ORDER) - 60:
            break
        key = e.index if e.index else k + 1
        c = analytic_coefficients(e, grid, n_top)
        signed[key] = c
        analytic[key] = np.abs(c)
        zeros[key] = e
    return SpectrumResult(grid, np.abs(computed_signed), analytic, signed, computed_signed, zeros)


def _peaks(result: SpectrumResult):
    return {k: int(np.argmax(v[1:]) + 1) for k, v in result.analytic_c.items()}


def identify_harmonics(result: SpectrumResult, match_threshold: float = DEFAULT_THRESHOLD) -> SpectrumResult:
    """Match each zero's analytic peak against the computed spectrum.

    A zero is listed in ``matches`` when the computed spectrum has a local
    maximum within one bin of the analytic peak n_i; it counts as
    identified when the two peak amplitudes agree to ``match_threshold``
    (relative).  ``dominant`` records whether that computed peak is also the
    largest value in the window reaching halfway to the neighbouring
    analytic peaks.
    """
    peaks = _peaks(result)
    order = sorted(peaks, key=lambda k: peaks[k])
    c = result.computed_c
    top = c.size - 1
    matches = []
    for pos, k in enumerate(order):
        n0 = peaks[k]
        cand = [n for n in (n0 - 1, n0, n0 + 1) if 1 <= n <= top]
        n_found = max(cand, key=lambda n: c[n])
        if not (c[n_found] >= c[n_found - 1] and (n_found == top or c[n_found] >= c[n_found + 1])):
            continue
        gap_l = n0 - peaks[order[pos - 1]] if pos > 0 else None
        gap_r = peaks[order[pos + 1]] - n0 if pos + 1 < len(order) else None
        gap_l = gap_l if gap_l is not None else (gap_r if gap_r is not None else n0)
        gap_r = gap_r if gap_r is not None else gap_l
        lo = max(1, n0 - max(1, gap_l // 2))
        hi = min(top, n0 + max(1, gap_r // 2))
        dominant = bool(c[n_found] >= c[lo : hi + 1].max())
        ana = result.analytic_c[k][n0]
        rel = abs(c[n_found] - ana) / ana
        a_s = result.analytic_signed[k]
        w = slice(max(0, n0 - 3), n0 + 4)
        if result.computed_signed is not None:
            sign = float(np.dot(result.computed_signed[w], a_s[w]) / np.dot(a_s[w], a_s[w]))
        else:
            sign = math.nan
        matches.append(Match(int(k), float(result.zeros[k].y), n0, int(n_found), float(rel), sign, dominant))
    matches.sort(key=lambda m: m.zero_index)
    hits = sum(1 for m in matches if m.rel_err < match_threshold)
    return replace(result, matches=matches, harmonics_identified=hits, match_threshold=match_threshold)


def spectrum_of_samples(grid: GridSpec, samples, table: ZerosTable, match_threshold: float = DEFAULT_THRESHOLD,
                        max_zeros: int | None = None) -> SpectrumResult:
    R = np.array([s.R for s in samples])
    c = fft_cosine_coefficients(R)
    return identify_harmonics(build_result(grid, c, table, max_zeros), match_threshold)


def compute_spectrum(grid: GridSpec, store: PrimeStore, table: ZerosTable, match_threshold: float = DEFAULT_THRESHOLD,
                     max_zeros: int | None = None):
    """Sample, transform and match; returns (samples, SpectrumResult)."""
    samples = sample_on_grid(grid, store, table)
    return samples, spectrum_of_samples(grid, samples, table, match_threshold, max_zeros)


def synthetic_Z(table: ZerosTable, grid: GridSpec) -> np.ndarray:
    """Z(lambda(alpha_j)) sampled directly from the residue sum."""
    from .zeros import residue_sum_Z

    return np.asarray(residue_sum_Z(table, grid.lambdas()))


def sign_convention(result: SpectrumResult) -> str:
    """Which oscillatory term the computed R carries, "+Z" or "-Z", judged from the
    projection onto the analytic coefficients at dominant matched peaks."""
    signs = [m.sign for m in result.matches if m.dominant and m.rel_err < result.match_threshold]
    if not signs:
        return "undetermined"
    return "+Z" if float(np.median(signs)) > 0 else "-Z"
