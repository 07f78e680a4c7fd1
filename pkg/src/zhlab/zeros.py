"""Table of nontrivial zeros with their weights, and the residue sum Z(lambda).

Only zeros in the upper half plane are stored.  Sums over "all" zeros are
completed with the conjugate partner, which doubles the real part.
"""
from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import InvalidArgumentError, ParseError
from .specfun import gamma_weight

log = logging.getLogger(__name__)

DUPLICATE_TOL = 1e-9
DEFAULT_FLOW_YMAX = 120.0


@dataclass(frozen=True)
class ZeroEntry:
    """z_k = a + i y with the weight gamma_k = gamma(z_k)."""

    a: float
    y: float
    gamma: complex
    index: int = 0  # 1-based position in the ordered list of zeros, 0 if unknown

    @classmethod
    def at(cls, a: float, y: float, index: int = 0) -> "ZeroEntry":
        a, y = float(a), float(y)
        if not (0.0 < a < 1.0):
            raise InvalidArgumentError(f"Re z_k = {a} outside (0, 1)")
        if not (y > 0.0):
            raise InvalidArgumentError(f"Im z_k = {y} must be positive")
        return cls(a, y, gamma_weight(complex(a, y)), int(index))

    @property
    def z(self) -> complex:
        return complex(self.a, self.y)


@dataclass(frozen=True)
class ZerosTable:
    entries: tuple = ()
    source: str = "file"
    _arrays: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        entries = tuple(self.entries)
        object.__setattr__(self, "entries", entries)
        if self.source not in ("file", "flow", "merged", "synthetic"):
            raise InvalidArgumentError(f"unknown zeros source {self.source!r}")
        for prev, cur in zip(entries, entries[1:]):
            if not cur.y > prev.y + DUPLICATE_TOL:
                raise InvalidArgumentError(f"zeros must be strictly ascending in y: {prev.y} then {cur.y}")

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, i):
        return self.entries[i]

    def head(self, k: int) -> "ZerosTable":
        return ZerosTable(self.entries[:k], self.source)

    def below(self, ymax: float) -> "ZerosTable":
        return ZerosTable(tuple(e for e in self.entries if e.y < ymax), self.source)

    def arrays(self):
        """(a, y, gamma) as numpy arrays, cached."""
        if not self._arrays:
            self._arrays["a"] = np.array([e.a for e in self.entries], dtype=np.float64)
            self._arrays["y"] = np.array([e.y for e in self.entries], dtype=np.float64)
            self._arrays["gamma"] = np.array([e.gamma for e in self.entries], dtype=np.complex128)
        return self._arrays["a"], self._arrays["y"], self._arrays["gamma"]


def from_ordinates(ys, a: float = 0.5, indices=None, source: str = "synthetic") -> ZerosTable:
    ys = list(ys)
    indices = range(1, len(ys) + 1) if indices is None else indices
    return ZerosTable(tuple(ZeroEntry.at(a, y, i) for y, i in zip(ys, indices)), source)


def select(table: ZerosTable, indices) -> ZerosTable:
    """Sub-table holding the zeros with the given 1-based indices."""
    wanted = set(int(i) for i in indices)
    return ZerosTable(tuple(e for e in table if e.index in wanted), "synthetic")


def load_zeros_file(path, max_count: int | None = None) -> ZerosTable:
    """Read one positive ordinate y_k per line (ascending); Re z_k is taken as 1/2.

    Blank lines and lines starting with ``#`` are skipped.
    """
    path = Path(path)
    entries = []
    prev = 0.0
    with open(path, "r", encoding="ascii", errors="strict") as fh:
        for lineno, raw in enumerate(fh, start=1):
            if max_count is not None and len(entries) >= max_count:
                break
            text = raw.strip()
            if not text or text.startswith("#"):
                continue
            try:
                y = float(text)
            except ValueError:
                raise ParseError(f"{path}: not a number: {text!r}", lineno) from None
            if not math.isfinite(y) or y <= 0.0:
                raise ParseError(f"{path}: ordinate must be positive, got {text!r}", lineno)
            if y <= prev + DUPLICATE_TOL:
                raise ParseError(f"{path}: ordinates not strictly ascending ({prev!r} then {y!r})", lineno)
            entries.append(ZeroEntry.at(0.5, y, len(entries) + 1))
            prev = y
    return ZerosTable(tuple(entries), "file")


def sum_abs_gamma(table: ZerosTable, conjugates: bool = True) -> float:
    """Sum of |gamma_k|.

    With ``conjugates`` (the default) each stored zero counts together with
    its conjugate, i.e. the sum runs over all zeros; otherwise only the
    stored upper-half zeros are summed.
    """
    if len(table) == 0:
        return 0.0
    _, _, g = table.arrays()
    s = math.fsum(np.abs(g))
    return 2.0 * s if conjugates else s


def residue_sum_Z(table: ZerosTable, lam) -> float | np.ndarray:
    """Z(lambda) = 2 sum_k Re{gamma_k exp(-lambda (z_k - 1/2))}; accepts scalars or arrays."""
    lam_arr = np.asarray(lam, dtype=np.float64)
    if len(table) == 0:
        out = np.zeros(lam_arr.shape)
        return float(out) if out.ndim == 0 else out
    a, y, g = table.arrays()
    flat = lam_arr.reshape(-1)
    out = np.empty(flat.shape)
    shift = (a - 0.5) + 1j * y
    for i, lv in enumerate(flat):
        terms = (g * np.exp(-lv * shift)).real
        out[i] = 2.0 * math.fsum(terms)
    out = out.reshape(lam_arr.shape)
    return float(out) if out.ndim == 0 else out


def single_zero_Z(entry: ZeroEntry, lam) -> float:
    """Contribution Z_i of one zero (with its conjugate)."""
    return 2.0 * (entry.gamma * cmath.exp(-float(lam) * complex(entry.a - 0.5, entry.y))).real


def merge(*tables: ZerosTable, tol: float = 1e-6) -> ZerosTable:
    """Union of several tables; entries closer than ``tol`` in y are merged, first table wins."""
    out = []
    for t in tables:
        ys = np.array([e.y for e in out])
        out.extend(e for e in t if not (ys.size and np.min(np.abs(ys - e.y)) < tol))
    out.sort(key=lambda e: e.y)
    # indices are only meaningful for a gap-free list from the first zero upward
    out = [ZeroEntry(e.a, e.y, e.gamma, i) for i, e in enumerate(out, start=1)]
    return ZerosTable(tuple(out), "merged")


def default_table(path=None, max_count: int | None = None) -> ZerosTable:
    """Reference file when given and present, else zeros found by the flow up to Im z = 120."""
    if path is not None and Path(path).exists():
        return load_zeros_file(path, max_count)
    from .flow import find_zeros_up_to

    log.info("no zeros file; locating zeros up to %g by continuation", DEFAULT_FLOW_YMAX)
    found = find_zeros_up_to(DEFAULT_FLOW_YMAX)
    table = ZerosTable(tuple(found), "flow")
    return table.head(max_count) if max_count is not None else table
