"""Continuation (Newton-flow) root finding for zeta.

Along dz/dlambda = -zeta(z)/zeta'(z) the value zeta(z(lambda)) decays like
exp(-lambda) times its starting value, so trajectories run into zeros.  The
ODE is integrated with the Dormand-Prince 5(4) pair.
"""
from __future__ import annotations

import enum
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .errors import InvalidArgumentError, SaddleStallError, ZhlError
from .specfun import as_complex
from .zeta import MAX_IMAG, zeta_eval
from .zeros import ZeroEntry, ZerosTable

log = logging.getLogger(__name__)

DIVERGENCE_RADIUS = 60.0
MAX_LAMBDA = 50.0
ROOT_TOLERANCE = 1e-10
MAX_STEPS = 20000
STALL_REJECTIONS = 40
REJECT_SHRINK = 0.25
POLISH_STEPS = 3
DEDUP_TOL = 1e-6

# Dormand-Prince tableau
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B5 = _A[6] + (0.0,)
_B4 = (5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40)
_E = tuple(b5 - b4 for b5, b4 in zip(_B5, _B4))


class Endpoint(str, enum.Enum):
    NONTRIVIAL_ZERO = "nontrivial_zero"
    TRIVIAL_ZERO = "trivial_zero"
    DIVERGED = "diverged"
    MAX_STEPS = "max_steps"


@dataclass
class FlowTrajectory:
    points: list = field(default_factory=list)  # (lambda, z)
    endpoint: complex = 0j
    classification: Endpoint = Endpoint.MAX_STEPS
    steps: int = 0
    zeta_at_endpoint: float = math.nan

    @property
    def seed(self) -> complex:
        return self.points[0][1]


class _Field:
    """-zeta/zeta' that reports failure (non-finite, out of range) as None."""

    def __init__(self, seed: complex):
        self.seed = seed

    def __call__(self, z):
        if abs(z - self.seed) > 2 * DIVERGENCE_RADIUS or abs(z.imag) > MAX_IMAG:
            return None
        try:
            v = zeta_eval(z)
        except ZhlError:
            return None
        if v.zeta_prime == 0:
            return None
        f = -v.zeta / v.zeta_prime
        if not (math.isfinite(f.real) and math.isfinite(f.imag)):
            return None
        return f


def _classify(z: complex, root_tolerance: float) -> Endpoint:
    if 0.0 < z.real < 1.0:
        return Endpoint.NONTRIVIAL_ZERO
    k = round(-z.real / 2.0)
    if k >= 1 and abs(z - (-2.0 * k)) < root_tolerance:
        return Endpoint.TRIVIAL_ZERO
    return Endpoint.DIVERGED


def _polish(z: complex, steps: int = POLISH_STEPS) -> complex:
    best = z
    best_abs = abs(zeta_eval(z).zeta)
    for _ in range(steps):
        v = zeta_eval(best)
        if v.zeta_prime == 0:
            break
        cand = best - v.zeta / v.zeta_prime
        cand_abs = abs(zeta_eval(cand).zeta)
        if not cand_abs < best_abs:
            break
        best, best_abs = cand, cand_abs
    return best


def integrate_flow(
    z0,
    max_lambda: float = MAX_LAMBDA,
    root_tolerance: float = ROOT_TOLERANCE,
    rtol: float = 1e-8,
    atol: float = 1e-15,
    max_steps: int = MAX_STEPS,
) -> FlowTrajectory:
    """Follow the Newton flow from ``z0`` until it reaches a root or gives up.

    Raises :class:`SaddleStallError` (carrying the partial trajectory) when
    40 consecutive steps are rejected, which happens next to zeros of zeta'.
    """
    z = z0c = as_complex(z0)
    fz = _Field(z)
    v0 = zeta_eval(z)
    traj = FlowTrajectory(points=[(0.0, z)], endpoint=z)
    if abs(v0.zeta) < root_tolerance:
        traj.endpoint = z
        traj.zeta_at_endpoint = abs(v0.zeta)
        traj.classification = _classify(z, root_tolerance)
        return traj

    lam = 0.0
    h = 0.05
    k1 = fz(z)
    if k1 is None:
        raise SaddleStallError(f"flow field undefined at seed {z}", traj)
    rejections = 0
    status = Endpoint.MAX_STEPS
    while traj.steps < max_steps:
        if lam >= max_lambda:
            status = Endpoint.MAX_STEPS
            break
        h = min(h, max_lambda - lam) if max_lambda - lam > 1e-12 else h
        ks = [k1]
        ok = True
        for i in range(1, 7):
            zi = z + h * sum(a * k for a, k in zip(_A[i], ks))
            ki = fz(zi)
            if ki is None:
                ok = False
                break
            ks.append(ki)
        if ok:
            z_new = z + h * sum(b * k for b, k in zip(_B5, ks))
            err_vec = h * sum(e * k for e, k in zip(_E, ks))
            # error measured against the field size, which shrinks like |z - z_k| near a
            # root; a scale tied to |z| would stall convergence at rtol |z|
            scale = atol + rtol * max(abs(ks[0]), abs(ks[6]))
            err = abs(err_vec) / scale
        if not ok or not err <= 1.0:
            rejections += 1
            if rejections >= STALL_REJECTIONS:
                raise SaddleStallError(
                    f"{rejections} consecutive step rejections near z = {z} (lambda = {lam:.6g})", traj
                )
            h *= REJECT_SHRINK
            continue
        rejections = 0
        lam += h
        z = z_new
        k1 = ks[6]  # first-same-as-last
        traj.points.append((lam, z))
        traj.steps += 1
        # radius counted from the seed so seeds high on Re z = 1 are not rejected at once
        if abs(z - z0c) > DIVERGENCE_RADIUS:
            status = Endpoint.DIVERGED
            break
        if abs(zeta_eval(z).zeta) < root_tolerance:
            status = None
            break
        factor = 5.0 if err == 0 else min(5.0, max(0.2, 0.9 * err ** -0.2))
        h *= factor

    if status is None:
        z = _polish(z)
        traj.classification = _classify(z, root_tolerance)
    else:
        traj.classification = status
    traj.endpoint = z
    traj.zeta_at_endpoint = abs(zeta_eval(z).zeta) if abs(z.imag) <= MAX_IMAG else math.inf
    return traj


def _run_seed(args):
    z0, max_lambda, root_tolerance = args
    try:
        return integrate_flow(z0, max_lambda, root_tolerance)
    except SaddleStallError as exc:
        log.warning("seed %s: %s", z0, exc)
        return exc.trajectory


def integrate_many(seeds, max_lambda=MAX_LAMBDA, root_tolerance=ROOT_TOLERANCE, workers: int = 1):
    """Integrate independent seeds, preserving order; stalled seeds return their partial trajectory."""
    jobs = [(as_complex(s), max_lambda, root_tolerance) for s in seeds]
    if workers <= 1 or len(jobs) < 2:
        return [_run_seed(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_seed, jobs, chunksize=max(1, len(jobs) // (4 * workers))))


class FoundZeros(list):
    """List of ZeroEntry; ``diff`` holds the comparison against a reference table (if any)."""

    diff = None


@dataclass(frozen=True)
class ZeroDiff:
    missing: tuple  # reference ordinates with no found partner
    extra: tuple  # found ordinates absent from the reference

    @property
    def complete(self) -> bool:
        return not self.missing and not self.extra


def compare_with_reference(found, reference: ZerosTable, ymax: float, tol: float = DEDUP_TOL) -> ZeroDiff:
    ref = [e.y for e in reference if e.y < ymax]
    got = [e.y for e in found if e.y < ymax]
    missing = tuple(y for y in ref if not any(abs(y - g) < tol for g in got))
    extra = tuple(g for g in got if not any(abs(y - g) < tol for y in ref))
    return ZeroDiff(missing, extra)


def find_zeros_up_to(
    ymax: float,
    seed_spacing: float = 0.5,
    reference: ZerosTable | None = None,
    root_tolerance: float = ROOT_TOLERANCE,
    workers: int = 1,
) -> FoundZeros:
    """Nontrivial zeros with 0 < Im z <= ymax reached from seeds 1 + i k seed_spacing.

    Completeness is not guaranteed; pass ``reference`` to get a diff.
    """
    ymax = float(ymax)
    seed_spacing = float(seed_spacing)
    if not (0.0 < ymax <= MAX_IMAG):
        raise InvalidArgumentError(f"ymax must be in (0, {MAX_IMAG:g}], got {ymax}")
    if not (0.0 < seed_spacing <= 2.0):
        raise InvalidArgumentError(f"seed_spacing must be in (0, 2], got {seed_spacing}")
    n = int(math.floor(ymax / seed_spacing)) + 1
    seeds = [complex(1.0, k * seed_spacing) for k in range(1, n + 1)]
    trajs = integrate_many(seeds, root_tolerance=root_tolerance, workers=workers)
    roots = sorted(
        (t.endpoint for t in trajs if t.classification is Endpoint.NONTRIVIAL_ZERO and 0 < t.endpoint.imag <= ymax),
        key=lambda z: z.imag,
    )
    unique = []
    for z in roots:
        if unique and abs(z - unique[-1]) < DEDUP_TOL:
            continue
        unique.append(z)
    out = FoundZeros(ZeroEntry.at(z.real, z.imag, i) for i, z in enumerate(unique, start=1))
    if reference is not None:
        out.diff = compare_with_reference(out, reference, ymax)
        if not out.diff.complete:
            log.warning("zeros below %g: missing %s, extra %s", ymax, out.diff.missing, out.diff.extra)
    return out
