"""Command-line entry point: ``zhlab <subcommand> ...`` (or ``python -m zhlab``).

Exit codes: 0 success, 1 computation error (JSON on stderr), 2 usage error.
"""
from __future__ import annotations

import argparse
import hashlib
import io
import json
import logging
import math
import os
import platform
import random
import shutil
import sys
import tempfile
import time
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import __version__
from ._backend import backend, set_threads
from .errors import InvalidArgumentError, ZhlError

log = logging.getLogger("zhlab")


# ---------------------------------------------------------------------------
# output helpers


def fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(fmt(v) for v in row) + "\n")
    return buf.getvalue()


def atomic_write(path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix="." + path.name + ".", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def emit_csv(path, header, rows) -> None:
    text = csv_text(header, rows)
    if path is None or str(path) == "-":
        sys.stdout.write(text)
    else:
        atomic_write(path, text)


def parse_range(text: str, what: str):
    """"A:B:STEP" -> list of values from A to B inclusive (within half a step)."""
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"{what} must be A:B:STEP, got {text!r}")
    a, b, step = (float(p) for p in parts)
    if step <= 0 or b < a:
        raise argparse.ArgumentTypeError(f"{what} needs A <= B and STEP > 0, got {text!r}")
    n = int(math.floor((b - a) / step + 0.5 + 1e-9)) + 1
    return [a + k * step for k in range(n) if a + k * step <= b + 0.5 * step]


def parse_window(text: str):
    parts = text.split(":")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"window must be A:B, got {text!r}")
    return float(parts[0]), float(parts[1])


def parse_complex(text: str) -> complex:
    t = text.strip().replace(" ", "").replace("I", "i")
    if t.endswith("i"):
        t = t[:-1] + "j"
    try:
        return complex(t)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}") from None


def _range_arg(what):
    return lambda s: parse_range(s, what)


# ---------------------------------------------------------------------------
# shared loaders


def _store(limit: int, cache, segment_size=None):
    from .primes import DEFAULT_SEGMENT_SIZE, default_cache_path, load_or_build_cache

    path = Path(cache) if cache else default_cache_path()
    return load_or_build_cache(path, int(limit), segment_size or DEFAULT_SEGMENT_SIZE)


def _table(path, max_count=None):
    from .zeros import default_table

    if path is not None and not Path(path).exists():
        raise InvalidArgumentError(f"zeros file {path} does not exist")
    return default_table(path, max_count)


# ---------------------------------------------------------------------------
# subcommands


def cmd_primes(args) -> int:
    t0 = time.perf_counter()
    store = _store(args.limit, args.cache, args.segment_size)
    print(store.count)
    log.info("pi(%d) = %d in %.3fs", args.limit, store.count, time.perf_counter() - t0)
    return 0


def selftest_checks(seed: int = 12345):
    """(name, passed, detail) for the special-function property checks."""
    from . import specfun as sf

    rng = random.Random(seed)
    out = []
    worst = max(
        abs(sf.jacobi_theta(1.0 / x)[0] - math.sqrt(x) * sf.jacobi_theta(x)[0]) for x in (0.5, 1.0, 2.0, 5.0)
    )
    out.append(("theta modular identity", worst < 1e-12, worst))
    worst = 0.0
    for _ in range(100):
        z = complex(rng.uniform(-50, 50), rng.uniform(-50, 50))
        if abs(z) > 50 or (z.real < 0 and abs(z.imag) < 0.5):
            z = complex(abs(z.real) % 40 + 0.5, z.imag % 40)
        a = sf.gamma(z + 1)
        b = z * sf.gamma(z)
        worst = max(worst, abs(a - b) / abs(b))
    out.append(("gamma recurrence", worst < 1e-12, worst))
    worst = 0.0
    for _ in range(50):
        n = rng.randint(1, 100)
        w = complex(rng.uniform(-150, 150), rng.uniform(-20, 20))
        J = sf.bessel_j_all(n + 1, w)
        lhs, rhs = J[n - 1] + J[n + 1], 2 * n / w * J[n]
        worst = max(worst, abs(lhs - rhs) / max(abs(lhs), abs(rhs), 1e-300))
    out.append(("Bessel recurrence", worst < 1e-9, worst))
    worst = 0.0
    for y in (50.0, 100.0, 200.0):
        ratio = abs(sf.gamma_weight(1j * y)) / (math.sqrt(4.0 * math.pi / y) * math.exp(-math.pi * y / 4.0))
        worst = max(worst, abs(ratio - 1.0))
    out.append(("|gamma(iy)| ~ sqrt(4 pi / y) exp(-pi y / 4)", worst < 0.02, worst))
    return out


def cmd_specfun(args) -> int:
    ok = True
    for name, passed, detail in selftest_checks(args.seed):
        print(f"{'PASS' if passed else 'FAIL'}  {name}  (worst {detail:.3e})")
        ok &= passed
    return 0 if ok else 1


def cmd_zeta_eval(args) -> int:
    from .zeta import zeta_eval

    v = zeta_eval(complex(args.re, args.im))
    emit_csv(
        args.csv,
        ["re", "im", "zeta_re", "zeta_im", "zeta_prime_re", "zeta_prime_im", "est_error"],
        [[v.z.real, v.z.imag, v.zeta.real, v.zeta.imag, v.zeta_prime.real, v.zeta_prime.imag, v.est_error]],
    )
    return 0


def cmd_zeta_fe(args) -> int:
    from .zeta import functional_equation_residual

    rng = np.random.default_rng(args.seed)
    rows = []
    for _ in range(args.samples):
        z = complex(rng.uniform(-2.0, 3.0), rng.uniform(-100.0, 100.0))
        rows.append([z.real, z.imag, functional_equation_residual(z)])
    emit_csv(args.csv, ["re", "im", "residual"], rows)
    return 0


def cmd_flow(args) -> int:
    from .flow import find_zeros_up_to, integrate_many

    if args.ymax is not None:
        found = find_zeros_up_to(args.ymax, args.seed_spacing, workers=args.workers)
        emit_csv(args.csv, ["index", "re", "im"], [[e.index, e.a, e.y] for e in found])
        return 0
    seeds = [parse_complex(s) for s in args.seeds.split(",") if s.strip()]
    trajs = integrate_many(seeds, workers=args.workers)
    summary = [
        [f"{s.real:g}{s.imag:+g}i", t.endpoint.real, t.endpoint.imag, t.classification.value, t.steps]
        for s, t in zip(seeds, trajs)
    ]
    header = ["seed", "endpoint_re", "endpoint_im", "classification", "steps"]
    emit_csv(args.summary, header, summary)
    if args.csv:
        rows = [
            [f"{s.real:g}{s.imag:+g}i", lam, z.real, z.imag] for s, t in zip(seeds, trajs) for lam, z in t.points
        ]
        emit_csv(args.csv, ["seed", "lambda", "re", "im"], rows)
    return 0


def cmd_zeros(args) -> int:
    from .zeros import residue_sum_Z, sum_abs_gamma

    table = _table(args.file, args.max)
    if getattr(args, "zeros_cmd", None) == "z-eval":
        lams = args.lambda_range
        emit_csv(args.csv, ["lambda", "Z"], [[l, residue_sum_Z(table, l)] for l in lams])
        return 0
    if args.sum_gamma:
        print(fmt(sum_abs_gamma(table)))
    else:
        print(len(table))
    return 0


def cmd_density(args) -> int:
    from .density import Phi_batch, chebyshev_sample

    if args.density_cmd == "phi":
        lams = args.lambda_range
        need = _limit_for(min(lams))
        store = _store(args.limit or need, args.cache)
        samples = Phi_batch(lams, store)
        emit_csv(args.csv, DENSITY_HEADER, [_density_row(s) for s in samples])
        return 0
    table = _table(args.zeros)
    K = min(args.K, len(table))
    us = args.u_range
    store = _store(args.limit or max(int(math.ceil(max(us))), 100), args.cache)
    rows = []
    for u in us:
        s = chebyshev_sample(u, store, table, K)
        rows.append([u, s.psi, s.lhs, s.rhs_truncated, abs(s.lhs - s.rhs_truncated)])
    emit_csv(args.csv, ["u", "psi", "lhs", "rhs", "abs_err"], rows)
    return 0


DENSITY_HEADER = ["lambda", "x", "phi", "Phi", "R", "p_max_used", "tail_bound"]


def _density_row(s):
    return [s.lam, s.x, s.phi, s.Phi, s.R, s.p_max_used, s.tail_bound]


def _limit_for(lam: float) -> int:
    from .density import required_limit

    return max(required_limit(math.exp(2.0 * lam)), 100)


def _spectrum_tables(result):
    best = result.best_zero()
    total = result.analytic_total()
    coeff_rows = [[n, result.computed_c[n], int(best[n]), total[n]] for n in range(result.computed_c.size)]
    match_rows = [[m.zero_index, m.y, m.peak_n, m.rel_err] for m in result.matches]
    return (
        (["n", "computed_abs_cn", "best_zero_index", "analytic_abs_cn"], coeff_rows),
        (["zero_index", "y_k", "peak_n", "rel_err"], match_rows),
    )


def _matches_path(path):
    p = Path(path)
    return p.with_name(p.stem + "_matches" + (p.suffix or ".csv"))


def cmd_spectrum(args) -> int:
    from .spectrum import GridSpec, compute_spectrum, sign_convention

    grid = GridSpec.from_window(*args.window, args.n)
    store = _store(args.limit or _limit_for(grid.lo), args.cache)
    table = _table(args.zeros)
    _, result = compute_spectrum(grid, store, table, args.threshold, args.max_zeros)
    coeffs, matches = _spectrum_tables(result)
    if args.csv:
        emit_csv(args.csv, *coeffs)
        emit_csv(_matches_path(args.csv), *matches)
    else:
        emit_csv(None, *matches)
    print(f"harmonics_identified={result.harmonics_identified} sign={sign_convention(result)}", file=sys.stderr)
    return 0


# ---------------------------------------------------------------------------
# reproduce


@dataclass
class RunConfig:
    profile: str = "desk"
    prime_limit: int = 0
    zeros_path: str | None = None
    window: tuple = (-16.0, -11.7756)
    n_samples: int = 4096
    output_dir: str = "zhlab-run"
    threads: int = 1
    seed: int = 0
    cache: str | None = None
    match_threshold: float = 0.5
    max_zeros: int = 22
    explicit_u: tuple = (1000.0, 10000.0, 100000.0, 1000000.0)
    explicit_K: int = 100

    def __post_init__(self):
        from .primes import PROFILES

        if self.profile not in PROFILES:
            raise InvalidArgumentError(f"unknown profile {self.profile!r}")
        if not self.prime_limit:
            self.prime_limit = PROFILES[self.profile]
        self.window = tuple(float(w) for w in self.window)
        self.explicit_u = tuple(float(u) for u in self.explicit_u)
        if not (self.window[0] < self.window[1] < 0):
            raise InvalidArgumentError(f"window {self.window} must be increasing and entirely negative")
        if self.threads < 1:
            raise InvalidArgumentError("threads must be >= 1")

    def to_json(self):
        d = asdict(self)
        d["window"] = list(self.window)
        d["explicit_u"] = list(self.explicit_u)
        return d


class StageError(ZhlError):
    kind = "stage-failed"

    def __init__(self, stage, cause):
        super().__init__(f"stage {stage!r} failed: {cause}")
        self.stage = stage
        self.cause = cause

    def to_dict(self):
        d = self.cause.to_dict() if isinstance(self.cause, ZhlError) else {"error": type(self.cause).__name__,
                                                                           "message": str(self.cause)}
        d["stage"] = self.stage
        d["message"] = str(self)
        return d


def _sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def reproduce_pipeline(config: RunConfig) -> dict:
    """sieve -> density sampling -> spectrum -> harmonic matching -> explicit-formula check.

    Outputs are assembled in a staging directory and moved into
    ``config.output_dir`` only when every stage succeeded.  Returns the manifest.
    """
    from .density import chebyshev_sample
    from .primes import sieve_segmented
    from .spectrum import GridSpec, build_result, fft_cosine_coefficients, identify_harmonics, sample_on_grid
    from .spectrum import sign_convention

    set_threads(config.threads)
    out_dir = Path(config.output_dir)
    out_dir.parent.mkdir(parents=True, exist_ok=True)
    staging = Path(tempfile.mkdtemp(dir=out_dir.parent, prefix="." + out_dir.name + ".staging-"))
    timings, results, files = {}, {}, {}
    state = {}

    def stage(name, fn):
        t0 = time.perf_counter()
        try:
            value = fn()
        except Exception as exc:  # abort with the stage named
            raise StageError(name, exc) from exc
        timings[name] = round(time.perf_counter() - t0, 6)
        return value

    def write(name, header, rows):
        path = staging / name
        path.write_text(csv_text(header, rows), encoding="utf-8", newline="\n")
        files[name] = path

    try:
        grid = stage("config", lambda: GridSpec.from_window(*config.window, config.n_samples))
        if config.cache:
            store = stage("sieve", lambda: _store(config.prime_limit, config.cache))
        else:
            store = stage("sieve", lambda: sieve_segmented(config.prime_limit))
        results["prime_count"] = store.count
        table = stage("zeros", lambda: _table(config.zeros_path))
        results["zeros_used"] = len(table)
        samples = stage("density", lambda: sample_on_grid(grid, store, table))
        write("samples.csv", ["j", "alpha"] + DENSITY_HEADER,
              [[j, a] + _density_row(s) for j, (a, s) in enumerate(zip(grid.alphas(), samples))])
        coeffs = stage("spectrum", lambda: fft_cosine_coefficients(np.array([s.R for s in samples])))
        result = stage(
            "matching",
            lambda: identify_harmonics(build_result(grid, coeffs, table, config.max_zeros), config.match_threshold),
        )
        (ch, cr), (mh, mr) = _spectrum_tables(result)
        write("coefficients.csv", ch, cr)
        write("matches.csv", mh, mr)
        results["harmonics_identified"] = result.harmonics_identified
        results["sign_convention"] = sign_convention(result)
        results["matches"] = [asdict(m) for m in result.matches]

        def explicit():
            K = min(config.explicit_K, len(table))
            rows = []
            for u in config.explicit_u:
                if u > store.limit:
                    continue
                s = chebyshev_sample(u, store, table, K)
                rows.append([u, s.psi, s.lhs, s.rhs_truncated, abs(s.lhs - s.rhs_truncated)])
            return K, rows

        K, rows = stage("explicit", explicit)
        write("explicit.csv", ["u", "psi", "lhs", "rhs", "abs_err"], rows)
        results["explicit_K"] = K
        results["explicit_max_abs_err"] = max((r[4] for r in rows), default=None)

        manifest = {
            "config": config.to_json(),
            "versions": {
                "zhlab": __version__,
                "python": platform.python_version(),
                "numpy": np.__version__,
                "backend": backend(),
            },
            "inputs": {
                "prime_limit": store.limit,
                "prime_source": store.source,
                "zeros_source": table.source,
                "zeros_path": config.zeros_path,
                "zeros_sha256": _sha256(config.zeros_path) if config.zeros_path else None,
            },
            "checksums": {name: _sha256(path) for name, path in sorted(files.items())},
            "timings": timings,
            "results": results,
        }
        (staging / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        if out_dir.exists():
            shutil.rmtree(out_dir)
        os.replace(staging, out_dir)
        return manifest
    finally:
        if staging.exists():
            shutil.rmtree(staging, ignore_errors=True)


def cmd_reproduce(args) -> int:
    if args.manifest:
        with open(args.manifest, "r", encoding="utf-8") as fh:
            cfg = json.load(fh)["config"]
        if args.output_dir:
            cfg["output_dir"] = args.output_dir
        config = RunConfig(**cfg)
    else:
        kw = dict(profile=args.profile, prime_limit=args.limit or 0, zeros_path=args.zeros,
                  n_samples=args.n, threads=args.threads, seed=args.seed, cache=args.cache,
                  output_dir=args.output_dir or "zhlab-run")
        if args.window:
            kw["window"] = args.window
        config = RunConfig(**kw)
    manifest = reproduce_pipeline(config)
    r = manifest["results"]
    print(f"harmonics_identified={r['harmonics_identified']} sign={r['sign_convention']} output={config.output_dir}")
    return 0


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="zhlab", description="prime density and zeta-zero numerics")
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="cmd", required=True)

    sp = sub.add_parser("primes", help="sieve primes and write the cache")
    sp.add_argument("--limit", type=int, required=True)
    sp.add_argument("--cache")
    sp.add_argument("--segment-size", type=int)
    sp.set_defaults(func=cmd_primes)

    sp = sub.add_parser("specfun", help="special-function checks")
    ssub = sp.add_subparsers(dest="specfun_cmd", required=True)
    st = ssub.add_parser("selftest")
    st.add_argument("--seed", type=int, default=12345)
    st.set_defaults(func=cmd_specfun)

    sp = sub.add_parser("zeta", help="evaluate zeta")
    zsub = sp.add_subparsers(dest="zeta_cmd", required=True)
    ze = zsub.add_parser("eval")
    ze.add_argument("--re", type=float, required=True)
    ze.add_argument("--im", type=float, default=0.0)
    ze.add_argument("--csv")
    ze.set_defaults(func=cmd_zeta_eval)
    zf = zsub.add_parser("check-fe")
    zf.add_argument("--samples", type=int, default=100)
    zf.add_argument("--seed", type=int, default=0)
    zf.add_argument("--csv")
    zf.set_defaults(func=cmd_zeta_fe)

    sp = sub.add_parser("flow", help="continuation root finding")
    g = sp.add_mutually_exclusive_group(required=True)
    g.add_argument("--seeds", help='comma-separated seeds, e.g. "1+1i,1+2i"')
    g.add_argument("--ymax", type=float, help="find zeros up to this height from seeds on Re z = 1")
    sp.add_argument("--seed-spacing", type=float, default=0.5)
    sp.add_argument("--csv", help="trajectory CSV (or zero list with --ymax)")
    sp.add_argument("--summary", help="summary CSV (default stdout)")
    sp.add_argument("--workers", type=int, default=1)
    sp.set_defaults(func=cmd_flow)

    def zeros_opts(q):
        q.add_argument("--file")
        q.add_argument("--max", type=int)

    sp = sub.add_parser("zeros", help="zeros table, weight sum, residue sum")
    zeros_opts(sp)
    sp.add_argument("--sum-gamma", action="store_true")
    sp.set_defaults(func=cmd_zeros)
    zs = sp.add_subparsers(dest="zeros_cmd")
    zz = zs.add_parser("z-eval")
    zeros_opts(zz)
    zz.add_argument("--lambda", dest="lambda_range", type=_range_arg("--lambda"), required=True)
    zz.add_argument("--csv")
    zz.set_defaults(func=cmd_zeros)

    sp = sub.add_parser("density", help="prime densities and the explicit formula")
    dsub = sp.add_subparsers(dest="density_cmd", required=True)
    dp = dsub.add_parser("phi")
    dp.add_argument("--lambda-range", type=_range_arg("--lambda-range"), required=True)
    dp.add_argument("--cache")
    dp.add_argument("--limit", type=int)
    dp.add_argument("--csv")
    dp.set_defaults(func=cmd_density)
    de = dsub.add_parser("explicit")
    de.add_argument("--u-range", type=_range_arg("--u-range"), required=True)
    de.add_argument("--zeros")
    de.add_argument("-K", type=int, default=100)
    de.add_argument("--cache")
    de.add_argument("--limit", type=int)
    de.add_argument("--csv")
    de.set_defaults(func=cmd_density)

    sp = sub.add_parser("spectrum", help="FFT of the residual on the Chebyshev grid")
    sp.add_argument("--window", type=parse_window, required=True)
    sp.add_argument("--n", type=int, default=4096)
    sp.add_argument("--cache")
    sp.add_argument("--limit", type=int)
    sp.add_argument("--zeros")
    sp.add_argument("--csv")
    sp.add_argument("--threshold", type=float, default=0.5)
    sp.add_argument("--max-zeros", type=int, default=22)
    sp.set_defaults(func=cmd_spectrum)

    sp = sub.add_parser("reproduce", help="end-to-end desk-scale pipeline")
    sp.add_argument("--profile", default="desk", choices=["desk", "large"])
    sp.add_argument("--limit", type=int)
    sp.add_argument("--zeros")
    sp.add_argument("--window", type=parse_window)
    sp.add_argument("--n", type=int, default=4096)
    sp.add_argument("--output-dir")
    sp.add_argument("--threads", type=int, default=1)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--cache")
    sp.add_argument("--manifest", help="re-run with the config stored in a manifest")
    sp.set_defaults(func=cmd_reproduce)
    return p


_RANGE_FLAGS = ("--lambda", "--lambda-range", "--u-range", "--window")


def _glue_negative_ranges(argv):
    # "--window -16:-12" would otherwise read "-16:-12" as an option
    out = []
    it = iter(argv)
    for tok in it:
        if tok in _RANGE_FLAGS:
            nxt = next(it, None)
            if nxt is None:
                out.append(tok)
            else:
                out.append(f"{tok}={nxt}")
        else:
            out.append(tok)
    return out


def parse_and_dispatch(argv=None) -> int:
    parser = build_parser()
    argv = _glue_negative_ranges(list(sys.argv[1:] if argv is None else argv))
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits 2 on usage errors, 0 on --help
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except ZhlError as exc:
        print(json.dumps(exc.to_dict(), sort_keys=True), file=sys.stderr)
        return 1
    except (OSError, ValueError) as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}, sort_keys=True), file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(parse_and_dispatch(sys.argv[1:]))
