"""Kernel backend selection.

Hot loops are compiled with numba when it is importable.  Setting
``ZHL_DISABLE_NUMBA=1`` (or ``ZHL_BACKEND=numpy``) selects the pure-numpy
fallbacks instead; both paths implement the same contracts.
"""
import contextlib
import os
import warnings

try:
    import numba

    # an old system TBB only means numba falls back to another threading layer
    warnings.filterwarnings("ignore", message="The TBB threading layer requires", category=numba.NumbaWarning)
except ImportError:  # pragma: no cover - numba is an optional accelerator
    numba = None

HAVE_NUMBA = numba is not None


def _initial_backend():
    if os.environ.get("ZHL_DISABLE_NUMBA", "").lower() in ("1", "true", "yes"):
        return "numpy"
    requested = os.environ.get("ZHL_BACKEND", "").lower()
    if requested in ("numpy", "numba"):
        if requested == "numba" and not HAVE_NUMBA:
            return "numpy"
        return requested
    return "numba" if HAVE_NUMBA else "numpy"


_state = {"backend": _initial_backend()}


def backend():
    return _state["backend"]


def set_backend(name):
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {name!r}")
    if name == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba is not installed")
    _state["backend"] = name


@contextlib.contextmanager
def using_backend(name):
    previous = backend()
    set_backend(name)
    try:
        yield
    finally:
        set_backend(previous)


def set_threads(n):
    if HAVE_NUMBA:
        numba.set_num_threads(max(1, min(int(n), numba.config.NUMBA_NUM_THREADS)))


def njit(*args, **kwargs):
    """``numba.njit`` when available, else the identity decorator."""
    if HAVE_NUMBA:
        kwargs.setdefault("cache", True)
        return numba.njit(*args, **kwargs)
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]
    return lambda f: f


prange = numba.prange if HAVE_NUMBA else range
