import os
from pathlib import Path

import pytest

from zhlab.primes import PROFILES, sieve_segmented
from zhlab.zeros import load_zeros_file

DATA = Path(__file__).parent / "data"
ZEROS_FILE = DATA / "zeros_1000.txt"


@pytest.fixture(scope="session")
def zeros_path():
    return ZEROS_FILE


@pytest.fixture(scope="session")
def zeros_table():
    return load_zeros_file(ZEROS_FILE)


@pytest.fixture(scope="session")
def small_store():
    return sieve_segmented(1_000_000)


@pytest.fixture(scope="session")
def desk_store():
    return sieve_segmented(PROFILES["desk"])


@pytest.fixture(scope="session")
def desk_cache(tmp_path_factory, desk_store):
    from zhlab.primes import write_cache

    path = tmp_path_factory.mktemp("cache") / "primes.zhl"
    write_cache(path, desk_store)
    return path


@pytest.fixture(autouse=True)
def _isolated_cache_dir(tmp_path, monkeypatch):
    # never touch the user's cache from tests
    if "ZHL_CACHE_DIR" not in os.environ:
        monkeypatch.setenv("ZHL_CACHE_DIR", str(tmp_path / "zhl-cache"))


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import REPORT
    except ImportError:
        return
    if not REPORT:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(REPORT, key=_crit_key):
        terminalreporter.write_line(REPORT[key])


def _crit_key(k):
    num = "".join(ch for ch in k if ch.isdigit())
    return (int(num or 0), k)
