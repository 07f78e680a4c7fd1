"""Write the imaginary parts of the first N nontrivial zeta zeros, one per line.

Uses mpmath as an independent reference; the output file is the fixture
consumed by ``zeros --file``.

    python scripts/make_zeros_file.py 1000 tests/data/zeros_1000.txt
"""
import sys

import mpmath


def main(count: int, path: str) -> None:
    mpmath.mp.dps = 25
    with open(path, "w") as fh:
        for k in range(1, count + 1):
            fh.write(mpmath.nstr(mpmath.zetazero(k).imag, 20, strip_zeros=False) + "\n")


if __name__ == "__main__":
    main(int(sys.argv[1]), sys.argv[2])
