import math
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from zhlab.errors import InvalidArgumentError, ParseError
from zhlab.specfun import gamma_weight
from zhlab.zeros import (
    ZeroEntry,
    ZerosTable,
    from_ordinates,
    load_zeros_file,
    merge,
    residue_sum_Z,
    select,
    single_zero_Z,
    sum_abs_gamma,
)

Y1 = 14.134725141734693790
FIFTY = load_zeros_file(Path(__file__).parent / "data" / "zeros_1000.txt", 50)


def write(tmp_path, text, name="z.txt"):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_load_three(tmp_path):
    p = write(tmp_path, "14.134725141734693790\n21.022039638771554993\n25.010857580145688763\n")
    t = load_zeros_file(p)
    assert len(t) == 3 and t.source == "file"
    assert [e.index for e in t] == [1, 2, 3]
    assert all(e.a == 0.5 for e in t)
    e = t[0]
    assert abs(e.gamma - gamma_weight(complex(0.5, e.y))) <= 1e-12 * abs(e.gamma)


def test_load_comments_blank_and_max(tmp_path):
    p = write(tmp_path, "# header\n\n14.1347\n  21.022  \n# mid\n25.0109\n")
    assert len(load_zeros_file(p)) == 3
    assert len(load_zeros_file(p, max_count=2)) == 2


def test_empty_file(tmp_path):
    t = load_zeros_file(write(tmp_path, ""))
    assert len(t) == 0
    assert residue_sum_Z(t, -13.0) == 0.0
    assert np.all(residue_sum_Z(t, np.linspace(-5, 5, 7)) == 0.0)
    assert sum_abs_gamma(t) == 0.0


@pytest.mark.parametrize(
    "text, line",
    [("14.1\nabc\n", 2), ("14.1\n21.0\n20.0\n", 3), ("-3\n", 1), ("14.1\n14.1\n", 2), ("\n\nnan\n", 3)],
)
def test_parse_errors(tmp_path, text, line):
    with pytest.raises(ParseError) as info:
        load_zeros_file(write(tmp_path, text))
    assert info.value.line == line


def test_missing_file(tmp_path):
    with pytest.raises(OSError):
        load_zeros_file(tmp_path / "nope.txt")


def test_entry_validation():
    with pytest.raises(InvalidArgumentError):
        ZeroEntry.at(1.0, 14.0)
    with pytest.raises(InvalidArgumentError):
        ZeroEntry.at(0.5, -1.0)
    a, b = ZeroEntry.at(0.5, 14.0), ZeroEntry.at(0.5, 14.0 + 1e-12)
    with pytest.raises(InvalidArgumentError):
        ZerosTable((a, b))
    with pytest.raises(InvalidArgumentError):
        ZerosTable((), source="bogus")


def test_reference_file(zeros_table):
    assert len(zeros_table) == 1000
    assert abs(zeros_table[0].y - Y1) < 1e-15
    ys = [e.y for e in zeros_table]
    assert all(b > a for a, b in zip(ys, ys[1:]))


def test_sum_abs_gamma(zeros_table):
    upper = sum_abs_gamma(zeros_table, conjugates=False)
    assert sum_abs_gamma(zeros_table) == pytest.approx(2 * upper, rel=1e-15)
    assert 3.0e-5 <= sum_abs_gamma(zeros_table) <= 4.0e-5
    one = zeros_table.head(1)
    assert sum_abs_gamma(one, conjugates=False) == pytest.approx(abs(gamma_weight(complex(0.5, Y1))), rel=1e-15)
    # the first zero carries almost all the weight
    assert upper == pytest.approx(abs(zeros_table[0].gamma), rel=0.02)


def test_weights_decrease(zeros_table):
    w = [abs(e.gamma) for e in zeros_table.head(100)]
    assert all(b < a for a, b in zip(w, w[1:]))


def test_Z_at_zero(zeros_table):
    direct = 2 * math.fsum(e.gamma.real for e in zeros_table)
    assert abs(residue_sum_Z(zeros_table, 0.0) - direct) < 1e-15


def test_Z_real_and_bounded(zeros_table):
    lams = np.linspace(-30, -1, 400)
    z = residue_sum_Z(zeros_table, lams)
    assert z.dtype == np.float64 and z.shape == lams.shape
    assert isinstance(residue_sum_Z(zeros_table, -3.0), float)
    assert np.all(np.abs(z) <= sum_abs_gamma(zeros_table) * (1 + 1e-12))


@settings(max_examples=50, deadline=None)
@given(st.floats(-40, 40))
def test_Z_bound_property(lam):
    assert abs(residue_sum_Z(FIFTY, lam)) <= sum_abs_gamma(FIFTY) * (1 + 1e-12)


def test_single_zero_period(zeros_table):
    one = zeros_table.head(1)
    period = 2 * math.pi / Y1
    assert period == pytest.approx(0.44453, abs=1e-5)
    for lam in (-13.0, -7.2, 0.3):
        assert residue_sum_Z(one, lam + period) == pytest.approx(residue_sum_Z(one, lam), abs=1e-18)
        assert single_zero_Z(one[0], lam) == pytest.approx(residue_sum_Z(one, lam), rel=1e-13, abs=1e-20)
    # 2.2496 = y1 / (2 pi) is not a period
    lam = -13.0
    assert abs(residue_sum_Z(one, lam + Y1 / (2 * math.pi)) - residue_sum_Z(one, lam)) > 1e-6


def test_off_line_zero_grows():
    t = from_ordinates([Y1], a=0.75)
    amp = [max(abs(residue_sum_Z(t, l + s)) for s in np.linspace(0, 0.5, 50)) for l in (-10.0, -20.0)]
    assert amp[1] / amp[0] == pytest.approx(math.exp(10 / 4), rel=0.05)


def test_merge_and_select(zeros_table):
    a = zeros_table.head(5)
    b = from_ordinates([e.y + 1e-8 for e in zeros_table.head(8)][3:], source="flow")
    m = merge(a, b)
    assert m.source == "merged" and len(m) == 8
    assert [e.index for e in m] == list(range(1, 9))
    assert m[3].y == a[3].y  # first table wins
    s = select(zeros_table, [1, 8, 15])
    assert [e.index for e in s] == [1, 8, 15]
    assert s[1].y == zeros_table[7].y


def test_below_and_arrays(zeros_table):
    sub = zeros_table.below(100)
    assert len(sub) == 29
    a, y, g = sub.arrays()
    assert a.shape == y.shape == g.shape == (29,)
    assert sub.arrays()[0] is a
