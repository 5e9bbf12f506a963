import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qkflags.core import ParameterFrame, PoleError
from qkflags.qseries import bracket, compact_bracket, q_pochhammer


def frame(q, hbar=None, h=None):
    if h is not None:
        return ParameterFrame(np.sqrt(complex(q)), h, [1.0])
    return ParameterFrame.from_q(q, hbar, [1.0])


def test_pochhammer_examples():
    assert q_pochhammer(0.5, 2, 0.5) == pytest.approx(0.375)
    assert q_pochhammer(3.3 + 1j, 0, 0.5) == 1
    assert q_pochhammer(0.25, -1, 0.5) == pytest.approx(2.0)


def test_pochhammer_pole():
    with pytest.raises(PoleError):
        q_pochhammer(0.5, -1, 0.5)


def test_bracket_examples():
    fr = frame(0.5, 0.25)
    assert bracket(1.7 - 0.3j, 0, fr) == 1
    expected = (1 - 0.125) / (1 - 0.25) * (-np.sqrt(0.5) / 0.5)
    assert bracket(2.0, 1, fr) == pytest.approx(expected, rel=1e-14)
    assert bracket(2.0, 1, fr) == pytest.approx(-1.6499158, abs=1e-7)
    # numerator factor 1 - hbar/x vanishes at hbar = x
    assert bracket(0.8, 1, frame(0.5, 0.8)) == pytest.approx(0.0, abs=1e-15)


def test_bracket_negative_degree_zero_instead_of_pole():
    # (q/x; q)_{-1} has a pole at x = 1; the bracket itself vanishes there
    fr = frame(0.5, 3.0)
    assert bracket(1.0, -1, fr) == 0


@pytest.mark.parametrize("x,d,q", [(2.0, 1, 0.5), (3.0, 2, 0.3), (1.5 - 0.5j, -2, 0.4 + 0.1j), (0.7j, 3, 0.2)])
def test_compact_bracket_large_hbar(x, d, q):
    h = np.sqrt(1e12)
    big = bracket(x, d, frame(q, h=h)) * h ** (-d) * (-1) ** d
    assert compact_bracket(x, d, frame(q, h=h)) == pytest.approx(big, rel=1e-5)
    assert compact_bracket(x, 0, frame(q, h=h)) == 1


@settings(max_examples=40, deadline=None)
@given(st.integers(-4, 4), st.integers(-4, 4))
def test_pochhammer_additivity(d1, d2):
    # (x;q)_{d1+d2} = (x;q)_{d1} (q^{d1} x; q)_{d2}
    x, q = 0.37 + 0.21j, 0.45 - 0.1j
    lhs = q_pochhammer(x, d1 + d2, q)
    rhs = q_pochhammer(x, d1, q) * q_pochhammer(q ** d1 * x, d2, q)
    assert abs(lhs - rhs) <= 1e-10 * max(1.0, abs(lhs))
