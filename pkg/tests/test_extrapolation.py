import pytest
from hypothesis import given
from hypothesis import strategies as st

from stripwindow.extrapolation import extrapolate, richardson, truncation_ladder
from stripwindow.geometry import ConfigurationError


def test_richardson_examples():
    assert richardson(1.04, 1.01, 2) == pytest.approx(1.0)
    assert richardson(3.0, 3.0, 1.7) == 3.0


def test_richardson_rejects_nonpositive_order():
    with pytest.raises(ConfigurationError):
        richardson(1.0, 1.0, 0.0)


@given(st.floats(-10, 10), st.floats(-5, 5), st.floats(-5, 5))
def test_two_stage_removes_first_and_second_order(limit, c1, c2):
    vals = [limit + c1 * h + c2 * h * h for h in (0.25, 0.125, 0.0625)]
    assert extrapolate(vals, (1.0, 2.0)) == pytest.approx(limit, abs=1e-9)


def test_extrapolate_length_mismatch():
    with pytest.raises(ConfigurationError):
        extrapolate([1.0, 2.0], (1.0, 2.0))


def test_truncation_ladder():
    assert truncation_ladder(128) == [32, 64, 128]
    with pytest.raises(ConfigurationError):
        truncation_ladder(12)
    with pytest.raises(ConfigurationError):
        truncation_ladder(130)
