import math

import numpy as np
import pytest

from conftest import A1, A2
from stripwindow.geometry import ConfigurationError, Parity
from stripwindow.matching import kernel_m
from stripwindow.thresholds import (
    BracketAnomalyError,
    ConvergenceError,
    bracket,
    find_threshold,
    raw_threshold,
    threshold_table,
)

SQ3 = math.sqrt(3)


def test_a0_is_zero():
    r = find_threshold(0)
    assert r.a_n == 0.0 and r.residual is None and r.N_used is None


def test_pinned_a1_a2():
    assert find_threshold(1).a_n == pytest.approx(A1, abs=2e-6)
    assert find_threshold(2).a_n == pytest.approx(A2, abs=2e-6)


def test_bracket_values():
    lo, hi = bracket(1)
    assert (lo, hi) == pytest.approx((1.8138, 3.6276), abs=1e-4)
    assert bracket(2, d=1.0) == pytest.approx((2 / SQ3, 3 / SQ3))


def test_table_strictly_increasing_and_spaced():
    recs = threshold_table(4, check=False)
    a = [r.a_n for r in recs]
    assert len(recs) == 5 and a[0] == 0.0
    assert all(x < y for x, y in zip(a, a[1:]))
    assert all(0 < y - x < 2 * math.pi / SQ3 for x, y in zip(a, a[1:]))
    for r in recs[1:]:
        assert r.bracket[0] < r.a_n < r.bracket[1]
        assert r.parity is (Parity.ODD if r.n % 2 else Parity.EVEN)


def test_raw_threshold_convergence_is_monotone():
    raw = [raw_threshold(1, N) for N in (32, 64, 128, 256, 512)]
    steps = np.abs(np.diff(raw))
    assert np.all(np.diff(steps) < 0)


def test_kernel_exists_at_threshold():
    a = raw_threshold(2, 128)
    assert kernel_m(a, 0.0, Parity.EVEN, 128).residual <= 1e-8
    assert find_threshold(2, check=False).residual <= 1e-8


def test_single_mode_collapses_to_bracket_end():
    # 400-point open-bracket scan cannot see the 1-mode root: it sits on the endpoint
    with pytest.raises(BracketAnomalyError) as err:
        raw_threshold(1, 1)
    assert err.value.scan is not None


def test_convergence_error_on_tight_tolerance():
    with pytest.raises(ConvergenceError):
        find_threshold(1, 64, tol=1e-12)


def test_negative_index_rejected():
    with pytest.raises(ConfigurationError):
        find_threshold(-1)
    with pytest.raises(ConfigurationError):
        threshold_table(-1)


def test_physical_units():
    r = find_threshold(1, check=False)
    assert r.physical(1.0) == pytest.approx(r.a_n / math.pi)
