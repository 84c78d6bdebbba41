import math

import numpy as np
import pytest

from stripwindow.geometry import ConfigurationError, Parity
from stripwindow.matching import (
    NotSingularError,
    assemble,
    column_one_scale,
    decay_rate,
    kernel,
    regularized_det,
    regularized_logdet,
    regularized_matrix,
)
from stripwindow.modal import PoleError, overlap, p_term, q_exponent

SQ3 = math.sqrt(3)


def test_single_mode_odd_threshold_is_bracket_endpoint():
    # 1x1 odd system at eps = 1: beta cos(beta a) O_11 vanishes at a = pi/sqrt3
    a = math.pi / SQ3
    assert abs(regularized_det(a, 1.0, "odd", 1)) < 1e-15
    assert regularized_det(a - 1e-3, 1.0, "odd", 1) * regularized_det(a + 1e-3, 1.0, "odd", 1) < 0


def test_assembled_entries_match_definition():
    a, eps, N = 1.3, 0.7, 6
    for parity in Parity:
        C = assemble(a, eps, parity, N).entries
        for j in range(1, N + 1):
            for k in range(1, N + 1):
                ref = (q_exponent(j, eps) + p_term(k, eps, a, parity)) * overlap(j, k)
                assert C[j - 1, k - 1] == pytest.approx(ref, rel=1e-12, abs=1e-14)


def test_regularization_scales_column_one_only():
    a, eps = 2.0, 0.9
    for parity in Parity:
        R = regularized_matrix(a, eps, parity, 8)
        C = assemble(a, eps, parity, 8).entries
        s = column_one_scale(a, eps, parity)
        assert np.allclose(R[:, 0], C[:, 0] * s)
        assert np.array_equal(R[:, 1:], C[:, 1:])


def test_assemble_at_pole_raises_but_regularized_is_finite():
    a = math.pi / SQ3  # cot pole, odd sector, eps = 1
    with pytest.raises(PoleError):
        assemble(a * 2, 1.0, "odd", 4)
    assert math.isfinite(regularized_det(a * 2, 1.0, "odd", 4))


def test_logdet_handles_large_truncation():
    s, l = regularized_logdet(2.0, 0.9, "even", 1024)
    assert s != 0 and math.isfinite(l) and l > 700  # det itself would overflow


def test_decay_rate():
    assert decay_rate(1.0) == 0.0
    assert decay_rate(0.75) == pytest.approx(0.5)
    with pytest.raises(ConfigurationError):
        decay_rate(1.01)


def test_kernel_at_threshold_and_rejection_elsewhere():
    from stripwindow.thresholds import raw_threshold

    a = raw_threshold(1, 64)
    kv = kernel(a, 1.0, "odd", 64)
    assert kv.residual <= 1e-8
    assert np.linalg.norm(kv.b) == pytest.approx(1.0)
    C = assemble(a, 1.0, "odd", 64).entries
    assert np.linalg.norm(C @ kv.b) < 1e-8 * np.linalg.norm(C, 2)
    with pytest.raises(NotSingularError) as err:
        kernel(a + 0.3, 1.0, "odd", 64)
    assert err.value.residual > 1e-8


def test_matrix_rejects_bad_inputs():
    with pytest.raises(ConfigurationError):
        regularized_matrix(0.0, 0.9, "even", 4)
    with pytest.raises(ConfigurationError):
        regularized_matrix(1.0, 0.9, "even", 0)
    with pytest.raises(ConfigurationError):
        regularized_matrix(1.0, 0.2, "even", 4)
