import math

import numpy as np
import pytest

from conftest import MU1, MU2
from stripwindow.coefficients import (
    FitError,
    FitReport,
    mu_from_alpha,
    mu_from_integral,
    mu_quadrature,
    mu_report,
    verify_decay_law,
    verify_popov,
)
from stripwindow.geometry import ConfigurationError, Parity, SpectralPoint
from stripwindow.resonance import bound_state_field


def test_mu_from_alpha_examples():
    assert mu_from_alpha(0.0) == 0.0
    assert mu_from_alpha(2 / math.sqrt(math.pi)) == pytest.approx(1.0)


def test_semi_analytic_matches_quadrature(field1_128):
    assert mu_quadrature(field1_128) == pytest.approx(mu_from_integral(field1_128), rel=1e-4)


def test_quadrature_oracle_even_sector():
    from stripwindow.resonance import threshold_resonance

    f = threshold_resonance(2, 64)
    assert mu_quadrature(f) == pytest.approx(mu_from_integral(f), rel=1e-4)


def test_outside_first_mode_contributes_nothing(field1_128):
    from dataclasses import replace

    c = field1_128.c.copy()
    c[0] = 7.0
    assert mu_from_integral(replace(field1_128, c=c)) == pytest.approx(mu_from_integral(field1_128), rel=1e-15)


def test_mu_integral_rejects_bound_field():
    a = 3.0
    f = bound_state_field(a, SpectralPoint(a=a, parity=Parity.ODD, eps=0.95, m=0.2), 64)
    with pytest.raises(ConfigurationError):
        mu_from_integral(f)


def test_mu_report_pinned():
    rep = mu_report(1)
    assert rep.mu_integral == pytest.approx(MU1, rel=1e-5)
    assert rep.mu_integral > 0 and rep.mu_alpha > 0
    assert rep.rel_diff == pytest.approx(abs(rep.mu_integral - rep.mu_alpha) / rep.mu_integral)
    assert set(rep.as_dict()) == {"n", "a_n", "mu_integral", "alpha", "mu_alpha", "rel_diff", "N"}


def test_mu2_pinned_without_extrapolation_is_close():
    rep = mu_report(2, 256, extrapolate_N=False)
    assert rep.mu_integral == pytest.approx(MU2, rel=5e-3)
    with pytest.raises(ConfigurationError):
        mu_report(0)


def test_single_point_grid_is_a_fit_error():
    with pytest.raises(FitError):
        verify_decay_law(1, [0.1], mu=MU1)


def test_grid_validation():
    with pytest.raises(ConfigurationError):
        verify_decay_law(1, [0.1, 0.05], mu=MU1)
    with pytest.raises(ConfigurationError):
        verify_decay_law(1, [0.1, 0.3], mu=MU1)
    with pytest.raises(ConfigurationError):
        verify_popov([0.6, 0.3])


def test_popov_small_window_magnitude():
    rep = verify_popov([0.3, 0.2], N=64)
    g = rep.extras["gap"]
    assert 2e-4 < g[1] < 6e-4
    assert rep.checks["limit"]


def test_fit_report_serializes():
    rep = FitReport(model="m", coefficients=[np.float64(1.0)], residual_norm=0.0, sample=[(1, 2, 3)],
                    checks={"x": np.True_})
    d = rep.as_dict()
    assert d["passed"] is True and d["sample"] == [[1.0, 2.0, 3.0]]
