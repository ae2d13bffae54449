import math

import numpy as np
import pytest
from scipy import integrate, special

from lorainterf.distributions import (
    gauss_legendre_on_breaks,
    gauss_legendre_panels,
    marcum_q1,
    max_rayleigh_logpdf,
    q_function,
    q_function_inv,
    rayleigh_logcdf,
    rayleigh_pdf,
    rice_cdf,
    rice_logcdf,
    rice_pdf,
)


def test_q_function_values():
    assert q_function(0.0) == 0.5
    assert q_function(1.96) == pytest.approx(0.0249979, rel=1e-5)
    assert q_function(37.0) > 0.0
    assert q_function_inv(q_function(3.3)) == pytest.approx(3.3)


def test_marcum_q_limits_and_series():
    b = np.linspace(0, 5, 11)
    assert np.allclose(marcum_q1(0.0, b), np.exp(-b * b / 2))
    # series form Q1(a, b) = exp(-(a^2+b^2)/2) sum_k (a/b)^k I_k(ab)
    a, bb = 1.7, 2.3
    series = math.exp(-(a * a + bb * bb) / 2) * sum((a / bb) ** k * special.iv(k, a * bb) for k in range(0, 80))
    assert marcum_q1(a, bb) == pytest.approx(series, rel=1e-12)


@pytest.mark.parametrize("v", [0.0, 0.5, 3.0, 20.0, 60.0])
def test_rice_pdf_normalized_and_consistent(v):
    total, _ = integrate.quad(lambda y: float(rice_pdf(y, v)), 0, v + 40, points=[v], limit=200)
    assert total == pytest.approx(1.0, abs=1e-10)
    y = v + 0.7
    cdf, _ = integrate.quad(lambda t: float(rice_pdf(t, v)), 0, y, limit=200)
    assert float(rice_cdf(y, v)) == pytest.approx(cdf, abs=1e-10)
    assert float(1 - rice_cdf(y, v)) == pytest.approx(float(marcum_q1(v, y)), abs=1e-12)


def test_rice_reduces_to_rayleigh():
    y = np.linspace(0.01, 6, 50)
    assert np.allclose(rice_pdf(y, 0.0), rayleigh_pdf(y))
    assert np.allclose(rice_logcdf(y, 0.0), rayleigh_logcdf(y))


def test_log_domain_is_finite_where_linear_underflows():
    assert rayleigh_logcdf(1e-200) == pytest.approx(2 * math.log(1e-200) - math.log(2.0))
    assert rayleigh_logcdf(1e-5) == pytest.approx(math.log(-math.expm1(-0.5e-10)), rel=1e-12)
    assert rayleigh_logcdf(0.0) == -np.inf
    assert rice_logcdf(0.0, 1.0) == -np.inf
    assert np.isfinite(max_rayleigh_logpdf(6.0, 4095))


def test_max_rayleigh_density_integrates_to_one():
    total, _ = integrate.quad(lambda y: math.exp(float(max_rayleigh_logpdf(y, 511))), 0, 12, points=[3.5], limit=200)
    assert total == pytest.approx(1.0, abs=1e-10)


def test_gauss_legendre_rules():
    x, w = gauss_legendre_panels(0.0, 2.0, 3, 5)
    assert np.sum(w * x**9) == pytest.approx(2.0**10 / 10)
    x, w = gauss_legendre_on_breaks([0.0, 0.5, 3.0], 6)
    assert np.sum(w * np.exp(x)) == pytest.approx(math.exp(3.0) - 1.0)
