"""Symbol error rate of LoRa under AWGN only.

With per-sample SNR ``snr`` the normalized decision metric of the bin that
carries the symbol is Rice with location ``sqrt(2 n snr)`` and all other bins
are unit Rayleigh, so the error probability is the chance that the largest of
``n - 1`` Rayleigh variables exceeds the Rice variable.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import integrate

from .distributions import max_rayleigh_logpdf, q_function, q_function_inv, rice_cdf
from .phy import as_params

EULER_GAMMA = float(np.euler_gamma)


class IntegrationError(ArithmeticError):
    """A quadrature did not reach its requested accuracy."""


def harmonic_number(n: int) -> float:
    return math.fsum(1.0 / k for k in range(1, n + 1))


def symbol_snr(sf: int, snr_db) -> np.ndarray:
    """Per-symbol SNR ``n * snr`` (linear) from per-sample SNR in dB."""
    n = as_params(sf).n
    return n * 10.0 ** (np.asarray(snr_db, dtype=float) / 10.0)


def rice_location(sf: int, snr_db: float) -> float:
    return math.sqrt(2.0 * float(symbol_snr(sf, snr_db)))


def _ser_awgn_exact_scalar(n: int, v: float, epsrel: float) -> float:
    def integrand(y: float) -> float:
        if y <= 0.0:
            return 0.0
        return float(rice_cdf(y, v) * math.exp(max_rayleigh_logpdf(y, n - 1)))

    y_mode = math.sqrt(2.0 * math.log(n))
    hi = max(y_mode, 0.5 * v) + 12.0
    points = sorted({y_mode, min(0.5 * v, hi)})
    value, abserr = integrate.quad(
        integrand, 0.0, hi, points=points, epsabs=0.0, epsrel=epsrel, limit=400
    )
    if not math.isfinite(value) or abserr > max(1e-13, 1e-6 * abs(value)):
        raise IntegrationError(f"AWGN SER quadrature did not converge (value={value}, err={abserr})")
    return min(max(value, 0.0), (n - 1) / n)


def ser_awgn_exact(sf: int, snr_db, *, epsrel: float = 1e-10):
    """Exact SER via one-dimensional quadrature; vectorized over ``snr_db``.

    The integrand is ``F_Ri(y; v) f_max(y)`` where ``f_max`` is the density of
    the largest noise bin, evaluated through ``exp`` of its logarithm so the
    ``(n - 2)``-th power of the Rayleigh CDF cannot underflow mid-way.
    """
    n = as_params(sf).n
    snr_db = np.asarray(snr_db, dtype=float)
    out = np.empty(snr_db.shape)
    for idx, s in np.ndenumerate(snr_db):
        if s == -math.inf:
            out[idx] = (n - 1) / n
        elif s == math.inf:
            out[idx] = 0.0
        else:
            out[idx] = _ser_awgn_exact_scalar(n, math.sqrt(2.0 * n * 10.0 ** (s / 10.0)), epsrel)
    return out[()] if out.ndim == 0 else out


def _gaussian_approx_constants(n: int) -> tuple[float, float]:
    h = harmonic_number(n - 1)
    root = math.sqrt(h * h - math.pi**2 / 12.0)
    return math.sqrt(root), math.sqrt(h - root + 0.5)


def ser_awgn_gaussian_approx(sf: int, snr_db):
    """Gaussian approximation of the AWGN SER (harmonic-number form).

    Both the signal bin and the largest noise bin are treated as Gaussian; the
    SNR entering the formula is the per-symbol value ``n * snr``.
    """
    n = as_params(sf).n
    offset, scale = _gaussian_approx_constants(n)
    x = np.sqrt(symbol_snr(sf, snr_db))
    return q_function((x - offset) / scale)


def ser_awgn_concise_approx(sf: int, snr_db):
    """Extreme-value (Gumbel) form: ``Q(sqrt(2 n snr) - sqrt(2 (ln2 sf + gamma)))``."""
    sf = as_params(sf).sf
    x = np.sqrt(2.0 * symbol_snr(sf, snr_db))
    return q_function(x - math.sqrt(2.0 * (math.log(2.0) * sf + EULER_GAMMA)))


def snr_db_for_gaussian_approx(sf: int, target) -> np.ndarray:
    """Closed-form inverse of :func:`ser_awgn_gaussian_approx`."""
    n = as_params(sf).n
    offset, scale = _gaussian_approx_constants(n)
    x = scale * q_function_inv(target) + offset
    return 10.0 * np.log10(x * x / n)
