"""Rayleigh/Rice helpers with unit scale, vectorized and log-domain where it matters."""

from __future__ import annotations

import numpy as np
from scipy import special, stats


def q_function(x):
    """Gaussian tail probability ``P(X > x)`` for a standard normal ``X``."""
    return special.ndtr(-np.asarray(x, dtype=float))


def q_function_inv(p):
    return -special.ndtri(np.asarray(p, dtype=float))


def marcum_q1(a, b):
    """First-order Marcum Q function ``Q_1(a, b)``.

    ``Q_1(a, b)`` is the survival function of a noncentral chi-square with two
    degrees of freedom and noncentrality ``a**2`` evaluated at ``b**2``.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return stats.ncx2.sf(b * b, 2, a * a)


def rice_pdf(y, v):
    y = np.asarray(y, dtype=float)
    v = np.asarray(v, dtype=float)
    # i0e(x) = exp(-x) I0(x) keeps the product finite for large y*v
    return y * np.exp(-0.5 * (y - v) ** 2) * special.i0e(y * v)


def rice_cdf(y, v):
    y = np.asarray(y, dtype=float)
    v = np.asarray(v, dtype=float)
    return special.chndtr(y * y, 2.0, v * v)


def rice_logcdf(y, v):
    """Natural log of the Rice CDF; ``-inf`` where the CDF underflows."""
    with np.errstate(divide="ignore"):
        return np.log(rice_cdf(y, v))


def rayleigh_pdf(y):
    y = np.asarray(y, dtype=float)
    return y * np.exp(-0.5 * y * y)


def rayleigh_logcdf(y):
    y = np.asarray(y, dtype=float)
    with np.errstate(divide="ignore", under="ignore"):
        x = 0.5 * y * y
        # log(1 - exp(-x)) ~ log(x) - x/2 once x is tiny; also covers x underflowing to 0
        small = 2.0 * np.log(np.abs(y)) - np.log(2.0) - 0.5 * x
        return np.where(x < 1e-8, np.where(y == 0, -np.inf, small), np.log(-np.expm1(-x)))


def max_rayleigh_logpdf(y, count: int):
    """Log density of the largest of ``count`` i.i.d. unit Rayleigh variables."""
    y = np.asarray(y, dtype=float)
    with np.errstate(divide="ignore"):
        return np.log(count) + np.log(y) - 0.5 * y * y + (count - 1) * rayleigh_logcdf(y)


def gauss_legendre_panels(lo: float, hi: float, panels: int, order: int):
    """Nodes and weights of a composite Gauss-Legendre rule on ``[lo, hi]``."""
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(lo, hi, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x).ravel()
    weights = (half[:, None] * w).ravel()
    return nodes, weights


def gauss_legendre_on_breaks(breaks, order: int):
    """Gauss-Legendre nodes/weights on each interval between consecutive ``breaks``."""
    breaks = np.asarray(breaks, dtype=float)
    x, w = np.polynomial.legendre.leggauss(order)
    half = 0.5 * np.diff(breaks)
    mid = 0.5 * (breaks[1:] + breaks[:-1])
    return (mid[:, None] + half[:, None] * x).ravel(), (half[:, None] * w).ravel()
