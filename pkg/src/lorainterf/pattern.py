"""Interference patterns of a same-SF interferer after dechirping.

The transmitted interference pattern is ``R = DFT(x_I * conj(x_ref))``. Its
bins split into two geometric sums, one per interfering symbol, so that

    R_k = A_k1 exp(-j theta_k1) + A_k2 exp(-j theta_k2)

with Dirichlet-kernel amplitudes ``A_k1`` (``ceil(tau)`` chips of ``s_i1``) and
``A_k2`` (``n - ceil(tau)`` chips of ``s_i2``). Only the phase difference
``theta_k1 - theta_k2`` affects ``|R_k|``; it is computed in reduced form so
large offsets keep full precision.

Two symmetries make many patterns equivalent (same multiset of magnitudes):
shifting both interfering symbols by the same ``delta`` and mirroring the
offset ``tau -> (n - 1) - tau``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import interferer_samples
from .phy import LoraParams, as_params, reference_upchirp

_SINGULAR_TOL = 1e-12


@dataclass(frozen=True)
class InterferencePattern:
    magnitudes: np.ndarray
    s_i1: int
    s_i2: int
    tau: float

    def sorted(self) -> np.ndarray:
        """Canonical (descending) representation used to compare patterns."""
        return np.sort(self.magnitudes)[::-1]

    @property
    def energy(self) -> float:
        return float(np.sum(self.magnitudes**2))


@dataclass(frozen=True)
class EquivalenceClassPair:
    """The two classes of shifted symbol pairs sharing ``s_i = [s_i1 - s_i2]_n``."""

    s_i: int
    card_y1: int
    card_y2: int


def _is_integer(tau) -> np.ndarray:
    tau = np.asarray(tau, dtype=float)
    return np.abs(tau - np.round(tau)) <= _SINGULAR_TOL


def _dirichlet(x, m, n: int, integer_tau) -> np.ndarray:
    """``sin(pi x m / n) / sin(pi x / n)`` with the removable singularities filled in.

    The denominator vanishes for ``x`` a multiple of ``n``, which only happens
    for integer ``tau``; the limit there is ``m cos(pi x m/n) / cos(pi x/n)``,
    i.e. ``m`` at ``x = 0`` and ``m (-1)^(m+1)`` at ``x = -n``.
    """
    x = np.asarray(x, dtype=float)
    den = np.sin(np.pi * x / n)
    singular = (np.abs(den) < _SINGULAR_TOL) & integer_tau
    safe = np.where(singular, 1.0, den)
    ratio = np.sin(np.pi * x * m / n) / safe
    if np.any(singular):
        xr = np.round(x)
        limit = m * np.cos(np.pi * np.mod(xr * m, 2 * n) / n) / np.cos(np.pi * xr / n)
        ratio = np.where(singular, limit, ratio)
    return ratio


def amplitude_terms(params: LoraParams | int, s_i1, s_i2, tau, k=None):
    """Signed amplitudes ``(A_k1, A_k2)``; arguments broadcast, ``k`` defaults to all bins."""
    params = as_params(params)
    n = params.n
    tau = np.asarray(tau, dtype=float)
    if k is None:
        k = np.arange(n)
    k = np.asarray(k)
    m1 = np.ceil(tau)
    integer_tau = _is_integer(tau)
    a1 = _dirichlet(np.asarray(s_i1) - k - tau, m1, n, integer_tau)
    a2 = _dirichlet(np.asarray(s_i2) - k - tau, n - m1, n, integer_tau)
    return a1, a2


def phase_difference(params: LoraParams | int, s_i1, s_i2, tau, k=None) -> np.ndarray:
    """``theta_k1 - theta_k2`` reduced to ``[0, 2 pi)``.

    The quadratic and ``tau (ceil(tau) - 1)`` terms of the two phases cancel;
    what is left is ``pi (lam - L + s_i2 - k) + (pi/n)(s_i1 - s_i2)(2 tau - ceil(tau) + 1)``.
    The integer part is reduced by parity before scaling.
    """
    params = as_params(params)
    n = params.n
    tau = np.asarray(tau, dtype=float)
    if k is None:
        k = np.arange(n)
    k = np.asarray(k)
    big_l = np.floor(tau)
    lam = tau - big_l
    m1 = np.ceil(tau)
    parity = np.mod(np.asarray(s_i2) - k - big_l.astype(np.int64), 2)
    diff = np.asarray(s_i1) - np.asarray(s_i2)
    frac = np.mod(diff * (2 * tau - m1 + 1), 2 * n) / n
    return np.mod(np.pi * (lam + parity + frac), 2 * np.pi)


def cross_term(params: LoraParams | int, s_i1, s_i2, tau, k=None) -> np.ndarray:
    """``A_k1 A_k2 cos(theta_k1 - theta_k2)``, the only ordering-sensitive part of ``|R_k|^2``."""
    a1, a2 = amplitude_terms(params, s_i1, s_i2, tau, k)
    return a1 * a2 * np.cos(phase_difference(params, s_i1, s_i2, tau, k))


def pattern_magnitudes_array(params: LoraParams | int, s_i1, s_i2, tau, k=None) -> np.ndarray:
    """Vectorized ``|R_k|``; arguments broadcast against each other."""
    a1, a2 = amplitude_terms(params, s_i1, s_i2, tau, k)
    dtheta = phase_difference(params, s_i1, s_i2, tau, k)
    # |A1 + A2 e^{j dtheta}|; the sqrt(A1^2 + A2^2 + 2 A1 A2 cos) form cancels badly near zero
    return np.hypot(a1 + a2 * np.cos(dtheta), a2 * np.sin(dtheta))


def _check_inputs(params: LoraParams, s_i1, s_i2, tau) -> None:
    for s in (s_i1, s_i2):
        if not 0 <= s < params.n or int(s) != s:
            raise ValueError(f"symbol index must be an integer in [0, {params.n}), got {s!r}")
    if not 0 <= tau < params.n:
        raise ValueError(f"tau must lie in [0, {params.n}), got {tau!r}")


def pattern_magnitudes(params: LoraParams | int, s_i1: int, s_i2: int, tau: float) -> InterferencePattern:
    params = as_params(params)
    _check_inputs(params, s_i1, s_i2, tau)
    mags = pattern_magnitudes_array(params, int(s_i1), int(s_i2), float(tau))
    return InterferencePattern(mags, int(s_i1), int(s_i2), float(tau))


def pattern_bruteforce(params: LoraParams | int, s_i1: int, s_i2: int, tau: float) -> np.ndarray:
    """``|DFT(x_I * conj(x_ref))|`` from the synthesized waveform."""
    params = as_params(params)
    _check_inputs(params, s_i1, s_i2, tau)
    x_i = interferer_samples(params.n, s_i1, s_i2, tau)
    return np.abs(np.fft.fft(x_i * np.conj(reference_upchirp(params))))


def equivalence_shift(params: LoraParams | int, s_i1: int, s_i2: int, tau: float, delta: int):
    """Shift both interfering symbols by ``delta``.

    Returns ``(s_i1', s_i2', same_class)`` where ``same_class`` is true when the
    shifted pair keeps ``s_i1' >= s_i2'``. The caller is expected to pass
    ``s_i1 >= s_i2``.
    """
    params = as_params(params)
    n = params.n
    if not 0 <= delta < n:
        raise ValueError(f"delta must lie in [0, {n}), got {delta}")
    s1 = (s_i1 + delta) % n
    s2 = (s_i2 + delta) % n
    return s1, s2, s1 >= s2


def equivalence_classes(params: LoraParams | int, s_i1: int, s_i2: int) -> EquivalenceClassPair:
    params = as_params(params)
    s_i = (s_i1 - s_i2) % params.n
    return EquivalenceClassPair(s_i, params.n - s_i, s_i)


def class_representatives(params: LoraParams | int, s_i: int) -> list[tuple[int, int, int]]:
    """``(s_i1, s_i2, weight)`` for each non-empty class of difference ``s_i``."""
    params = as_params(params)
    n = params.n
    reps = [(s_i, 0, n - s_i)]
    if s_i:
        reps.append((0, n - s_i, s_i))
    return reps


def mirror_offset(params: LoraParams | int, tau: float) -> float:
    params = as_params(params)
    if not 0 <= tau < params.n - 1:
        raise ValueError(f"mirror_offset is defined for tau in [0, {params.n - 1}), got {tau}")
    return (params.n - 1) - tau


def mirrored_bin(params: LoraParams | int, s_i1: int, s_i2: int, k):
    """Bin of the mirrored pattern that carries the magnitude of bin ``k``."""
    n = as_params(params).n
    return np.mod(-np.asarray(k) - (n - 1) + (s_i1 + s_i2) % n, n)


def round_half_up(x):
    return np.floor(np.asarray(x, dtype=float) + 0.5)


def strongest_bin_estimate(params: LoraParams | int, s_i, tau, s_i2: int = 0) -> np.ndarray:
    """Approximate peak magnitude ``|A_k1 + A_k2|`` at ``k = [s_i2 - round(tau)]_n``.

    Intended for ``tau`` in ``[0, (n-1)/2)``, where the ``s_i2`` part dominates;
    ``s_i`` is the first interfering symbol relative to ``s_i2``.
    """
    params = as_params(params)
    n = params.n
    tau = np.asarray(tau, dtype=float)
    k = np.mod(s_i2 - round_half_up(tau).astype(np.int64), n)
    s_i1 = np.mod(np.asarray(s_i) + s_i2, n)
    a1, a2 = amplitude_terms(params, s_i1, s_i2, tau, k)
    return np.abs(a1 + a2)


def offset_split(tau: float) -> tuple[int, float]:
    big_l = math.floor(tau)
    return big_l, tau - big_l
