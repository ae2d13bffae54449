"""Symbol and frame error rates under AWGN plus one same-SF interferer.

Two families live here.

Exact (oracle tier, small ``sf`` only): the conditional error probability for
a given interference pattern is one minus the probability that the Rice
variable of the wanted bin beats every other (Rice) bin, integrated over the
bin value ``y``, averaged over the relative phase ``omega``, the wanted symbol,
the interfering symbol pair and the offset ``tau``. :func:`ser_full_small_n`
does that by brute force; :func:`ser_full_reduced` uses the equivalence of
shifted symbol pairs and mirrored offsets to visit only ``2 n`` pattern
families on half of the offset range.

Approximate (any ``sf``): the interference is represented by its strongest
bin only and both contenders are treated as Gaussian, giving a single
Q-function per ``(s_i, tau)`` on an ``epsilon``-spaced offset grid. Combined
with the AWGN approximation this yields SER, FER and required-SNR curves.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import optimize

from .awgn_rates import ser_awgn_gaussian_approx, snr_db_for_gaussian_approx
from .channel import ChannelParams
from .distributions import gauss_legendre_on_breaks, q_function, rice_logcdf, rice_pdf
from .pattern import class_representatives, pattern_magnitudes_array, strongest_bin_estimate
from .phy import as_params

DEFAULT_EPSILON = 0.2
FULL_SF_MAX = 6
REDUCED_SF_MAX = 8


class NotBracketedError(ValueError):
    """The target rate is not crossed inside the SNR search range."""


@dataclass(frozen=True)
class Quadrature:
    """Node counts for the exact error-rate integrals.

    ``tau_order`` Gauss-Legendre nodes per unit chip (the conditional error is
    smooth between integer offsets and kinked at them), ``omega_nodes``
    midpoints on ``[0, pi]`` (the integrand is even and periodic in omega), and
    a composite Gauss-Legendre rule in ``y`` with panels of about
    ``y_panel_width``.
    """

    tau_order: int = 8
    omega_nodes: int = 32
    y_order: int = 8
    y_panel_width: float = 2.5
    y_margin: float = 10.0
    chunk_elements: int = 4_000_000


DEFAULT_QUADRATURE = Quadrature()


@dataclass(frozen=True)
class ConditionalSer:
    value: float
    conditioned_on: tuple


def _levels(sf: int, snr_db: float, sir_db: float):
    params = as_params(sf)
    ch = ChannelParams(snr_db, sir_db)
    if not ch.noise_enabled:
        raise ValueError("exact error rates need finite snr_db")
    sigma = ch.bin_sigma(params.n)
    return params, ch, params.n / sigma, ch.interferer_amplitude / sigma


def _exclusive_sums(log_f: np.ndarray) -> np.ndarray:
    """For every bin ``s`` the sum over the other bins along axis 1 (``-inf`` safe)."""
    before = np.cumsum(log_f, axis=1)
    after = np.cumsum(log_f[:, ::-1], axis=1)[:, ::-1]
    out = np.zeros_like(log_f)
    out[:, 1:] += before[:, :-1]
    out[:, :-1] += after[:, 1:]
    return out


def _mean_correct(a: np.ndarray, v0: float, quad: Quadrature) -> np.ndarray:
    """Probability of a correct decision for each pattern row of ``a``.

    ``a`` holds the normalized interference bin amplitudes ``|h_I R_k| / sigma``
    with shape ``(patterns, n)``. The result is averaged over the wanted symbol
    (which bin carries the signal) and over omega.
    """
    n = a.shape[1]
    hi = v0 + float(a.max(initial=0.0)) + quad.y_margin
    panels = max(1, math.ceil(hi / quad.y_panel_width))
    y, wy = gauss_legendre_on_breaks(np.linspace(0.0, hi, panels + 1), quad.y_order)
    cos_w = np.cos((np.arange(quad.omega_nodes) + 0.5) * np.pi / quad.omega_nodes)

    per_pattern = n * y.size * (quad.omega_nodes + 2)
    step = max(1, quad.chunk_elements // per_pattern)
    out = np.empty(a.shape[0])
    for start in range(0, a.shape[0], step):
        blk = a[start : start + step]
        g = np.exp(_exclusive_sums(rice_logcdf(y, blk[:, :, None])))
        v_s = np.sqrt(v0 * v0 + blk**2 + 2.0 * v0 * blk * cos_w[:, None, None])
        dens = rice_pdf(y, v_s[..., None]).mean(axis=0)
        out[start : start + step] = np.einsum("pky,y->p", dens * g, wy) / n
    return out


def _no_interference_error(n: int, v0: float, quad: Quadrature) -> float:
    return 1.0 - float(_mean_correct(np.zeros((1, n)), v0, quad)[0])


def ser_full_small_n(
    sf: int, snr_db: float, sir_db: float, *, quad: Quadrature = DEFAULT_QUADRATURE
) -> float:
    """Brute-force SER: every wanted symbol, every interfering pair, every offset.

    Offsets are integrated over ``[0, n)`` with ``quad.tau_order`` nodes per chip.
    """
    params, ch, v0, h = _levels(sf, snr_db, sir_db)
    n = params.n
    if n > 1 << FULL_SF_MAX:
        raise ValueError(f"ser_full_small_n is an oracle for sf <= {FULL_SF_MAX}")
    if not ch.interferer_present:
        return _no_interference_error(n, v0, quad)
    tau, w_tau = gauss_legendre_on_breaks(np.arange(n + 1), quad.tau_order)
    s1, s2 = np.divmod(np.arange(n * n), n)
    k = np.arange(n)
    total = 0.0
    for i in range(s1.size):
        mags = pattern_magnitudes_array(params, s1[i], s2[i], tau[:, None], k)
        p_err = 1.0 - _mean_correct(h * mags, v0, quad)
        total += float(np.dot(w_tau, p_err))
    return total / (n**3)


def _reduced_tau_rule(n: int, order: int):
    half = (n - 1) / 2
    breaks = np.append(np.arange(math.floor(half) + 1), half)
    breaks = np.unique(breaks)
    t1, w1 = gauss_legendre_on_breaks(breaks, order)
    t2, w2 = gauss_legendre_on_breaks([n - 1, n], order)
    return np.concatenate([t1, t2]), np.concatenate([2.0 * w1, w2])


def ser_full_reduced(
    sf: int, snr_db: float, sir_db: float, *, quad: Quadrature = DEFAULT_QUADRATURE
) -> float:
    """SER using one representative per equivalence class and the mirrored offset range.

    For each difference ``s_i`` the ``n`` shifted pairs fall into two classes of
    sizes ``n - s_i`` and ``s_i``; offsets in ``((n-1)/2, n-1)`` mirror onto
    ``[0, (n-1)/2)`` and the tail ``(n-1, n)`` is integrated on its own.
    """
    params, ch, v0, h = _levels(sf, snr_db, sir_db)
    n = params.n
    if n > 1 << REDUCED_SF_MAX:
        raise ValueError(f"ser_full_reduced is limited to sf <= {REDUCED_SF_MAX}")
    if not ch.interferer_present:
        return _no_interference_error(n, v0, quad)
    tau, w_tau = _reduced_tau_rule(n, quad.tau_order)
    k = np.arange(n)
    total = 0.0
    for s_i in range(n):
        for s1, s2, weight in class_representatives(params, s_i):
            mags = pattern_magnitudes_array(params, s1, s2, tau[:, None], k)
            p_err = 1.0 - _mean_correct(h * mags, v0, quad)
            total += weight * float(np.dot(w_tau, p_err))
    return total / (n**3)


def ser_integer_tau(
    sf: int,
    snr_db: float,
    sir_db: float,
    *,
    reduced: bool = True,
    quad: Quadrature = DEFAULT_QUADRATURE,
) -> float:
    """Exact SER when the interferer is chip aligned (``tau`` uniform on integers).

    ``reduced=False`` sums over every pair and every integer offset;
    ``reduced=True`` uses one pattern per difference ``s_i`` and offsets
    ``0 .. n/2 - 1`` only, which is exact for integer offsets.
    """
    params, ch, v0, h = _levels(sf, snr_db, sir_db)
    n = params.n
    if not ch.interferer_present:
        return _no_interference_error(n, v0, quad)
    k = np.arange(n)
    total = 0.0
    if reduced:
        offsets = np.arange(n // 2, dtype=float)
        for s_i in range(n):
            mags = pattern_magnitudes_array(params, s_i, 0, offsets[:, None], k)
            total += float(np.sum(1.0 - _mean_correct(h * mags, v0, quad)))
        return total / (n * (n // 2))
    if n > 1 << FULL_SF_MAX:
        raise ValueError(f"the unreduced chip-aligned sum is an oracle for sf <= {FULL_SF_MAX}")
    offsets = np.arange(n, dtype=float)
    for s1 in range(n):
        for s2 in range(n):
            mags = pattern_magnitudes_array(params, s1, s2, offsets[:, None], k)
            total += float(np.sum(1.0 - _mean_correct(h * mags, v0, quad)))
    return total / n**3


# --- approximations -------------------------------------------------------


def tau_grid(sf: int, epsilon: float = DEFAULT_EPSILON) -> np.ndarray:
    """Offsets ``0, eps, 2 eps, ...`` strictly below ``(n - 1) / 2``."""
    if not 0 < epsilon <= 1:
        raise ValueError(f"epsilon must lie in (0, 1], got {epsilon}")
    n = as_params(sf).n
    count = math.ceil(((n - 1) / 2) / epsilon - 1e-9)
    return np.arange(count) * epsilon


@lru_cache(maxsize=3)
def _peak_table(sf: int, epsilon: float) -> np.ndarray:
    """Approximate strongest interference bin for every ``(tau, s_i)``, rows sorted descending.

    Only the multiset of each row matters downstream, so sorting lets callers
    skip entries too small to contribute.
    """
    params = as_params(sf)
    n = params.n
    taus = tau_grid(sf, epsilon)
    table = np.empty((taus.size, n), dtype=np.float32)
    s_i = np.arange(n)
    step = max(1, (1 << 21) // n)
    for start in range(0, taus.size, step):
        t = taus[start : start + step, None]
        rows = strongest_bin_estimate(params, s_i, t)
        table[start : start + step] = -np.sort(-rows, axis=1)
    table.flags.writeable = False
    return table


_Q_NEGLIGIBLE = 9.0  # Q(9) ~ 1e-19


def _conditional_on_grid(sf: int, snr_db: float, sir_db: float, epsilon: float) -> np.ndarray:
    """``P(error | tau)`` for every offset of the grid, interference term only."""
    params = as_params(sf)
    n = params.n
    ch = ChannelParams(snr_db, sir_db)
    taus = tau_grid(sf, epsilon)
    out = np.zeros(taus.size)
    h = ch.interferer_amplitude
    if h == 0.0:
        return out
    table = _peak_table(params.sf, float(epsilon))
    if not ch.noise_enabled:
        # Q of a non-negative argument with zero noise: 1/2 on ties, 0 otherwise
        return np.sum(np.where(h * table > n, 1.0, np.where(h * table == n, 0.5, 0.0)), axis=1) / n
    scale = math.sqrt(2.0) * ch.bin_sigma(n)
    r_min = (n - _Q_NEGLIGIBLE * scale) / h
    rows = max(1, (1 << 20) // n)
    for start in range(0, taus.size, rows):
        blk = table[start : start + rows]
        keep = blk > r_min
        counts = keep.sum(axis=1)
        if not counts.any():
            continue
        if counts.min() == n:
            vals = q_function((n - h * blk.astype(float)) / scale)
            out[start : start + rows] = vals.sum(axis=1) / n
            continue
        vals = q_function((n - h * blk[keep].astype(float)) / scale)
        idx = np.repeat(np.arange(blk.shape[0]), counts)
        out[start : start + rows] = np.bincount(idx, weights=vals, minlength=blk.shape[0]) / n
    return out


def ser_conditional_on_tau(sf: int, snr_db: float, sir_db: float, tau) -> np.ndarray:
    """Interference-dominated error probability at a fixed offset, averaged over ``s_i``."""
    params = as_params(sf)
    n = params.n
    ch = ChannelParams(snr_db, sir_db)
    tau = np.asarray(tau, dtype=float)
    if np.any((tau < 0) | (tau >= n)):
        raise ValueError(f"tau must lie in [0, {n})")
    h = ch.interferer_amplitude
    if h == 0.0:
        return np.zeros(tau.shape)[()]
    peaks = strongest_bin_estimate(params, np.arange(n), tau[..., None])
    scale = math.sqrt(2.0) * ch.bin_sigma(n)
    return q_function((n - h * peaks) / scale).mean(axis=-1)[()]


def _per_snr(fn, snr_db):
    snr_db = np.asarray(snr_db, dtype=float)
    out = np.array([fn(float(s)) for s in snr_db.ravel()]).reshape(snr_db.shape)
    return out[()] if out.ndim == 0 else out


def ser_interference_approx(sf: int, snr_db, sir_db: float, epsilon: float = DEFAULT_EPSILON):
    """Interference-dominated SER averaged over the ``epsilon`` offset grid.

    Sums ``Q((n - |h_I| |R_kmax|) / sqrt(2 sigma^2))`` over ``s_i`` and the grid
    and normalizes by ``n * n/2 / epsilon``, so offsets in ``(n-1, n)`` are left
    out. ``epsilon = 1`` is the chip-aligned model.
    """
    n = as_params(sf).n

    def one(s: float) -> float:
        p = _conditional_on_grid(sf, s, sir_db, epsilon)
        return float(epsilon * 2.0 / n * math.fsum(p))

    return _per_snr(one, snr_db)


def ser_combined_approx(sf: int, snr_db, sir_db: float, epsilon: float = DEFAULT_EPSILON):
    """``P_N + (1 - P_N) P_I`` with the Gaussian AWGN approximation as ``P_N``."""
    p_n = ser_awgn_gaussian_approx(sf, snr_db)
    p_i = ser_interference_approx(sf, snr_db, sir_db, epsilon)
    return p_n + (1.0 - p_n) * p_i


def fer_approx(
    sf: int, snr_db, sir_db: float, frame_len: int, epsilon: float = DEFAULT_EPSILON
):
    """Frame error rate of an uncoded frame of ``frame_len`` symbols.

    ``F_i``, the number of symbols touched by the equal-length interfering
    frame, is uniform on ``1..F``; all of them share one offset. A touched
    symbol is correct with probability ``(1 - P(err | tau)) (1 - P_N)`` and an
    untouched one with ``1 - P_N``. The offset average runs over the grid on
    ``[0, (n-1)/2)``.
    """
    if frame_len < 1:
        raise ValueError(f"frame_len must be >= 1, got {frame_len}")
    fi = np.arange(1, frame_len + 1)

    def one(s: float) -> float:
        p_n = float(ser_awgn_gaussian_approx(sf, s))
        p = _conditional_on_grid(sf, s, sir_db, epsilon)
        log_ok = np.log1p(-np.minimum(p, 1.0))
        with np.errstate(divide="ignore"):
            ok_touched = np.exp(np.outer(fi, log_ok)).mean(axis=1)
        ok_noise = math.exp(frame_len * math.log1p(-p_n)) if p_n < 1 else 0.0
        return 1.0 - ok_noise * float(ok_touched.mean())

    return _per_snr(one, snr_db)


def fer_conditional(
    sf: int, snr_db: float, sir_db: float, frame_len: int, touched: int, epsilon: float = DEFAULT_EPSILON
) -> float:
    """Frame error probability given that ``touched`` symbols see the interferer."""
    if not 0 <= touched <= frame_len:
        raise ValueError("touched must lie in [0, frame_len]")
    p_n = float(ser_awgn_gaussian_approx(sf, snr_db))
    p = _conditional_on_grid(sf, snr_db, sir_db, epsilon)
    ok = np.mean((1.0 - p) ** touched) * (1.0 - p_n) ** frame_len
    return 1.0 - float(ok)


def error_rate(
    sf: int,
    snr_db,
    sir_db: float,
    metric: str = "SER",
    frame_len: int = 1,
    epsilon: float = DEFAULT_EPSILON,
):
    metric = metric.upper()
    if metric == "SER":
        return ser_combined_approx(sf, snr_db, sir_db, epsilon)
    if metric == "FER":
        return fer_approx(sf, snr_db, sir_db, frame_len, epsilon)
    raise ValueError(f"metric must be SER or FER, got {metric!r}")


def required_snr(
    sf: int,
    sir_db: float,
    target_rate: float,
    metric: str = "SER",
    *,
    frame_len: int = 1,
    epsilon: float = DEFAULT_EPSILON,
    search_range_db: tuple[float, float] = (-40.0, 40.0),
    tol_db: float = 0.01,
) -> float:
    """Smallest SNR (dB) at which the approximate error rate falls to ``target_rate``.

    Raises :class:`NotBracketedError` when the curve does not cross the target
    inside ``search_range_db``.
    """
    if not 0 < target_rate < 1:
        raise ValueError("target_rate must lie in (0, 1)")
    metric = metric.upper()
    if metric not in ("SER", "FER"):
        raise ValueError(f"metric must be SER or FER, got {metric!r}")
    lo, hi = search_range_db

    def gap(s: float) -> float:
        rate = float(error_rate(sf, s, sir_db, metric, frame_len, epsilon))
        return math.log(max(rate, 1e-300)) - math.log(target_rate)

    # interference only adds errors, so the noise-only requirement brackets from below
    ser_target = target_rate if metric == "SER" else -math.expm1(math.log1p(-target_rate) / frame_len)
    floor_db = float(snr_db_for_gaussian_approx(sf, ser_target))
    if floor_db > hi or gap(hi) > 0:
        raise NotBracketedError(
            f"target {target_rate:g} not reached for SNR up to {hi} dB (sf={sf}, sir={sir_db})"
        )
    if floor_db > lo:
        lo = floor_db - 1e-6
    elif gap(lo) < 0:
        raise NotBracketedError(f"target {target_rate:g} already met at {lo} dB (sf={sf}, sir={sir_db})")
    return float(optimize.brentq(gap, lo, hi, xtol=tol_db / 2))
