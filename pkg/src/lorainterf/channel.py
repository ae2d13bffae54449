"""Received-signal synthesis: signal of interest, one same-SF interferer, AWGN.

SNR is the per-sample signal-to-noise ratio at the chirp bandwidth: with a
unit-modulus signal the complex noise has total variance ``N0 = 1/SNR`` per
sample (``N0/2`` per real component). After the ``n``-point DFT a noise bin
has per-component variance ``n*N0/2``; :meth:`ChannelParams.bin_sigma` returns
its square root, which is the scale used by the analytic error-rate code.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .phy import LoraParams, as_params, chirp, _check_symbol


@dataclass(frozen=True)
class ChannelParams:
    """Noise and interference levels.

    Passing ``math.inf`` for ``snr_db`` or ``sir_db`` is shorthand for
    switching the corresponding impairment off.
    """

    snr_db: float = math.inf
    sir_db: float = math.inf
    noise_enabled: bool = True
    interferer_present: bool = True

    def __post_init__(self) -> None:
        for name in ("snr_db", "sir_db"):
            value = float(getattr(self, name))
            if math.isnan(value) or value == -math.inf:
                raise ValueError(f"{name} must be finite or +inf, got {value}")
            object.__setattr__(self, name, value)
        if self.snr_db == math.inf:
            object.__setattr__(self, "noise_enabled", False)
        if self.sir_db == math.inf:
            object.__setattr__(self, "interferer_present", False)

    @property
    def n0(self) -> float:
        return 10.0 ** (-self.snr_db / 10.0) if self.noise_enabled else 0.0

    @property
    def noise_std(self) -> float:
        """Per-component standard deviation of the per-sample noise."""
        return math.sqrt(self.n0 / 2.0)

    @property
    def interferer_amplitude(self) -> float:
        return 10.0 ** (-self.sir_db / 20.0) if self.interferer_present else 0.0

    def bin_sigma(self, n: int) -> float:
        return math.sqrt(n * self.n0 / 2.0)


@dataclass(frozen=True)
class InterfererState:
    """Interfering symbol pair, chip offset ``tau`` and relative phase ``omega``.

    ``s_i1`` is the interfering symbol whose tail overlaps the first
    ``ceil(tau)`` samples; ``s_i2`` starts ``tau`` chips after the symbol of
    interest. ``omega`` is the phase of the wanted channel minus the phase of
    the interfering one.
    """

    s_i1: int
    s_i2: int
    tau: float
    omega: float = 0.0
    L: int = field(init=False)
    lam: float = field(init=False)

    def __post_init__(self) -> None:
        tau = float(self.tau)
        if not math.isfinite(tau) or tau < 0:
            raise ValueError(f"tau must be a finite non-negative offset, got {self.tau!r}")
        object.__setattr__(self, "tau", tau)
        object.__setattr__(self, "L", math.floor(tau))
        object.__setattr__(self, "lam", tau - math.floor(tau))

    def validate(self, params: LoraParams) -> None:
        _check_symbol(params, [self.s_i1, self.s_i2])
        if not self.tau < params.n:
            raise ValueError(f"tau must lie in [0, {params.n}), got {self.tau}")


def interferer_samples(n: int, s_i1, s_i2, tau) -> np.ndarray:
    """Batched interferer waveform; arguments broadcast over leading axes."""
    s_i1 = np.asarray(s_i1)[..., None]
    s_i2 = np.asarray(s_i2)[..., None]
    tau = np.asarray(tau, dtype=float)[..., None]
    k = np.arange(n)
    first = k < np.ceil(tau)
    u = np.where(first, k + n - tau, k - tau)
    return chirp(u, np.where(first, s_i1, s_i2), n)


def interferer_symbol_signal(params: LoraParams | int, st: InterfererState) -> np.ndarray:
    params = as_params(params)
    st.validate(params)
    return interferer_samples(params.n, st.s_i1, st.s_i2, st.tau)


def awgn(rng: np.random.Generator, shape, std: float) -> np.ndarray:
    """Circular complex Gaussian samples with per-component std ``std``."""
    z = rng.standard_normal((*shape, 2))
    z *= std
    return z.view(np.complex128)[..., 0]


def received_symbol(
    params: LoraParams | int,
    ch: ChannelParams,
    s: int,
    st: InterfererState | None,
    phi: float = 0.0,
    rng: np.random.Generator | None = None,
) -> np.ndarray:
    """One received symbol ``e^{j phi} x_s + |h_I| e^{j(phi - omega)} x_I + z``."""
    params = as_params(params)
    _check_symbol(params, s)
    y = np.exp(1j * phi) * chirp(np.arange(params.n), s, params.n)
    if ch.interferer_present:
        if st is None:
            raise ValueError("an InterfererState is required when the interferer is present")
        theta = phi - st.omega
        y = y + ch.interferer_amplitude * np.exp(1j * theta) * interferer_symbol_signal(params, st)
    if ch.noise_enabled:
        if rng is None:
            raise ValueError("a random generator is required when noise is enabled")
        y = y + awgn(rng, y.shape, ch.noise_std)
    return y


def interfered_symbol_count(frame_len: int, n: int, frame_offset: float) -> int:
    """Number of symbols of interest touched by an equal-length interfering frame.

    A partially overlapped symbol counts as affected.
    """
    if not 0 <= frame_offset < frame_len * n:
        raise ValueError(f"frame_offset must lie in [0, {frame_len * n})")
    return frame_len - math.floor(frame_offset / n)


def interfering_frame_samples(n: int, symbols, frame_offset) -> np.ndarray:
    """Interfering frame as seen over the frame of interest (zero before it starts).

    ``symbols`` has shape ``(..., F)`` and ``frame_offset`` broadcasts against
    the leading axes. Returns shape ``(..., F*n)``.
    """
    symbols = np.asarray(symbols)
    f = symbols.shape[-1]
    offset = np.asarray(frame_offset, dtype=float)[..., None]
    t = np.arange(f * n) - offset
    active = t >= 0
    idx = np.clip(np.floor(t / n).astype(np.int64), 0, f - 1)
    u = t - idx * n
    sym = np.take_along_axis(np.broadcast_to(symbols, (*t.shape[:-1], f)), idx, axis=-1)
    return np.where(active, chirp(u, sym, n), 0.0)


def received_frame(
    params: LoraParams | int,
    ch: ChannelParams,
    symbols,
    frame_offset: float,
    interferer_symbols,
    omega: float = 0.0,
    phi: float = 0.0,
    rng: np.random.Generator | None = None,
) -> np.ndarray:
    """A frame of ``F`` symbols with an equal-length interfering frame overlaid.

    The interferer starts ``frame_offset`` chips after the first chip of the
    frame and keeps one offset and one relative phase for its whole duration.
    """
    params = as_params(params)
    symbols = np.asarray(symbols)
    interferer_symbols = np.asarray(interferer_symbols)
    if symbols.shape != interferer_symbols.shape or symbols.ndim != 1:
        raise ValueError("symbol vectors of the two frames must have the same length")
    _check_symbol(params, symbols)
    _check_symbol(params, interferer_symbols)
    f = symbols.size
    if not 0 <= frame_offset < f * params.n:
        raise ValueError(f"frame_offset must lie in [0, {f * params.n})")
    y = np.exp(1j * phi) * chirp(np.arange(params.n), symbols[:, None], params.n).reshape(-1)
    if ch.interferer_present:
        y = y + ch.interferer_amplitude * np.exp(1j * (phi - omega)) * interfering_frame_samples(
            params.n, interferer_symbols, frame_offset
        )
    if ch.noise_enabled:
        if rng is None:
            raise ValueError("a random generator is required when noise is enabled")
        y = y + awgn(rng, y.shape, ch.noise_std)
    return y
