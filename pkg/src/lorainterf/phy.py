"""LoRa chirp modulation and the two equivalent non-coherent demodulators.

Sampling is at the chirp bandwidth (one sample per chip), so a symbol is
``n = 2**sf`` complex samples. Signals are plain ``complex128`` arrays whose
last axis holds the samples; the demodulators accept any leading batch shape.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

SF_MIN = 4
SF_MAX = 12


@dataclass(frozen=True)
class LoraParams:
    """Spreading factor and the derived symbol length."""

    sf: int
    n: int = field(init=False)

    def __post_init__(self) -> None:
        if not isinstance(self.sf, (int, np.integer)) or not SF_MIN <= self.sf <= SF_MAX:
            raise ValueError(f"sf must be an integer in [{SF_MIN}, {SF_MAX}], got {self.sf!r}")
        object.__setattr__(self, "sf", int(self.sf))
        object.__setattr__(self, "n", 1 << int(self.sf))


@dataclass(frozen=True)
class DemodResult:
    s_hat: int
    bin_magnitudes: np.ndarray


def as_params(params: LoraParams | int) -> LoraParams:
    return params if isinstance(params, LoraParams) else LoraParams(params)


def chirp(u, s, n: int) -> np.ndarray:
    """Evaluate the symbol-``s`` chirp at (possibly fractional) chip times ``u``.

    ``u`` and ``s`` broadcast against each other. For integer ``u`` in
    ``[0, n)`` this is exactly the modulated symbol.
    """
    u = np.asarray(u, dtype=float)
    s = np.asarray(s, dtype=float)
    # phase in cycles, reduced before scaling by 2*pi to keep it small
    cycles = u * u / (2 * n) + (s / n - 0.5) * u
    return np.exp(2j * np.pi * np.mod(cycles, 1.0))


def _check_symbol(params: LoraParams, s) -> None:
    s_arr = np.asarray(s)
    if np.any(s_arr < 0) or np.any(s_arr >= params.n) or np.any(s_arr != np.floor(s_arr)):
        raise ValueError(f"symbol index must be an integer in [0, {params.n}), got {s!r}")


def modulate(params: LoraParams | int, s) -> np.ndarray:
    """Baseband samples of symbol ``s``; an array of symbols yields one row each."""
    params = as_params(params)
    _check_symbol(params, s)
    k = np.arange(params.n)
    s = np.asarray(s)
    return chirp(k, s[..., None] if s.ndim else s, params.n)


def reference_upchirp(params: LoraParams | int) -> np.ndarray:
    return modulate(params, 0)


def _check_length(params: LoraParams, y: np.ndarray) -> None:
    if y.shape[-1] != params.n:
        raise ValueError(f"expected {params.n} samples per symbol, got {y.shape[-1]}")


def dechirp_spectrum(params: LoraParams | int, y) -> np.ndarray:
    """Non-normalized DFT of the received samples times the conjugate upchirp."""
    params = as_params(params)
    y = np.asarray(y, dtype=complex)
    _check_length(params, y)
    return np.fft.fft(y * np.conj(reference_upchirp(params)), axis=-1)


def demodulate_dft(params: LoraParams | int, y) -> DemodResult:
    params = as_params(params)
    mags = np.abs(dechirp_spectrum(params, y))
    if mags.ndim != 1:
        raise ValueError("demodulate_dft takes a single symbol; use detect_symbols for batches")
    # np.argmax returns the first maximum, i.e. the lowest index on ties
    return DemodResult(int(np.argmax(mags)), mags)


def demodulate_correlation(params: LoraParams | int, y) -> DemodResult:
    """Correlate against every candidate symbol. O(n^2); kept as an oracle."""
    params = as_params(params)
    y = np.asarray(y, dtype=complex)
    _check_length(params, y)
    if y.ndim != 1:
        raise ValueError("demodulate_correlation takes a single symbol")
    candidates = modulate(params, np.arange(params.n))
    mags = np.abs(candidates.conj() @ y)
    return DemodResult(int(np.argmax(mags)), mags)


def detect_symbols(params: LoraParams | int, y) -> np.ndarray:
    """Batched hard decisions over the last axis (lowest index wins ties)."""
    spec = dechirp_spectrum(params, y)
    power = spec.real**2 + spec.imag**2
    return np.argmax(power, axis=-1)
