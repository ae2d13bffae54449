import math

import numpy as np
import pytest
from scipy import stats

from lorainterf.channel import (
    ChannelParams,
    InterfererState,
    interfered_symbol_count,
    interferer_symbol_signal,
    received_frame,
    received_symbol,
)
from lorainterf.phy import LoraParams, dechirp_spectrum, modulate


def test_channel_params_flags_and_levels():
    ch = ChannelParams()
    assert not ch.noise_enabled and not ch.interferer_present
    assert ch.n0 == 0.0 and ch.interferer_amplitude == 0.0
    ch = ChannelParams(snr_db=10.0, sir_db=-3.0)
    assert ch.n0 == pytest.approx(0.1)
    assert ch.noise_std == pytest.approx(math.sqrt(0.05))
    assert ch.interferer_amplitude**2 == pytest.approx(10**0.3)
    assert ch.bin_sigma(128) == pytest.approx(math.sqrt(128 * 0.1 / 2))


@pytest.mark.parametrize("bad", [math.nan, -math.inf])
def test_channel_params_reject(bad):
    with pytest.raises(ValueError):
        ChannelParams(snr_db=bad)


def test_interferer_state_split_and_validation():
    st = InterfererState(3, 4, 17.25)
    assert (st.L, st.lam) == (17, 0.25)
    with pytest.raises(ValueError):
        InterfererState(0, 0, -0.5)
    with pytest.raises(ValueError):
        InterfererState(0, 0, 16.0).validate(LoraParams(4))
    with pytest.raises(ValueError):
        InterfererState(16, 0, 1.0).validate(LoraParams(4))


def test_zero_offset_is_second_symbol():
    p = LoraParams(7)
    assert np.allclose(interferer_symbol_signal(p, InterfererState(90, 33, 0.0)), modulate(p, 33), atol=1e-12)


def test_integer_offset_same_symbols_single_bin():
    p = LoraParams(7)
    sig = interferer_symbol_signal(p, InterfererState(40, 40, 3.0))
    mags = np.abs(dechirp_spectrum(p, sig))
    assert mags[37] == pytest.approx(p.n)
    assert np.max(np.delete(mags, 37)) < 1e-9


def test_interferer_unit_modulus():
    rng = np.random.default_rng(0)
    p = LoraParams(8)
    for _ in range(10):
        st = InterfererState(*rng.integers(0, p.n, 2), rng.uniform(0, p.n))
        assert np.allclose(np.abs(interferer_symbol_signal(p, st)), 1.0, atol=1e-12)


def test_received_symbol_without_impairments():
    p = LoraParams(6)
    y = received_symbol(p, ChannelParams(), 12, None, phi=0.7)
    assert np.allclose(y, np.exp(0.7j) * modulate(p, 12))


def test_received_symbol_needs_state_and_rng():
    with pytest.raises(ValueError):
        received_symbol(4, ChannelParams(sir_db=0.0), 1, None)
    with pytest.raises(ValueError):
        received_symbol(4, ChannelParams(snr_db=0.0), 1, None)


def test_interference_energy():
    p = LoraParams(7)
    ch = ChannelParams(sir_db=4.0)
    st = InterfererState(5, 90, 33.4, omega=1.1)
    y = received_symbol(p, ch, 0, st) - modulate(p, 0)
    assert np.sum(np.abs(y) ** 2) == pytest.approx(ch.interferer_amplitude**2 * p.n, rel=1e-9)


def test_interferer_phase_convention():
    p = LoraParams(5)
    ch = ChannelParams(sir_db=0.0)
    st = InterfererState(1, 2, 4.5, omega=0.4)
    y = received_symbol(p, ch, 3, st, phi=1.0) - np.exp(1j) * modulate(p, 3)
    assert np.allclose(y, np.exp(1j * 0.6) * interferer_symbol_signal(p, st))


def test_noise_variance():
    ch = ChannelParams(snr_db=3.0)
    y = received_symbol(LoraParams(4), ch, 0, None, rng=np.random.default_rng(1))
    rng = np.random.default_rng(2)
    z = np.concatenate(
        [received_symbol(4, ch, 0, None, rng=rng) - modulate(4, 0) for _ in range(62_500)]
    )
    assert y.shape == (16,)
    assert np.var(z.real) == pytest.approx(ch.noise_std**2, rel=0.01)
    assert np.var(z.imag) == pytest.approx(ch.noise_std**2, rel=0.01)


def test_frame_offset_zero_hits_all_symbols():
    assert interfered_symbol_count(5, 16, 0.0) == 5
    assert interfered_symbol_count(5, 16, 4 * 16 + 0.5) == 1
    with pytest.raises(ValueError):
        interfered_symbol_count(5, 16, 80.0)


def test_frame_last_symbol_only():
    p = LoraParams(5)
    f = 4
    syms = np.array([1, 2, 3, 4])
    isyms = np.array([9, 8, 7, 6])
    ch = ChannelParams(sir_db=0.0)
    y = received_frame(p, ch, syms, (f - 1) * p.n + 0.5, isyms).reshape(f, p.n)
    clean = modulate(p, syms)
    assert np.allclose(y[:-1], clean[:-1])
    assert not np.allclose(y[-1], clean[-1])


def test_frame_single_symbol_matches_symbol_model_after_start():
    p = LoraParams(6)
    ch = ChannelParams(sir_db=2.0)
    tau = 11.3
    y_frame = received_frame(p, ch, np.array([5]), tau, np.array([40]), omega=0.3)
    y_sym = received_symbol(p, ch, 5, InterfererState(17, 40, tau, omega=0.3))
    start = math.ceil(tau)
    assert np.allclose(y_frame[start:], y_sym[start:])
    assert np.allclose(y_frame[:start], modulate(p, 5)[:start])


def test_frame_length_mismatch():
    with pytest.raises(ValueError):
        received_frame(4, ChannelParams(sir_db=0.0), np.array([1, 2]), 0.0, np.array([1]))


def test_interfered_count_uniform():
    rng = np.random.default_rng(11)
    f, n = 10, 128
    offsets = rng.uniform(0, f * n, 100_000)
    counts = np.array([interfered_symbol_count(f, n, o) for o in offsets])
    observed = np.bincount(counts, minlength=f + 1)[1:]
    assert stats.chisquare(observed).pvalue > 0.01
