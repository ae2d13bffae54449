import math

import numpy as np
import pytest

from lorainterf import mc
from lorainterf.awgn_rates import ser_awgn_exact
from lorainterf.channel import ChannelParams, interferer_samples, received_frame
from lorainterf.mc import McConfig, McEstimate, mc_fer, mc_integer_tau_ser, mc_ser
from lorainterf.phy import LoraParams, reference_upchirp


def _z(a: McEstimate, b: McEstimate) -> float:
    return abs(a.rate - b.rate) / math.hypot(a.sigma, b.sigma)


def test_config_validation():
    for kwargs in (
        dict(trials=0),
        dict(trials=10, tau_grid_step=0.0),
        dict(trials=10, tau_grid_step=1.5),
        dict(trials=10, omega_mode="random"),
        dict(trials=10, stop_at_errors=0),
        dict(trials=10, seed=-1),
        dict(trials=10, workers=0),
    ):
        with pytest.raises(ValueError):
            McConfig(**kwargs)
    assert McConfig(trials=1e3).trials == 1000


def test_estimate_fields():
    est = McEstimate.from_counts(25, 1000)
    assert est.rate == 0.025
    assert est.ci95_half_width == pytest.approx(1.96 * math.sqrt(0.025 * 0.975 / 1000))


def test_no_impairments_no_errors():
    assert mc_ser(6, ChannelParams(), McConfig(2000)).errors == 0
    assert mc_fer(6, ChannelParams(), 4, McConfig(500)).errors == 0


def test_deterministic_and_thread_independent():
    ch = ChannelParams(-4.0, 2.0)
    a = mc_ser(6, ch, McConfig(20_000, seed=9))
    b = mc_ser(6, ch, McConfig(20_000, seed=9))
    c = mc_ser(6, ch, McConfig(20_000, seed=9, workers=3))
    assert a == b == c
    assert mc_ser(6, ch, McConfig(20_000, seed=10)) != a
    f1 = mc_fer(5, ch, 3, McConfig(5_000, seed=2, block_size=300))
    f2 = mc_fer(5, ch, 3, McConfig(5_000, seed=2, block_size=300, workers=2))
    assert f1 == f2


def test_offset_irrelevant_without_interferer():
    ch = ChannelParams(snr_db=-6.0)
    cfg = McConfig(30_000, seed=4)
    assert mc_ser(7, ch, cfg) == mc_integer_tau_ser(7, ch, cfg)


@pytest.mark.parametrize("step", [0.1, 0.25, 1.0, None])
def test_dechirped_interference_matches_waveform(step):
    p = LoraParams(6)
    rng = np.random.default_rng(1)
    size = 40
    s1 = rng.integers(0, p.n, size)
    s2 = rng.integers(0, p.n, size)
    g = rng.normal(size=size) + 1j * rng.normal(size=size)
    grid = mc._draw_offsets(rng, size, p.n, step)
    tau = grid * step if step else grid
    fast = mc._dechirped_interference(p.n, s1, s2, grid, step, g, g)
    slow = g[:, None] * interferer_samples(p.n, s1, s2, tau) * np.conj(reference_upchirp(p))
    assert np.max(np.abs(fast - slow)) < 1e-9


def test_frame_synthesis_matches_channel_model(monkeypatch):
    p = LoraParams(5)
    ch = ChannelParams(sir_db=-2.0)
    f, size = 4, 30
    captured = {}
    decide = mc._decide

    def spy(y, s):
        # the wanted tone is added in the spectrum, so put it back here
        captured["y"] = y + np.exp(2j * np.pi * s[..., None] * np.arange(p.n) / p.n)
        return decide(y, s)

    monkeypatch.setattr(mc, "_decide", spy)
    mc._frame_block(p, ch, f, mc.block_rng(7, 0), size, 0.1, "uniform")
    rng = mc.block_rng(7, 0)
    sym = rng.integers(0, p.n, (size, f))
    isym = rng.integers(0, p.n, (size, f))
    offset = rng.integers(0, f * p.n * 10, size) * 0.1
    omega = rng.uniform(0, 2 * np.pi, size)
    for i in range(size):
        y = received_frame(p, ch, sym[i], offset[i], isym[i], omega=omega[i]).reshape(f, p.n)
        assert np.allclose(y * np.conj(reference_upchirp(p)), captured["y"][i], atol=1e-5)


def test_awgn_matches_exact():
    est = mc_ser(6, ChannelParams(snr_db=-3.0), McConfig(200_000, seed=5))
    exact = float(ser_awgn_exact(6, -3.0))
    assert abs(est.rate - exact) < 3 * math.sqrt(exact * (1 - exact) / est.trials_run)


def test_fer_without_interferer_is_independent_symbols():
    ser = float(ser_awgn_exact(6, -3.0))
    est = mc_fer(6, ChannelParams(snr_db=-3.0), 5, McConfig(40_000, seed=6))
    expect = 1 - (1 - ser) ** 5
    assert abs(est.rate - expect) < 3 * math.sqrt(expect * (1 - expect) / est.trials_run)


def test_single_symbol_frame():
    clean = ChannelParams(snr_db=-3.0)
    a = mc_ser(6, clean, McConfig(100_000, seed=1))
    b = mc_fer(6, clean, 1, McConfig(100_000, seed=2))
    assert _z(a, b) < 3
    # with an interferer the lone symbol only sees the chips after the interfering
    # frame begins, so it fails less often than a symbol overlapped on both sides
    hit = ChannelParams(-7.0, 3.0)
    a = mc_ser(7, hit, McConfig(100_000, seed=1))
    b = mc_fer(7, hit, 1, McConfig(100_000, seed=2))
    assert b.rate < a.rate


def test_chip_aligned_is_worse():
    ch = ChannelParams(-10.0, 3.0)
    a = mc_ser(7, ch, McConfig(100_000, seed=1))
    b = mc_integer_tau_ser(7, ch, McConfig(100_000, seed=2))
    assert b.rate > a.rate + 3 * math.hypot(a.sigma, b.sigma)


def test_continuous_offsets_close_to_grid():
    ch = ChannelParams(-9.0, 3.0)
    a = mc_ser(6, ch, McConfig(100_000, seed=1))
    b = mc_ser(6, ch, McConfig(100_000, seed=2, tau_grid_step=None))
    assert _z(a, b) < 4


def test_stop_at_errors():
    ch = ChannelParams(snr_db=-4.0)
    est = mc_ser(6, ch, McConfig(1_000_000, seed=3, stop_at_errors=50, block_size=1000))
    assert est.errors == 50 and est.stopped_early
    assert est.rate == 50 / est.trials_run
    full = mc_ser(6, ch, McConfig(est.trials_run + 5000, seed=3, block_size=1000))
    assert full.trials_run > est.trials_run
    never = mc_ser(6, ChannelParams(), McConfig(3000, seed=3, stop_at_errors=1))
    assert not never.stopped_early and never.trials_run == 3000


def test_progress_reports():
    seen = []
    mc_ser(5, ChannelParams(snr_db=0.0), McConfig(5000, block_size=1000), progress=seen.append)
    assert seen == [1000, 2000, 3000, 4000, 5000]


def test_confidence_interval_coverage():
    exact = float(ser_awgn_exact(4, 0.0))
    covered = 0
    for seed in range(100):
        est = mc_ser(4, ChannelParams(snr_db=0.0), McConfig(4000, seed=seed))
        covered += abs(est.rate - exact) <= est.ci95_half_width
    assert covered >= 88
