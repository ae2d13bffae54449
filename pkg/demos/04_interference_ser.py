# %% [markdown]
# # Error rate with one interferer
#
# The approximation averages a conditional error probability over a grid of
# offsets with spacing epsilon. Compare it with simulation and with the
# pessimistic chip-aligned grid (epsilon = 1).

# %%
import numpy as np

from lorainterf import ChannelParams, McConfig, mc_integer_tau_ser, mc_ser, ser_awgn_gaussian_approx, ser_combined_approx

sf, sir = 7, 3.0
print(" snr_db   no intf   eps=0.2   eps=1.0   mc frac   mc int")
for snr in np.arange(-10.0, -4.5, 1.0):
    cfg = McConfig(100_000, seed=int(-snr * 10))
    frac = mc_ser(sf, ChannelParams(snr, sir), cfg).rate
    whole = mc_integer_tau_ser(sf, ChannelParams(snr, sir), cfg).rate
    print(
        f"{snr:7.1f} {float(ser_awgn_gaussian_approx(sf, snr)):9.2e} "
        f"{float(ser_combined_approx(sf, snr, sir, 0.2)):9.2e} {float(ser_combined_approx(sf, snr, sir, 1.0)):9.2e} "
        f"{frac:9.2e} {whole:8.2e}"
    )

# %% [markdown]
# Refining the grid beyond a few points per chip changes little.

# %%
for eps in (1.0, 0.5, 1 / 3, 0.2, 0.1):
    print(f"eps={eps:.3f}: SER {float(ser_combined_approx(sf, -7.0, sir, eps)):.4e}")
