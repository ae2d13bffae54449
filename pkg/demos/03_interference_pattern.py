# %% [markdown]
# # The interference pattern
#
# An interferer that starts tau chips late contributes two partial chirps to
# the window. After dechirping, its energy is spread over the bins with a
# shape that has a closed form.

# %%
import numpy as np

from lorainterf import equivalence_shift, mirror_offset, pattern_bruteforce, pattern_magnitudes

sf, n = 7, 128
pat = pattern_magnitudes(sf, 90, 20, 33.6)
fft = pattern_bruteforce(sf, 90, 20, 33.6)
print("max |closed form - FFT|:", float(np.abs(pat.magnitudes - fft).max()))
print("energy / N^2:", float(np.sum(pat.magnitudes**2)) / n**2)

# %% [markdown]
# Shifting both interfering symbols by the same amount only permutes the
# bins, as long as the order of the two symbols is kept. Only the
# difference of the pair matters.

# %%
ref = np.sort(pat.magnitudes)
for delta in (1, 17, 40):
    a, b, same = equivalence_shift(sf, 90, 20, 33.6, delta)
    shifted = np.sort(pattern_magnitudes(sf, a, b, 33.6).magnitudes)
    print(f"delta={delta:3d} keeps order: {same}, same sorted magnitudes: {np.allclose(ref, shifted)}")

# %% [markdown]
# Offsets tau and N-1-tau give the same set of magnitudes, which halves
# the offsets any average has to visit.

# %%
tau = 12.25
m = mirror_offset(sf, tau)
a = np.sort(pattern_magnitudes(sf, 90, 20, tau).magnitudes)
b = np.sort(pattern_magnitudes(sf, 90, 20, m).magnitudes)
print(f"tau={tau} and {m}: max difference {np.abs(a - b).max():.1e}")

# %% [markdown]
# Chip-aligned offsets concentrate the interferer into two bins; a half-chip
# shift spreads it out. This is why assuming integer offsets is pessimistic.

# %%
for t in (20.0, 20.5):
    print(f"tau={t}: strongest interferer bin {pattern_magnitudes(sf, 90, 20, t).magnitudes.max():6.1f} of {n}")
