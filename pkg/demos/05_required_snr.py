# %% [markdown]
# # SNR budget in the presence of interference
#
# For each SIR, solve for the SNR that meets a target error rate. Strong
# interference raises the requirement, and below some SIR no SNR suffices.

# %%
import math

from lorainterf import NotBracketedError, required_snr

for sir in (0.0, 3.0, 6.0, 10.0, 20.0, math.inf):
    try:
        snr = f"{required_snr(7, sir, 2e-5):7.2f} dB"
    except NotBracketedError:
        snr = "unreachable"
    print(f"SIR {sir:>5}: {snr}")

# %% [markdown]
# Frames fail if any symbol fails, so longer frames and stricter targets
# both need more SNR.

# %%
for target in (1e-1, 1e-2):
    row = [required_snr(7, 6.0, target, "FER", frame_len=f) for f in (10, 20, 30)]
    print(f"FER {target:g}: " + "  ".join(f"F={f}: {v:6.2f}" for f, v in zip((10, 20, 30), row)))
