"""LoRa symbol and frame error rates under AWGN and same-SF interference."""

__version__ = "0.1.0"

from .awgn_rates import (
    IntegrationError,
    ser_awgn_concise_approx,
    ser_awgn_exact,
    ser_awgn_gaussian_approx,
    snr_db_for_gaussian_approx,
)
from .channel import ChannelParams, InterfererState, received_frame, received_symbol
from .interf_rates import (
    NotBracketedError,
    Quadrature,
    fer_approx,
    required_snr,
    ser_combined_approx,
    ser_conditional_on_tau,
    ser_full_reduced,
    ser_full_small_n,
    ser_integer_tau,
    ser_interference_approx,
    tau_grid,
)
from .mc import McConfig, McEstimate, mc_fer, mc_integer_tau_ser, mc_ser
from .pattern import (
    EquivalenceClassPair,
    InterferencePattern,
    amplitude_terms,
    equivalence_shift,
    mirror_offset,
    pattern_bruteforce,
    pattern_magnitudes,
)
from .phy import LoraParams, demodulate_correlation, demodulate_dft, detect_symbols, modulate

__all__ = [
    "ChannelParams",
    "EquivalenceClassPair",
    "IntegrationError",
    "InterferencePattern",
    "InterfererState",
    "LoraParams",
    "McConfig",
    "McEstimate",
    "NotBracketedError",
    "Quadrature",
    "amplitude_terms",
    "demodulate_correlation",
    "demodulate_dft",
    "detect_symbols",
    "equivalence_shift",
    "fer_approx",
    "mc_fer",
    "mc_integer_tau_ser",
    "mc_ser",
    "mirror_offset",
    "modulate",
    "pattern_bruteforce",
    "pattern_magnitudes",
    "received_frame",
    "received_symbol",
    "required_snr",
    "ser_awgn_concise_approx",
    "ser_awgn_exact",
    "ser_awgn_gaussian_approx",
    "ser_combined_approx",
    "ser_conditional_on_tau",
    "ser_full_reduced",
    "ser_full_small_n",
    "ser_integer_tau",
    "ser_interference_approx",
    "snr_db_for_gaussian_approx",
    "tau_grid",
]
