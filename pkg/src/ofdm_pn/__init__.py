"""Dispersion-induced phase-noise penalty of CO-OFDM systems with an RF pilot tone."""

from .analytic import (Regime, VarianceResult, ber_floor, eepn_linewidth, qpsk_eepn_variance,
                       rho, solve_max_distance, variance_full_corr, variance_no_corr,
                       variance_partial)
from .model import (FiberParams, LaserParams, SymbolFrame, SystemConfig, channel_delay_steps,
                    default_config, per_channel_sigma2, qpsk_alphabet, walkoff)
from .oracle import McMode, exact_variance, mc_variance, sample_wiener_paths
from .search import exhaustive_sweep, fig3_sweep, heuristic_worst_case

__version__ = "0.1.0"
