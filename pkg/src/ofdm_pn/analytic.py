"""Closed-form CPE+ICI phase-noise variances, single-carrier EEPN and BER floor.

Every OFDM variance shares the same building block, the weight matrix

    B[m, r] = sqrt|d_r| * Re((a_r / a_k) * exp(j 2 pi (r - k) m / N))

with d_r = (N-1)/2 - r. The three regimes differ only in how the (m, r)
contributions are combined:

* full time correlation:  (sum_m sum_r B)^2 / N^2
* no time correlation:    sum_m (sum_r B)^2 / N^2
* partial correlation:    sum_m B_m^T rho B_m / N^2

All results scale with the intrinsic unit 2 pi dv_Tx tau.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erfc, erfcinv

from .model import (SymbolFrame, SystemConfig, delay_steps, intrinsic_unit, per_channel_sigma2,
                    walkoff)


class Regime(str, enum.Enum):
    FULL = "fullcorr"
    NONE = "nocorr"
    PARTIAL = "partial"
    QPSK_EEPN = "qpsk_eepn"
    ORACLE = "oracle"
    MONTE_CARLO = "mc"


OFDM_REGIMES = (Regime.NONE, Regime.PARTIAL, Regime.FULL)


@dataclass(frozen=True)
class VarianceResult:
    value: float  # rad^2
    normalized: float  # value / (2 pi dv_Tx tau)
    regime: Regime
    received_channel: int | None = None


def _check_frame(frame: SymbolFrame, k: int, config: SystemConfig) -> None:
    if frame.n_channels != config.n_channels:
        raise ValueError(f"frame has {frame.n_channels} slots, config expects {config.n_channels}")
    if int(k) != k or not 0 <= k < config.n_channels:
        raise IndexError(f"received channel {k} out of range")
    if k == config.pilot_index:
        raise ValueError("the pilot slot is not a data channel")


def weight_matrix(symbols: np.ndarray, k: int) -> np.ndarray:
    """B[m, r] for a frame; rows are time bins m, columns channels r."""
    n = symbols.size
    r = np.arange(n)
    m = r[:, None]
    phase = np.exp(2j * np.pi * (((r[None, :] - k) * m) % n) / n)
    ratio = symbols / symbols[k]
    return np.sqrt(np.abs(delay_steps(n)))[None, :] * np.real(ratio[None, :] * phase)


def _result(normalized: float, regime: Regime, k: int, config: SystemConfig) -> VarianceResult:
    return VarianceResult(normalized * intrinsic_unit(config), normalized, regime, int(k))


def variance_full_corr(frame: SymbolFrame, k: int, config: SystemConfig) -> VarianceResult:
    _check_frame(frame, k, config)
    n = config.n_channels
    b = weight_matrix(frame.symbols, k)
    return _result(b.sum() ** 2 / n ** 2, Regime.FULL, k, config)


def variance_no_corr(frame: SymbolFrame, k: int, config: SystemConfig) -> VarianceResult:
    _check_frame(frame, k, config)
    n = config.n_channels
    b = weight_matrix(frame.symbols, k)
    return _result(np.sum(b.sum(axis=1) ** 2) / n ** 2, Regime.NONE, k, config)


def rho_matrix(n_channels: int) -> np.ndarray:
    """Correlation coefficients sqrt(min/max) between channel variances.

    The variance of channel r is proportional to |d_r|, so the common factor
    2 pi dv_Tx tau cancels. Zero-variance pairs follow the convention of
    :func:`rho`.
    """
    d = np.abs(delay_steps(n_channels)).astype(float)
    lo = np.minimum.outer(d, d)
    hi = np.maximum.outer(d, d)
    out = np.ones_like(lo)
    nz = hi > 0
    out[nz] = np.sqrt(lo[nz] / hi[nz])
    return out


def rho(s: int, r: int, config: SystemConfig) -> float:
    """Correlation coefficient between the phase samples of channels s and r.

    Equal to 1 when s == r or when both variances vanish, 0 when exactly one
    vanishes.
    """
    if s == r:
        return 1.0
    vs = per_channel_sigma2(s, config)
    vr = per_channel_sigma2(r, config)
    hi = max(vs, vr)
    if hi == 0:
        return 1.0
    return math.sqrt(min(vs, vr) / hi)


def variance_partial(frame: SymbolFrame, k: int, config: SystemConfig,
                     rho_override: np.ndarray | None = None) -> VarianceResult:
    """Partial-correlation variance, O(N^3).

    ``rho_override`` replaces the correlation matrix (e.g. all ones to
    recover the no-correlation result).
    """
    _check_frame(frame, k, config)
    n = config.n_channels
    rh = rho_matrix(n) if rho_override is None else np.asarray(rho_override, dtype=float)
    if rh.shape != (n, n):
        raise ValueError(f"rho matrix must be {n}x{n}")
    b = weight_matrix(frame.symbols, k)
    total = np.sum((b @ rh) * b)
    return _result(total / n ** 2, Regime.PARTIAL, k, config)


VARIANCE_FUNCS = {
    Regime.FULL: variance_full_corr,
    Regime.NONE: variance_no_corr,
    Regime.PARTIAL: variance_partial,
}


def ofdm_variance(frame: SymbolFrame, k: int, config: SystemConfig, regime: Regime) -> VarianceResult:
    try:
        func = VARIANCE_FUNCS[Regime(regime)]
    except KeyError:
        raise ValueError(f"not an OFDM regime: {regime}") from None
    return func(frame, k, config)


# --- single-carrier QPSK with electronic dispersion compensation ---------

def eepn_linewidth(config: SystemConfig, symbol_period_qpsk: float) -> float:
    """Equivalent EEPN linewidth lambda^2 D L dv_LO / (4 c Ts^2), in Hz."""
    if not symbol_period_qpsk > 0:
        raise ValueError("QPSK symbol period must be positive")
    f = config.fiber
    return (f.wavelength ** 2 * f.dispersion_si * f.length_m * config.lasers.lo_linewidth
            / (4 * config.speed_of_light * symbol_period_qpsk ** 2))


def qpsk_eepn_terms(config: SystemConfig, symbol_period_qpsk: float) -> tuple[float, float]:
    """(intrinsic, EEPN) variance terms of the single-carrier system."""
    if not symbol_period_qpsk > 0:
        raise ValueError("QPSK symbol period must be positive")
    f = config.fiber
    lasers = config.lasers
    intrinsic = 2 * math.pi * (lasers.tx_linewidth + lasers.lo_linewidth) * symbol_period_qpsk
    eepn = (math.pi * f.wavelength ** 2 / (2 * config.speed_of_light)
            * f.dispersion_si * f.length_m * lasers.lo_linewidth / symbol_period_qpsk)
    return intrinsic, eepn


def qpsk_eepn_variance(config: SystemConfig, symbol_period_qpsk: float) -> VarianceResult:
    intrinsic, eepn = qpsk_eepn_terms(config, symbol_period_qpsk)
    value = intrinsic + eepn
    unit = intrinsic_unit(config)
    return VarianceResult(value, value / unit if unit > 0 else math.nan, Regime.QPSK_EEPN)


def capacity_matched_symbol_period(config: SystemConfig) -> float:
    """Single-carrier symbol period T/N matching the OFDM line rate."""
    return config.symbol_period / config.n_channels


# --- BER floor ----------------------------------------------------------

def ber_floor(sigma2):
    """QPSK BER floor 1/2 erfc(pi / (4 sqrt(2) sigma)) for phase variance sigma2."""
    s2 = np.asarray(sigma2, dtype=float)
    if np.any(s2 < 0) or np.any(np.isnan(s2)):
        raise ValueError("phase-noise variance must be nonnegative")
    with np.errstate(divide="ignore"):
        arg = np.pi / (4 * np.sqrt(2) * np.sqrt(s2))
    out = 0.5 * erfc(arg)
    return float(out) if out.ndim == 0 else out


def sigma2_for_ber(ber_target: float) -> float:
    """Phase variance at which the BER floor equals ``ber_target``."""
    if not 0 < ber_target < 0.5:
        raise ValueError(f"BER target must lie in (0, 0.5), got {ber_target}")
    sigma = math.pi / (4 * math.sqrt(2) * float(erfcinv(2 * ber_target)))
    return sigma * sigma


def solve_max_distance(config: SystemConfig, normalized_variance: float, ber_target: float) -> float:
    """Longest fiber (km) for which an OFDM variance stays under the BER target.

    The variance is normalized_variance * 2 pi dv_Tx tau(L) and tau is linear
    in L, so the inversion is exact. Returns ``math.inf`` when the variance
    does not grow with L (zero dispersion or zero Tx linewidth).
    """
    if not normalized_variance > 0:
        raise ValueError("normalized variance must be positive")
    target = sigma2_for_ber(ber_target)
    per_km = normalized_variance * intrinsic_unit(config.with_length(1.0))
    if per_km == 0:
        return math.inf
    if per_km < 0:
        raise ValueError("negative dispersion gives a negative walk-off variance")
    return target / per_km


def solve_qpsk_max_distance(config: SystemConfig, symbol_period_qpsk: float, ber_target: float) -> float:
    """Longest fiber (km) for the EEPN-limited single-carrier system.

    Returns 0 when the intrinsic laser term alone already exceeds the target,
    ``math.inf`` when the EEPN term does not grow with L.
    """
    target = sigma2_for_ber(ber_target)
    intrinsic, per_km = qpsk_eepn_terms(config.with_length(1.0), symbol_period_qpsk)
    if intrinsic >= target:
        return 0.0
    if per_km == 0:
        return math.inf
    if per_km < 0:
        raise ValueError("negative dispersion gives a negative EEPN variance")
    return (target - intrinsic) / per_km


def walkoff_per_km(config: SystemConfig) -> float:
    return walkoff(config.with_length(1.0)).tau
