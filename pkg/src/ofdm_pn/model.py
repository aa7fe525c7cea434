"""Physical parameters, dispersion walk-off and QPSK symbol frames.

All quantities are stored in SI units. The only non-SI inputs are the fiber
dispersion (ps/(nm km)) and length (km), which are converted on access.

The OFDM grid has ``n_channels`` slots, numbered 0..N-1, with the RF pilot
tone in the centre slot (N-1)/2. A "100 channel" system therefore has
N = 101 grid slots and N - 1 = 100 data channels.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

SPEED_OF_LIGHT = 3.0e8  # m/s, rounded value used for all reported numbers

# ps/(nm km) -> s/m^2
PS_PER_NM_KM = 1e-12 / (1e-9 * 1e3)


@dataclass(frozen=True)
class FiberParams:
    dispersion: float  # ps/(nm km)
    wavelength: float  # m
    length: float  # km

    def __post_init__(self):
        if not self.wavelength > 0:
            raise ValueError(f"wavelength must be positive, got {self.wavelength}")
        if not self.length >= 0:
            raise ValueError(f"fiber length must be nonnegative, got {self.length}")
        if not math.isfinite(self.dispersion):
            raise ValueError("dispersion must be finite")

    @property
    def dispersion_si(self) -> float:
        """Dispersion coefficient in s/m^2."""
        return self.dispersion * PS_PER_NM_KM

    @property
    def length_m(self) -> float:
        return self.length * 1e3


@dataclass(frozen=True)
class LaserParams:
    tx_linewidth: float  # Hz
    lo_linewidth: float  # Hz

    def __post_init__(self):
        if not (self.tx_linewidth >= 0 and self.lo_linewidth >= 0):
            raise ValueError("laser linewidths must be nonnegative")


@dataclass(frozen=True)
class SystemConfig:
    n_channels: int
    symbol_period: float  # s
    fiber: FiberParams
    lasers: LaserParams
    speed_of_light: float = SPEED_OF_LIGHT

    def __post_init__(self):
        n = self.n_channels
        if int(n) != n or n < 3 or n % 2 == 0:
            raise ValueError(f"n_channels must be odd and >= 3, got {n}")
        if not self.symbol_period > 0:
            raise ValueError(f"symbol_period must be positive, got {self.symbol_period}")

    @property
    def channel_spacing(self) -> float:
        """Subcarrier spacing 1/T in Hz (orthogonal grid)."""
        return 1.0 / self.symbol_period

    @property
    def pilot_index(self) -> int:
        return (self.n_channels - 1) // 2

    def with_length(self, length_km: float) -> SystemConfig:
        fiber = FiberParams(self.fiber.dispersion, self.fiber.wavelength, length_km)
        return SystemConfig(self.n_channels, self.symbol_period, fiber, self.lasers,
                            self.speed_of_light)

    def with_channels(self, n_channels: int) -> SystemConfig:
        return SystemConfig(n_channels, self.symbol_period, self.fiber, self.lasers,
                            self.speed_of_light)

    def with_lasers(self, tx_linewidth: float, lo_linewidth: float | None = None) -> SystemConfig:
        lo = self.lasers.lo_linewidth if lo_linewidth is None else lo_linewidth
        return SystemConfig(self.n_channels, self.symbol_period, self.fiber,
                            LaserParams(tx_linewidth, lo), self.speed_of_light)


def default_config(n_channels: int = 101, length_km: float = 100.0) -> SystemConfig:
    """The 1 GBd QPSK CO-OFDM reference system (D = 16 ps/nm/km, 1550 nm, 4 MHz lasers)."""
    return SystemConfig(
        n_channels=n_channels,
        symbol_period=1e-9,
        fiber=FiberParams(dispersion=16.0, wavelength=1.55e-6, length=length_km),
        lasers=LaserParams(tx_linewidth=4e6, lo_linewidth=4e6),
    )


@dataclass(frozen=True)
class WalkOff:
    tau: float  # s


def walkoff(config: SystemConfig) -> WalkOff:
    """Group delay between adjacent OFDM channels, tau = D L lambda^2 df / c."""
    f = config.fiber
    tau = (f.dispersion_si * f.length_m * f.wavelength ** 2 * config.channel_spacing
           / config.speed_of_light)
    return WalkOff(tau)


def _check_index(r: int, config: SystemConfig) -> int:
    if int(r) != r or not 0 <= r < config.n_channels:
        raise IndexError(f"channel index {r} out of range for N={config.n_channels}")
    return int(r)


def channel_delay_steps(r: int, config: SystemConfig) -> int:
    """Signed walk-off of channel r relative to the pilot, in units of tau."""
    return config.pilot_index - _check_index(r, config)


def delay_steps(n_channels: int) -> np.ndarray:
    """Vector of d_r = (N-1)/2 - r for all grid slots."""
    return (n_channels - 1) // 2 - np.arange(n_channels)


def intrinsic_unit(config: SystemConfig) -> float:
    """2 pi dv_Tx tau, the normalisation unit of every OFDM variance (rad^2)."""
    return 2 * math.pi * config.lasers.tx_linewidth * walkoff(config).tau


def per_channel_sigma2(r: int, config: SystemConfig) -> float:
    """Variance of the pilot-referenced Tx phase-noise sample on channel r (rad^2)."""
    return abs(channel_delay_steps(r, config)) * intrinsic_unit(config)


QPSK = np.array([1, 1j, -1, -1j], dtype=complex)


def qpsk_alphabet() -> np.ndarray:
    return QPSK.copy()


@dataclass(frozen=True)
class SymbolFrame:
    """N unit-modulus symbols with the pilot slot pinned to 1."""

    symbols: np.ndarray = field(repr=False)

    def __post_init__(self):
        s = np.asarray(self.symbols, dtype=complex)
        if s.ndim != 1:
            raise ValueError("symbols must be a 1-D vector")
        n = s.size
        if n < 3 or n % 2 == 0:
            raise ValueError(f"frame length must be odd and >= 3, got {n}")
        if not np.allclose(np.abs(s), 1.0, rtol=0, atol=1e-12):
            raise ValueError("all symbols must have unit modulus")
        if s[(n - 1) // 2] != 1:
            raise ValueError("pilot slot must hold the value 1")
        s = s.copy()
        s.flags.writeable = False
        object.__setattr__(self, "symbols", s)

    @property
    def n_channels(self) -> int:
        return self.symbols.size

    @property
    def pilot_index(self) -> int:
        return (self.n_channels - 1) // 2

    @classmethod
    def all_same(cls, n_channels: int, symbol: complex = 1) -> SymbolFrame:
        s = np.full(n_channels, symbol, dtype=complex)
        s[(n_channels - 1) // 2] = 1
        return cls(s)

    @classmethod
    def from_qpsk_indices(cls, indices) -> SymbolFrame:
        """Build a frame from alphabet indices of the N-1 data slots, in slot order."""
        idx = np.asarray(indices, dtype=int)
        n = idx.size + 1
        if n % 2 == 0:
            raise ValueError("need an even number of data symbols")
        if np.any((idx < 0) | (idx > 3)):
            raise ValueError("QPSK indices must lie in 0..3")
        s = np.ones(n, dtype=complex)
        data = np.delete(np.arange(n), (n - 1) // 2)
        s[data] = QPSK[idx]
        return cls(s)

    @classmethod
    def random_qpsk(cls, n_channels: int, rng: np.random.Generator) -> SymbolFrame:
        return cls.from_qpsk_indices(rng.integers(0, 4, size=n_channels - 1))

    def rotated(self, phase: complex) -> SymbolFrame:
        """Multiply the data symbols by a common unit-modulus constant."""
        s = self.symbols * phase
        s[self.pilot_index] = 1
        return SymbolFrame(s)

    def reversed(self) -> SymbolFrame:
        return SymbolFrame(self.symbols[::-1])
