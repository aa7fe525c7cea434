"""Scenario files: flat ``key = value`` lines with ``#`` comments.

Physical keys are required; run controls fall back to defaults. Values are
converted to SI exactly once, here.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .analytic import OFDM_REGIMES, Regime
from .model import FiberParams, LaserParams, SystemConfig

REQUIRED_KEYS = (
    "n_channels",
    "symbol_period_s",
    "tx_linewidth_hz",
    "lo_linewidth_hz",
    "dispersion_ps_nm_km",
    "wavelength_m",
    "fiber_length_km",
)
OPTIONAL_DEFAULTS = {
    "distances_km": ",".join(str(x) for x in range(0, 601, 25)),
    "n_list": "5,7,9,11,21,31,51,101,151,201",
    "trials": "10000",
    "seed": "20130101",
    "regime": "nocorr",
    "qpsk_symbol_period_s": "",  # empty: capacity matched, T / N
}
KNOWN_KEYS = REQUIRED_KEYS + tuple(OPTIONAL_DEFAULTS)

DEFAULT_CONFIG_TEXT = """\
# 1 GBd QPSK CO-OFDM with a centre RF pilot tone
n_channels = 101            # grid slots incl. the pilot: 100 data channels
symbol_period_s = 1e-9      # T; channel spacing is 1/T = 1 GHz
tx_linewidth_hz = 4e6
lo_linewidth_hz = 4e6
dispersion_ps_nm_km = 16
wavelength_m = 1.55e-6
fiber_length_km = 100
distances_km = 0,25,50,75,100,125,150,175,200,225,250,275,300,325,350,375,400,425,450,475,500,525,550,575,600
n_list = 5,7,9,11,21,31,51,101,151,201
trials = 10000
seed = 20130101
regime = nocorr
"""


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ScenarioConfig:
    system: SystemConfig
    distances_km: tuple[float, ...]
    n_list: tuple[int, ...]
    trials: int
    seed: int
    regime: Regime
    qpsk_symbol_period: float  # s
    output: str | None = None


def _split_lines(text: str) -> dict[str, tuple[str, int]]:
    raw = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line.strip()!r}")
        key, value = (part.strip() for part in body.split("=", 1))
        if key not in KNOWN_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in raw:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        raw[key] = (value, lineno)
    return raw


def _number(key, value, where, kind=float):
    try:
        if kind is int:
            x = float(value)
            if x != int(x):
                raise ValueError
            return int(x)
        x = float(value)
    except ValueError:
        raise ConfigError(f"{where}: malformed number for {key}: {value!r}") from None
    if not math.isfinite(x):
        raise ConfigError(f"{where}: {key} must be finite")
    return x


def _list(key, value, where, kind=float):
    items = [v.strip() for v in value.split(",") if v.strip()]
    if not items:
        raise ConfigError(f"{where}: {key} must not be empty")
    return tuple(_number(key, v, where, kind) for v in items)


def parse_config(text: str, overrides: dict[str, str] | None = None,
                 output: str | None = None) -> ScenarioConfig:
    """Parse and validate a scenario file; ``overrides`` win over file values."""
    raw = _split_lines(text)
    for key, value in (overrides or {}).items():
        if key not in KNOWN_KEYS:
            raise ConfigError(f"unknown key {key!r}")
        raw[key] = (str(value), None)
    missing = [k for k in REQUIRED_KEYS if k not in raw]
    if missing:
        raise ConfigError("missing required keys: " + ", ".join(missing))
    for key, default in OPTIONAL_DEFAULTS.items():
        raw.setdefault(key, (default, None))

    def get(key, kind=float):
        value, lineno = raw[key]
        where = f"line {lineno}" if lineno else f"override {key}"
        return _number(key, value, where, kind), where

    n, where = get("n_channels", int)
    if n % 2 == 0:
        raise ConfigError(f"{where}: n_channels must be odd, got {n}")
    if n < 3:
        raise ConfigError(f"{where}: n_channels must be at least 3")
    period, where = get("symbol_period_s")
    if period <= 0:
        raise ConfigError(f"{where}: symbol_period_s must be positive")
    try:
        system = SystemConfig(
            n_channels=n,
            symbol_period=period,
            fiber=FiberParams(get("dispersion_ps_nm_km")[0], get("wavelength_m")[0],
                              get("fiber_length_km")[0]),
            lasers=LaserParams(get("tx_linewidth_hz")[0], get("lo_linewidth_hz")[0]),
        )
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from None

    value, lineno = raw["distances_km"]
    where = f"line {lineno}" if lineno else "distances_km"
    distances = _list("distances_km", value, where)
    if any(d < 0 for d in distances):
        raise ConfigError(f"{where}: distances must be nonnegative")
    if any(b <= a for a, b in zip(distances, distances[1:])):
        raise ConfigError(f"{where}: distances must be strictly ascending")

    value, lineno = raw["n_list"]
    where = f"line {lineno}" if lineno else "n_list"
    n_list = _list("n_list", value, where, int)
    bad = [x for x in n_list if x < 3 or x % 2 == 0]
    if bad:
        raise ConfigError(f"{where}: n_list entries must be odd and >= 3, got {bad}")

    trials, where = get("trials", int)
    if trials < 2:
        raise ConfigError(f"{where}: trials must be at least 2")
    seed, where = get("seed", int)
    if seed < 0:
        raise ConfigError(f"{where}: seed must be nonnegative")

    value, lineno = raw["regime"]
    try:
        regime = Regime(value)
        if regime not in OFDM_REGIMES:
            raise ValueError
    except ValueError:
        names = ", ".join(r.value for r in OFDM_REGIMES)
        where = f"line {lineno}" if lineno else "regime"
        raise ConfigError(f"{where}: regime must be one of {names}, got {value!r}") from None

    if raw["qpsk_symbol_period_s"][0] == "":
        ts = period / n
    else:
        ts, where = get("qpsk_symbol_period_s")
        if ts <= 0:
            raise ConfigError(f"{where}: qpsk_symbol_period_s must be positive")

    return ScenarioConfig(system, distances, n_list, trials, seed, regime, ts, output)
