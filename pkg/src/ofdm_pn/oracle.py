"""Ground-truth phase-error variance from the discrete CPE + ICI sums.

The pilot-referenced phase error on received channel k is the linear form

    theta_k = sum_{r,m} c[r, m] * dpsi_r(m T / N),
    c[r, m] = Re((a_r / a_k) exp(j 2 pi (r - k) m / N)) / N,
    dpsi_r(t) = psi(t) - psi(t + d_r tau),

of a single Tx Wiener phase psi with Var[psi(b) - psi(a)] = 2 pi dv_Tx |b - a|.
Each dpsi_r(t) is +/- one Wiener increment over an interval of length
|d_r| tau, so two of them have covariance 2 pi dv_Tx * s1 * s2 * overlap.

Two independent routes evaluate Var[theta_k]:

* :func:`exact_variance` integrates the Gaussian quadratic form exactly,
* :func:`mc_variance` samples Wiener paths and takes the sample variance,
  either of the linear form or of the full exp(j dpsi) demodulation.
"""
from __future__ import annotations

import enum
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .analytic import Regime, VarianceResult, _check_frame
from .model import SymbolFrame, SystemConfig, delay_steps, intrinsic_unit, walkoff

CHUNK_TRIALS = 4096
MATRIX_LIMIT = 2500  # largest sample count for which the dense covariance is built


def worker_count() -> int:
    """Worker cap from OFDM_PN_THREADS; results never depend on it."""
    raw = os.environ.get("OFDM_PN_THREADS", "")
    try:
        n = int(raw)
    except ValueError:
        n = os.cpu_count() or 1
    return max(1, n)


@dataclass(frozen=True)
class SamplePoint:
    channel: int
    time_bin: int
    base_time: float
    shifted_time: float


def sample_points(config: SystemConfig) -> list[SamplePoint]:
    n = config.n_channels
    tau = walkoff(config).tau
    dt = config.symbol_period / n
    d = delay_steps(n)
    return [SamplePoint(r, m, m * dt, m * dt + d[r] * tau) for r in range(n) for m in range(n)]


def _sample_times(config: SystemConfig) -> tuple[np.ndarray, np.ndarray]:
    """Base and shifted times as (N, N) arrays indexed [r, m]."""
    n = config.n_channels
    tau = walkoff(config).tau
    base = np.broadcast_to(np.arange(n) * (config.symbol_period / n), (n, n))
    shifted = base + delay_steps(n)[:, None] * tau
    return base, shifted


def _increment_form(config: SystemConfig) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Each dpsi_r(t_m) as sign * (psi(hi) - psi(lo)); arrays flattened in (r, m) order."""
    base, shifted = _sample_times(config)
    lo = np.minimum(base, shifted).ravel()
    hi = np.maximum(base, shifted).ravel()
    d = np.repeat(delay_steps(config.n_channels), config.n_channels)
    # psi(t) - psi(t + d tau): minus the forward increment for d > 0
    sign = -np.sign(d).astype(float)
    return sign, lo, hi


@dataclass(frozen=True)
class CovarianceModel:
    entries: np.ndarray  # (N^2, N^2), rad^2, indexed by flattened (r, m)
    scale: float  # 2 pi dv_Tx, rad^2/s

    def diagonal_by_channel(self, n_channels: int) -> np.ndarray:
        return np.diag(self.entries).reshape(n_channels, n_channels)


def covariance_model(config: SystemConfig, check_psd: bool = True) -> CovarianceModel:
    """Dense covariance of all dpsi_r(m T / N) from signed interval overlaps."""
    n2 = config.n_channels ** 2
    if n2 > MATRIX_LIMIT:
        raise ValueError(f"dense covariance for N={config.n_channels} has {n2}^2 entries; "
                         "use exact_variance(method='segments')")
    scale = 2 * math.pi * config.lasers.tx_linewidth
    sign, lo, hi = _increment_form(config)
    overlap = np.clip(np.minimum.outer(hi, hi) - np.maximum.outer(lo, lo), 0.0, None)
    cov = scale * np.outer(sign, sign) * overlap
    if check_psd:
        eig = np.linalg.eigvalsh(cov)
        tol = 1e-10 * max(np.trace(cov), np.finfo(float).tiny)
        if eig.min() < -tol:
            raise ArithmeticError(f"covariance not PSD: min eigenvalue {eig.min():.3e}")
    return CovarianceModel(cov, scale)


def phase_error_weights(frame: SymbolFrame, k: int, config: SystemConfig) -> np.ndarray:
    """c[r, m] such that theta_k = sum c[r, m] dpsi_r(m T / N)."""
    _check_frame(frame, k, config)
    n = config.n_channels
    r = np.arange(n)[:, None]
    m = np.arange(n)[None, :]
    ratio = (frame.symbols / frame.symbols[k])[:, None]
    return np.real(ratio * np.exp(2j * np.pi * (((r - k) * m) % n) / n)) / n


def _segment_variance(weights: np.ndarray, config: SystemConfig) -> float:
    """Var of sum w_i * sign_i * (psi(hi_i) - psi(lo_i)) as 2 pi dv * int f(u)^2 du."""
    sign, lo, hi = _increment_form(config)
    w = weights.ravel() * sign
    keep = (hi > lo) & (w != 0)
    w, lo, hi = w[keep], lo[keep], hi[keep]
    if w.size == 0:
        return 0.0
    grid, inv = np.unique(np.concatenate([lo, hi]), return_inverse=True)
    step = np.zeros(grid.size)
    np.add.at(step, inv[: lo.size], w)
    np.add.at(step, inv[lo.size:], -w)
    level = np.cumsum(step)[:-1]
    return 2 * math.pi * config.lasers.tx_linewidth * float(np.dot(level * level, np.diff(grid)))


def exact_variance(frame: SymbolFrame, k: int, config: SystemConfig,
                   method: str = "auto") -> VarianceResult:
    """Exact Var[theta_k] under the Wiener model.

    ``method='matrix'`` forms c^T Sigma c with the dense (PSD-checked)
    covariance; ``'segments'`` integrates the squared piecewise-constant
    kernel directly and scales to large N. ``'auto'`` picks by size.
    """
    c = phase_error_weights(frame, k, config)
    if method == "auto":
        method = "matrix" if config.n_channels ** 2 <= MATRIX_LIMIT else "segments"
    if method == "matrix":
        cov = covariance_model(config).entries
        flat = c.ravel()
        value = float(flat @ cov @ flat)
    elif method == "segments":
        value = _segment_variance(c, config)
    else:
        raise ValueError(f"unknown method {method!r}")
    value = max(value, 0.0)
    unit = intrinsic_unit(config)
    return VarianceResult(value, value / unit if unit > 0 else math.nan, Regime.ORACLE, int(k))


# --- Monte Carlo ----------------------------------------------------------

def _chunk_rng(seed: int, chunk: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(chunk,)))


def _chunks(trials: int) -> list[tuple[int, int]]:
    return [(i, min(CHUNK_TRIALS, trials - start))
            for i, start in enumerate(range(0, trials, CHUNK_TRIALS))]


def _paths_on_grid(grid: np.ndarray, origin: int, linewidth: float, count: int,
                   rng: np.random.Generator) -> np.ndarray:
    """Wiener paths pinned to 0 at grid[origin], one row per trial."""
    gaps = np.diff(grid)
    steps = rng.standard_normal((count, gaps.size)) * np.sqrt(2 * math.pi * linewidth * gaps)
    paths = np.zeros((count, grid.size))
    paths[:, 1:] = np.cumsum(steps, axis=1)
    return paths - paths[:, origin: origin + 1]


def sample_wiener_paths(config: SystemConfig, times, trials: int, seed: int):
    """Sample the Tx phase psi at the requested times.

    Returns ``(grid, paths)``: the sorted unique time grid (which always
    contains t = 0, where psi is pinned to 0) and an array of shape
    (trials, len(grid)). Identical seeds give identical paths regardless of
    how trials are split across workers.
    """
    t = np.asarray(times, dtype=float).ravel()
    if t.size == 0:
        raise ValueError("empty time set")
    if trials < 1:
        raise ValueError("need at least one trial")
    grid = np.unique(np.concatenate([t, [0.0]]))
    origin = int(np.searchsorted(grid, 0.0))
    lw = config.lasers.tx_linewidth
    parts = [_paths_on_grid(grid, origin, lw, count, _chunk_rng(seed, i))
             for i, count in _chunks(trials)]
    return grid, np.concatenate(parts, axis=0)


class McMode(str, enum.Enum):
    LINEARIZED = "linearized"
    EXPONENTIAL = "exponential"


@dataclass(frozen=True)
class McEstimate:
    variance: float
    stderr: float
    trials: int
    mode: McMode
    seed: int


def _mc_chunk(chunk: int, count: int, seed: int, frame: SymbolFrame, k: int,
              config: SystemConfig, mode: McMode, grid: np.ndarray, origin: int,
              base_idx: np.ndarray, shift_idx: np.ndarray, weights: np.ndarray) -> np.ndarray:
    paths = _paths_on_grid(grid, origin, config.lasers.tx_linewidth, count,
                           _chunk_rng(seed, chunk))
    dpsi = paths[:, base_idx] - paths[:, shift_idx]  # (count, N, N) as [r, m]
    if mode is McMode.LINEARIZED:
        return np.einsum("trm,rm->t", dpsi, weights)
    n = config.n_channels
    r = np.arange(n)[:, None]
    m = np.arange(n)[None, :]
    carrier = (frame.symbols / frame.symbols[k])[:, None] * np.exp(
        2j * np.pi * (((r - k) * m) % n) / n)
    demod = np.einsum("trm,rm->t", np.exp(1j * dpsi), carrier) / n
    return np.angle(demod)


def mc_phase_errors(frame: SymbolFrame, k: int, config: SystemConfig, trials: int,
                    seed: int, mode: McMode | str = McMode.LINEARIZED) -> np.ndarray:
    """Per-trial phase error theta_k, ordered by trial index."""
    mode = McMode(mode)
    weights = phase_error_weights(frame, k, config)
    if trials < 1:
        raise ValueError("need at least one trial")
    if walkoff(config).tau == 0 or config.lasers.tx_linewidth == 0:
        # every dpsi is identically zero; skip the roots-of-unity rounding in exp mode
        return np.zeros(trials)
    base, shifted = _sample_times(config)
    grid = np.unique(np.concatenate([base.ravel(), shifted.ravel(), [0.0]]))
    origin = int(np.searchsorted(grid, 0.0))
    base_idx = np.searchsorted(grid, base)
    shift_idx = np.searchsorted(grid, shifted)

    def run(job):
        chunk, count = job
        return _mc_chunk(chunk, count, seed, frame, k, config, mode, grid, origin,
                         base_idx, shift_idx, weights)

    jobs = _chunks(trials)
    workers = min(worker_count(), len(jobs))
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(run, jobs))
    else:
        parts = [run(j) for j in jobs]
    return np.concatenate(parts)


def mc_variance(frame: SymbolFrame, k: int, config: SystemConfig, trials: int, seed: int,
                mode: McMode | str = McMode.LINEARIZED) -> McEstimate:
    if trials < 2:
        raise ValueError("need at least two trials for a sample variance")
    theta = mc_phase_errors(frame, k, config, trials, seed, mode)
    var = float(np.var(theta, ddof=1))
    return McEstimate(var, var * math.sqrt(2.0 / (trials - 1)), trials, McMode(mode), seed)
