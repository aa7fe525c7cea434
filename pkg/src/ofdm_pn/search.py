"""Worst-case search over QPSK frames and received channels.

Only the ratios a_r / a_k enter the variance, so a frame and its global
rotations share one value. The default sweep fixes a_k = 1 and weights every
evaluated case by 4; ``audit=True`` enumerates all (N-1) * 4^(N-1) cases.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .analytic import OFDM_REGIMES, Regime, VarianceResult, ofdm_variance, rho_matrix
from .model import QPSK, SymbolFrame, SystemConfig, delay_steps
from .oracle import worker_count

SUPPORTED_N = (5, 7, 9, 11)
N_BINS = 100
CHUNK_FRAMES = 1 << 14


def _check_regime(regime) -> Regime:
    regime = Regime(regime)
    if regime not in OFDM_REGIMES:
        raise ValueError(f"not an OFDM regime: {regime.value}")
    return regime


def heuristic_worst_case(n_channels: int, config: SystemConfig,
                         regime: Regime | str = Regime.NONE) -> VarianceResult:
    """All data symbols equal, received channel k = 0."""
    regime = _check_regime(regime)
    cfg = config.with_channels(n_channels)
    return ofdm_variance(SymbolFrame.all_same(n_channels), 0, cfg, regime)


@dataclass(frozen=True)
class SweepOutcome:
    n_channels: int
    regime: Regime
    worst_frame: SymbolFrame
    worst_k: int
    worst_normalized: float
    bin_edges: np.ndarray
    counts: np.ndarray
    cases_evaluated: int
    audit: bool
    overflow: int = 0  # cases above the last edge, counted in the last bin

    @property
    def histogram(self) -> list[tuple[float, float, int]]:
        e = self.bin_edges
        return [(float(e[i]), float(e[i + 1]), int(c)) for i, c in enumerate(self.counts)]


def _symbol_table(n: int, k: int) -> np.ndarray:
    """T[r, s, m] = sqrt|d_r| Re(QPSK[s] exp(j 2 pi (r - k) m / N))."""
    r = np.arange(n)[:, None, None]
    m = np.arange(n)[None, None, :]
    carrier = np.exp(2j * np.pi * (((r - k) * m) % n) / n)
    w = np.sqrt(np.abs(delay_steps(n)))[:, None, None]
    return w * np.real(QPSK[None, :, None] * carrier)


def _digits(index: np.ndarray, n_digits: int) -> np.ndarray:
    """Base-4 digits, most significant first."""
    shifts = 2 * np.arange(n_digits - 1, -1, -1)
    return (index[:, None] >> shifts[None, :]) & 3


def _ratio_indices(index: np.ndarray, n: int, k: int, audit: bool) -> np.ndarray:
    """QPSK index of a_r / a_k for every slot r, one row per enumerated frame."""
    pilot = (n - 1) // 2
    data = [r for r in range(n) if r != pilot]
    out = np.zeros((index.size, n), dtype=np.int64)
    if audit:
        digits = _digits(index, n - 1)
        out[:, data] = digits
        out[:, pilot] = 0
        return (out - out[:, [k]]) % 4
    free = [r for r in data if r != k]
    out[:, free] = _digits(index, n - 2)
    return out


def _frame_values(table: np.ndarray, ratio_idx: np.ndarray, regime: Regime,
                  rho: np.ndarray | None) -> np.ndarray:
    n = table.shape[0]
    # P[f, r, m] = table[r, u[f, r], m]
    p = table[np.arange(n)[None, :], ratio_idx]
    if regime is Regime.NONE:
        return np.sum(p.sum(axis=1) ** 2, axis=1) / n ** 2
    if regime is Regime.FULL:
        return p.sum(axis=(1, 2)) ** 2 / n ** 2
    return np.sum(p * np.matmul(rho, p), axis=(1, 2)) / n ** 2


def _frame_from_ratios(ratio_idx: np.ndarray, audit_index: int | None, n: int) -> SymbolFrame:
    if audit_index is not None:
        return SymbolFrame.from_qpsk_indices(_digits(np.array([audit_index]), n - 1)[0])
    pilot = (n - 1) // 2
    return SymbolFrame.from_qpsk_indices(np.delete(ratio_idx, pilot))


def exhaustive_sweep(n_channels: int, config: SystemConfig, regime: Regime | str = Regime.NONE,
                     audit: bool = False) -> SweepOutcome:
    """Evaluate every QPSK frame at every received channel.

    Values are normalized by 2 pi dv_Tx tau, so only ``n_channels`` matters
    from the configuration. Histogram: 100 uniform bins on [0, N/2].
    """
    regime = _check_regime(regime)
    n = n_channels
    if n not in SUPPORTED_N:
        raise ValueError(f"exhaustive sweep supports N in {SUPPORTED_N}; N={n} would need "
                         f"(N-1)*4^(N-1) = {(n - 1) * 4 ** (n - 1)} evaluations")
    config.with_channels(n)  # validates the rest of the configuration
    pilot = (n - 1) // 2
    edges = np.linspace(0.0, n / 2, N_BINS + 1)
    width = edges[1] - edges[0]
    rho = rho_matrix(n) if regime is Regime.PARTIAL else None
    per_k = 4 ** (n - 1) if audit else 4 ** (n - 2)
    weight = 1 if audit else 4

    jobs = [(k, lo, min(lo + CHUNK_FRAMES, per_k))
            for k in range(n) if k != pilot
            for lo in range(0, per_k, CHUNK_FRAMES)]
    tables = {k: _symbol_table(n, k) for k in range(n) if k != pilot}

    def run(job):
        k, lo, hi = job
        index = np.arange(lo, hi, dtype=np.int64)
        ratio = _ratio_indices(index, n, k, audit)
        vals = _frame_values(tables[k], ratio, regime, rho)
        bins = np.minimum((vals / width).astype(np.int64), N_BINS - 1)
        counts = np.bincount(np.maximum(bins, 0), minlength=N_BINS)
        best = int(np.argmax(vals))
        return (vals[best], k, int(index[best]), ratio[best],
                counts, int(np.count_nonzero(vals > edges[-1])))

    workers = min(worker_count(), len(jobs))
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(run, jobs))
    else:
        results = [run(j) for j in jobs]

    counts = np.zeros(N_BINS, dtype=np.int64)
    overflow = 0
    best = None
    for res in results:
        counts += res[4]
        overflow += res[5]
        if best is None or res[0] > best[0]:
            best = res
    value, k, index, ratio, _, _ = best
    frame = _frame_from_ratios(ratio, index if audit else None, n)
    return SweepOutcome(
        n_channels=n, regime=regime, worst_frame=frame, worst_k=k,
        worst_normalized=float(value), bin_edges=edges, counts=counts * weight,
        cases_evaluated=len(tables) * per_k * weight, audit=audit, overflow=overflow * weight,
    )


def fig3_sweep(n_list, config: SystemConfig) -> list[tuple[int, float, float, float]]:
    """Normalized worst-case variance per N: (N, no-corr, partial, full-corr), ascending N."""
    rows = []
    for n in sorted(set(int(x) for x in n_list)):
        rows.append((n,) + tuple(heuristic_worst_case(n, config, reg).normalized
                                 for reg in (Regime.NONE, Regime.PARTIAL, Regime.FULL)))
    return rows
