import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ofdm_pn.model import (FiberParams, LaserParams, SymbolFrame, SystemConfig, default_config,
                           per_channel_sigma2, walkoff)
from ofdm_pn.oracle import (McMode, covariance_model, exact_variance, mc_phase_errors,
                            mc_variance, phase_error_weights, sample_points,
                            sample_wiener_paths)


def unit_config(n, tau_over_bin):
    """Config with T/N = 1 ns and tau = tau_over_bin ns, dv_Tx = 4 MHz."""
    base = SystemConfig(n, n * 1e-9, FiberParams(16, 1.55e-6, 1.0), LaserParams(4e6, 4e6))
    return base.with_length(tau_over_bin * 1e-9 / walkoff(base).tau)


def min_rule_covariance(config):
    """Four-point covariance of psi(t) - psi(t + d tau) from Cov psi(a) psi(b) = s min(a, b)."""
    pts = sample_points(config)
    t0 = min(min(p.base_time, p.shifted_time) for p in pts) - 1e-9
    s = 2 * math.pi * config.lasers.tx_linewidth

    def k(a, b):
        return s * min(a - t0, b - t0)

    n = len(pts)
    out = np.empty((n, n))
    for i, p in enumerate(pts):
        for j, q in enumerate(pts):
            out[i, j] = (k(p.base_time, q.base_time) - k(p.base_time, q.shifted_time)
                         - k(p.shifted_time, q.base_time) + k(p.shifted_time, q.shifted_time))
    return out


def test_weights_examples():
    frame = SymbolFrame.from_qpsk_indices([1, 3, 2, 0, 1, 2, 3, 0, 0, 1])
    k = 2
    c = phase_error_weights(frame, k, default_config(11))
    assert np.allclose(c[k], 1 / 11, rtol=0, atol=1e-15)
    others = [r for r in range(11) if r != k]
    assert np.allclose(c[others].sum(axis=1), 0, atol=1e-14)


def test_hand_covariance_n3():
    # N=3, T/N = 1, tau = 1.5 (time unit 1 ns).
    # r=0 samples are -(psi over [m, m+1.5]); r=2 samples are +(psi over [m-1.5, m]).
    cfg = unit_config(3, 1.5)
    s = 2 * math.pi * 4e6 * 1e-9
    aa = [[1.5, 0.5, 0.0], [0.5, 1.5, 0.5], [0.0, 0.5, 1.5]]
    ab = [[0.0, -1.0, -1.0], [0.0, 0.0, -1.0], [0.0, 0.0, 0.0]]
    hand = np.zeros((9, 9))
    hand[0:3, 0:3] = aa
    hand[6:9, 6:9] = aa
    hand[0:3, 6:9] = ab
    hand[6:9, 0:3] = np.transpose(ab)
    cov = covariance_model(cfg).entries
    assert np.allclose(cov, s * hand, rtol=0, atol=1e-9 * s)
    # c = 1/3 [1,1,1] on r=0 and 1/3 [1,-1/2,-1/2] on r=2: (6.5 + 2 + 3) / 9
    res = exact_variance(SymbolFrame.all_same(3), 0, cfg)
    assert res.value == pytest.approx(s * 11.5 / 9, rel=1e-9)


@pytest.mark.parametrize("n, ratio", [(5, 0.3), (5, 2.7), (7, 1.0), (9, 13.0)])
def test_covariance_matches_min_rule(n, ratio):
    cfg = unit_config(n, ratio)
    cov = covariance_model(cfg).entries
    ref = min_rule_covariance(cfg)
    assert np.allclose(cov, ref, rtol=0, atol=1e-9 * np.abs(ref).max())


@pytest.mark.parametrize("n, length", [(5, 100.0), (11, 277.0), (11, 5000.0), (21, 50.0)])
def test_covariance_diagonal_and_psd(n, length):
    cfg = default_config(n, length)
    model = covariance_model(cfg)
    diag = model.diagonal_by_channel(n)
    for r in range(n):
        assert np.allclose(diag[r], per_channel_sigma2(r, cfg), rtol=1e-12, atol=0)
    assert np.allclose(model.entries, model.entries.T)
    assert np.linalg.eigvalsh(model.entries).min() > -1e-10 * np.trace(model.entries)


def test_dense_covariance_size_guard():
    with pytest.raises(ValueError):
        covariance_model(default_config(101))


frames = st.sampled_from([5, 7, 11, 21]).flatmap(
    lambda n: st.tuples(st.just(n), st.lists(st.integers(0, 3), min_size=n - 1, max_size=n - 1),
                        st.integers(0, n - 2), st.floats(0.0, 2000.0)))


@settings(max_examples=30, deadline=None)
@given(frames, st.integers(0, 3))
def test_exact_variance_properties(data, rot):
    n, idx, j, length = data
    frame = SymbolFrame.from_qpsk_indices(idx)
    k = j if j < frame.pilot_index else j + 1
    cfg = default_config(n, length)
    dense = exact_variance(frame, k, cfg, method="matrix").value
    seg = exact_variance(frame, k, cfg, method="segments").value
    assert dense >= 0
    assert seg == pytest.approx(dense, rel=1e-9, abs=1e-18)
    assert exact_variance(frame.rotated(1j ** rot), k, cfg).value == pytest.approx(dense, rel=1e-9, abs=1e-18)
    doubled = exact_variance(frame, k, cfg.with_lasers(8e6)).value
    assert doubled == pytest.approx(2 * dense, rel=1e-12, abs=1e-300)


def test_exact_variance_zero_walkoff():
    assert exact_variance(SymbolFrame.all_same(11), 0, default_config(11, 0.0)).value == 0.0


def test_segments_scale_to_large_n():
    cfg = default_config(101, 100.0)
    res = exact_variance(SymbolFrame.all_same(101), 0, cfg)
    assert 0 < res.value < 50 * 2 * math.pi * 4e6 * walkoff(cfg).tau


def test_wiener_variance_grows_linearly():
    cfg = default_config(11).with_lasers(1e7)
    times = np.array([1e-9, 3e-9, 10e-9])
    grid, paths = sample_wiener_paths(cfg, times, 40000, seed=3)
    for t in times:
        x = paths[:, np.searchsorted(grid, t)]
        var = x.var(ddof=1)
        target = 2 * math.pi * 1e7 * t
        assert abs(var - target) < 3 * target * math.sqrt(2 / (x.size - 1))


def test_wiener_increments_uncorrelated():
    cfg = default_config(11).with_lasers(1e7)
    grid, paths = sample_wiener_paths(cfg, [-2e-9, 1e-9, 2e-9, 5e-9], 40000, seed=4)
    inc = np.diff(paths, axis=1)
    corr = np.corrcoef(inc.T)
    off = corr[~np.eye(corr.shape[0], dtype=bool)]
    assert np.all(np.abs(off) < 4 / math.sqrt(paths.shape[0]))
    assert np.all(paths[:, np.searchsorted(grid, 0.0)] == 0)


def test_wiener_zero_linewidth_and_errors():
    cfg = default_config(11).with_lasers(0.0)
    _, paths = sample_wiener_paths(cfg, [1e-9, 2e-9], 100, seed=0)
    assert not paths.any()
    with pytest.raises(ValueError):
        sample_wiener_paths(cfg, [], 10, seed=0)


def test_wiener_paths_deterministic():
    cfg = default_config(11)
    a = sample_wiener_paths(cfg, [1e-9, 4e-9], 9000, seed=11)[1]
    b = sample_wiener_paths(cfg, [1e-9, 4e-9], 9000, seed=11)[1]
    c = sample_wiener_paths(cfg, [1e-9, 4e-9], 9000, seed=12)[1]
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_mc_worker_count_does_not_change_results(monkeypatch):
    cfg = default_config(7, 300.0)
    frame = SymbolFrame.from_qpsk_indices([0, 1, 2, 3, 2, 1])
    monkeypatch.setenv("OFDM_PN_THREADS", "1")
    a = mc_phase_errors(frame, 1, cfg, 10000, seed=5)
    monkeypatch.setenv("OFDM_PN_THREADS", "4")
    b = mc_phase_errors(frame, 1, cfg, 10000, seed=5)
    assert np.array_equal(a, b)


@pytest.mark.parametrize("mode", list(McMode))
def test_mc_zero_walkoff(mode):
    est = mc_variance(SymbolFrame.all_same(11), 0, default_config(11, 0.0), 1000, seed=1, mode=mode)
    assert est.variance == 0.0 and est.stderr == 0.0


@pytest.mark.parametrize("seed", [1, 2, 3])
def test_mc_linearized_agrees_with_exact(seed):
    rng = np.random.default_rng(seed)
    frame = SymbolFrame.random_qpsk(11, rng)
    cfg = default_config(11, float(rng.uniform(20, 600)))
    k = int(rng.choice([0, 1, 2, 3, 4, 6, 7, 8, 9, 10]))
    exact = exact_variance(frame, k, cfg).value
    est = mc_variance(frame, k, cfg, 50000, seed=seed)
    assert abs(est.variance - exact) < 3 * est.stderr


def test_exponential_close_to_linearized_in_small_angle_regime():
    cfg = default_config(11, 277.0)
    for seed in range(3):
        frame = SymbolFrame.random_qpsk(11, np.random.default_rng(seed))
        lin = mc_variance(frame, 0, cfg, 20000, seed=seed, mode="linearized")
        exp = mc_variance(frame, 0, cfg, 20000, seed=seed, mode="exponential")
        assert lin.variance < 0.05
        assert abs(exp.variance / lin.variance - 1) < 0.05


def test_exponential_tracks_linearized_per_trial():
    # the gap is second order in the phase samples, so it shrinks relative to
    # theta like sqrt(linewidth)
    frame = SymbolFrame.from_qpsk_indices([1, 1, 0, 3, 2, 2, 0, 1, 3, 0])
    gaps = []
    for lw in (1e2, 1e4):
        cfg = default_config(11, 100.0).with_lasers(lw)
        lin = mc_phase_errors(frame, 3, cfg, 500, seed=9, mode="linearized")
        exp = mc_phase_errors(frame, 3, cfg, 500, seed=9, mode="exponential")
        gaps.append(np.abs(exp - lin).max() / np.abs(lin).max())
    assert gaps[0] < 1e-3
    assert gaps[1] / gaps[0] == pytest.approx(10, rel=0.3)


def test_mc_needs_two_trials():
    with pytest.raises(ValueError):
        mc_variance(SymbolFrame.all_same(5), 0, default_config(5), 1, seed=0)
