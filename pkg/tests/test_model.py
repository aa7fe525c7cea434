import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ofdm_pn.model import (FiberParams, LaserParams, SymbolFrame, SystemConfig,
                           channel_delay_steps, default_config, delay_steps, per_channel_sigma2,
                           qpsk_alphabet, walkoff)


def test_walkoff_reference_system():
    # 12.8 ps, printed as 0.013 ns
    tau = walkoff(default_config(101, 100.0)).tau
    assert tau == pytest.approx(1.28e-11, rel=5e-3)
    assert round(tau * 1e9, 3) == 0.013


def test_walkoff_zero_length():
    assert walkoff(default_config(101, 0.0)).tau == 0.0


def test_walkoff_277km_hand_product():
    # D [s/m^2] * L [m] * lambda^2 [m^2] * df [Hz] / c [m/s]
    expected = 16e-6 * 277e3 * (1.55e-6) ** 2 * 1e9 / 3e8
    assert expected == pytest.approx(3.5493e-11, rel=1e-4)
    assert walkoff(default_config(101, 277.0)).tau == pytest.approx(expected, rel=1e-12)


@given(st.just(0.0) | st.floats(1e-3, 5000.0), st.floats(-40.0, 40.0).filter(lambda d: d == 0 or abs(d) > 1e-9))
def test_walkoff_linear_in_length_and_dispersion(length, dispersion):
    base = SystemConfig(101, 1e-9, FiberParams(dispersion, 1.55e-6, length), LaserParams(1e6, 1e6))
    doubled_l = SystemConfig(101, 1e-9, FiberParams(dispersion, 1.55e-6, 2 * length),
                             LaserParams(1e6, 1e6))
    doubled_d = SystemConfig(101, 1e-9, FiberParams(2 * dispersion, 1.55e-6, length),
                             LaserParams(1e6, 1e6))
    tau = walkoff(base).tau
    assert walkoff(doubled_l).tau == pytest.approx(2 * tau, rel=1e-15, abs=0)
    assert walkoff(doubled_d).tau == pytest.approx(2 * tau, rel=1e-15, abs=0)


def test_walkoff_linear_in_spacing():
    a = SystemConfig(101, 1e-9, FiberParams(16, 1.55e-6, 100), LaserParams(1e6, 1e6))
    b = SystemConfig(101, 0.5e-9, FiberParams(16, 1.55e-6, 100), LaserParams(1e6, 1e6))
    assert walkoff(b).tau == pytest.approx(2 * walkoff(a).tau, rel=1e-15)


@pytest.mark.parametrize("n, r, expected", [(101, 50, 0), (101, 0, 50), (101, 100, -50), (5, 1, 1)])
def test_channel_delay_steps(n, r, expected):
    assert channel_delay_steps(r, default_config(n)) == expected


@pytest.mark.parametrize("r", [-1, 101, 2.5])
def test_channel_delay_steps_out_of_range(r):
    with pytest.raises(IndexError):
        channel_delay_steps(r, default_config(101))


def test_per_channel_sigma2_edge_channel():
    cfg = default_config(101, 100.0)
    tau = walkoff(cfg).tau
    assert per_channel_sigma2(0, cfg) == pytest.approx(2 * math.pi * 4e6 * 50 * tau, rel=1e-14)
    assert per_channel_sigma2(0, cfg) == pytest.approx(1.608e-2, rel=2e-3)
    assert per_channel_sigma2(50, cfg) == 0.0


@pytest.mark.parametrize("n", [3, 5, 11, 101])
def test_per_channel_sigma2_mirror_symmetric_and_zero_only_at_pilot(n):
    cfg = default_config(n, 50.0)
    values = [per_channel_sigma2(r, cfg) for r in range(n)]
    assert values == values[::-1]
    assert [r for r, v in enumerate(values) if v == 0] == [(n - 1) // 2]


@given(st.integers(1, 500))
def test_sum_abs_delays_closed_form(half):
    n = 2 * half + 1
    assert int(np.abs(delay_steps(n)).sum()) == ((n - 1) // 2) * ((n + 1) // 2)


def test_qpsk_alphabet_closed_under_ratios():
    alph = qpsk_alphabet()
    assert np.allclose(alph * np.conj(alph), 1)
    assert 1j / -1 == -1j
    for a in alph:
        for b in alph:
            assert np.min(np.abs(alph - a / b)) < 1e-15
        assert np.min(np.abs(alph - 1j * a)) < 1e-15


@pytest.mark.parametrize("n", [4, 1, 100])
def test_system_config_rejects_even_or_small_n(n):
    with pytest.raises(ValueError):
        default_config(n)


def test_invalid_physical_parameters():
    with pytest.raises(ValueError):
        FiberParams(16, 0.0, 10)
    with pytest.raises(ValueError):
        FiberParams(16, 1.55e-6, -1)
    with pytest.raises(ValueError):
        LaserParams(-1, 0)
    with pytest.raises(ValueError):
        SystemConfig(5, 0.0, FiberParams(16, 1.55e-6, 1), LaserParams(1, 1))


def test_symbol_frame_invariants():
    frame = SymbolFrame.from_qpsk_indices([1, 2, 3, 0])
    assert np.array_equal(frame.symbols, [1j, -1, 1, -1j, 1])
    with pytest.raises(ValueError):
        SymbolFrame(np.array([1, 1, 1j, 1, 1]))  # pilot must be 1
    with pytest.raises(ValueError):
        SymbolFrame(np.array([2, 1, 1]))
    with pytest.raises(ValueError):
        frame.symbols[0] = 5


def test_symbol_frame_rotation_keeps_pilot():
    frame = SymbolFrame.all_same(7, -1j).rotated(1j)
    assert frame.symbols[3] == 1
    assert np.allclose(np.delete(frame.symbols, 3), 1)
