"""CSV tables for the figure sweeps, the validation report and reach limits.

Numbers are written with 12 significant digits via ``format(x, '.12g')``,
which is locale independent, so equal inputs give byte-identical files.
"""
from __future__ import annotations

import csv
import io
import math

import numpy as np

from .analytic import (OFDM_REGIMES, Regime, ber_floor, ofdm_variance, qpsk_eepn_variance,
                       solve_max_distance, solve_qpsk_max_distance, variance_full_corr,
                       variance_no_corr, variance_partial)
from .config import ScenarioConfig
from .model import SymbolFrame, intrinsic_unit, walkoff
from .oracle import McMode, exact_variance, mc_variance
from .search import SUPPORTED_N, exhaustive_sweep, fig3_sweep, heuristic_worst_case

DISTANCE_HEADER = ("L_km", "sigma2_ofdm_nocorr", "sigma2_ofdm_partial", "sigma2_ofdm_fullcorr",
                   "sigma2_qpsk", "ber_ofdm_nocorr", "ber_ofdm_partial", "ber_ofdm_fullcorr",
                   "ber_qpsk")
N_HEADER = ("N", "norm_nocorr", "norm_partial", "norm_fullcorr")
HISTOGRAM_HEADER = ("N", "bin_lo", "bin_hi", "count")
VALIDATE_HEADER = ("N", "L_km", "case", "k", "nocorr", "partial", "partial_rho1",
                   "fullcorr", "oracle", "mc_lin", "mc_lin_se", "mc_exp", "mc_exp_se",
                   "mc_agree", "ratio_nocorr_oracle", "ratio_partial_oracle")

VALIDATE_N = (5, 11)
VALIDATE_L = (0.0, 100.0, 277.0)
VALIDATE_RANDOM_FRAMES = 2


def fmt(x) -> str:
    if isinstance(x, str):
        return x
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".12g")


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def distance_rows(scenario: ScenarioConfig) -> list[tuple]:
    system = scenario.system
    norm = {reg: heuristic_worst_case(system.n_channels, system, reg).normalized
            for reg in OFDM_REGIMES}
    rows = []
    for length in scenario.distances_km:
        cfg = system.with_length(length)
        unit = intrinsic_unit(cfg)
        ofdm = [norm[reg] * unit for reg in (Regime.NONE, Regime.PARTIAL, Regime.FULL)]
        qpsk = qpsk_eepn_variance(cfg, scenario.qpsk_symbol_period).value
        sig = ofdm + [qpsk]
        rows.append((length, *sig, *(ber_floor(s) for s in sig)))
    return rows


def cmd_sweep_distance(scenario: ScenarioConfig) -> str:
    """Variance and BER floor versus fiber length."""
    return _csv(DISTANCE_HEADER, distance_rows(scenario))


def cmd_sweep_n(scenario: ScenarioConfig) -> str:
    """Normalized worst-case variance versus N."""
    return _csv(N_HEADER, fig3_sweep(scenario.n_list, scenario.system))


def cmd_histogram(scenario: ScenarioConfig, n_list=None, audit: bool = False) -> str:
    """Exhaustive histograms for every N in the list, with one summary comment per N."""
    ns = sorted(set(scenario.n_list if n_list is None else n_list))
    bad = [n for n in ns if n not in SUPPORTED_N]
    if bad:
        raise ValueError(f"histogram supports N in {SUPPORTED_N}, got {bad}")
    rows, summary = [], []
    for n in ns:
        out = exhaustive_sweep(n, scenario.system, scenario.regime, audit=audit)
        rows += [(n, lo, hi, c) for lo, hi, c in out.histogram]
        summary.append(f"# N={n} regime={out.regime.value} worst_normalized={fmt(out.worst_normalized)} "
                       f"worst_k={out.worst_k} cases_evaluated={out.cases_evaluated} "
                       f"audit={fmt(audit)} overflow={out.overflow}\n")
    return _csv(HISTOGRAM_HEADER, rows) + "".join(summary)


def _validation_cases(n: int, rng: np.random.Generator):
    yield "all_same", SymbolFrame.all_same(n), 0
    pilot = (n - 1) // 2
    data = [r for r in range(n) if r != pilot]
    for i in range(VALIDATE_RANDOM_FRAMES):
        frame = SymbolFrame.random_qpsk(n, rng)
        yield f"random{i}", frame, int(rng.choice(data))


def validation_rows(scenario: ScenarioConfig) -> list[tuple]:
    if scenario.trials < 1000:
        raise ValueError("validate needs at least 1000 trials")
    rng = np.random.default_rng(scenario.seed)
    rows = []
    case_seed = 0
    for n in VALIDATE_N:
        cases = list(_validation_cases(n, rng))
        for length in VALIDATE_L:
            cfg = scenario.system.with_channels(n).with_length(length)
            for name, frame, k in cases:
                none = variance_no_corr(frame, k, cfg).value
                part = variance_partial(frame, k, cfg).value
                part_one = variance_partial(frame, k, cfg, rho_override=np.ones((n, n))).value
                full = variance_full_corr(frame, k, cfg).value
                exact = exact_variance(frame, k, cfg).value
                seed = scenario.seed + case_seed
                case_seed += 1
                lin = mc_variance(frame, k, cfg, scenario.trials, seed, McMode.LINEARIZED)
                exp = mc_variance(frame, k, cfg, scenario.trials, seed, McMode.EXPONENTIAL)
                agree = abs(lin.variance - exact) <= 3 * lin.stderr
                ratio_none = none / exact if exact > 0 else math.nan
                ratio_part = part / exact if exact > 0 else math.nan
                rows.append((n, length, name, k, none, part, part_one, full, exact, lin.variance,
                             lin.stderr, exp.variance, exp.stderr, agree, ratio_none, ratio_part))
    return rows


class ValidationFailure(RuntimeError):
    pass


def cmd_validate(scenario: ScenarioConfig) -> tuple[str, str]:
    """Analytic vs exact vs Monte Carlo; returns (text summary, CSV).

    Raises :class:`ValidationFailure` (after building both outputs, attached
    as ``.outputs``) when the exact and linearized MC variances disagree by
    more than three standard errors.
    """
    rows = validation_rows(scenario)
    table = _csv(VALIDATE_HEADER, rows)
    lines = [f"validate: {len(rows)} grid points, trials={scenario.trials}, seed={scenario.seed}"]
    failures = 0
    for row in rows:
        n, length, name, k = row[:4]
        agree = row[13]
        failures += not agree
        lines.append(f"N={n:<3d} L={fmt(length):>5s} km {name:<8s} k={k:<2d} "
                     f"oracle={fmt(row[8]):<20s} mc={fmt(row[9])}+/-{fmt(row[10])} "
                     f"{'ok' if agree else 'MISMATCH'}  nocorr/oracle={fmt(row[14])} "
                     f"partial/oracle={fmt(row[15])}")
    lines.append(f"oracle vs MC (3 sigma): {len(rows) - failures}/{len(rows)} agree")
    text = "\n".join(lines) + "\n"
    if failures:
        err = ValidationFailure(f"{failures} grid points disagree beyond 3 standard errors")
        err.outputs = (text, table)
        raise err
    return text, table


def max_distance_rows(scenario: ScenarioConfig, ber_target: float) -> list[tuple[str, float, float]]:
    """(variant, normalized variance or nan, L_max km)."""
    system = scenario.system
    n = system.n_channels
    rows = [("ofdm_design_n_over_4", n / 4, solve_max_distance(system, n / 4, ber_target))]
    for reg in OFDM_REGIMES:
        norm = heuristic_worst_case(n, system, reg).normalized
        rows.append((f"ofdm_{reg.value}", norm, solve_max_distance(system, norm, ber_target)))
    rows.append(("qpsk_eepn", math.nan,
                 solve_qpsk_max_distance(system, scenario.qpsk_symbol_period, ber_target)))
    return rows


def cmd_max_distance(scenario: ScenarioConfig, ber_target: float = 1e-4) -> str:
    system = scenario.system
    rows = max_distance_rows(scenario, ber_target)
    out = [
        f"N = {system.n_channels}, T = {fmt(system.symbol_period)} s, "
        f"dv_Tx = {fmt(system.lasers.tx_linewidth)} Hz, dv_LO = {fmt(system.lasers.lo_linewidth)} Hz",
        f"D = {fmt(system.fiber.dispersion)} ps/nm/km, lambda = {fmt(system.fiber.wavelength)} m, "
        f"Ts(qpsk) = {fmt(scenario.qpsk_symbol_period)} s, BER target = {fmt(ber_target)}",
    ]
    for name, norm, length in rows:
        reach = "unlimited" if math.isinf(length) else f"{fmt(length)} km"
        label = f" (normalized {fmt(norm)})" if not math.isnan(norm) else ""
        out.append(f"{name}{label}: L_max = {reach}")
    return "\n".join(out) + "\n"


def cmd_walkoff(scenario: ScenarioConfig) -> str:
    system = scenario.system
    tau = walkoff(system).tau
    return (f"tau = {fmt(tau)} s at L = {fmt(system.fiber.length)} km\n"
            f"intrinsic unit 2*pi*dv_Tx*tau = {fmt(intrinsic_unit(system))} rad^2\n")


def cmd_variance(scenario: ScenarioConfig, frame: SymbolFrame, k: int) -> str:
    cfg = scenario.system
    rows = [ofdm_variance(frame, k, cfg, reg) for reg in OFDM_REGIMES]
    rows.append(exact_variance(frame, k, cfg))
    lines = ["regime,k,sigma2,normalized,ber"]
    for res in rows:
        lines.append(",".join([res.regime.value, str(k), fmt(res.value), fmt(res.normalized),
                               fmt(ber_floor(res.value))]))
    return "\n".join(lines) + "\n"
