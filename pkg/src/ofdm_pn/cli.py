"""Command line entry point.

    ofdm-pn sweep-distance --config scenario.cfg --output fig5.csv
    ofdm-pn max-distance --n-channels 201

Every config key can be overridden with a flag of the same name
(``fiber_length_km`` -> ``--fiber-length-km``). Exit codes: 0 success,
1 invalid input or failed validation, 2 usage error.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import report
from .config import DEFAULT_CONFIG_TEXT, KNOWN_KEYS, ConfigError, parse_config
from .model import SymbolFrame

COMMANDS = ("walkoff", "variance", "sweep-distance", "sweep-n", "histogram", "validate",
            "max-distance")


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="scenario file (default: built-in reference system)")
    p.add_argument("--output", "-o", help="write the CSV here instead of stdout")
    for key in KNOWN_KEYS:
        p.add_argument("--" + key.replace("_", "-"), dest="key_" + key, metavar="VALUE")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ofdm-pn", description=__doc__.split("\n\n")[0])
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        _common(p)
        if name == "variance":
            p.add_argument("--k", type=int, default=0, help="received channel (default 0)")
            p.add_argument("--symbols", default="same",
                           help="'same' or comma-separated QPSK indices (0..3) of the N-1 data slots")
        elif name == "histogram":
            p.add_argument("--audit", action="store_true",
                           help="enumerate all (N-1)*4^(N-1) cases without symmetry reduction")
        elif name == "max-distance":
            p.add_argument("--ber-target", type=float, default=1e-4)
    return ap


def _scenario(args):
    text = Path(args.config).read_text(encoding="utf-8") if args.config else DEFAULT_CONFIG_TEXT
    overrides = {key: getattr(args, "key_" + key) for key in KNOWN_KEYS
                 if getattr(args, "key_" + key) is not None}
    return parse_config(text, overrides, output=args.output)


def _emit(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text, encoding="utf-8", newline="\n")
    else:
        sys.stdout.write(text)


def _frame(spec: str, n: int) -> SymbolFrame:
    if spec == "same":
        return SymbolFrame.all_same(n)
    idx = [int(x) for x in spec.split(",") if x.strip()]
    if len(idx) != n - 1:
        raise ValueError(f"--symbols needs {n - 1} entries, got {len(idx)}")
    return SymbolFrame.from_qpsk_indices(idx)


def run(args) -> int:
    sc = _scenario(args)
    cmd = args.command
    if cmd == "walkoff":
        sys.stdout.write(report.cmd_walkoff(sc))
    elif cmd == "variance":
        _emit(report.cmd_variance(sc, _frame(args.symbols, sc.system.n_channels), args.k),
              sc.output)
    elif cmd == "sweep-distance":
        _emit(report.cmd_sweep_distance(sc), sc.output)
    elif cmd == "sweep-n":
        _emit(report.cmd_sweep_n(sc), sc.output)
    elif cmd == "histogram":
        ns = [n for n in sc.n_list if n in report.SUPPORTED_N]
        if args.key_n_list is not None:
            ns = list(sc.n_list)
        _emit(report.cmd_histogram(sc, ns, audit=args.audit), sc.output)
    elif cmd == "validate":
        try:
            text, table = report.cmd_validate(sc)
        except report.ValidationFailure as exc:
            text, table = exc.outputs
            sys.stdout.write(text)
            if sc.output:
                _emit(table, sc.output)
            print(f"error: {exc}", file=sys.stderr)
            return 1
        if sc.output:
            sys.stdout.write(text)
            _emit(table, sc.output)
        else:
            sys.stdout.write(table)
    elif cmd == "max-distance":
        sys.stdout.write(report.cmd_max_distance(sc, args.ber_target))
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return run(args)
    except (ConfigError, ValueError, IndexError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
