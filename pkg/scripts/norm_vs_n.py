#!/usr/bin/env python3
"""Normalized worst-case variance versus N for the three correlation regimes."""
import argparse
from pathlib import Path

from ofdm_pn.config import DEFAULT_CONFIG_TEXT, parse_config
from ofdm_pn.report import cmd_sweep_n


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--config", type=Path)
    ap.add_argument("--n-list", default="5,7,9,11,21,31,51,71,101,151,201")
    ap.add_argument("--output", type=Path, default=Path("results/norm_vs_n.csv"))
    args = ap.parse_args()
    text = args.config.read_text() if args.config else DEFAULT_CONFIG_TEXT
    sc = parse_config(text, {"n_list": args.n_list})
    args.output.parent.mkdir(parents=True, exist_ok=True)
    args.output.write_text(cmd_sweep_n(sc))
    print(f"wrote {args.output}")


if __name__ == "__main__":
    main()
