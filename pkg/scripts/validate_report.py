#!/usr/bin/env python3
"""Closed forms vs exact Gaussian variance vs Monte Carlo on the validation grid."""
import argparse
import sys
from pathlib import Path

from ofdm_pn.config import DEFAULT_CONFIG_TEXT, parse_config
from ofdm_pn.report import ValidationFailure, cmd_validate


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", default="100000")
    ap.add_argument("--seed", default="20130101")
    ap.add_argument("--output", type=Path, default=Path("results/validate.csv"))
    args = ap.parse_args()
    sc = parse_config(DEFAULT_CONFIG_TEXT, {"trials": args.trials, "seed": args.seed})
    status = 0
    try:
        text, table = cmd_validate(sc)
    except ValidationFailure as exc:
        (text, table), status = exc.outputs, 1
    args.output.parent.mkdir(parents=True, exist_ok=True)
    args.output.write_text(table)
    sys.stdout.write(text)
    print(f"wrote {args.output}")
    return status


if __name__ == "__main__":
    sys.exit(main())
