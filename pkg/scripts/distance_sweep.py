#!/usr/bin/env python3
"""Variance and BER floor versus fiber length, OFDM (N=101, 201) against single-carrier QPSK."""
import argparse
from pathlib import Path

from ofdm_pn.config import DEFAULT_CONFIG_TEXT, parse_config
from ofdm_pn.report import cmd_max_distance, cmd_sweep_distance


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n-channels", default="101,201")
    ap.add_argument("--distances-km", default=",".join(str(x) for x in range(0, 1001, 10)))
    ap.add_argument("--outdir", type=Path, default=Path("results"))
    args = ap.parse_args()
    args.outdir.mkdir(parents=True, exist_ok=True)
    for n in args.n_channels.split(","):
        sc = parse_config(DEFAULT_CONFIG_TEXT, {"n_channels": n, "distances_km": args.distances_km})
        out = args.outdir / f"distance_N{n}.csv"
        out.write_text(cmd_sweep_distance(sc))
        print(f"wrote {out}")
        print(cmd_max_distance(sc))


if __name__ == "__main__":
    main()
