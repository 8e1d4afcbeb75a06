#!/usr/bin/env python3
"""Sweep signing time versus link distance for 1-byte and 1-MB messages.

Writes one CSV per message size (columns distance_km, rate_bps, seconds)
next to this script unless --out-dir says otherwise.
"""

import argparse
import csv
from pathlib import Path

from aqds.qkd_model import (
    InfeasibleDistanceError,
    PRESETS,
    rate_at_distance,
    time_to_sign,
)


def sweep(out_dir: Path, m_bytes: int, label: str, eps: float) -> None:
    params = PRESETS["table1"]
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / f"time_curve_{label}.csv"
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["distance_km", "rate_bps", "seconds"])
        for distance in range(0, 501, 10):
            r = rate_at_distance(params, distance).secure_rate
            try:
                seconds = f"{time_to_sign(params, distance, 8 * m_bytes, eps):.6g}"
            except InfeasibleDistanceError:
                seconds = "inf"
            writer.writerow([distance, f"{r:.6g}", seconds])
    print(f"wrote {path}")


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", type=Path, default=Path(__file__).parent)
    parser.add_argument("--epsilon", type=float, default=1e-20)
    args = parser.parse_args()
    sweep(args.out_dir, 1, "1byte", args.epsilon)
    sweep(args.out_dir, 1 << 20, "1mb", args.epsilon)
