#!/usr/bin/env python3
"""Run the attack experiments at full scale and print a summary table.

Takes a few minutes: 10^6 blind-forgery trials, 2 x 10^5 known-signature
trials, and 10^4 rounds each for robustness and repudiation.
"""

import argparse
import time
from random import Random

from aqds.adversary import (
    AttackResult,
    forgery_blind,
    forgery_known_signature,
    repudiation_experiment,
    robustness_experiment,
)
from aqds.keymat import SecurityParams
from aqds.netsim import Topology


def show(name: str, res: AttackResult) -> None:
    verdict = "pass" if res.within_bound else "FAIL"
    print(f"{name:34} trials={res.trials:>8} successes={res.successes:>6} "
          f"observed={res.rate:.3e} bound={res.bound:.3e} "
          f"threshold={res.threshold:.3e} {verdict}")


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    t0 = time.perf_counter()
    ok = True

    top = Topology.fully_connected(6)
    res = robustness_experiment(top, 10_000, Random(args.seed),
                                SecurityParams.for_n(32, 64, 6))
    show("robustness k=6 n=32", res)
    ok &= res.within_bound

    res = forgery_blind(8, 1_000_000, Random(args.seed + 1))
    show("forgery blind n=8", res)
    ok &= res.within_bound

    for keys in (1, 6):
        res = forgery_known_signature(10, 32, 100_000, Random(args.seed + 2),
                                      known_keys=keys)
        show(f"forgery known-signature keys={keys}", res)
        ok &= res.within_bound

    res = repudiation_experiment(Topology.fully_connected(3), 10_000,
                                 Random(args.seed + 3))
    show("repudiation k=3", res)
    ok &= res.within_bound

    print(f"done in {time.perf_counter() - t0:.1f} s")
    return 0 if ok else 3


if __name__ == "__main__":
    raise SystemExit(main())
