#!/usr/bin/env python3
"""Cross-check every supported model variant against the scalar oracle.

Runs the matrix recursion and the Lindley-style scalar recursion on
shared integer service times and reports exact agreement per variant.
"""

import sys

import numpy as np

from tandemax.engine import oracle_lindley, simulate_serial
from tandemax.models import TandemSpec
from tandemax.sources import ServiceTimeSource

CONFIGS = [
    ("closed", {"population": 1}),
    ("closed", {"population": 2}),
    ("closed", {"population": 3}),
    ("open_infinite", {}),
    ("open_mfg", {"buffer_capacity": 0}),
    ("open_mfg", {"buffer_capacity": 1}),
    ("open_mfg", {"buffer_capacity": 2}),
    ("open_comm", {"buffer_capacity": 0}),
    ("open_comm", {"buffer_capacity": 1}),
    ("open_comm", {"buffer_capacity": 3}),
]


def main() -> int:
    failures = 0
    for variant, kwargs in CONFIGS:
        for n in (2, 4, 8):
            for seed in range(10):
                spec = TandemSpec(variant, n, 200, **kwargs)
                src = ServiceTimeSource(
                    kind="uniform", low=0, high=9, seed=seed, integer_times=True
                )
                tau = src.sample(n, 200)
                ok = np.array_equal(
                    simulate_serial(spec, tau).departures(),
                    oracle_lindley(spec, tau).departures(),
                )
                if not ok:
                    failures += 1
                    print(f"MISMATCH: {variant} {kwargs} n={n} seed={seed}")
        print(f"ok: {variant} {kwargs}")
    print("all variants exact" if not failures else f"{failures} mismatches")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
