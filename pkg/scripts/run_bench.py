#!/usr/bin/env python3
"""Operation-count sweep over n, K, P for the open tandem model.

Writes the measured counters next to the idealized formula values;
edit the lists below or pass --out to redirect the CSV.
"""

import sys

from tandemax.cli import bench

if __name__ == "__main__":
    out = sys.argv[sys.argv.index("--out") + 1] if "--out" in sys.argv else None
    sys.exit(bench(n_list=[2, 4, 8, 16], k_list=[100, 1000], p_list=[1, 4, 8, 16], out=out))
