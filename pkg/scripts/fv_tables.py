"""Print FV tables for the built-in torus complexes.

    python3 scripts/fv_tables.py [--max-k 8]
"""

import argparse
import time

from fillvol.builtins import complex_spec
from fillvol.functions import fv_table

CASES = [("z2-torus", 1, 4), ("z3-cubes", 1, 3), ("z3-cubes", 2, 2)]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--max-k", type=int, default=8)
    args = ap.parse_args()
    for name, n, r in CASES:
        k_max = min(args.max_k, 6) if n == 2 else args.max_k
        t0 = time.perf_counter()
        t = fv_table(complex_spec(name), n, k_max, radius=r)
        print(f"{name}  n={n}  radius={r}  ({time.perf_counter() - t0:.1f} s)")
        print("   k  value  status       cycles")
        for row in t.rows:
            print(f"  {row.k:2d}  {row.value:5d}  {row.status:11s}  {row.cycles:6d}")
        for note in t.notes:
            print("  note:", note)
        print()


if __name__ == "__main__":
    main()
