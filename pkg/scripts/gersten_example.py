"""Filling norms of multiples of the loop in <x | x^2, x^2k>.

The norm is not homogeneous: 2x and 2k x both bound a single 2-cell.
"""

import sys

from fillvol.builtins import complex_spec
from fillvol.chains import chain_from_literal
from fillvol.complexes import instantiate_window
from fillvol.filling import fill


def main(ks=(2, 3, 4)):
    for k in ks:
        w = instantiate_window(complex_spec(f"gersten({k})"), 0)
        print(f"gersten({k})")
        for n in range(1, 2 * k + 3):
            cert = fill(w, chain_from_literal(w, 1, [[n, "e", ""]]))
            val = "-" if cert.value is None else cert.value
            lp = "-" if cert.lp_bound is None else cert.lp_bound
            print(f"  |{n} e| = {val:>2}   linear relaxation {lp}")


if __name__ == "__main__":
    main(tuple(int(a) for a in sys.argv[1:]) or (2, 3, 4))
