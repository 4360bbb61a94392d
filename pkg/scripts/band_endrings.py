"""Check whether End(Z^lambda_n) is local for small even n.

For each p and each lambda in P^1(F_p) the Heller lattice of B:lambda:n (or
Binf:n) is built and its endomorphism ring is tested for locality.  One line
per case, then a count of local rings.

    python3 scripts/band_endrings.py --p 3 5 --n 2 4
"""

import argparse
import time

from kronord.ars import end_algebra
from kronord.heller import heller
from kronord.modk import Band, BandInf


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--p", type=int, nargs="+", default=[3, 5])
    ap.add_argument("--n", type=int, nargs="+", default=[2, 4])
    args = ap.parse_args()

    total = local = 0
    for p in args.p:
        for n in args.n:
            labels = [Band(lam, n) for lam in range(p)] + [BandInf(n)]
            for lab in labels:
                t0 = time.perf_counter()
                E = end_algebra(heller(lab, p))
                total += 1
                local += E.is_local
                print(
                    f"p={p} {str(lab):>8}: rank End = {E.dim:3d}, "
                    f"local = {E.is_local}, dim End/rad = {E.semisimple_dim} "
                    f"({time.perf_counter() - t0:.2f}s)"
                )
    print(f"{local}/{total} endomorphism rings local")


if __name__ == "__main__":
    main()
