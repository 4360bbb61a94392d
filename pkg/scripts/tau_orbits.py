"""Follow tau on Heller lattices and identify each step up to isomorphism.

Z_n is compared with Z_(n-1); a band lattice Z^lambda_n is compared with
both Z^lambda_n and Z^(-lambda)_n.

    python3 scripts/tau_orbits.py --n-min -3 --n-max 3 --bands 1 2 3
"""

import argparse
import random

from kronord.ars import iso_test
from kronord.heller import heller, heller_z, syzygy
from kronord.modk import Band, BandInf


def main() -> None:
    ap = argparse.ArgumentParser(description="tau orbits of Heller lattices")
    ap.add_argument("--p", type=int, default=3)
    ap.add_argument("--n-min", type=int, default=-3)
    ap.add_argument("--n-max", type=int, default=3)
    ap.add_argument("--bands", type=int, nargs="*", default=[1, 2, 3])
    args = ap.parse_args()
    p, rng = args.p, random.Random(0)

    for n in range(args.n_min, args.n_max + 1):
        res = iso_test(syzygy(heller_z(n, p)), heller_z(n - 1, p), rng=rng)
        print(f"tau Z{n} ~ Z{n - 1}: {res.iso} ({res.reason})")

    for n in args.bands:
        Z = heller(BandInf(n), p)
        res = iso_test(syzygy(Z), Z, rng=rng)
        print(f"tau Z[Binf:{n}] ~ itself: {res.iso} ({res.reason})")
        for lam in range(p):
            Z = heller(Band(lam, n), p)
            tZ = syzygy(Z)
            same = iso_test(tZ, Z, rng=rng)
            neg = iso_test(tZ, heller(Band((-lam) % p, n), p), rng=rng)
            print(
                f"tau Z[B:{lam}:{n}] ~ Z[B:{lam}:{n}]: {same.iso} ({same.reason}); "
                f"~ Z[B:{(-lam) % p}:{n}]: {neg.iso} ({neg.reason})"
            )


if __name__ == "__main__":
    main()
