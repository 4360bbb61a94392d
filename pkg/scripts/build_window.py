"""Build a window of the component through the Z_n, verify it, write DOT and JSON.

    python3 scripts/build_window.py -3 3 --depth 3 --out runs/window
"""

import argparse
import time
from pathlib import Path

from kronord.quiver import BuildConfig, build_component, emit_dot, emit_json, verify_za_infinity


def main() -> int:
    ap = argparse.ArgumentParser(description="build and verify a component window")
    ap.add_argument("n_min", type=int)
    ap.add_argument("n_max", type=int)
    ap.add_argument("--depth", type=int, default=3)
    ap.add_argument("--p", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--lattices", action="store_true", help="store lattice matrices in the JSON")
    ap.add_argument("--out", type=Path, default=Path("runs/window"))
    args = ap.parse_args()

    t0 = time.perf_counter()
    W = build_component(args.n_min, args.n_max, args.depth, jobs=args.jobs, config=BuildConfig(p=args.p, seed=args.seed))
    elapsed = time.perf_counter() - t0
    rep = verify_za_infinity(W)

    args.out.mkdir(parents=True, exist_ok=True)
    stem = f"window_{args.n_min}_{args.n_max}_d{args.depth}_p{args.p}"
    (args.out / f"{stem}.dot").write_text(emit_dot(W))
    (args.out / f"{stem}.json").write_text(emit_json(W, lattices=args.lattices))
    (args.out / f"{stem}.report.txt").write_text(rep.text() + "\n")

    for v in W.ordered():
        print(f"{v.id:>5} {str(v.coord):>9}  rank {v.rank:3d}  d'={v.dprime}{'  frontier' if v.frontier else ''}")
    print(rep.text())
    print(f"built in {elapsed:.1f}s; files in {args.out}/{stem}.*")
    return 0 if rep.passed else 1


if __name__ == "__main__":
    raise SystemExit(main())
