"""Print the rank-ledger contradiction for each Euclidean tree class.

    python3 scripts/tree_classes.py [--json]
"""

import argparse
import json

from kronord.quiver import ledger_system, solve_ledger, tree_class_ledger


def main() -> int:
    ap = argparse.ArgumentParser(description="tree-class rank ledgers")
    ap.add_argument("--json", action="store_true")
    args = ap.parse_args()

    ok = True
    for shape in ("E6", "E7", "E8"):
        proof = tree_class_ledger(shape)
        sol = solve_ledger(ledger_system(shape))
        ok = ok and proof.verified and not sol.feasible
        if args.json:
            print(json.dumps(proof.to_json(), ensure_ascii=False, indent=2))
            continue
        print(proof.report())
        if sol.consistent:
            print("  solver: violations " + "; ".join(sol.violations))
        else:
            print("  solver: linear system inconsistent (Farkas combination found)")
        print()
    return 0 if ok else 1


if __name__ == "__main__":
    raise SystemExit(main())
