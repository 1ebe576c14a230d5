"""Survey classical bounds and optimized quantum values across the catalog.

Prints one row per (scenario, family): the certified shared-randomness
maximum, the method that produced it, the optimized quantum value on the
natural network state, and the declared targets.

Usage:
    python3 scripts/survey_bounds.py [--starts 4] [--json out.json]
"""

import argparse
import json
from fractions import Fraction

from netbell import lhv, quantum, states
from netbell.scenario import SCENARIOS


def catalog_rows():
    """(scenario, params, family, expr) for every surveyed inequality."""
    for name, info in sorted(SCENARIOS.items()):
        param_sets = [{}]
        if name == "star":
            param_sets = [{"k": 2}, {"k": 3}, {"k": 3, "r": Fraction(1, 3)}]
        for params in param_sets:
            exprs = info.build(**params)
            for family, expr in exprs.items():
                yield name, params, family, expr


def survey(starts: int) -> list[dict]:
    rows = []
    for name, params, family, expr in catalog_rows():
        cert = lhv.certify(expr)
        state = states.network_state(expr.topology)
        opt = quantum.optimize_angles(expr, state, starts=starts)
        rows.append({
            "scenario": name,
            "params": {k: str(v) for k, v in params.items()},
            "family": family,
            "inequality": expr.name,
            "lhv_max": cert["lhv_max"],
            "declared_bound": expr.classical_bound,
            "method": cert["method"],
            "verdict": cert["verdict"],
            "quantum": opt.value,
            "claimed_max": expr.claimed_quantum_max,
        })
    return rows


def print_table(rows: list[dict]) -> None:
    header = (f"{'inequality':36} {'lhv':>9} {'bound':>9} {'method':14} "
              f"{'verdict':7} {'quantum':>10} {'claimed':>10}")
    print(header)
    print("-" * len(header))
    for r in rows:
        print(f"{r['inequality']:36} {r['lhv_max']:9.4f} "
              f"{r['declared_bound']:9.4f} {r['method']:14} {r['verdict']:7} "
              f"{r['quantum']:10.6f} {r['claimed_max']:10.6f}")


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--starts", type=int, default=4,
                    help="optimizer multi-start count")
    ap.add_argument("--json", help="also write the rows as JSON")
    args = ap.parse_args()
    rows = survey(args.starts)
    print_table(rows)
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rows, fh, indent=2, sort_keys=True)
        print(f"\nwrote {args.json}")
    bad = [r for r in rows if r["verdict"] == "FAIL"]
    return 1 if bad else 0


if __name__ == "__main__":
    raise SystemExit(main())
