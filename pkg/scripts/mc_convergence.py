"""Study how the sampling error of the round estimator scales with N.

For a grid of round counts the script repeats the simulation over several
seeds and reports the mean reported standard error, the empirical spread of
the estimates, and the ratio to the 1/sqrt(N) reference.

Usage:
    python3 scripts/mc_convergence.py --scenario star --k 2 \
        --grid 10000,40000,160000 --seeds 20 [--csv out.csv]
"""

import argparse
import csv
import math
import statistics
import sys

from netbell import sampler, states
from netbell.scenario import SCENARIOS


def build_expr(name: str, family: str, k: int):
    info = SCENARIOS[name]
    params = {"k": k} if name == "star" else {}
    exprs = info.build(**params)
    return exprs[family]


def run(expr, rounds: int, seeds: int):
    state = states.network_state(expr.topology)
    values, ses = [], []
    for seed in range(seeds):
        batch = sampler.simulate_rounds(expr, state, rounds, seed=seed)
        rep = sampler.estimate(expr, batch)
        values.append(rep.value)
        ses.append(rep.se)
    return values, ses


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--scenario", default="star")
    ap.add_argument("--family", default="first")
    ap.add_argument("--k", type=int, default=2)
    ap.add_argument("--grid", default="10000,40000,160000",
                    help="comma-separated round counts")
    ap.add_argument("--seeds", type=int, default=20)
    ap.add_argument("--csv", help="write rows here as CSV")
    args = ap.parse_args()

    expr = build_expr(args.scenario, args.family, args.k)
    grid = [int(x) for x in args.grid.split(",")]
    rows = []
    print(f"{'rounds':>10} {'mean':>10} {'mean_se':>10} {'emp_sd':>10} "
          f"{'se*sqrtN':>10}")
    for rounds in grid:
        values, ses = run(expr, rounds, args.seeds)
        mean_se = statistics.fmean(ses)
        emp_sd = statistics.stdev(values) if len(values) > 1 else math.nan
        scaled = mean_se * math.sqrt(rounds)
        rows.append({"rounds": rounds, "mean": statistics.fmean(values),
                     "mean_se": mean_se, "emp_sd": emp_sd,
                     "se_times_sqrt_n": scaled})
        print(f"{rounds:>10} {rows[-1]['mean']:>10.5f} {mean_se:>10.5f} "
              f"{emp_sd:>10.5f} {scaled:>10.5f}")

    # the scaled column should be flat when the error tracks 1/sqrt(N)
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=list(rows[0]))
            writer.writeheader()
            writer.writerows(rows)
        print(f"wrote {args.csv}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
