"""Search all 256 projection rules on the sine/square task with memory rule 16.

    python scripts/sine_square_rule_search.py --edges fixed --out runs/sine_fixed
"""

import argparse
import time
from pathlib import Path

from reca.ca import rule_category
from reca.experiment import ReservoirParams
from reca.sweep import SweepPlan, aggregate, run_sweep, success_count


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--edges", default="fixed", choices=["fixed", "cyclic"])
    ap.add_argument("--trials", type=int, default=10)
    ap.add_argument("--mem-rule", type=int, default=16)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", default=None)
    args = ap.parse_args()

    plan = SweepPlan(
        task="sine_square",
        proj_rules=range(256),
        mem_rules=(args.mem_rule,),
        i_p=(20,),
        i_m=(60,),
        trials=args.trials,
        base=ReservoirParams(N=64, R=64, edges=args.edges),
    )
    t0 = time.time()
    result = run_sweep(plan, workers=args.workers)
    summary = aggregate(result)
    perfect = [row.group[0] for row in summary if row.min == 1.0]
    print(f"{len(result)} runs in {time.time() - t0:.0f}s")
    print(f"{len(perfect)} rules at 100% in all {args.trials} trials")
    print("categories among them:", {rule_category(r) for r in perfect})
    print("rules:", sorted(perfect))
    if args.out:
        out = Path(args.out)
        result.write(out / "results.csv")
        summary.write(out / "summary.csv")


if __name__ == "__main__":
    main()
