"""Search for the worst ratio of a few inequalities as n grows.

Each cube is warm-started from the previous witness, so the reported
constants can only go up with n. The budget here is small; the acceptance
run uses 10^4 evaluations per cube.
"""
from cubelsi.norms import TargetNorm
from cubelsi.search import SearchConfig, extremize_sweep


def main(budget=1500):
    cfg = SearchConfig(budget=budget, restart_budget=500, seed=0)
    for ineq, d in [("poincare-lp", 1), ("talagrand-lsi", 1), ("main-lsi", 2), ("pisier-log-n", 2)]:
        sweep = extremize_sweep(ineq, range(2, 6), d, TargetNorm(2), cfg, p=2.0)
        ratios = "  ".join(f"n={n}: {r.report.ratio:.4f}" for n, r in sweep.items())
        print(f"{ineq:15s} {ratios}")


if __name__ == "__main__":
    main()
