"""How the guard parameter alpha moves ME's worst random-instance ratio.

    python3 scripts/alpha_scan.py --alphas 1 3/2 2 5/2 3 4
"""
import argparse
from fractions import Fraction

from qsched import SchedulerParams, gen_best_effort_lb, gen_random, oracle_opt, simulate


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--alphas", nargs="+", default=["1", "3/2", "2", "5/2", "3", "4"])
    ap.add_argument("--instances", type=int, default=500)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    cases = [gen_random(10, 1 + k % 4, 4, 20, args.seed + k) for k in range(args.instances)]
    opts = [oracle_opt(inst)[0] for inst in cases]
    lb = gen_best_effort_lb(20, Fraction(1, 20))
    print(f"{'alpha':>6}{'worst random':>14}{'mean random':>13}{'best-effort b=20':>18}")
    for text in args.alphas:
        params = SchedulerParams(alpha=Fraction(text))
        ratios = [float(o / t) for o, t in
                  ((o, simulate(i, "me", params).total) for o, i in zip(opts, cases)) if t]
        lb_ratio = float(lb.reference_opt_weight / simulate(lb, "me", params).total)
        print(f"{text:>6}{max(ratios):>14.4f}{sum(ratios) / len(ratios):>13.4f}{lb_ratio:>18.4f}")


if __name__ == "__main__":
    main()
