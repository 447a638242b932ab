"""Ratios of every online algorithm on the three adversarial constructions.

OPT is each instance's reference schedule weight. RME is averaged over
--trials seeded runs.

    python3 scripts/constructions.py --b 4 10 100 --trials 2000
"""
import argparse
from fractions import Fraction

from qsched import gen_best_effort_lb, gen_edf_nemesis, gen_greedy_lb, rme_trials, simulate


def build(family, b, rounds):
    if family == "edf-nemesis":
        return gen_edf_nemesis(b, rounds, Fraction(1, 100))
    if family == "best-effort-lb":
        return gen_best_effort_lb(b, Fraction(1, b))
    return gen_greedy_lb(b, Fraction(1, 2 * b))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--b", type=int, nargs="+", default=[4, 10, 100])
    ap.add_argument("--rounds", type=int, default=100)
    ap.add_argument("--trials", type=int, default=2000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    print(f"{'family':<16}{'b':>5}{'OPT':>12}{'ME':>9}{'RME':>9}{'EDF':>9}{'Greedy':>9}")
    for family in ("edf-nemesis", "best-effort-lb", "greedy-lb"):
        for b in args.b:
            inst = build(family, b, args.rounds)
            opt = inst.reference_opt_weight
            cells = []
            for alg in ("me", "rme", "edf", "greedy"):
                if alg == "rme":
                    totals = rme_trials(inst, seed=args.seed, trials=args.trials)
                    total = sum(totals, Fraction(0)) / len(totals)
                else:
                    total = simulate(inst, alg).total
                cells.append(f"{float(opt / total):>9.4f}" if total else f"{'inf':>9}")
            print(f"{family:<16}{b:>5}{float(opt):>12.2f}" + "".join(cells))


if __name__ == "__main__":
    main()
