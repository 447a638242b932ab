"""Worst observed OPT/ALG over seeded random instances, against the exhaustive oracle.

Also counts instances where the heaviest-first offline solver misses the
optimum, and shrinks the first such instance.

    python3 scripts/random_survey.py --instances 2000 --n 10 --b 3
"""
import argparse
from fractions import Fraction

from qsched import dump_instance, gen_random, greedy_opt, oracle_opt, rme_trials, simulate
from qsched.harness import shrink_instance


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--instances", type=int, default=1000)
    ap.add_argument("--n", type=int, default=10)
    ap.add_argument("--b", type=int, default=3)
    ap.add_argument("--slack", type=int, default=4)
    ap.add_argument("--wmax", type=int, default=20)
    ap.add_argument("--trials", type=int, default=500)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    worst = {a: (Fraction(0), None) for a in ("me", "rme", "edf", "greedy")}
    misses = []
    for k in range(args.instances):
        inst = gen_random(args.n, args.b, args.slack, args.wmax, args.seed + k)
        opt = oracle_opt(inst)[0]
        if greedy_opt(inst)[0] != opt:
            misses.append(inst)
        for alg in worst:
            if alg == "rme":
                totals = rme_trials(inst, seed=k, trials=args.trials)
                total = sum(totals, Fraction(0)) / len(totals)
            else:
                total = simulate(inst, alg).total
            if total and opt / total > worst[alg][0]:
                worst[alg] = (opt / total, args.seed + k)

    for alg, (ratio, seed) in worst.items():
        print(f"{alg:<7} worst OPT/ALG = {float(ratio):.4f}  (instance seed {seed})")
    print(f"offline greedy below optimum on {len(misses)} of {args.instances} instances")
    if misses:
        small = shrink_instance(misses[0], lambda i: greedy_opt(i)[0] != oracle_opt(i)[0])
        print("smallest witness found:")
        print(dump_instance(small), end="")


if __name__ == "__main__":
    main()
