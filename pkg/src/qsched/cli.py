"""Command line: generate, run, ratio, verify, sweep.

Exit codes: 0 success, 1 a property or invariant failed, 2 bad usage or parameters.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

from .golden import parse_number
from .harness import (ALGORITHMS, HarnessError, parse_suite, ratio_report,
                      run_algorithm, sweep)
from .instances import Family, GeneratorSpec, generate
from .model import (InstanceError, ScheduleError, dump_instance, dump_log,
                    format_weight, parse_instance, parse_log, parse_schedule,
                    verify_schedule)
from .schedulers import InvariantViolation, SchedulerParams


class UsageError(Exception):
    pass


def _default_seed() -> int:
    raw = os.environ.get("QSCHED_SEED", "0")
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"QSCHED_SEED must be an integer, got {raw!r}")


def _read_instance(path: str):
    try:
        return parse_instance(Path(path).read_text())
    except OSError as exc:
        raise UsageError(f"cannot read instance: {exc}")
    except InstanceError as exc:
        raise UsageError(f"{path}: {exc}")


def _params(args) -> SchedulerParams:
    try:
        return SchedulerParams(
            alpha=None if args.alpha is None else parse_number(args.alpha),
            gamma=None if args.gamma is None else parse_number(args.gamma),
        )
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"bad parameter: {exc}")


def cmd_generate(args) -> int:
    try:
        spec = GeneratorSpec(
            family=Family(args.family), b=args.b, eps=args.eps, rounds=args.rounds,
            n_packets=args.n, horizon=args.horizon, max_slack=args.slack,
            max_weight=args.wmax, seed=args.seed if args.seed is not None else _default_seed(),
        )
        inst = generate(spec)
    except ValueError as exc:
        raise UsageError(str(exc))
    text = dump_instance(inst)
    ref = "-" if inst.reference_opt_weight is None else format_weight(inst.reference_opt_weight)
    summary = f"packets={len(inst.packets)} reference_opt_weight={ref}"
    if args.out:
        Path(args.out).write_text(text)
        print(summary)
    else:
        sys.stdout.write(text)
        print(summary, file=sys.stderr)
    return 0


def cmd_run(args) -> int:
    inst = _read_instance(args.instance)
    seed = args.seed if args.seed is not None else _default_seed()
    try:
        weight, log = run_algorithm(inst, args.algorithm, _params(args), seed=seed, check=args.check)
    except InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return 1
    except (HarnessError, ValueError) as exc:
        raise UsageError(str(exc))
    if args.log:
        Path(args.log).write_text(dump_log(log))
    print(f"algorithm={args.algorithm} sent={len(log)} total={format_weight(weight)}")
    return 0


def cmd_ratio(args) -> int:
    inst = _read_instance(args.instance)
    seed = args.seed if args.seed is not None else _default_seed()
    opt, file_weight = args.opt, None
    if opt.startswith("file:"):
        path = opt[5:]
        try:
            sched = parse_schedule(Path(path).read_text())
            bad = verify_schedule(inst, sched)
        except (OSError, ScheduleError) as exc:
            raise UsageError(f"cannot use {path}: {exc}")
        if bad:
            print(f"opt schedule {path} is infeasible: {bad[0]}", file=sys.stderr)
            return 1
        pk = inst.by_id()
        file_weight, opt = sum((pk[i].weight for _, i in sched), Fraction(0)), "file"
    try:
        report = ratio_report(inst, args.algorithm, opt, _params(args), trials=args.trials,
                              seed=seed, file_weight=file_weight, instance_id=args.instance)
    except (HarnessError, ValueError) as exc:
        raise UsageError(str(exc))
    doc = report.as_dict()
    if args.out:
        Path(args.out).write_text(json.dumps(doc, indent=2) + "\n")
    for key in ("algorithm", "opt_source", "opt_weight", "alg_weight", "ratio"):
        if key in doc:
            print(f"{key}: {doc[key]}")
    if report.trials:
        t = report.trials
        print(f"trials: {t['trials']} mean={t['mean']:.6f} min={t['min']:.6f} "
              f"max={t['max']:.6f} stddev={t['stddev']:.6f}")
    if report.opt_source == "ORACLE" and report.ratio is not None and report.ratio < 1:
        print("ratio below 1 against the oracle", file=sys.stderr)
        return 1
    return 0


def cmd_verify(args) -> int:
    inst = _read_instance(args.instance)
    try:
        text = Path(args.log).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read schedule: {exc}")
    try:
        sched = parse_schedule(text)
        bad = verify_schedule(inst, sched)
        if text.lstrip().startswith("step"):
            # a log also records weights; they must match the instance
            pk = inst.by_id()
            for e in parse_log(text):
                if e.weight != pk[e.packet_id].weight:
                    print(f"weight step {e.step} packet {e.packet_id}: logged {format_weight(e.weight)}")
                    return 1
    except ScheduleError as exc:
        print(f"invalid schedule: {exc}", file=sys.stderr)
        return 1
    for v in bad:
        print(v)
    if bad:
        return 1
    print(f"ok: {len(sched)} deliveries")
    return 0


def cmd_sweep(args) -> int:
    try:
        rows = parse_suite(Path(args.suite).read_text())
    except OSError as exc:
        raise UsageError(f"cannot read suite: {exc}")
    except (HarnessError, ValueError) as exc:
        raise UsageError(str(exc))
    seed = args.seed if args.seed is not None else _default_seed()
    try:
        table = sweep(rows, seed)
    except HarnessError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    if args.out:
        Path(args.out).write_text(table)
    else:
        sys.stdout.write(table)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qsched", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write an instance file")
    g.add_argument("--family", required=True, choices=[f.value for f in Family])
    g.add_argument("--b", type=int, default=4)
    g.add_argument("--eps", default="1/4")
    g.add_argument("--rounds", type=int, default=1)
    g.add_argument("--n", type=int, default=10)
    g.add_argument("--horizon", type=int)
    g.add_argument("--slack", type=int, default=3)
    g.add_argument("--wmax", type=int, default=10)
    g.add_argument("--seed", type=int)
    g.add_argument("--out")
    g.set_defaults(func=cmd_generate)

    def algo_flags(p):
        p.add_argument("--instance", required=True)
        p.add_argument("--algorithm", required=True, choices=ALGORITHMS)
        p.add_argument("--alpha")
        p.add_argument("--gamma")
        p.add_argument("--seed", type=int)

    r = sub.add_parser("run", help="simulate one algorithm")
    algo_flags(r)
    r.add_argument("--log", help="write the transmission log here")
    r.add_argument("--check", action="store_true", help="assert runtime invariants")
    r.set_defaults(func=cmd_run)

    q = sub.add_parser("ratio", help="competitive ratio against an optimum")
    algo_flags(q)
    q.add_argument("--opt", default="oracle", help="oracle | reference | file:PATH")
    q.add_argument("--trials", type=int, default=1)
    q.add_argument("--out", help="write the report as JSON")
    q.set_defaults(func=cmd_ratio)

    v = sub.add_parser("verify", help="check a schedule or log against an instance")
    v.add_argument("--instance", required=True)
    v.add_argument("--log", "--schedule", dest="log", required=True)
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("sweep", help="run a suite file and print a result table")
    s.add_argument("suite")
    s.add_argument("--out")
    s.add_argument("--seed", type=int)
    s.set_defaults(func=cmd_sweep)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"qsched: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
