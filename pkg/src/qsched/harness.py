"""Competitive-ratio measurement, batch sweeps and counterexample shrinking."""
from __future__ import annotations

import csv
import io
import json
import statistics
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from .golden import PHI_SQ, parse_number
from .instances import Family, GeneratorSpec, generate
from .model import Instance, LogEntry, format_weight, verify_schedule
from .offline import ORACLE_LIMIT, greedy_opt, oracle_opt
from .schedulers import (Algorithm, InvariantViolation, SchedulerParams,
                         rme_trials, simulate)

OFFLINE = ("offline-greedy", "oracle")
ALGORITHMS = tuple(a.value for a in Algorithm) + OFFLINE
TABLE_HEADER = ["family", "b", "eps", "algorithm", "alg_weight", "opt_weight", "ratio", "paper_bound"]
RATIO_BOUNDS = {"me": "3", "rme": f"{float(PHI_SQ):.6f}"}


class HarnessError(ValueError):
    """Bad request: missing reference, oracle budget, unknown algorithm."""


@dataclass
class RatioReport:
    instance_id: str
    algorithm: str
    params: dict
    opt_source: str                 # ORACLE | REFERENCE | FILE
    opt_weight: Fraction
    alg_weight: Fraction | None = None          # deterministic algorithms
    trials: dict | None = None                  # randomized: trials, mean, min, max, stddev
    ratio: Fraction | float | None = None

    def as_dict(self) -> dict:
        out = {
            "instance": self.instance_id, "algorithm": self.algorithm, "params": self.params,
            "opt_source": self.opt_source, "opt_weight": format_weight(self.opt_weight),
            "ratio": format_ratio(self.ratio),
        }
        if self.alg_weight is not None:
            out["alg_weight"] = format_weight(self.alg_weight)
        if self.trials is not None:
            out["trials"] = self.trials
        return out


def format_ratio(r) -> str:
    if r is None:
        return ""
    if isinstance(r, float):
        return "inf" if r == float("inf") else f"{r:.6f}"
    return str(r)


def exact_ratio(opt: Fraction, alg: Fraction) -> Fraction | float:
    if alg == 0:
        return Fraction(1) if opt == 0 else float("inf")
    return Fraction(opt) / alg


def run_algorithm(instance: Instance, algorithm: str, params: SchedulerParams | None = None,
                  seed: int = 0, check: bool = False) -> tuple[Fraction, list[LogEntry]]:
    """Total weight and delivery log for an online algorithm or an offline solver."""
    if algorithm in OFFLINE:
        solve = oracle_opt if algorithm == "oracle" else greedy_opt
        if algorithm == "oracle" and len(instance.packets) > ORACLE_LIMIT:
            raise HarnessError(f"oracle budget is {ORACLE_LIMIT} packets")
        weight, witness = solve(instance)
        pk = instance.by_id()
        log = [LogEntry(s, i, pk[i].weight) for s, i in witness]
        if check and verify_schedule(instance, witness):
            raise InvariantViolation(0, "log-verifies", "offline witness fails", [])
        return weight, log
    if algorithm not in ALGORITHMS:
        raise HarnessError(f"unknown algorithm {algorithm!r}")
    res = simulate(instance, algorithm, params, seed=seed, check=check)
    return res.total, list(res.log)


def optimum(instance: Instance, source: str, file_weight: Fraction | None = None) -> tuple[str, Fraction]:
    source = source.lower()
    if source == "oracle":
        if len(instance.packets) > ORACLE_LIMIT:
            raise HarnessError(
                f"oracle budget exceeded: {len(instance.packets)} packets > {ORACLE_LIMIT}")
        return "ORACLE", oracle_opt(instance)[0]
    if source == "reference":
        if instance.reference_opt_weight is None:
            raise HarnessError("instance carries no reference_opt_weight")
        return "REFERENCE", instance.reference_opt_weight
    if source == "file":
        return "FILE", file_weight
    raise HarnessError(f"unknown opt source {source!r}")


def ratio_report(instance: Instance, algorithm: str, opt_source: str = "oracle",
                 params: SchedulerParams | None = None, trials: int = 1, seed: int = 0,
                 file_weight: Fraction | None = None, instance_id: str = "") -> RatioReport:
    src, opt = optimum(instance, opt_source, file_weight)
    shown = _params_dict(algorithm, params)
    if algorithm == "rme":
        totals = rme_trials(instance, params, seed=seed, trials=trials)
        mean = sum(totals, Fraction(0)) / len(totals)
        stats = {
            "trials": trials, "seed": seed,
            "mean": float(mean), "min": float(min(totals)), "max": float(max(totals)),
            "stddev": statistics.pstdev(float(x) for x in totals),
        }
        r = exact_ratio(opt, mean)
        return RatioReport(instance_id, algorithm, shown, src, opt, trials=stats,
                           ratio=r if isinstance(r, float) else float(r))
    alg_w, _ = run_algorithm(instance, algorithm, params, seed=seed)
    return RatioReport(instance_id, algorithm, shown, src, opt, alg_weight=alg_w,
                       ratio=exact_ratio(opt, alg_w))


def _params_dict(algorithm: str, params: SchedulerParams | None) -> dict:
    if algorithm not in ("me", "rme"):
        return {}
    alpha, gamma = (params or SchedulerParams()).resolve(Algorithm(algorithm))
    out = {"alpha": _show_number(alpha)}
    if algorithm == "rme":
        out["gamma"] = _show_number(gamma)
    return out


def _show_number(x) -> str:
    return format_weight(x) if isinstance(x, Fraction) else repr(x)


# --- sweeps -------------------------------------------------------------------

@dataclass
class SweepRow:
    spec: GeneratorSpec
    algorithm: str
    params: SchedulerParams = field(default_factory=SchedulerParams)
    trials: int = 1


def parse_suite(text: str) -> list[SweepRow]:
    """A suite is a JSON array of row objects (or ``{"rows": [...]}``).

    Row keys: family, b, eps, rounds, n, horizon, slack, wmax, seed,
    algorithm, alpha, gamma, trials.
    """
    doc = json.loads(text) if text.strip() else []
    if isinstance(doc, dict):
        doc = doc.get("rows", [])
    rows = []
    for k, r in enumerate(doc):
        try:
            spec = GeneratorSpec(
                family=Family(r["family"]), b=int(r.get("b", 4)),
                eps=str(r.get("eps", "1/4")), rounds=int(r.get("rounds", 1)),
                n_packets=int(r.get("n", 10)),
                horizon=None if r.get("horizon") is None else int(r["horizon"]),
                max_slack=int(r.get("slack", 3)), max_weight=int(r.get("wmax", 10)),
                seed=int(r.get("seed", 0)),
            )
            params = SchedulerParams(
                alpha=None if r.get("alpha") is None else parse_number(str(r["alpha"])),
                gamma=None if r.get("gamma") is None else parse_number(str(r["gamma"])),
            )
            alg = str(r["algorithm"])
            if alg not in ALGORITHMS:
                raise HarnessError(f"unknown algorithm {alg!r}")
            rows.append(SweepRow(spec, alg, params, int(r.get("trials", 1))))
        except (KeyError, TypeError, ValueError) as exc:
            raise HarnessError(f"suite row {k}: {exc}") from exc
    return rows


def sweep(rows: Sequence[SweepRow], master_seed: int = 0) -> str:
    """Comma-separated result table, one line per row, deterministic in ``master_seed``.

    OPT is the instance's reference weight when it has one, otherwise the
    exhaustive oracle (or the greedy solver beyond the oracle budget).
    """
    buf = io.StringIO()
    out = csv.writer(buf, lineterminator="\n")
    out.writerow(TABLE_HEADER)
    for k, row in enumerate(rows):
        try:
            inst = generate(row.spec)
            if inst.reference_opt_weight is not None:
                opt = inst.reference_opt_weight
            elif len(inst.packets) <= ORACLE_LIMIT:
                opt = oracle_opt(inst)[0]
            else:
                opt = greedy_opt(inst)[0]
            if row.algorithm == "rme":
                totals = rme_trials(inst, row.params, seed=master_seed + k, trials=row.trials)
                mean = sum(totals, Fraction(0)) / len(totals)
                alg_w = f"{float(mean):.6f}"
                r = exact_ratio(opt, mean)
                ratio = format_ratio(r if isinstance(r, float) else float(r))
            else:
                w, _ = run_algorithm(inst, row.algorithm, row.params, seed=master_seed + k)
                alg_w, ratio = format_weight(w), format_ratio(exact_ratio(opt, w))
        except Exception as exc:
            raise HarnessError(f"sweep row {k} failed: {exc}") from exc
        eps = "" if row.spec.family is Family.RANDOM else format_weight(row.spec.eps)
        out.writerow([row.spec.family.value, row.spec.b, eps,
                      row.algorithm, alg_w, format_weight(opt), ratio,
                      RATIO_BOUNDS.get(row.algorithm, "")])
    return buf.getvalue()


# --- counterexamples ----------------------------------------------------------

def shrink_instance(instance: Instance, failing: Callable[[Instance], bool]) -> Instance:
    """Drop packets one at a time while ``failing`` still holds (1-minimal result)."""
    current = instance
    changed = True
    while changed:
        changed = False
        for p in current.packets:
            smaller = current.subset(q.id for q in current.packets if q.id != p.id)
            if failing(smaller):
                current, changed = smaller, True
                break
    return current
