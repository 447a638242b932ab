"""Instance generators: the three adversarial constructions and a seeded random family.

Each adversarial generator also emits a reference schedule and its weight,
which callers can check with :func:`qsched.model.verify_schedule`.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

import numpy as np

from .model import Instance, Packet, as_weight, format_weight, verify_schedule


class Family(str, Enum):
    EDF_NEMESIS = "edf-nemesis"
    BEST_EFFORT_LB = "best-effort-lb"
    GREEDY_LB = "greedy-lb"
    RANDOM = "random"


@dataclass(frozen=True)
class GeneratorSpec:
    family: Family
    b: int = 4
    eps: Fraction = Fraction(1, 4)
    rounds: int = 1
    n_packets: int = 10
    horizon: int | None = None
    max_slack: int = 3
    max_weight: int = 10
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        object.__setattr__(self, "eps", as_weight(self.eps))


class _Builder:
    def __init__(self):
        self.packets: list[Packet] = []

    def add(self, release, deadline, weight) -> int:
        pid = len(self.packets)
        self.packets.append(Packet(pid, release, deadline, Fraction(weight)))
        return pid


def _finish(b: int, builder: _Builder, schedule, meta: dict) -> Instance:
    pk = {p.id: p for p in builder.packets}
    weight = sum((pk[i].weight for _, i in schedule), Fraction(0))
    inst = Instance(b, tuple(builder.packets), tuple(schedule), weight,
                    {k: str(v) for k, v in meta.items()})
    bad = verify_schedule(inst, inst.reference_schedule)
    if bad:
        raise AssertionError(f"generator emitted an infeasible reference: {bad[0]}")
    return inst


def gen_edf_nemesis(b: int, rounds: int, eps) -> Instance:
    """Rounds of b steps that keep EDF's buffer full of unit packets with a far deadline.

    Round k starts at step s = 1 + (k-1)*b. At s the far-deadline unit
    packets arrive (b of them in round 1, one refill later), then b packets
    of weight 1-eps due at s+b-1, all of which EDF drops. Each later step of
    the round brings one eps packet due that step, which EDF sends. A final
    batch of b far-deadline unit packets follows the last round.

    EDF earns rounds*(1 + (b-1)*eps) + b. The reference sends the round-1
    unit packets, every later round's 1-eps batch and the final batch:
    b + (1-eps)*b*rounds + eps*b.
    """
    eps = as_weight(eps)
    if b < 2 or rounds < 1 or not 0 < eps < 1:
        raise ValueError("edf-nemesis needs b >= 2, rounds >= 1, 0 < eps < 1")
    total = rounds * b + rounds * (b - 1) + (rounds - 1) + 2 * b
    final_step = rounds * b + 1
    far = final_step + total + 1
    bld, sched = _Builder(), []
    for k in range(1, rounds + 1):
        s = 1 + (k - 1) * b
        units = [bld.add(s, far, 1) for _ in range(b if k == 1 else 1)]
        batch = [bld.add(s, s + b - 1, 1 - eps) for _ in range(b)]
        for j in range(1, b):
            bld.add(s + j, s + j, eps)
        chosen = units if k == 1 else batch
        sched += [(s + j, pid) for j, pid in enumerate(chosen)]
    final = [bld.add(final_step, far, 1) for _ in range(b)]
    sched += [(final_step + j, pid) for j, pid in enumerate(final)]
    assert len(bld.packets) == total
    return _finish(b, bld, sched, {
        "family": Family.EDF_NEMESIS.value, "b": b, "eps": format_weight(eps),
        "rounds": rounds, "far_deadline": far,
        "edf_closed_form": format_weight(rounds * (eps * (b - 1) + 1) + b),
    })


def _lower_bound_family(b: int, eps: Fraction, wave_weight, family: Family) -> Instance:
    bld = _Builder()
    units = [bld.add(1, b + i, 1) for i in range(1, b + 1)]
    wave = [bld.add(1, i, wave_weight(i)) for i in range(1, b + 1)]
    singles = {i: bld.add(i, i, 1 + eps) for i in range(2, b + 1)}
    sched = [(1, wave[0])] + [(i, singles[i]) for i in range(2, b + 1)]
    sched += [(b + j, pid) for j, pid in enumerate(units[1:], start=1)]
    return _finish(b, bld, sched, {"family": family.value, "b": b, "eps": format_weight(eps)})


def gen_best_effort_lb(b: int, eps) -> Instance:
    """Unit packets due b+1..2b, then (1+eps, i) for i=1..b, all at step 1; one (1+eps, i) at each step i >= 2.

    Any algorithm that admits by the optimal provisional schedule keeps the
    whole 1+eps wave and loses the unit packets.
    """
    eps = as_weight(eps)
    if b < 2 or eps <= 0:
        raise ValueError("best-effort-lb needs b >= 2 and eps > 0")
    return _lower_bound_family(b, eps, lambda i: 1 + eps, Family.BEST_EFFORT_LB)


def gen_greedy_lb(b: int, eps) -> Instance:
    """Like the best-effort construction but the step-1 wave is (1 + i*eps, i)."""
    eps = as_weight(eps)
    if b < 2 or b % 2 or eps <= 0 or b * eps >= 1:
        raise ValueError("greedy-lb needs even b >= 2, eps > 0 and b*eps < 1")
    return _lower_bound_family(b, eps, lambda i: 1 + i * eps, Family.GREEDY_LB)


def gen_random(n: int, b: int, max_slack: int, max_weight: int, seed: int,
               horizon: int | None = None) -> Instance:
    """n packets: release uniform on [1, horizon], slack uniform on [0, max_slack], integer weight in [1, max_weight]."""
    if n < 0 or b < 1 or max_slack < 0 or max_weight < 1:
        raise ValueError("random family needs n >= 0, b >= 1, max_slack >= 0, max_weight >= 1")
    horizon = max(1, (n + 1) // 2) if horizon is None else horizon
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    rng = np.random.default_rng(seed)
    rel = rng.integers(1, horizon, size=n, endpoint=True)
    slack = rng.integers(0, max_slack, size=n, endpoint=True)
    w = rng.integers(1, max_weight, size=n, endpoint=True)
    order = sorted(range(n), key=lambda k: (int(rel[k]), k))
    packets = tuple(
        Packet(pid, int(rel[k]), int(rel[k] + slack[k]), Fraction(int(w[k])))
        for pid, k in enumerate(order)
    )
    meta = {"family": Family.RANDOM.value, "n": n, "b": b, "max_slack": max_slack,
            "max_weight": max_weight, "horizon": horizon, "seed": seed}
    return Instance(b, packets, meta={k: str(v) for k, v in meta.items()})


def generate(spec: GeneratorSpec) -> Instance:
    f = spec.family
    if f is Family.EDF_NEMESIS:
        return gen_edf_nemesis(spec.b, spec.rounds, spec.eps)
    if f is Family.BEST_EFFORT_LB:
        return gen_best_effort_lb(spec.b, spec.eps)
    if f is Family.GREEDY_LB:
        return gen_greedy_lb(spec.b, spec.eps)
    return gen_random(spec.n_packets, spec.b, spec.max_slack, spec.max_weight, spec.seed,
                      spec.horizon)
