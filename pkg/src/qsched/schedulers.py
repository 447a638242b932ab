"""Online schedulers and the step-driven simulation engine.

Algorithms: ``me`` (modified EDF over virtual deadlines), ``rme`` (its
randomized variant), ``edf`` (earliest real deadline, evict the lightest on
overflow) and ``greedy`` (provisional-schedule admission, send the heaviest).
"""
from __future__ import annotations

import copy
from collections import defaultdict
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Callable, NamedTuple

import numpy as np

from .golden import INV_PHI_SQ, PHI, Surd
from .model import (NULL_PACKET, Instance, LogEntry, Packet, QueuedPacket,
                    verify_schedule)
from .provisional import ops_place, reassign_virtual_deadlines

Number = Fraction | Surd


class Algorithm(str, Enum):
    ME = "me"
    RME = "rme"
    EDF = "edf"
    GREEDY = "greedy"


@dataclass(frozen=True)
class SchedulerParams:
    """Guard parameters; ``None`` picks the algorithm default.

    ME defaults to alpha=2; RME to alpha=phi, gamma=1/phi^2. Both may be
    rationals or exact surds. ``recompact_every_step=False`` runs the
    provisional placement only on steps with arrivals.
    """

    alpha: Number | None = None
    gamma: Number | None = None
    recompact_every_step: bool = True

    def resolve(self, algorithm: Algorithm) -> tuple[Number, Number]:
        if algorithm is Algorithm.RME:
            alpha = PHI if self.alpha is None else self.alpha
        else:
            alpha = Fraction(2) if self.alpha is None else self.alpha
        gamma = INV_PHI_SQ if self.gamma is None else self.gamma
        if alpha < 1:
            raise ValueError(f"alpha must be >= 1, got {alpha}")
        if not 0 <= gamma <= 1:
            raise ValueError(f"gamma must lie in [0, 1], got {gamma}")
        return alpha, gamma

    def is_default_rme(self) -> bool:
        a, g = self.resolve(Algorithm.RME)
        return a == PHI and g == INV_PHI_SQ


class RandomSource:
    """Seeded stream of dyadic rationals k / 2**64 on [0, 1).

    ``RandomSource(seed, trial)`` derives an independent stream per trial, so
    results do not depend on the order trials are run in.
    """

    def __init__(self, seed: int, trial: int | None = None):
        entropy = [seed] if trial is None else [seed, trial]
        self._bits = np.random.PCG64(np.random.SeedSequence(entropy))
        self.draws = 0

    def uniform(self) -> Fraction:
        return Fraction(self.raw(), 1 << 64)

    def raw(self) -> int:
        """The numerator of the next draw."""
        self.draws += 1
        return int(self._bits.random_raw())


def dyadic_cutoff(gamma: Number) -> int:
    """Largest k with k / 2**64 <= gamma, so ``uniform() <= gamma`` iff ``raw() <= cutoff``."""
    lo, hi = -1, 1 << 64
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if Fraction(mid, 1 << 64) <= gamma:
            lo = mid
        else:
            hi = mid
    return lo


class InvariantViolation(AssertionError):
    def __init__(self, step: int, rule: str, detail: str, snapshot):
        super().__init__(f"step {step}: {rule}: {detail}; buffer={snapshot}")
        self.step = step
        self.rule = rule
        self.snapshot = snapshot


@dataclass
class InvariantReport:
    checks: dict[str, int] = field(default_factory=lambda: defaultdict(int))
    violations: list[InvariantViolation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def merge(self, other: "InvariantReport") -> None:
        for k, v in other.checks.items():
            self.checks[k] += v
        self.violations.extend(other.violations)


class Drop(NamedTuple):
    step: int
    packet_id: int
    reason: str     # rejected | evicted | expired


class SimulationResult(NamedTuple):
    log: tuple[LogEntry, ...]
    drops: tuple[Drop, ...]
    report: InvariantReport
    draws: int

    @property
    def total(self) -> Fraction:
        return sum((e.weight for e in self.log), Fraction(0))


class _Coin(NamedTuple):
    e: QueuedPacket
    h: QueuedPacket


def _at_least(w_e: Fraction, alpha: Number, w_h: Fraction) -> bool:
    """w_e >= w_h / alpha, decided exactly."""
    if isinstance(alpha, Surd):
        return (alpha * w_e - w_h).sign() >= 0
    return alpha * w_e >= w_h


class Simulator:
    """One run of one algorithm over one instance.

    ``run()`` advances until the instance is exhausted or an RME coin is
    needed; ``resolve()`` settles the coin. ``clone()`` forks the state so
    trials that share a prefix of coin outcomes can share the work.
    """

    def __init__(self, instance: Instance, algorithm: Algorithm | str,
                 params: SchedulerParams | None = None, check: bool = False):
        self.algorithm = Algorithm(algorithm)
        self.params = params or SchedulerParams()
        self.alpha, self.gamma = self.params.resolve(self.algorithm)
        self.rme_defaults = self.algorithm is Algorithm.RME and self.params.is_default_rme()
        self.capacity = instance.capacity
        self.check = check
        arrivals = defaultdict(list)
        for p in instance.packets:
            arrivals[p.release].append(p)
        self._arrivals = dict(arrivals)
        self._releases = sorted(arrivals)
        self._next = 0
        self.now: int | None = self._releases[0] if self._releases else None
        self.buffer: list = []
        self.log: list[LogEntry] = []
        self.drops: list[Drop] = []
        self.gained = Fraction(0)
        self.pending: _Coin | None = None
        self.report = InvariantReport()
        self._last_vd: dict[int, int] = {}
        self._last_prefix_min: dict[int, Fraction] = {}

    @property
    def virtual(self) -> bool:
        return self.algorithm in (Algorithm.ME, Algorithm.RME)

    @property
    def done(self) -> bool:
        return self.now is None and self.pending is None

    def clone(self) -> "Simulator":
        twin = copy.copy(self)
        twin.buffer = list(self.buffer)
        twin.log, twin.drops, twin.gained = [], [], Fraction(0)
        twin.report = InvariantReport()
        twin._last_vd = dict(self._last_vd)
        twin._last_prefix_min = dict(self._last_prefix_min)
        return twin

    # -- driving -----------------------------------------------------------

    def run(self, draw: Callable[[], Fraction] | None = None) -> _Coin | None:
        while True:
            if self.pending is not None:
                if draw is None:
                    return self.pending
                self.resolve(draw() <= self.gamma)
            if self.now is None:
                return None
            self._step()

    def resolve(self, send_e: bool) -> None:
        coin, self.pending = self.pending, None
        self._finish(coin.e if send_e else coin.h)

    def _step(self) -> None:
        t = self.now
        self._arrival_phase(t, self._arrivals.get(t, ()))
        choice = self._select(t)
        if isinstance(choice, _Coin):
            self.pending = choice
        else:
            self._finish(choice)

    # -- phases ------------------------------------------------------------

    def _arrival_phase(self, t: int, arrivals) -> None:
        if self.virtual:
            recompact = bool(self.buffer) and self.params.recompact_every_step
            if not (arrivals or recompact):
                return
            if recompact:
                self._place(t, None)
            for p in arrivals:
                self._place(t, QueuedPacket.fresh(p))
            if self.check:
                self._check_provisional(t)
        else:
            for p in arrivals:
                if self.algorithm is Algorithm.EDF:
                    self._edf_admit(t, p)
                else:
                    self._greedy_admit(t, p)
            if self.check:
                self._expect(len(self.buffer) <= self.capacity, t, "buffer-bound",
                             f"{len(self.buffer)} > {self.capacity}")

    def _place(self, t: int, arrival: QueuedPacket | None) -> None:
        pending = self.buffer + [arrival] if arrival is not None else self.buffer
        pl = ops_place(pending, t, self.capacity)
        for q in pl.discarded:
            reason = "rejected" if arrival is not None and q.id == arrival.id else "evicted"
            self.drops.append(Drop(t, q.id, reason))
        self.buffer = list(reassign_virtual_deadlines(pl.queue, t))

    def _edf_admit(self, t: int, p: Packet) -> None:
        if len(self.buffer) < self.capacity:
            self.buffer.append(p)
            return
        victim = min(self.buffer + [p], key=lambda q: (q.weight, -q.deadline, -q.id))
        if victim is p:
            self.drops.append(Drop(t, p.id, "rejected"))
        else:
            self.buffer.remove(victim)
            self.buffer.append(p)
            self.drops.append(Drop(t, victim.id, "evicted"))

    def _greedy_admit(self, t: int, p: Packet) -> None:
        pending = [QueuedPacket.fresh(q) for q in self.buffer + [p]]
        pl = ops_place(pending, t, self.capacity)
        for q in pl.discarded:
            self.drops.append(Drop(t, q.id, "rejected" if q.id == p.id else "evicted"))
        self.buffer = [q.packet for q in pl.queue]

    def _select(self, t: int):
        if not self.buffer:
            return NULL_PACKET
        alg = self.algorithm
        if alg is Algorithm.EDF:
            return min(self.buffer, key=lambda p: (p.deadline, -p.weight, p.id))
        if alg is Algorithm.GREEDY:
            return min(self.buffer, key=lambda p: (-p.weight, p.deadline, p.id))
        e = min(self.buffer, key=lambda q: (q.virtual_deadline, q.id))
        h = min(self.buffer, key=lambda q: (-q.weight, q.virtual_deadline, q.id))
        guard = _at_least(e.weight, self.alpha, h.weight)
        if self.check:
            self._check_delivery_bound(t, e, h, guard)
        if guard:
            return e
        if alg is Algorithm.ME:
            return h
        return _Coin(e, h)

    def _finish(self, choice) -> None:
        t = self.now
        if choice is not NULL_PACKET:
            self.buffer.remove(choice)
            p = choice.packet if isinstance(choice, QueuedPacket) else choice
            if self.check:
                self._expect(p.release <= t <= p.deadline, t, "real-deadline",
                             f"packet {p.id} window [{p.release}, {p.deadline}]")
            self.log.append(LogEntry(t, p.id, p.weight))
            self.gained += p.weight
        if self.virtual:
            keep = [q for q in self.buffer if q.virtual_deadline > t]
        else:
            keep = [q for q in self.buffer if q.deadline > t]
        if len(keep) != len(self.buffer):
            gone = {q.id for q in keep}
            self.drops.extend(Drop(t, q.id, "expired") for q in self.buffer if q.id not in gone)
            self.buffer = keep
        if self.check:
            self._expect(len(self.buffer) <= self.capacity, t, "buffer-bound",
                         f"{len(self.buffer)} > {self.capacity}")
        self.now = self._advance(t)

    def _advance(self, t: int) -> int | None:
        while self._next < len(self._releases) and self._releases[self._next] <= t:
            self._next += 1
        if self.buffer:
            return t + 1
        if self._next < len(self._releases):
            return self._releases[self._next]
        return None

    # -- runtime invariants ------------------------------------------------

    def _expect(self, cond: bool, t: int, rule: str, detail: str) -> None:
        self.report.checks[rule] += 1
        if not cond:
            err = InvariantViolation(t, rule, detail, [self._show(q) for q in self.buffer])
            self.report.violations.append(err)
            raise err

    @staticmethod
    def _show(q):
        if isinstance(q, QueuedPacket):
            p = q.packet
            return (p.id, str(p.weight), p.release, q.virtual_deadline, p.deadline)
        return (q.id, str(q.weight), q.release, q.deadline)

    def _check_provisional(self, t: int) -> None:
        buf = self.buffer
        k = len(buf)
        self._expect(k <= self.capacity, t, "buffer-bound", f"{k} > {self.capacity}")
        vds = [q.virtual_deadline for q in buf]
        self._expect(vds == list(range(t, t + k)), t, "consecutive-virtual-deadlines", f"{vds}")
        self._expect(len(set(vds)) == k, t, "distinct-virtual-deadlines", f"{vds}")
        prefix_min: dict[int, Fraction] = {}
        low = None
        for q in buf:
            p = q.packet
            self._expect(p.release <= q.virtual_deadline <= p.deadline, t, "virtual-deadline-window",
                         f"packet {p.id}: {q.virtual_deadline} not in [{p.release}, {p.deadline}]")
            before = self._last_vd.get(p.id)
            self._expect(before is None or q.virtual_deadline <= before, t,
                         "virtual-deadline-monotone",
                         f"packet {p.id}: {before} -> {q.virtual_deadline}")
            self._last_vd[p.id] = q.virtual_deadline
            low = q.weight if low is None else min(low, q.weight)
            prefix_min[p.id] = low
            old = self._last_prefix_min.get(p.id)
            self._expect(old is None or low >= old, t, "prefix-min-monotone",
                         f"packet {p.id}: min weight ahead fell {old} -> {low}")
        self._last_prefix_min = prefix_min

    def _check_delivery_bound(self, t: int, e, h, guard: bool) -> None:
        if self.algorithm is Algorithm.ME:
            sent = e if guard else h
            self._expect(sent.weight >= e.weight and _at_least(sent.weight, self.alpha, h.weight),
                         t, "me-delivery-bound", f"sent {sent.id}, e={e.id}, h={h.id}")
        elif self.rme_defaults:
            # expected gain vs w_h / phi, computed exactly
            if guard:
                ok = _at_least(e.weight, PHI, h.weight)
            else:
                g = self.gamma
                expected = g * e.weight + (1 - g) * h.weight
                ok = (PHI * expected - h.weight).sign() >= 0
            self._expect(ok, t, "rme-expected-gain", f"e={e.id}, h={h.id}")


def simulate(instance: Instance, algorithm: Algorithm | str,
             params: SchedulerParams | None = None, seed: int = 0,
             check: bool = False, rng: RandomSource | None = None) -> SimulationResult:
    """Run one algorithm over an instance and return its log, drops and invariant report.

    With ``check`` every runtime invariant is asserted as the run proceeds and
    the final log is verified against the model; the first failure raises
    :class:`InvariantViolation`.
    """
    sim = Simulator(instance, algorithm, params, check)
    source = rng
    draws = 0

    def draw() -> Fraction:
        nonlocal source, draws
        if source is None:
            source = RandomSource(seed)
        draws += 1
        return source.uniform()

    sim.run(draw)
    log = tuple(sim.log)
    if check:
        bad = verify_schedule(instance, [(e.step, e.packet_id) for e in log])
        sim.report.checks["log-verifies"] += 1
        if bad:
            err = InvariantViolation(bad[0].step, "log-verifies", str(bad[0]), [])
            sim.report.violations.append(err)
            raise err
    return SimulationResult(log, tuple(sim.drops), sim.report, draws)


class _Node:
    __slots__ = ("gain", "decides", "sim", "children")

    def __init__(self, sim: Simulator):
        self.gain = sim.gained
        self.decides = sim.pending is not None
        self.sim = sim if self.decides else None
        self.children: dict[bool, _Node] = {}


def rme_trials(instance: Instance, params: SchedulerParams | None = None,
               seed: int = 0, trials: int = 1) -> list[Fraction]:
    """Total RME weight for each of ``trials`` runs, trial ``i`` seeded by ``(seed, i)``.

    Equivalent to ``simulate(..., rng=RandomSource(seed, i))`` for each ``i``;
    runs sharing a prefix of coin outcomes share the simulation work.
    """
    root_sim = Simulator(instance, Algorithm.RME, params)
    root_sim.run()
    root = _Node(root_sim)
    cutoff = dyadic_cutoff(root_sim.gamma)
    totals = []
    for i in range(trials):
        node, total, source = root, root.gain, None
        while node.decides:
            if source is None:
                source = RandomSource(seed, i)
            take_e = source.raw() <= cutoff
            child = node.children.get(take_e)
            if child is None:
                fork = node.sim.clone()
                fork.resolve(take_e)
                fork.run()
                child = node.children[take_e] = _Node(fork)
                if len(node.children) == 2:
                    node.sim = None
            total += child.gain
            node = child
        totals.append(total)
    return totals
