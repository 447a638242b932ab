"""Offline optima: feasibility of a packet set, an exhaustive oracle and the weight-greedy solver."""
from __future__ import annotations

import heapq
from fractions import Fraction
from typing import Iterable, NamedTuple

from .model import Instance, Packet

ORACLE_LIMIT = 18


class FeasibilityVerdict(NamedTuple):
    feasible: bool
    witness: tuple[tuple[int, int], ...] | None   # (step, packet id) in send order
    failure: tuple[int, str, int] | None          # (step, rule, packet id)


def feasible(packets: Iterable[Packet], capacity: int) -> FeasibilityVerdict:
    """Decide whether every packet in the set can be delivered.

    Simulates earliest-deadline-first over the set (ties: heavier, then
    smaller id). The set is feasible iff that run never holds more than
    ``capacity`` packets and never misses a deadline.
    """
    todo = sorted(packets, key=lambda p: (p.release, p.id))
    heap: list = []
    sent = []
    i, n = 0, len(todo)
    t = todo[0].release if todo else 0
    while i < n or heap:
        if not heap and todo[i].release > t:
            t = todo[i].release
        while i < n and todo[i].release <= t:
            p = todo[i]
            heapq.heappush(heap, (p.deadline, -p.weight, p.id, p))
            i += 1
        if len(heap) > capacity:
            return FeasibilityVerdict(False, None, (t, "capacity", min(e[2] for e in heap)))
        d, _, pid, _ = heapq.heappop(heap)
        if d < t:
            return FeasibilityVerdict(False, None, (t, "deadline", pid))
        sent.append((t, pid))
        t += 1
    return FeasibilityVerdict(True, tuple(sent), None)


def _counting_feasible(packets: list[Packet], capacity: int) -> bool:
    """Window-counting test, independent of any simulation.

    Deadlines: for every s <= t, at most t - s + 1 packets have
    s <= release and deadline <= t. Buffer: for every s <= t, at most
    capacity + t - s packets are released within [s, t].
    """
    by_release = sorted(packets, key=lambda p: p.release)
    m = len(by_release)
    for i in range(m):
        s = by_release[i].release
        for j in range(i + capacity, m):
            if j - i + 1 > capacity + by_release[j].release - s:
                return False
    by_deadline = sorted(packets, key=lambda p: p.deadline)
    for s in {p.release for p in packets}:
        count = 0
        for p in by_deadline:
            if p.release >= s:
                count += 1
                if count > p.deadline - s + 1:
                    return False
    return True


def oracle_opt(instance: Instance):
    """Exact optimum by exhaustive search over packet subsets.

    Depth-first include/exclude search in weight order. A subtree is cut
    when its set is already infeasible (feasibility is closed under taking
    subsets) or when even taking every remaining packet cannot beat the best
    found. Returns ``(weight, witness schedule)``.
    """
    pk = list(instance.packets)
    if len(pk) > ORACLE_LIMIT:
        raise ValueError(f"oracle limited to {ORACLE_LIMIT} packets, got {len(pk)}")
    pk.sort(key=lambda p: (-p.weight, p.deadline, p.id))
    suffix = [Fraction(0)] * (len(pk) + 1)
    for k in range(len(pk) - 1, -1, -1):
        suffix[k] = suffix[k + 1] + pk[k].weight
    cap = instance.capacity
    best_w = Fraction(-1)
    best: list[Packet] = []
    chosen: list[Packet] = []

    def search(k: int, w: Fraction) -> None:
        nonlocal best_w, best
        if w + suffix[k] <= best_w:
            return
        if k == len(pk):
            best_w, best = w, list(chosen)
            return
        chosen.append(pk[k])
        if _counting_feasible(chosen, cap):
            search(k + 1, w + pk[k].weight)
        chosen.pop()
        search(k + 1, w)

    search(0, Fraction(0))
    verdict = feasible(best, cap)
    assert verdict.feasible, "counting test and EDF simulation disagree"
    return best_w, verdict.witness


def greedy_opt(instance: Instance):
    """Heaviest-first greedy: keep each packet iff the kept set stays feasible.

    Ties: earlier deadline, then smaller id. ``O(n^2 log n)``.
    """
    order = sorted(instance.packets, key=lambda p: (-p.weight, p.deadline, p.id))
    kept: list[Packet] = []
    for p in order:
        if feasible(kept + [p], instance.capacity).feasible:
            kept.append(p)
    verdict = feasible(kept, instance.capacity)
    return sum((p.weight for p in kept), Fraction(0)), verdict.witness
