"""Optimal provisional schedules over virtual deadlines.

A provisional schedule puts each pending packet into a buffer slot ``i``
(meaning: send at ``now + i``) no later than its virtual deadline.
"""
from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from typing import Iterable, NamedTuple

from .model import QueuedPacket

BRUTE_FORCE_LIMIT = 20


class Placement(NamedTuple):
    queue: tuple[QueuedPacket, ...]   # final order, virtual deadlines not yet reassigned
    discarded: tuple[QueuedPacket, ...]
    slots: dict[int, int]             # packet id -> slot chosen during placement


class _LatestFree:
    """Largest free slot <= x among 0..n-1, union-find style."""

    def __init__(self, n: int):
        self.parent = list(range(n + 1))  # index k stands for slot k-1; 0 means none

    def find(self, x: int) -> int:
        k = x + 1
        root = k
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[k] != root:
            self.parent[k], k = root, self.parent[k]
        return root - 1

    def take(self, slot: int) -> None:
        self.parent[slot + 1] = slot


def ops_place(pending: Iterable[QueuedPacket], now: int, capacity: int) -> Placement:
    """Greedy optimal provisional schedule.

    Heaviest first (ties: larger virtual deadline, then smaller id), each into
    the latest free slot not after its virtual deadline; packets that find no
    slot are discarded. The placed packets are then ordered by virtual
    deadline (ties: heavier first, then smaller id).
    """
    order = sorted(pending, key=lambda q: (-q.weight, -q.virtual_deadline, q.id))
    free = _LatestFree(capacity)
    placed, discarded, slots = [], [], {}
    for q in order:
        last = min(q.virtual_deadline - now, capacity - 1)
        slot = free.find(last) if last >= 0 else -1
        if slot < 0:
            discarded.append(q)
            continue
        free.take(slot)
        slots[q.id] = slot
        placed.append(q)
    placed.sort(key=lambda q: (q.virtual_deadline, -q.weight, q.id))
    return Placement(tuple(placed), tuple(discarded), slots)


def reassign_virtual_deadlines(queue: Iterable[QueuedPacket], now: int) -> tuple[QueuedPacket, ...]:
    out = []
    for i, q in enumerate(queue):
        t = now + i
        if t > q.virtual_deadline:
            raise ValueError(f"packet {q.id} cannot move to {t}: virtual deadline {q.virtual_deadline}")
        out.append(q if t == q.virtual_deadline else q.with_deadline(t))
    return tuple(out)


def provisional_weight(queue: Iterable[QueuedPacket]) -> Fraction:
    return sum((q.weight for q in queue), Fraction(0))


def brute_force_provisional(pending: Iterable[QueuedPacket], now: int, capacity: int):
    """Exhaustive maximum-weight provisional schedule.

    Returns ``(weight, {packet id: slot})``. A subset is schedulable iff,
    sorted by virtual deadline, its i-th member can sit in slot i.
    """
    items = list(pending)
    if len(items) > BRUTE_FORCE_LIMIT:
        raise ValueError(f"brute force limited to {BRUTE_FORCE_LIMIT} packets, got {len(items)}")
    best_w, best = Fraction(0), {}
    for k in range(min(len(items), capacity) + 1):
        for combo in combinations(items, k):
            ordered = sorted(combo, key=lambda q: q.virtual_deadline)
            if all(i <= q.virtual_deadline - now for i, q in enumerate(ordered)):
                w = sum((q.weight for q in combo), Fraction(0))
                if w > best_w:
                    best_w, best = w, {q.id: i for i, q in enumerate(ordered)}
    return best_w, best
