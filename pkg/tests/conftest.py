from fractions import Fraction

import pytest

from qsched import Instance, Packet


def make_instance(capacity, rows, **kw):
    """rows: (release, deadline, weight) triples; ids follow list order."""
    packets = tuple(Packet(i, r, d, Fraction(w)) for i, (r, d, w) in enumerate(rows))
    return Instance(capacity, packets, **kw)


@pytest.fixture
def two_packets():
    # p(r=1, d=1, w=5), q(r=1, d=2, w=3)
    return lambda b: make_instance(b, [(1, 1, 5), (1, 2, 3)])


_VERDICTS: list[str] = []


@pytest.fixture
def verdict():
    """Record one PASS/FAIL line for an acceptance criterion, then assert it."""
    def record(number: int, ok: bool, detail: str) -> None:
        line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}"
        _VERDICTS.append(line)
        print(line)
        assert ok, detail
    return record


def pytest_terminal_summary(terminalreporter):
    if _VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_VERDICTS, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
