from fractions import Fraction

import pytest

from conftest import make_instance
from qsched import (LogEntry, Packet, as_weight, dump_instance, format_weight,
                    gen_best_effort_lb, parse_instance, total_weight, verify_schedule)
from qsched.model import (InstanceError, ScheduleError, dump_log, parse_log,
                          parse_schedule)


def test_parse_decimal_weight():
    inst = parse_instance('{"capacity":2,"packets":[{"id":0,"release":1,"deadline":3,"weight":"1.5"}]}')
    assert inst.capacity == 2
    assert inst.packets == (Packet(0, 1, 3, Fraction(3, 2)),)


def test_parse_empty_instance():
    inst = parse_instance('{"capacity":1,"packets":[]}')
    assert inst.packets == () and inst.capacity == 1


def test_parse_rejects_release_after_deadline_with_id_and_line():
    text = '{"capacity":1,"packets":[\n{"id":0,"release":1,"deadline":1,"weight":"1"},\n{"id":7,"release":5,"deadline":4,"weight":"1"}]}'
    with pytest.raises(InstanceError) as info:
        parse_instance(text)
    assert info.value.packet_id == 7
    assert info.value.line == 3
    assert "deadline" in str(info.value)


@pytest.mark.parametrize("bad", [
    '{"capacity":0,"packets":[]}',
    '{"capacity":1,"packets":[{"id":0,"release":0,"deadline":1,"weight":"1"}]}',
    '{"capacity":1,"packets":[{"id":0,"release":1,"deadline":1,"weight":"-1"}]}',
    '{"capacity":1,"packets":[{"id":0,"release":1,"deadline":1}]}',
    '{"capacity":1,"packets":[{"id":0,"release":1,"deadline":1,"weight":"1"},{"id":0,"release":1,"deadline":1,"weight":"1"}]}',
    '{"capacity":1,"packets":[',
])
def test_parse_rejects(bad):
    with pytest.raises(InstanceError):
        parse_instance(bad)


def test_parse_rejects_infeasible_reference():
    text = ('{"capacity":1,"packets":[{"id":0,"release":1,"deadline":1,"weight":"1"}],'
            '"reference_schedule":[{"step":2,"packet":0}]}')
    with pytest.raises(InstanceError, match="deadline"):
        parse_instance(text)


def test_json_number_weights_stay_exact():
    inst = parse_instance('{"capacity":1,"packets":[{"id":0,"release":1,"deadline":1,"weight":0.1}]}')
    assert inst.packets[0].weight == Fraction(1, 10)


def test_weights_reject_floats():
    with pytest.raises(TypeError):
        as_weight(0.5)


@pytest.mark.parametrize("q,text", [
    (Fraction(3, 2), "1.5"), (Fraction(7), "7"), (Fraction(1, 3), "1/3"),
    (Fraction(10001, 10), "1000.1"), (Fraction(1, 400), "0.0025"),
])
def test_format_weight(q, text):
    assert format_weight(q) == text
    assert as_weight(text) == q


def test_total_weight_examples():
    assert total_weight([]) == 0
    log = [LogEntry(1, 0, Fraction(3, 2)), LogEntry(2, 1, Fraction(1, 2))]
    assert total_weight(log) == 2
    log = [LogEntry(1, 0, Fraction(1)), LogEntry(2, 1, Fraction(1)), LogEntry(3, 2, Fraction(101, 100))]
    assert total_weight(log) == Fraction(301, 100)


def test_capacity_violation_at_step_one(two_packets):
    bad = verify_schedule(two_packets(1), [(1, 0), (2, 1)])
    assert [(v.rule, v.step) for v in bad] == [("capacity", 1)]
    assert str(bad[0]).startswith("capacity step 1")
    assert verify_schedule(two_packets(2), [(1, 0), (2, 1)]) == []


def test_deadline_violation():
    inst = make_instance(2, [(1, 3, 1)])
    assert [v.rule for v in verify_schedule(inst, [(4, 0)])] == ["deadline"]


def test_release_and_injectivity():
    inst = make_instance(3, [(2, 3, 1), (1, 3, 1)])
    rules = {v.rule for v in verify_schedule(inst, [(1, 0)])}
    assert rules == {"release"}
    assert {v.rule for v in verify_schedule(inst, [(2, 1), (3, 1)])} == {"injectivity"}
    assert {v.rule for v in verify_schedule(inst, [(2, 0), (2, 1)])} == {"injectivity"}


def test_unscheduled_packets_take_no_room():
    # three packets arrive together with b=1; sending one of them is fine
    inst = make_instance(1, [(1, 1, 1), (1, 1, 1), (1, 1, 1)])
    assert verify_schedule(inst, [(1, 2)]) == []


def test_unknown_packet_raises():
    with pytest.raises(ScheduleError):
        verify_schedule(make_instance(1, [(1, 1, 1)]), [(1, 9)])


def test_generator_reference_verifies():
    inst = gen_best_effort_lb(4, Fraction(1, 4))
    assert verify_schedule(inst, inst.reference_schedule) == []


def test_instance_round_trip():
    inst = gen_best_effort_lb(4, Fraction(1, 4))
    again = parse_instance(dump_instance(inst))
    assert again == inst


def test_log_round_trip_and_schedule_formats():
    log = [LogEntry(1, 3, Fraction(5, 4)), LogEntry(4, 0, Fraction(1, 3))]
    text = dump_log(log)
    assert text.splitlines()[0] == "step,packet_id,weight"
    assert parse_log(text) == log
    assert parse_schedule(text) == [(1, 3), (4, 0)]
    assert parse_schedule('[{"step": 2, "packet": 5}]') == [(2, 5)]
    with pytest.raises(ScheduleError):
        parse_log("a,b\n1,2\n")
