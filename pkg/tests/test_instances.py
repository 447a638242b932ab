from fractions import Fraction

import pytest

from qsched import (gen_best_effort_lb, gen_edf_nemesis, gen_greedy_lb, gen_random,
                    oracle_opt, simulate, verify_schedule)
from qsched.instances import Family, GeneratorSpec, generate


def test_edf_nemesis_reference_and_closed_form():
    b, n, eps = 10, 100, Fraction(1, 100)
    inst = gen_edf_nemesis(b, n, eps)
    assert inst.reference_opt_weight == Fraction(10001, 10) == b + (1 - eps) * b * n + eps * b
    assert Fraction(inst.meta["edf_closed_form"]) == (eps * (b - 1) + 1) * n + b
    assert simulate(inst, "edf").total == Fraction(inst.meta["edf_closed_form"])
    far = int(inst.meta["far_deadline"])
    assert far > max(p.release for p in inst.packets) + len(inst.packets)


@pytest.mark.parametrize("b,n,eps", [(2, 1, Fraction(1, 2)), (3, 4, Fraction(1, 5)), (5, 7, Fraction(1, 9))])
def test_edf_nemesis_matches_formula_at_other_sizes(b, n, eps):
    inst = gen_edf_nemesis(b, n, eps)
    assert verify_schedule(inst, inst.reference_schedule) == []
    assert simulate(inst, "edf", check=True).total == (eps * (b - 1) + 1) * n + b


def test_best_effort_counts_and_weight():
    inst = gen_best_effort_lb(4, Fraction(1, 4))
    assert len(inst.packets) == 11 and inst.reference_opt_weight == 8
    assert verify_schedule(inst, inst.reference_schedule) == []
    assert verify_schedule(gen_best_effort_lb(2, 1), gen_best_effort_lb(2, 1).reference_schedule) == []


def test_best_effort_step_one_order_units_first():
    inst = gen_best_effort_lb(3, Fraction(1, 3))
    step1 = [p for p in inst.packets if p.release == 1]
    assert [p.weight for p in step1] == [1, 1, 1] + [Fraction(4, 3)] * 3


@pytest.mark.parametrize("b", [2, 3, 4])
def test_best_effort_reference_is_optimal_at_small_b(b):
    inst = gen_best_effort_lb(b, Fraction(1, b))
    assert oracle_opt(inst)[0] == inst.reference_opt_weight


def test_greedy_lb():
    inst = gen_greedy_lb(4, Fraction(1, 100))
    assert len(inst.packets) == 11
    assert inst.reference_opt_weight == Fraction(176, 25)
    small = gen_greedy_lb(2, Fraction(1, 10))
    assert verify_schedule(small, small.reference_schedule) == []
    with pytest.raises(ValueError):
        gen_greedy_lb(3, Fraction(1, 100))


def test_random_family():
    assert gen_random(5, 2, 3, 10, 1) == gen_random(5, 2, 3, 10, 1)
    assert gen_random(0, 2, 3, 10, 1).packets == ()
    inst = gen_random(12, 3, 4, 20, 7)
    assert all(p.release <= p.deadline <= p.release + 4 for p in inst.packets)
    assert all(1 <= p.weight <= 20 and p.weight.denominator == 1 for p in inst.packets)


def test_generate_dispatch():
    inst = generate(GeneratorSpec(Family.BEST_EFFORT_LB, b=4, eps="0.25"))
    assert inst.reference_opt_weight == 8
    with pytest.raises(ValueError):
        generate(GeneratorSpec("edf-nemesis", b=1))
