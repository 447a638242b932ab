from fractions import Fraction

import pytest

from conftest import make_instance
from qsched import (RandomSource, SchedulerParams, gen_best_effort_lb, gen_edf_nemesis,
                    gen_random, rme_trials, simulate, verify_schedule)
from qsched.golden import INV_PHI_SQ, PHI
from qsched.schedulers import InvariantViolation, dyadic_cutoff

ALGS = ["me", "rme", "edf", "greedy"]


class FixedDraws:
    """Stand-in random source returning preset values."""

    def __init__(self, *values):
        self.values = [Fraction(v) for v in values]

    def uniform(self):
        return self.values.pop(0)


def sent(result):
    return [(e.step, e.packet_id) for e in result.log]


def test_me_guard_sends_e_when_heavy_enough():
    # e(3, due now), x(5, due later): 3 >= 5/2
    inst = make_instance(2, [(1, 1, 3), (1, 2, 5)])
    assert sent(simulate(inst, "me", check=True)) == [(1, 0), (2, 1)]


def test_me_guard_sends_h_and_e_expires():
    inst = make_instance(2, [(1, 1, 1), (1, 2, 5)])
    res = simulate(inst, "me", check=True)
    assert sent(res) == [(1, 1)]
    assert [(d.packet_id, d.reason) for d in res.drops] == [(0, "expired")]


def test_alpha_changes_the_guard():
    inst = make_instance(2, [(1, 1, 3), (1, 2, 5)])
    strict = SchedulerParams(alpha=Fraction(3, 2))
    assert sent(simulate(inst, "me", strict)) == [(1, 1)]


def test_rme_guard_is_exact_and_consumes_no_draw():
    # 4 >= 5/phi = 3.0902
    inst = make_instance(2, [(1, 1, 4), (1, 2, 5)])
    res = simulate(inst, "rme", rng=FixedDraws())
    assert sent(res) == [(1, 0), (2, 1)] and res.draws == 0


@pytest.mark.parametrize("beta,first", [("0.30", 0), ("0.50", 1)])
def test_rme_coin(beta, first):
    inst = make_instance(2, [(1, 1, 1), (1, 2, 5)])
    res = simulate(inst, "rme", rng=FixedDraws(beta))
    assert res.log[0].packet_id == first and res.draws == 1


def test_phi_identities():
    assert PHI * PHI == PHI + 1
    assert INV_PHI_SQ * PHI * PHI == 1
    assert 1.6180339 < float(PHI) < 1.6180340


def test_dyadic_cutoff_matches_comparison():
    k = dyadic_cutoff(INV_PHI_SQ)
    assert Fraction(k, 1 << 64) <= INV_PHI_SQ < Fraction(k + 1, 1 << 64)
    assert dyadic_cutoff(Fraction(1, 2)) == 1 << 63


def test_edf_sends_earliest_deadline():
    b, eps = 4, Fraction(1, 10)
    far = 99
    rows = [(1, i, eps) for i in range(1, b)] + [(1, far, 1)]
    inst = make_instance(b, rows)
    assert simulate(inst, "edf").log[0].packet_id == 0


def test_edf_drops_lighter_arrival_when_full():
    rows = [(1, 50, 1)] * 2 + [(1, 2, Fraction(9, 10))]
    res = simulate(make_instance(2, rows), "edf", check=True)
    assert (1, 2, "rejected") in [tuple(d) for d in res.drops]


def test_edf_admits_when_room():
    res = simulate(make_instance(3, [(1, 5, 1), (1, 5, 2)]), "edf")
    assert res.drops == () and res.total == 3


def test_greedy_single_arrival():
    assert sent(simulate(make_instance(1, [(2, 4, 3)]), "greedy")) == [(2, 0)]


def test_greedy_drops_arrival_behind_heavier_same_deadline():
    res = simulate(make_instance(2, [(1, 1, 5), (1, 1, 2)]), "greedy", check=True)
    assert sent(res) == [(1, 0)]
    assert (1, 1, "rejected") in [tuple(d) for d in res.drops]


def test_me_on_lower_bound_instance():
    inst = gen_best_effort_lb(4, Fraction(1, 4))
    res = simulate(inst, "me", SchedulerParams(alpha=Fraction(2)), check=True)
    assert res.total == 5
    assert [e.weight for e in res.log] == [Fraction(5, 4)] * 4


def test_me_first_arrival_compacts():
    # p(w=7, d=now+9) alone in a b=3 buffer is sent at its release step
    inst = make_instance(3, [(4, 13, 7)])
    for alg in ALGS:
        assert sent(simulate(inst, alg, check=True)) == [(4, 0)]


def test_edf_nemesis_total():
    inst = gen_edf_nemesis(10, 100, Fraction(1, 100))
    assert simulate(inst, "edf", check=True).total == 119


@pytest.mark.parametrize("alg", ALGS)
def test_logs_verify_and_invariants_hold(alg):
    for seed in range(60):
        inst = gen_random(10, 1 + seed % 4, 4, 20, seed)
        res = simulate(inst, alg, seed=seed, check=True)
        assert res.report.ok
        assert verify_schedule(inst, sent(res)) == []


def test_report_counts_checks():
    res = simulate(gen_random(10, 2, 4, 20, 3), "me", check=True)
    for rule in ("buffer-bound", "consecutive-virtual-deadlines", "prefix-min-monotone",
                 "me-delivery-bound", "real-deadline", "log-verifies"):
        assert res.report.checks[rule] > 0


def test_rme_deterministic_per_seed():
    inst = gen_random(12, 3, 4, 20, 5)
    assert simulate(inst, "rme", seed=42).log == simulate(inst, "rme", seed=42).log


def test_rme_trials_match_individual_runs():
    inst = gen_random(12, 2, 4, 20, 11)
    totals = rme_trials(inst, seed=9, trials=40)
    assert totals == [simulate(inst, "rme", rng=RandomSource(9, i)).total for i in range(40)]


def test_bad_params_rejected():
    with pytest.raises(ValueError):
        simulate(make_instance(1, [(1, 1, 1)]), "me", SchedulerParams(alpha=Fraction(1, 2)))
    with pytest.raises(ValueError):
        simulate(make_instance(1, [(1, 1, 1)]), "rme", SchedulerParams(gamma=Fraction(3, 2)))


# Placement run only on arrival steps leaves stale virtual deadlines; this
# 5-packet instance then lets a weight-1 arrival overtake packet 5, so the
# minimum weight ahead of packet 5 drops from 3 to 1.
LITERAL_MODE_COUNTEREXAMPLE = [(1, 1, 15), (1, 5, 3), (2, 5, 18), (2, 6, 6), (3, 3, 1)]


def test_arrival_only_placement_breaks_prefix_monotonicity():
    inst = make_instance(3, LITERAL_MODE_COUNTEREXAMPLE)
    with pytest.raises(InvariantViolation) as info:
        simulate(inst, "me", SchedulerParams(recompact_every_step=False), check=True)
    assert info.value.rule == "prefix-min-monotone" and info.value.step == 3
    assert simulate(inst, "me", check=True).report.ok
