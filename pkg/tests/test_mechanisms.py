import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from schoolmatch.errors import CommonPriorityError
from schoolmatch.fairness import is_stable, stable_set_bruteforce
from schoolmatch.families import FamilyConfig, random_instance
from schoolmatch.fixtures import fixture_instance
from schoolmatch.mechanisms import (
    Mechanism,
    MechanismSpec,
    boston,
    chinese_parallel,
    deferred_acceptance,
    first_preference_first,
    fpf_adjusted_priorities,
    run_mechanism,
    serial_dictatorship,
)
from schoolmatch.model import Instance, Matching, truncate_profile

from conftest import instances


def trunc(fid, k):
    return truncate_profile(fixture_instance(fid), k)


class TestDeferredAcceptance:
    def test_ex1_at_four(self):
        assert deferred_acceptance(trunc("EX1", 4)) == Matching((2, -1, 3, 0, 1, -1, 4))

    def test_everyone_lists_nothing(self):
        inst = Instance(((), (), ()), ((0, 1, 2), (0, 1, 2)), (1, 1))
        assert deferred_acceptance(inst) == Matching((-1, -1, -1))

    def test_ex5_at_two(self):
        assert deferred_acceptance(trunc("EX5", 2)) == Matching((0, -1, 1, 2))

    @given(instances())
    def test_stable_with_respect_to_reported_lists(self, inst):
        assert is_stable(deferred_acceptance(inst), inst)

    @given(instances())
    def test_trace_replays_to_matching(self, inst):
        matching, trace = deferred_acceptance(inst, trace=True)
        assert trace.replay() == matching
        assert deferred_acceptance(inst) == matching  # kernel agrees with rounds


class TestBoston:
    def test_ex3n7_at_three(self):
        assert boston(trunc("EX3n7", 3)) == Matching((0, 1, 2, 4, -1, -1, 3))

    def test_single_student(self):
        inst = Instance(((0,),), ((0,), (0,)), (1, 1))
        assert boston(inst) == Matching((0,))

    def test_t1proof_at_any_slack_k(self):
        for k in (2, 3):
            assert run_mechanism(MechanismSpec(Mechanism.BOSTON, k), fixture_instance("T1PROOF")) == (
                Matching((0, -1, 1))
            )

    @given(instances())
    def test_trace_replays_to_matching(self, inst):
        matching, trace = boston(inst, trace=True)
        assert trace.replay() == matching
        assert boston(inst) == matching

    @given(instances())
    def test_accepted_seats_never_reopen(self, inst):
        _, trace = boston(inst, trace=True)
        taken = set()
        for record in trace.rounds:
            for i, s in record.accepted:
                assert i not in {j for j, _ in taken}
                taken.add((i, s))


class TestFpfAdjustment:
    def test_empty_fpf_set_is_identity(self):
        inst = fixture_instance("EX2")
        assert fpf_adjusted_priorities(inst) == inst.priorities

    def test_ex1_school_s3_order(self):
        adjusted = fpf_adjusted_priorities(trunc("EX1", 4))
        # rank classes at s3: {i2,i3} second, {i1,i4,i5} third, {i6} fourth,
        # {i7} unlisted; original order breaks ties inside each class
        assert adjusted[2] == (2, 1, 0, 3, 4, 5, 6)
        for s in (0, 1, 3, 4):
            assert adjusted[s] == fixture_instance("EX1").priorities[s]

    def test_first_rankers_keep_original_relative_order(self):
        inst = Instance(
            preferences=((0,), (0,), (1, 0)),
            priorities=((1, 0, 2), (0, 1, 2)),
            capacities=(1, 1),
            fpf_schools=frozenset({0}),
        )
        adjusted = fpf_adjusted_priorities(inst)
        assert adjusted[0][:2] == (1, 0)


class TestFirstPreferenceFirst:
    def test_ex1_at_four(self):
        assert first_preference_first(trunc("EX1", 4)) == Matching((3, -1, 2, 0, 1, -1, 4))

    def test_empty_fpf_equals_deferred_acceptance(self):
        inst = fixture_instance("EX2")
        assert first_preference_first(inst) == deferred_acceptance(inst)

    def test_all_fpf_equals_boston_on_ex3n7(self):
        inst = trunc("EX3n7", 3)
        all_fpf = Instance(
            inst.preferences, inst.priorities, inst.capacities, frozenset(range(5))
        )
        assert first_preference_first(all_fpf) == boston(inst)

    @given(instances())
    def test_all_fpf_equals_boston_everywhere(self, inst):
        all_fpf = Instance(
            inst.preferences, inst.priorities, inst.capacities,
            frozenset(range(inst.n_schools)),
        )
        assert first_preference_first(all_fpf) == boston(inst)


class TestSerialDictatorship:
    def test_ex3n7_at_three(self):
        assert serial_dictatorship(trunc("EX3n7", 3)) == Matching((0, 1, 2, 3, -1, -1, 4))

    def test_one_student_one_school(self):
        inst = Instance(((0,),), ((0,),), (1,))
        assert serial_dictatorship(inst) == Matching((0,))

    def test_rejects_differing_priorities(self):
        with pytest.raises(CommonPriorityError):
            serial_dictatorship(fixture_instance("EX2"))

    def test_greedy_equals_deferred_acceptance_on_1000(self):
        cfg = FamilyConfig(
            n_students=(3, 6), n_schools=(2, 4), capacity=(1, 2),
            priority_mode="common", samples=0, seed=0,
        )
        for j in range(1000):
            inst = random_instance(cfg, 81000 + j)
            assert serial_dictatorship(inst) == deferred_acceptance(inst), j


class TestChineseParallel:
    def test_slack_round_equals_unconstrained(self):
        inst = fixture_instance("EX2")
        assert chinese_parallel(inst, inst.n_schools) == deferred_acceptance(inst)

    def test_round_length_one_equals_boston_three_on_ex3n7(self):
        inst = fixture_instance("EX3n7")
        assert chinese_parallel(inst, 1) == boston(truncate_profile(inst, 3))

    def test_round_length_three_equals_gs_three_on_ex3n7(self):
        inst = fixture_instance("EX3n7")
        assert chinese_parallel(inst, 3) == deferred_acceptance(truncate_profile(inst, 3))

    def test_rejects_bad_round_length(self):
        with pytest.raises(ValueError):
            chinese_parallel(fixture_instance("EX2"), 0)

    @given(instances(max_capacity=3), st.integers(1, 4))
    def test_individually_rational_and_feasible(self, inst, e):
        matching = chinese_parallel(inst, e)
        for i, s in enumerate(matching.assignment):
            assert s == -1 or s in inst.preferences[i]
        for s, fill in enumerate(matching.fill_counts(inst.n_schools)):
            assert fill <= inst.capacities[s]


class TestRunMechanism:
    def test_spec_validation(self):
        with pytest.raises(ValueError):
            MechanismSpec(Mechanism.GS, 3, parallel_e=2)
        with pytest.raises(ValueError):
            MechanismSpec(Mechanism.CHINESE)
        with pytest.raises(ValueError):
            MechanismSpec(Mechanism.GS, 0)
        with pytest.raises(ValueError):
            MechanismSpec(Mechanism.GS, (1, 0))

    def test_gs4_on_ex1(self):
        out = run_mechanism(MechanismSpec(Mechanism.GS, 4), fixture_instance("EX1"))
        assert out == Matching((2, -1, 3, 0, 1, -1, 4))

    def test_slack_constraint_equals_unconstrained(self):
        inst = fixture_instance("EX1")
        assert run_mechanism(MechanismSpec(Mechanism.GS, 99), inst) == deferred_acceptance(inst)

    def test_boston3_on_ex3n7(self):
        out = run_mechanism(MechanismSpec(Mechanism.BOSTON, 3), fixture_instance("EX3n7"))
        assert out == Matching((0, 1, 2, 4, -1, -1, 3))

    @given(instances(), st.integers(1, 5))
    @settings(max_examples=60)
    def test_constraint_equals_explicit_truncation(self, inst, k):
        truncated = truncate_profile(inst, k)
        pairs = [
            (MechanismSpec(Mechanism.GS, k), deferred_acceptance),
            (MechanismSpec(Mechanism.BOSTON, k), boston),
            (MechanismSpec(Mechanism.FPF, k), first_preference_first),
            (MechanismSpec(Mechanism.CHINESE, k, parallel_e=2), lambda x: chinese_parallel(x, 2)),
        ]
        for spec, direct in pairs:
            assert run_mechanism(spec, inst) == direct(truncated), spec.label()

    def test_per_student_constraint_dispatch(self):
        inst = fixture_instance("EX2")
        spec = MechanismSpec(Mechanism.GS, (2, 1, 2, 2, 2))
        assert run_mechanism(spec, inst) == deferred_acceptance(
            truncate_profile(inst, (2, 1, 2, 2, 2))
        )


class TestMechanismProperties:
    @given(instances(max_students=4, max_schools=3), st.integers(2, 4))
    @settings(max_examples=60)
    def test_constrained_gs_stable_iff_unchanged(self, inst, k):
        constrained = run_mechanism(MechanismSpec(Mechanism.GS, k), inst)
        assert is_stable(constrained, inst) == (constrained == deferred_acceptance(inst))

    @given(instances(max_students=4, max_schools=3))
    @settings(max_examples=40)
    def test_rural_hospital_over_stable_set(self, inst):
        stable = stable_set_bruteforce(inst)
        assert stable  # a stable matching always exists
        matched = {m.matched_students() for m in stable}
        fills = {m.fill_counts(inst.n_schools) for m in stable}
        assert len(matched) == 1 and len(fills) == 1

    @given(instances(max_capacity=3), st.integers(1, 4))
    @settings(max_examples=60)
    def test_all_mechanisms_individually_rational(self, inst, k):
        specs = [
            MechanismSpec(Mechanism.GS, k),
            MechanismSpec(Mechanism.BOSTON, k),
            MechanismSpec(Mechanism.FPF, k),
            MechanismSpec(Mechanism.CHINESE, k, parallel_e=1),
        ]
        for spec in specs:
            matching = run_mechanism(spec, inst)
            for i, s in enumerate(matching.assignment):
                assert s == -1 or s in inst.preferences[i][:k], spec.label()
