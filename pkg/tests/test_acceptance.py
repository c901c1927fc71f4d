"""Acceptance suite: one test per release criterion, one PASS line each.

Run with ``pytest tests/test_acceptance.py -v -s``.  Criteria with stated
runtime budgets assert them (they assume the compiled kernel backend; the
pure-Python fallback is functionally identical but slower).
"""

import random
import subprocess
import sys
import time

from schoolmatch.claims import check_claim
from schoolmatch.fairness import count_blocking, stable_set_bruteforce
from schoolmatch.families import (
    FamilyConfig,
    common_identity_priorities,
    random_instance,
    staggered_priorities,
)
from schoolmatch.fixtures import FIXTURE_IDS, fixture_instance, reproduce_fixture
from schoolmatch.mechanisms import (
    Mechanism,
    MechanismSpec,
    chinese_parallel,
    deferred_acceptance,
    run_mechanism,
)
from schoolmatch.strategy import (
    SophisticationPartition,
    boston_equilibrium_outcome,
    gs_manipulating_students_fast,
    is_nash_equilibrium,
    manipulating_students,
    sd_equilibrium_outcome,
    semi_sophisticated_outcome,
)


def _report(line):
    print(line)


def _exhaustive_4x3(common_only=False):
    profiles = (common_identity_priorities(4, 3),)
    if not common_only:
        profiles += (staggered_priorities(4, 3),)
    return FamilyConfig(
        n_students=4, n_schools=3, capacity=(1, 1),
        priority_profiles=profiles, mode="exhaustive",
    )


def test_criterion_01_fixture_exactness():
    start = time.perf_counter()
    for fid in FIXTURE_IDS:
        report = reproduce_fixture(fid)
        assert report.passed, f"{fid}:\n{report.diff()}"
    elapsed = time.perf_counter() - start
    assert elapsed < 1.0, f"fixture reproduction took {elapsed:.2f}s (budget 1s)"
    _report(f"PASS criterion 1: all {len(FIXTURE_IDS)} fixtures exact in {elapsed:.2f}s")


def test_criterion_02_sequential_round_identities():
    inst = fixture_instance("EX3n7")
    assert chinese_parallel(inst, 1) == run_mechanism(MechanismSpec(Mechanism.BOSTON, 3), inst)
    assert chinese_parallel(inst, 3) == run_mechanism(MechanismSpec(Mechanism.GS, 3), inst)
    _report("PASS criterion 2: round-length 1 and 3 runs equal boston^3 and gs^3 exactly")


def test_criterion_03_stability_inclusion_sweep():
    start = time.perf_counter()
    total = 0
    for k in (2, 3):
        config = FamilyConfig(
            n_students=(3, 5), n_schools=(2, 4), capacity=(1, 2),
            mode="random", samples=25_000, seed=100 + k,
        )
        report = check_claim("T1", config, k=k)
        assert report.passed, report.counterexample
        assert report.witness["ok"], "T1PROOF must witness the strict part"
        total += report.instances_checked
    elapsed = time.perf_counter() - start
    assert total == 50_000
    assert elapsed < 30.0, f"sweep took {elapsed:.1f}s (budget 30s)"
    _report(f"PASS criterion 3: 50,000 instances, zero violations, witness holds, {elapsed:.1f}s")


def test_criterion_04_counting_sweep_exhaustive():
    start = time.perf_counter()
    config = _exhaustive_4x3()
    t4 = check_claim("T4", config, k=3, l=2)
    assert t4.passed, t4.counterexample
    assert t4.instances_checked == 131_072
    assert t4.stats.get("strict", 0) >= 1
    t2 = check_claim("T2", config, k=3, l=2)
    assert t2.passed, t2.counterexample
    elapsed = time.perf_counter() - start
    assert elapsed < 60.0, f"sweep took {elapsed:.1f}s (budget 60s)"
    _report(
        f"PASS criterion 4: 131,072-instance counting sweep, {t4.stats['strict']} strict, {elapsed:.1f}s"
    )


def test_criterion_05_fpf_vs_sequential_picks_sweep():
    total = 0
    for k in (2, 3):
        config = FamilyConfig(
            n_students=(3, 5), n_schools=(2, 4), capacity=(1, 2),
            priority_mode="common", fpf_policy="random",
            mode="random", samples=25_000, seed=200 + k,
        )
        report = check_claim("P1", config, k=k)
        assert report.passed, report.counterexample
        total += report.instances_checked
    assert total == 50_000
    _report("PASS criterion 5: 50,000 common-priority instances, zero violations")


def test_criterion_06_sequential_round_stability_sweep():
    config = FamilyConfig(
        n_students=(3, 5), n_schools=(2, 4), capacity=(1, 2),
        mode="random", samples=20_000, seed=300,
    )
    report = check_claim("T3", config, pairs=((1, 2), (1, 3), (2, 4)))
    assert report.passed, report.counterexample
    assert report.instances_checked == 20_000
    _report("PASS criterion 6: 20,000 instances x 3 round-length pairs, zero violations")


def test_criterion_07_manipulation_theory_exhaustive():
    config = _exhaustive_4x3()
    for cid in ("TM", "C1", "P6"):
        report = check_claim(cid, config, k=3)
        assert report.passed, (cid, report.counterexample)
        assert report.instances_checked == 131_072
    p5 = check_claim("P5", _exhaustive_4x3(common_only=True), k=3)
    assert p5.passed, p5.counterexample
    assert p5.instances_checked == 65_536
    _report("PASS criterion 7: TM/C1/P6 on 131,072 instances, P5 on the common-priority half")


def test_criterion_08_oracle_equivalences():
    cfg = FamilyConfig(
        n_students=(3, 6), n_schools=(2, 5), capacity=(1, 2), samples=0, seed=0
    )
    for j in range(2_000):
        inst = random_instance(cfg, 40_000 + j)
        k = 2 + j % 2
        fast = gs_manipulating_students_fast(inst, k)
        brute = manipulating_students(MechanismSpec(Mechanism.GS, k), inst)
        assert fast == brute, (j, fast, brute)
    for j in range(2_000):
        inst = random_instance(cfg, 50_000 + j)
        semi_sophisticated_outcome(inst, 2 + j % 2)  # raises if the routes disagree
    small = FamilyConfig(
        n_students=(3, 5), n_schools=(2, 4), capacity=(1, 2), samples=0, seed=0
    )
    for j in range(1_000):
        inst = random_instance(small, 60_000 + j)
        optimum = deferred_acceptance(inst)
        stable_set = stable_set_bruteforce(inst)
        assert optimum in stable_set, j
        for other in stable_set:
            for i in range(inst.n_students):
                pref = inst.preferences[i]

                def value(a):
                    if a == -1:
                        return len(pref)
                    return pref.index(a) if a in pref else len(pref) + 1

                assert value(optimum.assignment[i]) <= value(other.assignment[i]), (j, i)
    _report(
        "PASS criterion 8: fast==brute on 2,000; route agreement on 2,000; "
        "student-optimality vs brute force on 1,000"
    )


def test_criterion_09_equilibrium_validation():
    common = FamilyConfig(
        n_students=(3, 5), n_schools=(2, 4), capacity=(1, 2),
        priority_mode="common", samples=0, seed=0,
    )
    for j in range(500):
        inst = random_instance(common, 70_000 + j)
        rng = random.Random(j)
        part = SophisticationPartition(
            inst.n_students,
            frozenset(i for i in range(inst.n_students) if rng.random() < 0.5),
        )
        k = 2 + j % 2
        eq = boston_equilibrium_outcome(inst, part, k)
        assert is_nash_equilibrium(MechanismSpec(Mechanism.BOSTON, k), inst, part, eq.profile), j
        eq = sd_equilibrium_outcome(inst, part, k)
        assert is_nash_equilibrium(MechanismSpec(Mechanism.SD, k), inst, part, eq.profile), j

    t5 = check_claim(
        "T5",
        FamilyConfig(
            n_students=(3, 6), n_schools=(2, 4), capacity=(1, 2),
            priority_mode="common", mode="random", samples=5_000, seed=900,
        ),
        k=3, l=2,
    )
    assert t5.passed, t5.counterexample
    t6 = check_claim(
        "T6",
        FamilyConfig(
            n_students=(3, 6), n_schools=(2, 4), capacity=(1, 2),
            mode="random", samples=5_000, seed=901,
        ),
        k=3, l=2,
    )
    assert t6.passed, t6.counterexample
    _report(
        "PASS criterion 9: 500+500 equilibria exhaustively verified; "
        "counting inequalities hold on 5,000+5,000"
    )


def test_criterion_10_byte_identical_reports():
    def run_verify(args):
        proc = subprocess.run(
            [sys.executable, "-m", "schoolmatch.cli", "verify", *args],
            capture_output=True,
        )
        assert proc.returncode == 0, proc.stderr
        return proc.stdout

    for args in (
        ["T1", "--k", "2", "--samples", "400", "--seed", "17"],
        ["L3", "--samples", "300", "--seed", "3"],  # uses auxiliary draws
        ["T5", "--k", "3", "--l", "2", "--samples", "200", "--seed", "8"],
    ):
        assert run_verify(args) == run_verify(args), args
    _report("PASS criterion 10: repeated verify runs are byte-identical")
