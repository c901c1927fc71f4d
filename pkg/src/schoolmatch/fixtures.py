"""Bundled reference scenarios with frozen expected outcomes.

Each fixture is a small instance whose mechanism outcomes, blocking sets,
stability flags, and strategic sets are pinned down exactly.  Rows marked
*open* in the source tables have an arbitrary tail; reproduction completes
them ascending, re-runs everything with the descending completion, and
requires identical displayed values, confirming the tails are irrelevant.

Fixture ids: EX1, EX2, EX3n7, EX5, EX42, T1PROOF (case-insensitive).
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import FixtureMismatchError
from .fairness import (
    blocking_pairs,
    blocking_students,
    compare_at,
    is_stable,
    stable_set_bruteforce,
)
from .mechanisms import (
    Mechanism,
    MechanismSpec,
    chinese_parallel,
    deferred_acceptance,
    fpf_adjusted_priorities,
    run_mechanism,
    serial_dictatorship,
)
from .model import Instance, truncate_profile
from .serialize import (
    default_school_names,
    default_student_names,
    instance_to_document,
    matching_to_document,
)
from .strategy import (
    competitive_schools,
    gs_manipulating_students_fast,
    manipulating_students,
    semi_sophisticated_outcome,
    semi_sophisticated_profile,
)


@dataclass(frozen=True)
class _Row:
    prefix: tuple
    open: bool = False


@dataclass(frozen=True)
class _RawFixture:
    n_students: int
    n_schools: int
    prefs: tuple  # _Row per student (school indices)
    prios: tuple  # _Row per school (student indices)
    capacities: tuple
    fpf: frozenset = frozenset()


_RAW = {
    "EX1": _RawFixture(
        7,
        5,
        prefs=(
            _Row((0, 1, 2, 3)),
            _Row((0, 2)),
            _Row((3, 2)),
            _Row((0, 1, 2)),
            _Row((1, 0, 2)),
            _Row((0, 1, 4, 2, 3)),
            _Row((4, 0, 1)),
        ),
        prios=(
            _Row((3,), True),
            _Row((4,), True),
            _Row((2, 0, 1), True),
            _Row((0, 5, 2), True),
            _Row((6,), True),
        ),
        capacities=(1,) * 5,
        fpf=frozenset({2}),
    ),
    "EX2": _RawFixture(
        5,
        4,
        prefs=(
            _Row((0, 1, 2)),
            _Row((0, 1, 2)),
            _Row((1, 0, 2)),
            _Row((2, 0, 1)),
            _Row((2, 3), True),
        ),
        prios=(
            _Row((2, 0), True),
            _Row((1, 3), True),
            _Row((0, 4), True),
            _Row((4,), True),
        ),
        capacities=(1,) * 4,
    ),
    "EX3n7": _RawFixture(
        7,
        5,
        prefs=(
            _Row((0,), True),
            _Row((1,), True),
            _Row((2,), True),
            _Row((0, 3, 4), True),
            _Row((0, 1, 2, 4)),
            _Row((0, 1, 2, 4)),
            _Row((3, 4), True),
        ),
        prios=tuple(_Row((0, 1, 2, 3, 4, 5, 6)) for _ in range(5)),
        capacities=(1,) * 5,
    ),
    "EX5": _RawFixture(
        4,
        4,
        prefs=(
            _Row((0,), True),
            _Row((0, 1, 2)),
            _Row((1, 2), True),
            _Row((2, 1), True),
        ),
        prios=(
            _Row((0,), True),
            _Row((3, 2, 1, 0)),
            _Row((2, 1, 3, 0)),
            _Row((), True),
        ),
        capacities=(1,) * 4,
    ),
    "EX42": _RawFixture(
        3,
        3,
        prefs=(_Row((0, 1, 2)), _Row((0, 1, 2)), _Row((1, 0, 2))),
        prios=(_Row((0, 1, 2)), _Row((1, 2, 0)), _Row((2, 0, 1))),
        capacities=(1,) * 3,
    ),
    "T1PROOF": _RawFixture(
        3,
        2,
        prefs=(_Row((0, 1)), _Row((0, 1)), _Row((1, 0))),
        prios=(_Row((0, 1, 2)), _Row((0, 1, 2))),
        capacities=(1,) * 2,
    ),
}

FIXTURE_IDS = ("EX1", "EX2", "EX3n7", "EX5", "EX42", "T1PROOF")
_CANONICAL = {fid.upper(): fid for fid in FIXTURE_IDS}


def canonical_fixture_id(fid: str) -> str:
    try:
        return _CANONICAL[fid.upper()]
    except KeyError:
        raise KeyError(f"unknown fixture {fid!r}; known: {', '.join(FIXTURE_IDS)}")


def _complete(row: _Row, universe: int, completion: str) -> tuple:
    if not row.open:
        return row.prefix
    rest = sorted(set(range(universe)) - set(row.prefix), reverse=(completion == "descending"))
    return row.prefix + tuple(rest)


def build_fixture(fid: str, completion: str = "ascending") -> Instance:
    """Materialize a fixture instance under the given tail completion."""
    if completion not in ("ascending", "descending"):
        raise ValueError("completion must be 'ascending' or 'descending'")
    raw = _RAW[canonical_fixture_id(fid)]
    return Instance(
        preferences=tuple(_complete(r, raw.n_schools, completion) for r in raw.prefs),
        priorities=tuple(_complete(r, raw.n_students, completion) for r in raw.prios),
        capacities=raw.capacities,
        fpf_schools=raw.fpf,
    )


def fixture_instance(fid: str) -> Instance:
    """Canonical (ascending-completion) form of a fixture."""
    return build_fixture(fid, "ascending")


def fixture_document(fid: str) -> dict:
    return instance_to_document(fixture_instance(fid))


# -- frozen expectations ------------------------------------------------------


def _mdoc(matching, n_students, n_schools):
    return matching_to_document(
        matching, default_student_names(n_students), default_school_names(n_schools)
    )


def _names(ids, prefix):
    return sorted(f"{prefix}{i + 1}" for i in ids)


def _checks_ex1(inst: Instance):
    gs4 = run_mechanism(MechanismSpec(Mechanism.GS, 4), inst)
    fpf4 = run_mechanism(MechanismSpec(Mechanism.FPF, 4), inst)
    gs4_pairs = {(p.student, p.school) for p in blocking_pairs(gs4, inst)}
    adjusted = fpf_adjusted_priorities(truncate_profile(inst, 4))
    stable_set = stable_set_bruteforce(inst)
    md = lambda m: _mdoc(m, 7, 5)
    return [
        ("gs4_matching", {"i1": "s3", "i2": None, "i3": "s4", "i4": "s1", "i5": "s2", "i6": None, "i7": "s5"}, md(gs4)),
        ("fpf4_matching", {"i1": "s4", "i2": None, "i3": "s3", "i4": "s1", "i5": "s2", "i6": None, "i7": "s5"}, md(fpf4)),
        ("fpf4_stable", True, is_stable(fpf4, inst)),
        ("gs4_stable", False, is_stable(gs4, inst)),
        ("gs4_blocked_by_i6_s4", True, (5, 3) in gs4_pairs),
        ("fpf4_blocking_students", [], _names(blocking_students(fpf4, inst), "i")),
        ("stable_set_is_fpf4_singleton", [md(fpf4)], [md(m) for m in stable_set]),
        ("adjusted_s3_priority_head", ["i3", "i2", "i1"], [f"i{i + 1}" for i in adjusted[2][:3]]),
    ]


def _checks_ex2(inst: Instance):
    gs2 = run_mechanism(MechanismSpec(Mechanism.GS, 2), inst)
    shortened_spec = MechanismSpec(Mechanism.GS, (2, 1, 2, 2, 2))
    shortened = run_mechanism(shortened_spec, inst)
    pairs1 = {(p.student, p.school) for p in blocking_pairs(gs2, inst)}
    pairs2 = {(p.student, p.school) for p in blocking_pairs(shortened, inst)}
    verdict = compare_at(shortened_spec, MechanismSpec(Mechanism.GS, 2), inst)
    md = lambda m: _mdoc(m, 5, 4)
    return [
        ("gs2_matching", {"i1": None, "i2": "s2", "i3": "s1", "i4": None, "i5": "s3"}, md(gs2)),
        ("gs2_blocking_students", ["i1"], _names(blocking_students(gs2, inst), "i")),
        ("shortened_matching", {"i1": "s1", "i2": None, "i3": "s2", "i4": None, "i5": "s3"}, md(shortened)),
        ("shortened_blocking_students", ["i2", "i4"], _names(blocking_students(shortened, inst), "i")),
        ("pair_i1_s3_blocks_gs2", True, (0, 2) in pairs1),
        ("pair_i2_s2_blocks_gs2", False, (1, 1) in pairs1),
        ("pair_i2_s2_blocks_shortened", True, (1, 1) in pairs2),
        ("pair_i1_s3_blocks_shortened", False, (0, 2) in pairs2),
        ("shortened_vs_gs2_counts", [2, 1], [verdict.count_a, verdict.count_b]),
    ]


def _checks_ex3n7(inst: Instance):
    b3 = run_mechanism(MechanismSpec(Mechanism.BOSTON, 3), inst)
    gs3 = run_mechanism(MechanismSpec(Mechanism.GS, 3), inst)
    sd3 = run_mechanism(MechanismSpec(Mechanism.SD, 3), inst)
    ch1 = chinese_parallel(inst, 1)
    ch3 = chinese_parallel(inst, 3)
    b3_pairs = {(p.student, p.school) for p in blocking_pairs(b3, inst)}
    sd3_pairs = {(p.student, p.school) for p in blocking_pairs(sd3, inst)}
    manip_b3 = manipulating_students(MechanismSpec(Mechanism.BOSTON, 3), inst)
    md = lambda m: _mdoc(m, 7, 5)
    b3_doc = {"i1": "s1", "i2": "s2", "i3": "s3", "i4": "s5", "i5": None, "i6": None, "i7": "s4"}
    gs3_doc = {"i1": "s1", "i2": "s2", "i3": "s3", "i4": "s4", "i5": None, "i6": None, "i7": "s5"}
    return [
        ("boston3_matching", b3_doc, md(b3)),
        ("gs3_matching", gs3_doc, md(gs3)),
        ("sd3_matches_gs3", gs3_doc, md(sd3)),
        ("boston3_blocking_students", ["i4"], _names(blocking_students(b3, inst), "i")),
        ("gs3_blocking_students", ["i5", "i6"], _names(blocking_students(gs3, inst), "i")),
        ("chinese_e1_equals_boston3", b3_doc, md(ch1)),
        ("chinese_e3_equals_gs3", gs3_doc, md(ch3)),
        ("i4_manipulates_boston3", True, 3 in manip_b3),
        ("pair_i5_s5_blocks_sd3", True, (4, 4) in sd3_pairs),
        ("pair_i5_s5_blocks_boston3", False, (4, 4) in b3_pairs),
        ("pair_i4_s4_blocks_boston3", True, (3, 3) in b3_pairs),
        ("pair_i4_s4_blocks_sd3", False, (3, 3) in sd3_pairs),
    ]


def _checks_ex5(inst: Instance):
    gs2 = run_mechanism(MechanismSpec(Mechanism.GS, 2), inst)
    pairs = {(p.student, p.school) for p in blocking_pairs(gs2, inst)}
    single_s3 = Instance(
        preferences=tuple((2,) if i == 1 else p for i, p in enumerate(inst.preferences)),
        priorities=inst.priorities,
        capacities=inst.capacities,
    )
    deviation = run_mechanism(MechanismSpec(Mechanism.GS, 2), single_s3)
    manip = manipulating_students(MechanismSpec(Mechanism.GS, 2), inst)
    fast = gs_manipulating_students_fast(inst, 2)
    unmatched = sorted(set(range(4)) - gs2.matched_students())
    md = lambda m: _mdoc(m, 4, 4)
    return [
        ("gs2_matching", {"i1": "s1", "i2": None, "i3": "s2", "i4": "s3"}, md(gs2)),
        ("gs2_stable", False, is_stable(gs2, inst)),
        ("pair_i2_s3_blocks_gs2", True, (1, 2) in pairs),
        ("single_s3_report_matching", {"i1": "s1", "i2": None, "i3": "s3", "i4": "s2"}, md(deviation)),
        ("gs2_manipulators", [], _names(manip, "i")),
        ("fast_manipulators", [], _names(fast, "i")),
        ("fast_scan_candidates", ["i2"], _names(unmatched, "i")),
    ]


def _checks_ex42(inst: Instance):
    competitive, guaranteed = competitive_schools(inst)
    profile = semi_sophisticated_profile(inst, 2)
    shadow = Instance(profile, inst.priorities, inst.capacities)
    outcome = run_mechanism(MechanismSpec(Mechanism.GS, 2), shadow)
    optimal = deferred_acceptance(inst)
    matching, limits = semi_sophisticated_outcome(inst, 2)
    md = lambda m: _mdoc(m, 3, 3)
    eq_doc = {"i1": "s1", "i2": "s2", "i3": "s3"}
    return [
        ("competitive_schools", ["s1"], _names(competitive, "s")),
        (
            "guaranteed_first_choices",
            {"i1": "s1", "i2": None, "i3": None},
            {f"i{i + 1}": (None if g is None else f"s{g + 1}") for i, g in enumerate(guaranteed)},
        ),
        (
            "equilibrium_profile",
            {"i1": ["s1", "s2", "s3"], "i2": ["s2", "s3"], "i3": ["s2", "s3"]},
            {f"i{i + 1}": [f"s{s + 1}" for s in rep] for i, rep in enumerate(profile)},
        ),
        ("equilibrium_matching", eq_doc, md(outcome)),
        ("equilibrium_stable", True, is_stable(outcome, inst)),
        ("equals_student_optimal", md(optimal), md(outcome)),
        ("per_student_limits", [2, 3, 3], list(limits)),
        ("routes_agree", eq_doc, md(matching)),
    ]


def _checks_t1proof(inst: Instance):
    gs2 = run_mechanism(MechanismSpec(Mechanism.GS, 2), inst)
    unconstrained = deferred_acceptance(inst)
    b2 = run_mechanism(MechanismSpec(Mechanism.BOSTON, 2), inst)
    pairs = {(p.student, p.school) for p in blocking_pairs(b2, inst)}
    md = lambda m: _mdoc(m, 3, 2)
    return [
        ("gs2_matching", {"i1": "s1", "i2": "s2", "i3": None}, md(gs2)),
        ("gs2_stable", True, is_stable(gs2, inst)),
        ("gs2_equals_unconstrained", md(unconstrained), md(gs2)),
        ("boston2_matching", {"i1": "s1", "i2": None, "i3": "s2"}, md(b2)),
        ("boston2_stable", False, is_stable(b2, inst)),
        ("pair_i2_s2_blocks_boston2", True, (1, 1) in pairs),
    ]


_CHECKERS = {
    "EX1": _checks_ex1,
    "EX2": _checks_ex2,
    "EX3n7": _checks_ex3n7,
    "EX5": _checks_ex5,
    "EX42": _checks_ex42,
    "T1PROOF": _checks_t1proof,
}


@dataclass(frozen=True)
class FixtureReport:
    fixture: str
    checks: tuple  # (name, expected, actual, ok) per check
    completion_invariant: bool
    passed: bool

    def to_document(self) -> dict:
        return {
            "fixture": self.fixture,
            "checks": [
                {"name": name, "expected": expected, "actual": actual, "ok": ok}
                for name, expected, actual, ok in self.checks
            ],
            "completion_invariant": self.completion_invariant,
            "passed": self.passed,
        }

    def diff(self) -> str:
        lines = [
            f"{name}: expected {expected!r}, got {actual!r}"
            for name, expected, actual, ok in self.checks
            if not ok
        ]
        if not self.completion_invariant:
            lines.append("descending-completion re-run changed a displayed value")
        return "\n".join(lines)


def reproduce_fixture(fid: str, *, raise_on_mismatch: bool = False) -> FixtureReport:
    """Recompute every pinned value of a fixture and compare field by field.

    Also re-runs all checks under the descending tail completion and
    requires the displayed values to be identical.
    """
    fid = canonical_fixture_id(fid)
    checker = _CHECKERS[fid]
    asc = checker(build_fixture(fid, "ascending"))
    desc = checker(build_fixture(fid, "descending"))
    checks = tuple(
        (name, expected, actual, expected == actual) for name, expected, actual in asc
    )
    invariant = all(a[2] == d[2] for a, d in zip(asc, desc))
    passed = invariant and all(ok for *_, ok in checks)
    report = FixtureReport(fid, checks, invariant, passed)
    if raise_on_mismatch and not passed:
        raise FixtureMismatchError(f"fixture {fid} diverged:\n{report.diff()}")
    return report
