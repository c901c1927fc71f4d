"""Manipulation detection and equilibrium constructions.

Improvement is always judged by the deviating student's full true
preference relation (with the outside option placed where her true list
puts it), never by a truncated or reported list.  Exhaustive searches over
the report space carry a hard guard of 6 schools.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from . import _kernels as kernels
from .errors import LemmaViolationError, SizeGuardError
from .fairness import is_stable
from .mechanisms import (
    Mechanism,
    MechanismSpec,
    _limits_array,
    _require_common_priority,
    _sd_limited,
    run_mechanism,
)
from .model import Instance, Matching, truncate_preferences

MAX_STRATEGY_SCHOOLS = 6

Report = tuple  # a strategy: any strict ranking of any subset of schools


@dataclass(frozen=True)
class SophisticationPartition:
    """Split of the roster into sincere reporters and best responders."""

    n_students: int
    sincere: frozenset

    def __post_init__(self):
        if any(not (0 <= i < self.n_students) for i in self.sincere):
            raise ValueError("sincere set contains unknown students")
        object.__setattr__(self, "sincere", frozenset(self.sincere))

    @property
    def sophisticated(self) -> frozenset:
        return frozenset(range(self.n_students)) - self.sincere


@dataclass(frozen=True)
class EquilibriumOutcome:
    """A supporting report profile, the induced matching, and which
    construction produced it."""

    profile: tuple  # Report per student
    matching: Matching
    construction: str


class CompetitiveReport(NamedTuple):
    schools: frozenset  # schools whose every seat is claimed by a guaranteed first choice
    guaranteed: tuple  # per student: her first choice if guaranteed it, else None


@lru_cache(maxsize=8)
def all_reports(n_schools: int) -> tuple:
    """Every strict ordering of every subset of schools, shortest first.

    Size is sum over m of n!/(n-m)!; guarded at 6 schools.
    """
    if n_schools > MAX_STRATEGY_SCHOOLS:
        raise SizeGuardError(f"report space guarded at {MAX_STRATEGY_SCHOOLS} schools")
    reports = []
    for length in range(n_schools + 1):
        reports.extend(itertools.permutations(range(n_schools), length))
    return tuple(reports)


@lru_cache(maxsize=8)
def _report_arrays(n_schools: int):
    reports = all_reports(n_schools)
    flat = np.full((len(reports), max(n_schools, 1)), -1, dtype=np.int32)
    rlen = np.zeros(len(reports), dtype=np.int32)
    for r, rep in enumerate(reports):
        rlen[r] = len(rep)
        for t, s in enumerate(rep):
            flat[r, t] = s
    return flat, rlen


def _true_value(pref, assigned):
    if assigned is None or assigned == -1:
        return len(pref)
    try:
        return pref.index(assigned)
    except ValueError:
        return len(pref) + 1


_KERNEL_MECH = {
    Mechanism.GS: kernels.MECH_DA,
    Mechanism.SD: kernels.MECH_DA,
    Mechanism.BOSTON: kernels.MECH_BOSTON,
}


def _improvers(spec: MechanismSpec, instance: Instance, base_profile, check) -> frozenset:
    """Students in ``check`` with a report strictly improving on the outcome
    of ``base_profile`` (true-preference judged), others held fixed."""
    if instance.n_schools > MAX_STRATEGY_SCHOOLS:
        raise SizeGuardError(f"report space guarded at {MAX_STRATEGY_SCHOOLS} schools")
    limits = _limits_array(instance, spec.constraint)
    if spec.kind is Mechanism.SD:
        _require_common_priority(instance)
    check_arr = np.zeros(instance.n_students, dtype=np.uint8)
    for i in check:
        check_arr[i] = 1
    if spec.kind in _KERNEL_MECH:
        p = instance.packed()
        base = Instance(
            preferences=tuple(base_profile),
            priorities=instance.priorities,
            capacities=instance.capacities,
        ).packed()
        flat, rlen = _report_arrays(instance.n_schools)
        mask = kernels.improving_mask(
            p.prefs,
            p.plen,
            base.prefs,
            base.plen,
            limits,
            p.prank,
            p.cap,
            _KERNEL_MECH[spec.kind],
            flat,
            rlen,
            check_arr,
        )
        return frozenset(int(i) for i in np.flatnonzero(mask))

    # general path for the remaining mechanisms
    def outcome(profile):
        shadow = Instance(
            preferences=tuple(profile),
            priorities=instance.priorities,
            capacities=instance.capacities,
            fpf_schools=instance.fpf_schools,
        )
        return run_mechanism(spec, shadow)

    baseline = outcome(base_profile)
    winners = set()
    for i in sorted(check):
        pref = instance.preferences[i]
        cur = _true_value(pref, baseline.assignment[i])
        if cur == 0:
            continue
        for rep in all_reports(instance.n_schools):
            trial = list(base_profile)
            trial[i] = rep
            if _true_value(pref, outcome(trial).assignment[i]) < cur:
                winners.add(i)
                break
    return frozenset(winners)


def manipulating_students(spec: MechanismSpec, instance: Instance) -> frozenset:
    """Students with a misreport strictly improving their outcome under
    their true preferences, everyone else truthful.  Exhaustive."""
    return _improvers(spec, instance, instance.preferences, range(instance.n_students))


def gs_manipulating_students_fast(instance: Instance, k: int) -> frozenset:
    """Manipulators of the k-constrained deferred acceptance, without the
    full report sweep.

    Only students unmatched at the truthful outcome can gain, and any gain
    is already achievable by naming a single school; so only those students
    and those reports are tried.  Skips straight to the empty set when the
    truthful outcome is stable.  Requires k > 1.
    """
    if k <= 1:
        raise ValueError("fast manipulation scan requires k > 1")
    spec = MechanismSpec(Mechanism.GS, constraint=k)
    base = run_mechanism(spec, instance)
    if is_stable(base, instance):
        return frozenset()
    p = instance.packed()
    limits = np.full(instance.n_students, k, dtype=np.int32)
    winners = set()
    prefs = p.prefs.copy()
    plen = p.plen.copy()
    for i in range(instance.n_students):
        if base.assignment[i] != -1:
            continue
        saved_row = prefs[i].copy()
        saved_len = plen[i]
        for s in instance.preferences[i]:
            prefs[i, :] = -1
            prefs[i, 0] = s
            plen[i] = 1
            trial = kernels.da(prefs, plen, limits, p.prank, p.cap)
            if int(trial[i]) == s:
                winners.add(i)
                break
        prefs[i] = saved_row
        plen[i] = saved_len
    return frozenset(winners)


def _augmented_priorities(instance: Instance, partition: SophisticationPartition, k: int):
    """Priorities where each sincere student keeps her standing only at her
    first-choice school, drops below all best responders elsewhere, and
    sincere students rank by the position they gave the school."""
    n, m = instance.n_students, instance.n_schools
    sincere = partition.sincere
    truncated = [truncate_preferences(pref, k) for pref in instance.preferences]
    adjusted = []
    for s in range(m):
        order = instance.priorities[s]
        pos = {i: t for t, i in enumerate(order)}

        def key(i, s=s, pos=pos):
            if i not in sincere:
                return (0, pos[i])
            pref = truncated[i]
            rank = pref.index(s) + 1 if s in pref else m + 1
            return (0 if rank == 1 else rank, pos[i])

        adjusted.append(tuple(sorted(order, key=key)))
    return tuple(adjusted)


def _supporting_profile(instance, partition, k, matching):
    """Reports that hold the constructed outcome in place: sincere students
    submit their truthful truncation, matched best responders name their
    seat first, unmatched ones stay truthful."""
    profile = []
    for i in range(instance.n_students):
        if i in partition.sincere:
            profile.append(truncate_preferences(instance.preferences[i], k))
        elif matching.assignment[i] != -1:
            profile.append((matching.assignment[i],))
        else:
            profile.append(instance.preferences[i])
    return tuple(profile)


def boston_equilibrium_outcome(
    instance: Instance, partition: SophisticationPartition, k: int
) -> EquilibriumOutcome:
    """Unique equilibrium outcome of the k-constrained immediate-acceptance
    game with sincere and best-responding students, common priority.

    Built in two steps: a sequential-pick round where sincere students keep
    only their first choice and best responders keep full lists; then the
    leftover sincere students run deferred acceptance on the residual seats
    under the augmented priorities.
    """
    if k <= 1:
        raise ValueError("equilibrium construction requires k > 1")
    _require_common_priority(instance)
    n, m = instance.n_students, instance.n_schools
    p = instance.packed()

    step1_limits = np.array(
        [1 if i in partition.sincere else max(m, 1) for i in range(n)], dtype=np.int32
    )
    mu1 = kernels.da(p.prefs, p.plen, step1_limits, p.prank, p.cap)

    residual = p.cap.copy()
    for i in range(n):
        if mu1[i] >= 0:
            residual[mu1[i]] -= 1
    leftover = [i for i in partition.sincere if mu1[i] == -1]

    augmented = _augmented_priorities(instance, partition, k)
    shadow = Instance(
        preferences=instance.preferences,
        priorities=augmented,
        capacities=instance.capacities,
    ).packed()
    step2_limits = np.zeros(n, dtype=np.int32)
    for i in leftover:
        step2_limits[i] = k
    mu2 = kernels.da(p.prefs, p.plen, step2_limits, shadow.prank, residual)

    assignment = tuple(
        int(mu2[i]) if i in set(leftover) else int(mu1[i]) for i in range(n)
    )
    matching = Matching(assignment)
    return EquilibriumOutcome(
        profile=_supporting_profile(instance, partition, k, matching),
        matching=matching,
        construction="boston-two-step",
    )


def sd_equilibrium_outcome(
    instance: Instance, partition: SophisticationPartition, k: int
) -> EquilibriumOutcome:
    """Unique equilibrium outcome of the k-constrained sequential-pick game:
    the constraint effectively binds sincere students only."""
    if k <= 1:
        raise ValueError("equilibrium construction requires k > 1")
    _require_common_priority(instance)
    n, m = instance.n_students, instance.n_schools
    limits = np.array(
        [k if i in partition.sincere else max(m, 1) for i in range(n)], dtype=np.int32
    )
    matching = _sd_limited(instance, limits)
    return EquilibriumOutcome(
        profile=_supporting_profile(instance, partition, k, matching),
        matching=matching,
        construction="sd-sincere-constrained",
    )


def is_nash_equilibrium(
    spec: MechanismSpec,
    instance: Instance,
    partition: SophisticationPartition,
    profile,
) -> bool:
    """True iff no best responder has a profitable unilateral deviation
    (exhaustive over the report space, true-preference judged).

    Sincere students' rows must equal their truthful report (full list or
    its truncation at the spec's limit).
    """
    profile = tuple(tuple(rep) for rep in profile)
    if len(profile) != instance.n_students:
        raise ValueError("profile must cover every student")
    for i, rep in enumerate(profile):
        if len(set(rep)) != len(rep) or any(
            not (0 <= s < instance.n_schools) for s in rep
        ):
            raise ValueError(f"profile row {i} is not a strict ranking of known schools")
    limits = _limits_array(instance, spec.constraint)
    for i in sorted(partition.sincere):
        truthful = instance.preferences[i]
        if profile[i] not in (truthful, truncate_preferences(truthful, int(limits[i]))):
            raise ValueError(f"sincere student {i} must report truthfully")
    return not _improvers(spec, instance, profile, partition.sophisticated)


def competitive_schools(instance: Instance) -> CompetitiveReport:
    """Schools certain to fill with top-priority first choosers.

    A student is guaranteed her first choice s when she sits within the top
    q_s of its priority order; s is competitive when at least q_s students
    are guaranteed it.
    """
    guaranteed = []
    claims = {s: 0 for s in range(instance.n_schools)}
    pos = [{i: t for t, i in enumerate(order)} for order in instance.priorities]
    for i in range(instance.n_students):
        pref = instance.preferences[i]
        got = None
        if pref:
            first = pref[0]
            if pos[first][i] < instance.capacities[first]:
                got = first
                claims[first] += 1
        guaranteed.append(got)
    schools = frozenset(s for s, c in claims.items() if c >= instance.capacities[s])
    return CompetitiveReport(schools=schools, guaranteed=tuple(guaranteed))


def semi_sophisticated_profile(instance: Instance, l: int) -> tuple:
    """Reports of students who are truthful except for shedding competitive
    schools when the ranking limit binds.

    A student guaranteed her first choice is truthful; so is one with at
    most l acceptable schools or only competitive ones; everyone else lists
    exactly her non-competitive acceptable schools in true order.
    """
    if l <= 1:
        raise ValueError("semi-sophisticated play requires limit > 1")
    competitive, guaranteed = competitive_schools(instance)
    profile = []
    for i in range(instance.n_students):
        pref = instance.preferences[i]
        if (
            guaranteed[i] is not None
            or len(pref) <= l
            or all(s in competitive for s in pref)
        ):
            profile.append(pref)
        else:
            profile.append(tuple(s for s in pref if s not in competitive))
    return tuple(profile)


def semi_sophisticated_outcome(instance: Instance, l: int):
    """Equilibrium outcome of the l-constrained deferred-acceptance game
    with semi-sophisticated students, computed twice.

    Route one runs the constrained mechanism on the shedding profile; route
    two runs unconstrained deferred acceptance on the true profile under
    per-student limits l + r_i, where r_i counts dropped competitive schools
    the student prefers to something in her reported top l.  The routes must
    agree; disagreement raises LemmaViolationError and signals a bug.
    Returns (matching, per-student limit vector).
    """
    profile = semi_sophisticated_profile(instance, l)
    n = instance.n_students
    p = instance.packed()

    reported = Instance(
        preferences=profile,
        priorities=instance.priorities,
        capacities=instance.capacities,
    ).packed()
    uniform = np.full(n, l, dtype=np.int32)
    direct = kernels.da(reported.prefs, reported.plen, uniform, p.prank, p.cap)

    limits = []
    for i in range(n):
        pref = instance.preferences[i]
        listed = profile[i]
        top = listed[:l]
        if top and len(listed) < len(pref):
            worst_pos = pref.index(top[-1])
            dropped = set(pref) - set(listed)
            r = sum(1 for s in dropped if pref.index(s) < worst_pos)
        else:
            r = 0
        limits.append(l + r)
    limits_arr = np.asarray(limits, dtype=np.int32)
    derived = kernels.da(p.prefs, p.plen, limits_arr, p.prank, p.cap)

    if not np.array_equal(direct, derived):
        raise LemmaViolationError(
            "shedding-profile run and per-student-limit run disagree: "
            f"{direct.tolist()} vs {derived.tolist()}"
        )
    return Matching(tuple(int(a) for a in direct)), tuple(limits)
