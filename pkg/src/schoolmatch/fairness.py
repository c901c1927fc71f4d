"""Stability diagnostics and the two per-instance comparison criteria.

Blocking is always judged against the instance's full preference lists,
even when the matching came out of a constrained mechanism: a student
denied by the ranking limit still resents a school she deserves.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels as kernels
from .errors import SizeGuardError
from .mechanisms import MechanismSpec, run_mechanism
from .model import Instance, Matching, validate_matching

#: stable_set_bruteforce hard guards
MAX_BRUTEFORCE_STUDENTS = 8
MAX_BRUTEFORCE_SCHOOLS = 5
MAX_BRUTEFORCE_SPACE = 400_000


@dataclass(frozen=True)
class BlockingPair:
    """Student/school pair that blocks a matching, with a concrete witness.

    ``witness`` is None when the school has an empty seat, otherwise the
    lowest-priority occupant the student outranks.
    """

    student: int
    school: int
    witness: int | None


@dataclass(frozen=True)
class FairnessVerdict:
    """Raw stability data for two mechanisms at one instance.

    Directional readings (more fair than) are aggregated across whole
    instance families elsewhere; a single verdict never decides one.
    """

    mechanism_a: MechanismSpec
    mechanism_b: MechanismSpec
    instance_digest: str
    stable_a: bool
    stable_b: bool
    count_a: int
    count_b: int


def is_individually_rational(matching: Matching, instance: Instance) -> bool:
    """True iff every matched student finds her school acceptable under the
    full, untruncated preferences."""
    validate_matching(matching, instance)
    return all(
        s == -1 or s in instance.preferences[i] for i, s in enumerate(matching.assignment)
    )


def _preferred_schools(instance: Instance, student: int, assigned: int):
    """Schools the student strictly prefers to her assignment.

    An unmatched student prefers every school she lists; a student holding
    an unlisted school also prefers every listed one (the unlisted school
    sits below the outside option).
    """
    pref = instance.preferences[student]
    if assigned == -1 or assigned not in pref:
        return pref
    return pref[: pref.index(assigned)]


def blocking_pairs(matching: Matching, instance: Instance) -> tuple:
    """Every blocking pair, sorted by (student, school)."""
    validate_matching(matching, instance)
    fills = matching.fill_counts(instance.n_schools)
    occupants = {s: [] for s in range(instance.n_schools)}
    for i, s in enumerate(matching.assignment):
        if s != -1:
            occupants[s].append(i)
    pos = [{i: t for t, i in enumerate(order)} for order in instance.priorities]
    pairs = []
    for i in range(instance.n_students):
        for s in _preferred_schools(instance, i, matching.assignment[i]):
            if fills[s] < instance.capacities[s]:
                pairs.append(BlockingPair(i, s, None))
                continue
            outranked = [j for j in occupants[s] if pos[s][i] < pos[s][j]]
            if outranked:
                pairs.append(BlockingPair(i, s, max(outranked, key=lambda j: pos[s][j])))
    return tuple(pairs)


def blocking_students(matching: Matching, instance: Instance) -> frozenset:
    """Students appearing in at least one blocking pair."""
    validate_matching(matching, instance)
    p = instance.packed()
    assign = np.asarray(matching.assignment, dtype=np.int32)
    mask = kernels.blocking_mask(p.prefs, p.plen, p.prank, p.cap, assign)
    return frozenset(int(i) for i in np.flatnonzero(mask))


def count_blocking(matching: Matching, instance: Instance) -> int:
    p = instance.packed()
    assign = np.asarray(matching.assignment, dtype=np.int32)
    return int(kernels.blocking_mask(p.prefs, p.plen, p.prank, p.cap, assign).sum())


def is_stable(matching: Matching, instance: Instance) -> bool:
    return is_individually_rational(matching, instance) and count_blocking(matching, instance) == 0


def compare_at(mech_a: MechanismSpec, mech_b: MechanismSpec, instance: Instance) -> FairnessVerdict:
    """Run both mechanisms at one instance and record raw stability data."""
    out_a = run_mechanism(mech_a, instance)
    out_b = run_mechanism(mech_b, instance)
    return FairnessVerdict(
        mechanism_a=mech_a,
        mechanism_b=mech_b,
        instance_digest=instance.digest(),
        stable_a=is_stable(out_a, instance),
        stable_b=is_stable(out_b, instance),
        count_a=count_blocking(out_a, instance),
        count_b=count_blocking(out_b, instance),
    )


def stable_set_bruteforce(instance: Instance) -> tuple:
    """All stable matchings, by exhaustive search over feasible assignments.

    Deliberately independent of the mechanism kernels so it can serve as an
    oracle for them.  Guarded: at most 8 students, 5 schools, and a bounded
    assignment space.
    """
    n, m = instance.n_students, instance.n_schools
    if n > MAX_BRUTEFORCE_STUDENTS or m > MAX_BRUTEFORCE_SCHOOLS:
        raise SizeGuardError(f"brute force limited to {MAX_BRUTEFORCE_STUDENTS} students x {MAX_BRUTEFORCE_SCHOOLS} schools")
    space = 1
    for pref in instance.preferences:
        space *= len(pref) + 1
        if space > MAX_BRUTEFORCE_SPACE:
            raise SizeGuardError(f"assignment space exceeds {MAX_BRUTEFORCE_SPACE}")

    prefs = instance.preferences
    caps = instance.capacities
    pos = [{i: t for t, i in enumerate(order)} for order in instance.priorities]

    def stable(assign):
        fills = [0] * m
        worst = [-1] * m
        for i, s in enumerate(assign):
            if s != -1:
                fills[s] += 1
                if pos[s][i] > worst[s]:
                    worst[s] = pos[s][i]
        for i, a in enumerate(assign):
            bound = len(prefs[i]) if a == -1 else prefs[i].index(a)
            for s in prefs[i][:bound]:
                if fills[s] < caps[s] or pos[s][i] < worst[s]:
                    return False
        return True

    found = []
    assign = [-1] * n
    remaining = list(caps)

    def walk(i):
        if i == n:
            if stable(assign):
                found.append(tuple(assign))
            return
        walk(i + 1)  # leave i unmatched
        for s in prefs[i]:
            if remaining[s] > 0:
                remaining[s] -= 1
                assign[i] = s
                walk(i + 1)
                assign[i] = -1
                remaining[s] += 1

    walk(0)
    return tuple(Matching(a) for a in sorted(found))
