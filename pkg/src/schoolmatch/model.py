"""Domain types shared by every other module.

An instance bundles, for a fixed roster of ``n_students`` students and
``n_schools`` schools (both indexed densely from 0):

* per student, a strict preference list over the schools she finds
  acceptable (best first; anything unlisted is worse than staying
  unmatched),
* per school, a strict priority order over *all* students,
* per school, a seat capacity,
* an optional subset of schools that rank applicants first-preference-first.

Everything is immutable after construction and all operations are pure,
so values can be shared freely across threads.
"""

from __future__ import annotations

import hashlib
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import InstanceValidationError, SmallMarketWarning

#: Sentinel used in packed assignment arrays for "unmatched".
UNMATCHED = -1

PreferenceList = tuple  # strict ranking of acceptable schools, best first
PriorityOrder = tuple  # permutation of all student indices, highest first
ConstraintVector = tuple  # positive list-length limit per student


@dataclass(frozen=True)
class Packed:
    """Dense numpy view of an instance, shared by both kernel backends."""

    prefs: np.ndarray  # int32 (n_students, n_schools), -1 padded
    plen: np.ndarray  # int32 (n_students,)
    prank: np.ndarray  # int32 (n_schools, n_students); prank[s][i] = position of i in the order of s
    cap: np.ndarray  # int32 (n_schools,)
    fpf_mask: np.ndarray  # uint8 (n_schools,)


@dataclass(frozen=True)
class Instance:
    """One school-choice problem: preferences, priorities, capacities, FPF set."""

    preferences: tuple  # tuple of PreferenceList, one per student
    priorities: tuple  # tuple of PriorityOrder, one per school
    capacities: tuple  # positive int per school
    fpf_schools: frozenset = frozenset()
    _packed: Packed | None = field(default=None, compare=False, repr=False)

    @property
    def n_students(self) -> int:
        return len(self.preferences)

    @property
    def n_schools(self) -> int:
        return len(self.priorities)

    def packed(self) -> Packed:
        """Dense array view, built once and cached."""
        if self._packed is None:
            n, m = self.n_students, self.n_schools
            prefs = np.full((n, max(m, 1)), -1, dtype=np.int32)
            plen = np.zeros(n, dtype=np.int32)
            for i, pref in enumerate(self.preferences):
                plen[i] = len(pref)
                for t, s in enumerate(pref):
                    prefs[i, t] = s
            prank = np.empty((m, max(n, 1)), dtype=np.int32)
            for s, order in enumerate(self.priorities):
                for pos, i in enumerate(order):
                    prank[s, i] = pos
            cap = np.asarray(self.capacities, dtype=np.int32)
            fpf = np.zeros(m, dtype=np.uint8)
            for s in self.fpf_schools:
                fpf[s] = 1
            object.__setattr__(self, "_packed", Packed(prefs, plen, prank, cap, fpf))
        return self._packed

    def has_common_priority(self) -> bool:
        return all(order == self.priorities[0] for order in self.priorities[1:])

    def digest(self) -> str:
        """Short stable fingerprint of the instance contents."""
        blob = repr(
            (self.preferences, self.priorities, self.capacities, tuple(sorted(self.fpf_schools)))
        ).encode()
        return hashlib.sha256(blob).hexdigest()[:12]


@dataclass(frozen=True)
class Matching:
    """Assignment of each student to one school index or UNMATCHED (-1)."""

    assignment: tuple

    def school_of(self, student: int):
        s = self.assignment[student]
        return None if s == UNMATCHED else s

    def is_matched(self, student: int) -> bool:
        return self.assignment[student] != UNMATCHED

    def matched_students(self) -> frozenset:
        return frozenset(i for i, s in enumerate(self.assignment) if s != UNMATCHED)

    def students_at(self, school: int) -> tuple:
        return tuple(i for i, s in enumerate(self.assignment) if s == school)

    def fill_counts(self, n_schools: int) -> tuple:
        fills = [0] * n_schools
        for s in self.assignment:
            if s != UNMATCHED:
                fills[s] += 1
        return tuple(fills)


def validate_matching(matching: Matching, instance: Instance) -> None:
    """Raise ValueError unless ``matching`` is well formed for ``instance``."""
    if len(matching.assignment) != instance.n_students:
        raise ValueError(
            f"matching covers {len(matching.assignment)} students, instance has {instance.n_students}"
        )
    for i, s in enumerate(matching.assignment):
        if s != UNMATCHED and not (0 <= s < instance.n_schools):
            raise ValueError(f"student {i} assigned unknown school {s}")
    for s, fill in enumerate(matching.fill_counts(instance.n_schools)):
        if fill > instance.capacities[s]:
            raise ValueError(f"school {s} holds {fill} students, capacity {instance.capacities[s]}")


def validate_instance(raw) -> Instance:
    """Build an Instance from an untyped description, naming every violation.

    ``raw`` is a mapping with keys ``n_students``, ``n_schools``,
    ``preferences`` (list of school-index lists), ``priorities`` (list of
    student-index lists, one per school), ``capacities``, and optional
    ``fpf_schools``.  All invariant violations are collected and raised
    together as an InstanceValidationError.  A SmallMarketWarning (not an
    error) is emitted when there are no more students than schools.
    """
    problems = []
    try:
        n = int(raw["n_students"])
        m = int(raw["n_schools"])
    except (KeyError, TypeError, ValueError) as exc:
        raise InstanceValidationError([f"missing or malformed student/school counts: {exc}"])
    if n < 0 or m < 0:
        raise InstanceValidationError(["student and school counts must be non-negative"])

    prefs_raw = raw.get("preferences", [])
    prios_raw = raw.get("priorities", [])
    caps_raw = raw.get("capacities", [])
    fpf_raw = raw.get("fpf_schools", [])

    if len(prefs_raw) != n:
        problems.append(f"expected {n} preference lists, got {len(prefs_raw)}")
    if len(prios_raw) != m:
        problems.append(f"expected {m} priority orders, got {len(prios_raw)}")
    if len(caps_raw) != m:
        problems.append(f"expected {m} capacities, got {len(caps_raw)}")

    preferences = []
    for i, pref in enumerate(prefs_raw):
        seen = set()
        clean = []
        for s in pref:
            if not (isinstance(s, int) and 0 <= s < m):
                problems.append(f"student {i}: unknown school {s} in preference list")
                continue
            if s in seen:
                problems.append(f"student {i}: duplicate school {s} in preference list")
                continue
            seen.add(s)
            clean.append(s)
        preferences.append(tuple(clean))

    priorities = []
    for s, order in enumerate(prios_raw):
        order = tuple(order)
        if sorted(order) != list(range(n)):
            problems.append(f"school {s}: priority order is not a permutation of all {n} students")
            order = tuple(i for i in order if isinstance(i, int) and 0 <= i < n)
        priorities.append(order)

    capacities = []
    for s, q in enumerate(caps_raw):
        if not (isinstance(q, int) and q >= 1):
            problems.append(f"school {s}: capacity must be a positive integer, got {q!r}")
            q = 1
        capacities.append(q)

    fpf = set()
    for s in fpf_raw:
        if not (isinstance(s, int) and 0 <= s < m):
            problems.append(f"unknown school {s} in fpf_schools")
        else:
            fpf.add(s)

    if problems:
        raise InstanceValidationError(problems)
    if n <= m:
        warnings.warn(
            f"instance has {n} students for {m} schools; constructions assuming excess "
            "demand may degenerate",
            SmallMarketWarning,
            stacklevel=2,
        )
    return Instance(
        preferences=tuple(preferences),
        priorities=tuple(priorities),
        capacities=tuple(capacities),
        fpf_schools=frozenset(fpf),
    )


def truncate_preferences(pref, k: int):
    """Prefix of ``pref`` keeping at most the first ``k`` acceptable schools."""
    if k < 1:
        raise ValueError("truncation length must be >= 1")
    return tuple(pref[:k])


def uniform_limits(instance: Instance, k: int):
    """ConstraintVector applying the same limit ``k`` to every student."""
    if k < 1:
        raise ValueError("limit must be >= 1")
    return (k,) * instance.n_students


def truncate_profile(instance: Instance, limits) -> Instance:
    """Instance with each student's list cut to her own limit.

    ``limits`` is either a single positive int applied uniformly or a
    per-student sequence covering every student.  Priorities, capacities and
    the FPF set are unchanged.
    """
    if isinstance(limits, int):
        limits = uniform_limits(instance, limits)
    if len(limits) != instance.n_students:
        raise ValueError(
            f"limits cover {len(limits)} students, instance has {instance.n_students}"
        )
    for i, k in enumerate(limits):
        if k < 1:
            raise ValueError(f"student {i}: limit must be >= 1, got {k}")
    return Instance(
        preferences=tuple(
            truncate_preferences(pref, k) for pref, k in zip(instance.preferences, limits)
        ),
        priorities=instance.priorities,
        capacities=instance.capacities,
        fpf_schools=instance.fpf_schools,
    )


def rank_of(pref, school: int, n_schools: int) -> int:
    """1-based position of ``school`` in ``pref``; unacceptable schools share
    the sentinel rank ``n_schools + 1``."""
    for t, s in enumerate(pref):
        if s == school:
            return t + 1
    return n_schools + 1
