"""The five assignment mechanisms plus the constrained wrapper.

Every mechanism is a deterministic pure function from an Instance to a
Matching.  ``run_mechanism`` dispatches on a MechanismSpec and applies the
ranking constraint (uniform or per-student) before running; the result is
identical to truncating the profile first and running unconstrained.

``deferred_acceptance`` and ``boston`` optionally return a RoundTrace built
by an independent round-by-round implementation; replaying a trace
reproduces the returned matching bit for bit.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from . import _kernels as kernels
from .errors import CommonPriorityError
from .model import Instance, Matching, rank_of, truncate_preferences


class Mechanism(enum.Enum):
    GS = "gs"
    BOSTON = "boston"
    FPF = "fpf"
    SD = "sd"
    CHINESE = "chinese"


@dataclass(frozen=True)
class MechanismSpec:
    """A mechanism choice plus its parameters.

    ``constraint`` is None (no ranking limit), a uniform positive int, or a
    per-student tuple of positive ints.  ``parallel_e`` is the round length
    of the sequential mechanism and must be present exactly for that kind.
    """

    kind: Mechanism
    constraint: object = None
    parallel_e: int | None = None

    def __post_init__(self):
        if (self.parallel_e is not None) != (self.kind is Mechanism.CHINESE):
            raise ValueError("parallel_e must be given exactly when kind is CHINESE")
        if self.parallel_e is not None and self.parallel_e < 1:
            raise ValueError("parallel_e must be >= 1")
        if isinstance(self.constraint, int):
            if self.constraint < 1:
                raise ValueError("constraint must be >= 1")
        elif self.constraint is not None:
            c = tuple(self.constraint)
            if any(k < 1 for k in c):
                raise ValueError("all per-student constraints must be >= 1")
            object.__setattr__(self, "constraint", c)

    def label(self) -> str:
        name = self.kind.value
        if self.kind is Mechanism.CHINESE:
            name += f"^({self.parallel_e})"
        if isinstance(self.constraint, int):
            name += f"^{self.constraint}"
        elif self.constraint is not None:
            name += f"^{list(self.constraint)}"
        return name


@dataclass(frozen=True)
class RoundRecord:
    """One round: who applied where, who is (tentatively) in, who was refused."""

    applications: tuple  # (student, school) pairs, ascending student
    accepted: tuple  # DA: full tentative state after the round; Boston: new finals
    rejected: tuple


@dataclass(frozen=True)
class RoundTrace:
    mechanism: str  # "gs" or "boston"
    n_students: int
    rounds: tuple

    def replay(self) -> Matching:
        assign = [-1] * self.n_students
        if self.mechanism == "gs":
            if self.rounds:
                for i, s in self.rounds[-1].accepted:
                    assign[i] = s
        else:
            for record in self.rounds:
                for i, s in record.accepted:
                    assign[i] = s
        return Matching(tuple(assign))


def _full_limits(instance: Instance) -> np.ndarray:
    return np.full(instance.n_students, max(instance.n_schools, 1), dtype=np.int32)


def _limits_array(instance: Instance, constraint) -> np.ndarray:
    if constraint is None:
        return _full_limits(instance)
    if isinstance(constraint, int):
        return np.full(instance.n_students, constraint, dtype=np.int32)
    if len(constraint) != instance.n_students:
        raise ValueError("per-student constraint does not cover every student")
    return np.asarray(constraint, dtype=np.int32)


def _da_limited(instance: Instance, limits: np.ndarray) -> Matching:
    p = instance.packed()
    assign = kernels.da(p.prefs, p.plen, limits, p.prank, p.cap)
    return Matching(tuple(int(a) for a in assign))


def _boston_limited(instance: Instance, limits: np.ndarray) -> Matching:
    p = instance.packed()
    assign = kernels.boston(p.prefs, p.plen, limits, p.prank, p.cap)
    return Matching(tuple(int(a) for a in assign))


def _fpf_limited(instance: Instance, limits: np.ndarray) -> Matching:
    p = instance.packed()
    adjusted = kernels.fpf_adjust(p.prefs, p.plen, limits, p.prank, p.fpf_mask)
    assign = kernels.da(p.prefs, p.plen, limits, adjusted, p.cap)
    return Matching(tuple(int(a) for a in assign))


def _require_common_priority(instance: Instance) -> None:
    if not instance.has_common_priority():
        raise CommonPriorityError("all schools must share one identical priority order")


def _sd_limited(instance: Instance, limits: np.ndarray) -> Matching:
    """Greedy sequential picks; independent of the deferred-acceptance kernel."""
    _require_common_priority(instance)
    remaining = list(instance.capacities)
    assign = [-1] * instance.n_students
    order = instance.priorities[0] if instance.n_schools else range(instance.n_students)
    for i in order:
        pref = instance.preferences[i][: int(limits[i])]
        for s in pref:
            if remaining[s] > 0:
                remaining[s] -= 1
                assign[i] = s
                break
    return Matching(tuple(assign))


def _chinese_limited(instance: Instance, e: int, limits: np.ndarray) -> Matching:
    if e < 1:
        raise ValueError("round length e must be >= 1")
    p = instance.packed()
    n, m = instance.n_students, instance.n_schools
    remaining = p.cap.copy()
    final = [-1] * n
    active = [plen > 0 for plen in p.plen]
    r = 0
    while True:
        r += 1
        round_cap = r * e
        round_limits = np.array(
            [min(int(limits[i]), round_cap) if active[i] else 0 for i in range(n)],
            dtype=np.int32,
        )
        assign = kernels.da(p.prefs, p.plen, round_limits, p.prank, remaining)
        for i in range(n):
            s = int(assign[i])
            if s >= 0:
                final[i] = s
                remaining[s] -= 1
                active[i] = False
        # stop when no seat remains, when no unmatched student finds a school
        # with a seat acceptable, or when the round constraint has gone slack
        # (a further round is a fixed point)
        if not remaining.any():
            break
        open_schools = {s for s in range(m) if remaining[s] > 0}
        if not any(
            active[i] and any(s in open_schools for s in instance.preferences[i][: int(limits[i])])
            for i in range(n)
        ):
            break
        if round_cap >= m:
            break
    return Matching(tuple(final))


def deferred_acceptance(instance: Instance, *, trace: bool = False):
    """Student-proposing deferred acceptance; the student-optimal stable
    matching of the instance as given."""
    if not trace:
        return _da_limited(instance, _full_limits(instance))
    matching, rounds = _da_rounds(instance)
    return matching, RoundTrace("gs", instance.n_students, tuple(rounds))


def boston(instance: Instance, *, trace: bool = False):
    """Immediate acceptance: seats taken at a round never reopen."""
    if not trace:
        return _boston_limited(instance, _full_limits(instance))
    matching, rounds = _boston_rounds(instance)
    return matching, RoundTrace("boston", instance.n_students, tuple(rounds))


def fpf_adjusted_priorities(instance: Instance) -> tuple:
    """Priority profile after the first-preference-first adjustment.

    Equal-preference schools keep their order verbatim; each school in the
    FPF set reorders students by the position they gave it (unlisted counts
    as the sentinel rank), original priority breaking ties within a class.
    """
    adjusted = []
    m = instance.n_schools
    for s in range(m):
        order = instance.priorities[s]
        if s not in instance.fpf_schools:
            adjusted.append(order)
            continue
        pos = {i: t for t, i in enumerate(order)}
        adjusted.append(
            tuple(sorted(order, key=lambda i: (rank_of(instance.preferences[i], s, m), pos[i])))
        )
    return tuple(adjusted)


def first_preference_first(instance: Instance, *, trace: bool = False):
    """Deferred acceptance on the FPF-adjusted priorities."""
    if not trace:
        return _fpf_limited(instance, _full_limits(instance))
    shadow = Instance(
        preferences=instance.preferences,
        priorities=fpf_adjusted_priorities(instance),
        capacities=instance.capacities,
        fpf_schools=instance.fpf_schools,
    )
    return deferred_acceptance(shadow, trace=True)


def serial_dictatorship(instance: Instance) -> Matching:
    """Students pick in the common priority order, best free seat first.

    Raises CommonPriorityError when schools do not share one order.
    """
    return _sd_limited(instance, _full_limits(instance))


def chinese_parallel(instance: Instance, e: int) -> Matching:
    """Rounds of deferred acceptance with list limit r*e; round matches are
    final and capacities carry over reduced."""
    return _chinese_limited(instance, e, _full_limits(instance))


def run_mechanism(spec: MechanismSpec, instance: Instance) -> Matching:
    """Apply ``spec.constraint`` and dispatch to the named mechanism."""
    limits = _limits_array(instance, spec.constraint)
    if spec.kind is Mechanism.GS:
        return _da_limited(instance, limits)
    if spec.kind is Mechanism.BOSTON:
        return _boston_limited(instance, limits)
    if spec.kind is Mechanism.FPF:
        return _fpf_limited(instance, limits)
    if spec.kind is Mechanism.SD:
        return _sd_limited(instance, limits)
    return _chinese_limited(instance, spec.parallel_e, limits)


# -- round-by-round twins (trace producers, kernel-independent) ---------------


def _da_rounds(instance: Instance):
    n, m = instance.n_students, instance.n_schools
    prefs = instance.preferences
    pos = [{i: t for t, i in enumerate(order)} for order in instance.priorities]
    next_choice = [0] * n
    held = [[] for _ in range(m)]
    placed = [False] * n
    rounds = []
    while True:
        applications = []
        for i in range(n):
            if not placed[i] and next_choice[i] < len(prefs[i]):
                applications.append((i, prefs[i][next_choice[i]]))
        if not applications:
            break
        rejected = []
        for i, s in applications:
            held[s].append(i)
        for s in range(m):
            if len(held[s]) > instance.capacities[s]:
                held[s].sort(key=lambda i: pos[s][i])
                for i in held[s][instance.capacities[s] :]:
                    rejected.append((i, s))
                held[s] = held[s][: instance.capacities[s]]
        for i in range(n):
            placed[i] = False
        for s in range(m):
            for i in held[s]:
                placed[i] = True
        for i, _ in sorted(rejected):
            next_choice[i] += 1
        accepted = tuple(sorted((i, s) for s in range(m) for i in held[s]))
        rounds.append(
            RoundRecord(tuple(sorted(applications)), accepted, tuple(sorted(rejected)))
        )
        if not rejected:
            break
    assign = [-1] * n
    for s in range(m):
        for i in held[s]:
            assign[i] = s
    return Matching(tuple(assign)), rounds


def _boston_rounds(instance: Instance):
    n, m = instance.n_students, instance.n_schools
    prefs = instance.preferences
    pos = [{i: t for t, i in enumerate(order)} for order in instance.priorities]
    remaining = list(instance.capacities)
    assign = [-1] * n
    rounds = []
    t = 0
    while True:
        applications = [
            (i, prefs[i][t]) for i in range(n) if assign[i] == -1 and t < len(prefs[i])
        ]
        if not applications:
            break
        by_school = {}
        for i, s in applications:
            by_school.setdefault(s, []).append(i)
        accepted, rejected = [], []
        for s, apps in by_school.items():
            apps.sort(key=lambda i: pos[s][i])
            take = min(remaining[s], len(apps))
            for i in apps[:take]:
                assign[i] = s
                accepted.append((i, s))
            for i in apps[take:]:
                rejected.append((i, s))
            remaining[s] -= take
        rounds.append(
            RoundRecord(
                tuple(sorted(applications)), tuple(sorted(accepted)), tuple(sorted(rejected))
            )
        )
        t += 1
    return Matching(tuple(assign)), rounds
