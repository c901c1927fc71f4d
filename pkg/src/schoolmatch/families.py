"""Seeded random families and exhaustive enumerations of instances.

Random draws use stdlib ``random.Random`` so identical seeds give identical
instances on every platform.  Exhaustive enumeration walks every preference
profile (ordered school subsets per student) crossed with the configured
priority profiles, in a fixed canonical order.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field

from .errors import SizeGuardError
from .model import Instance
from .strategy import all_reports

#: hard guards for full preference x priority sweeps
MAX_EXHAUSTIVE_STUDENTS = 4
MAX_EXHAUSTIVE_SCHOOLS = 3
MAX_EXHAUSTIVE_COUNT = 2_500_000


@dataclass(frozen=True)
class FamilyConfig:
    """Describes one family of instances.

    ``n_students``/``n_schools`` are exact counts or inclusive (lo, hi)
    ranges (ranges only in random mode).  ``priority_profiles`` pins the
    priority side of an exhaustive sweep to explicit profiles, each a tuple
    of per-school orders.  ``fpf_policy`` is "none", "all", "random"
    (nonempty, random mode only), or an explicit frozenset of schools.
    """

    n_students: object = (3, 5)
    n_schools: object = (2, 4)
    capacity: tuple = (1, 1)
    priority_mode: str = "arbitrary"  # or "common"
    priority_profiles: tuple | None = None
    fpf_policy: object = "none"
    mode: str = "random"  # or "exhaustive"
    samples: int = 1000
    seed: int = 0
    require_excess_demand: bool = True

    def describe(self) -> str:
        size = f"students={self.n_students} schools={self.n_schools} capacity={self.capacity}"
        prio = (
            f"{len(self.priority_profiles)} fixed priority profile(s)"
            if self.priority_profiles is not None
            else f"{self.priority_mode} priorities"
        )
        fpf = f" fpf={self.fpf_policy}" if self.fpf_policy != "none" else ""
        if self.mode == "exhaustive":
            return f"exhaustive sweep: {size}, {prio}{fpf}"
        return f"random family: {size}, {prio}{fpf}, {self.samples} samples, seed {self.seed}"


def _span(value):
    if isinstance(value, int):
        return value, value
    lo, hi = value
    return int(lo), int(hi)


def _fpf_set(policy, m: int, rng):
    if policy == "none":
        return frozenset()
    if policy == "all":
        return frozenset(range(m))
    if policy == "random":
        if m < 1:
            return frozenset()
        bits = rng.randrange(1, 1 << m)
        return frozenset(s for s in range(m) if bits >> s & 1)
    return frozenset(policy)


def random_instance(config: FamilyConfig, seed: int) -> Instance:
    """One uniform draw from the family; fully determined by ``seed``.

    Draw order (fixed for reproducibility): school count, student count,
    preference list per student, priority order(s), capacities, FPF set.
    """
    rng = random.Random(seed)
    slo, shi = _span(config.n_schools)
    m = rng.randint(slo, shi)
    ilo, ihi = _span(config.n_students)
    if config.require_excess_demand:
        ilo = max(ilo, m + 1)
        ihi = max(ihi, ilo)
    n = rng.randint(ilo, ihi)

    reports = all_reports(m)
    preferences = tuple(reports[rng.randrange(len(reports))] for _ in range(n))

    if config.priority_mode == "common":
        order = tuple(rng.sample(range(n), n))
        priorities = (order,) * m
    else:
        priorities = tuple(tuple(rng.sample(range(n), n)) for _ in range(m))

    clo, chi = config.capacity
    capacities = tuple(rng.randint(clo, chi) for _ in range(m))
    fpf = _fpf_set(config.fpf_policy, m, rng)
    return Instance(preferences, priorities, capacities, fpf)


def _priority_profiles(config: FamilyConfig, n: int, m: int):
    if config.priority_profiles is not None:
        return tuple(tuple(tuple(order) for order in prof) for prof in config.priority_profiles)
    if config.priority_mode == "common":
        return tuple((perm,) * m for perm in itertools.permutations(range(n)))
    raise ValueError(
        "exhaustive sweeps over arbitrary priorities need explicit priority_profiles"
    )


def exhaustive_count(config: FamilyConfig) -> int:
    """Closed-form size of the exhaustive family."""
    n, m = _span(config.n_students)[0], _span(config.n_schools)[0]
    n_reports = len(all_reports(m))
    n_prios = (
        len(config.priority_profiles)
        if config.priority_profiles is not None
        else math.factorial(n)
    )
    return n_reports**n * n_prios


def enumerate_instances(config: FamilyConfig):
    """Every instance of an exhaustive family, in canonical order.

    Preference profiles vary outermost (lexicographic over report indices),
    priority profiles innermost.  Guarded at 4 students x 3 schools.
    """
    if config.mode != "exhaustive":
        raise ValueError("enumerate_instances needs an exhaustive-mode config")
    ilo, ihi = _span(config.n_students)
    slo, shi = _span(config.n_schools)
    if ilo != ihi or slo != shi:
        raise ValueError("exhaustive sweeps need exact student and school counts")
    n, m = ilo, slo
    if n > MAX_EXHAUSTIVE_STUDENTS or m > MAX_EXHAUSTIVE_SCHOOLS:
        raise SizeGuardError(
            f"exhaustive sweeps guarded at {MAX_EXHAUSTIVE_STUDENTS} students x "
            f"{MAX_EXHAUSTIVE_SCHOOLS} schools"
        )
    if config.capacity[0] != config.capacity[1]:
        raise ValueError("exhaustive sweeps need a fixed capacity")
    if config.fpf_policy == "random":
        raise ValueError("exhaustive sweeps need a deterministic fpf policy")
    if exhaustive_count(config) > MAX_EXHAUSTIVE_COUNT:
        raise SizeGuardError(f"exhaustive family exceeds {MAX_EXHAUSTIVE_COUNT} instances")

    profiles = _priority_profiles(config, n, m)
    capacities = (config.capacity[0],) * m
    fpf = _fpf_set(config.fpf_policy, m, None)
    reports = all_reports(m)
    for pref_profile in itertools.product(reports, repeat=n):
        for priorities in profiles:
            yield Instance(pref_profile, priorities, capacities, fpf)


def instances(config: FamilyConfig):
    """The family's instance stream: the full enumeration in exhaustive
    mode, otherwise ``samples`` seeded draws (seed, seed+1, ...)."""
    if config.mode == "exhaustive":
        yield from enumerate_instances(config)
    else:
        for j in range(config.samples):
            yield random_instance(config, config.seed + j)


def staggered_priorities(n: int, m: int) -> tuple:
    """Fixed non-common priority profile: school j's order is the identity
    rotated by j."""
    return tuple(tuple((j + t) % n for t in range(n)) for j in range(m))


def common_identity_priorities(n: int, m: int) -> tuple:
    return (tuple(range(n)),) * m
