"""Catalog of checkable claims over instance families.

Each claim pairs a universally quantified predicate (checked on every
instance of a configured family) with, where one exists, a named witness
fixture for the existential half.  Checks are falsification sweeps, not
proofs: "confirmed" means no counterexample was found on the family.

A counterexample report carries the instance document plus any auxiliary
draws (partitions, per-student limits), so replaying it standalone
reproduces the violation deterministically.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass

from .errors import LemmaViolationError, UnknownClaimError
from .fairness import blocking_students, count_blocking, is_stable, stable_set_bruteforce
from .families import FamilyConfig, instances
from .fixtures import fixture_instance
from .mechanisms import Mechanism, MechanismSpec, chinese_parallel, run_mechanism
from .model import Instance
from .serialize import instance_to_document, document_to_instance
from .strategy import (
    SophisticationPartition,
    _improvers,
    manipulating_students,
    sd_equilibrium_outcome,
    semi_sophisticated_outcome,
)


def _gs(k=None):
    return MechanismSpec(Mechanism.GS, k)


def _boston(k=None):
    return MechanismSpec(Mechanism.BOSTON, k)


def _sd(k=None):
    return MechanismSpec(Mechanism.SD, k)


def _fpf(k=None):
    return MechanismSpec(Mechanism.FPF, k)


def _stable(spec, inst):
    return is_stable(run_mechanism(spec, inst), inst)


def _count(spec, inst):
    return count_blocking(run_mechanism(spec, inst), inst)


def _mdoc(matching):
    return list(matching.assignment)


@dataclass(frozen=True)
class ClaimEntry:
    claim_id: str
    title: str
    defaults: dict
    family: object  # params -> FamilyConfig
    predicate: object  # (instance, params, aux) -> (violation | None, stats | None)
    draw_aux: object = None  # (instance, params, rng) -> dict
    witness: object = None  # params -> dict
    validate: object = None  # params -> None (raises on bad params)


@dataclass(frozen=True)
class ClaimReport:
    claim_id: str
    title: str
    params: dict
    family: str
    instances_checked: int
    stats: dict
    result: str  # "confirmed" | "counterexample"
    counterexample: dict | None
    witness: dict | None
    seed: int | None
    wall_time: float

    @property
    def passed(self) -> bool:
        return self.result == "confirmed" and (self.witness is None or self.witness.get("ok"))

    def to_document(self) -> dict:
        # wall_time deliberately excluded: reports must be byte-stable
        return {
            "claim": self.claim_id,
            "title": self.title,
            "params": _jsonable(self.params),
            "family": self.family,
            "instances_checked": self.instances_checked,
            "stats": dict(sorted(self.stats.items())),
            "result": self.result,
            "counterexample": self.counterexample,
            "witness": self.witness,
            "seed": self.seed,
            "passed": self.passed,
        }


def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, set, frozenset)):
        items = [_jsonable(v) for v in value]
        return sorted(items, key=repr) if isinstance(value, (set, frozenset)) else items
    return value


# -- universal predicates ------------------------------------------------------


def _pred_t1(inst, params, aux):
    k = params["k"]
    if _stable(_boston(k), inst) and not _stable(_gs(k), inst):
        return {"reason": f"boston^{k} stable but gs^{k} unstable"}, None
    return None, None


def _pred_p1(inst, params, aux):
    k = params["k"]
    if not inst.has_common_priority() or not inst.fpf_schools:
        raise ValueError("P1 needs a common-priority family with nonempty fpf sets")
    if _stable(_fpf(k), inst) and not _stable(_sd(k), inst):
        return {"reason": f"fpf^{k} stable but sd^{k} unstable"}, None
    return None, None


def _pred_l1(inst, params, aux):
    k = params["k"]
    constrained = run_mechanism(_gs(k), inst)
    unconstrained = run_mechanism(_gs(), inst)
    stable = is_stable(constrained, inst)
    if stable != (constrained == unconstrained):
        return {
            "reason": "stability and fixed-point disagree",
            "stable": stable,
            "constrained": _mdoc(constrained),
            "unconstrained": _mdoc(unconstrained),
        }, None
    return None, None


def _pred_t2(inst, params, aux):
    k, l = params["k"], params["l"]
    if _stable(_gs(l), inst) and not _stable(_gs(k), inst):
        return {"reason": f"gs^{l} stable but gs^{k} unstable"}, None
    return None, None


def _pred_t3(inst, params, aux):
    for low, high in params["pairs"]:
        if is_stable(chinese_parallel(inst, low), inst) and not is_stable(
            chinese_parallel(inst, high), inst
        ):
            return {"reason": f"chinese e={low} stable but e={high} unstable"}, None
    return None, None


def _pred_t4(inst, params, aux):
    k, l = params["k"], params["l"]
    shorter, longer = _count(_gs(l), inst), _count(_gs(k), inst)
    if shorter < longer:
        return {"reason": f"gs^{l} has {shorter} blocking students, gs^{k} has {longer}"}, None
    return None, ({"strict": 1} if shorter > longer else None)


def _pred_t5(inst, params, aux):
    k, l = params["k"], params["l"]
    part = SophisticationPartition(inst.n_students, frozenset(aux["sincere"]))
    shorter = count_blocking(sd_equilibrium_outcome(inst, part, l).matching, inst)
    longer = count_blocking(sd_equilibrium_outcome(inst, part, k).matching, inst)
    if shorter < longer:
        return {
            "reason": f"equilibrium sd^{l} has {shorter} blocking students, sd^{k} has {longer}"
        }, None
    return None, ({"strict": 1} if shorter > longer else None)


def _pred_t6(inst, params, aux):
    k, l = params["k"], params["l"]
    shorter = count_blocking(semi_sophisticated_outcome(inst, l)[0], inst)
    longer = count_blocking(semi_sophisticated_outcome(inst, k)[0], inst)
    if shorter < longer:
        return {
            "reason": f"equilibrium gs^{l} has {shorter} blocking students, gs^{k} has {longer}"
        }, None
    return None, ({"strict": 1} if shorter > longer else None)


def _pred_tm(inst, params, aux):
    k = params["k"]
    b_out = run_mechanism(_boston(k), inst)
    b_block = blocking_students(b_out, inst)
    if b_block:
        # every blocking student must have an improving misreport
        improvers = _improvers(_boston(k), inst, inst.preferences, b_block)
        if improvers != b_block:
            return {
                "reason": "blocking student of boston outcome does not manipulate",
                "blocking": sorted(b_block),
                "manipulating_within": sorted(improvers),
            }, None
    g_out = run_mechanism(_gs(k), inst)
    g_block = blocking_students(g_out, inst)
    outside = frozenset(range(inst.n_students)) - g_block
    if outside:
        # no non-blocking student may have an improving misreport
        rogue = _improvers(_gs(k), inst, inst.preferences, outside)
        if rogue:
            return {
                "reason": "manipulator of constrained gs is not a blocking student",
                "blocking": sorted(g_block),
                "manipulating_outside": sorted(rogue),
            }, None
    return None, None


def _pred_c1(inst, params, aux):
    k = params["k"]
    # (i) a non-manipulable boston run is stable; manipulation only needs
    # checking on unstable instances (the implication is vacuous otherwise)
    if not _stable(_boston(k), inst) and not manipulating_students(_boston(k), inst):
        return {"reason": f"boston^{k} non-manipulable but unstable"}, None
    # (ii) a stable gs run is non-manipulable
    if _stable(_gs(k), inst) and manipulating_students(_gs(k), inst):
        return {"reason": f"gs^{k} stable but manipulable"}, None
    return None, None


def _pred_p5(inst, params, aux):
    k = params["k"]
    stable = _stable(_sd(k), inst)
    manipulable = bool(manipulating_students(_sd(k), inst))
    if stable == manipulable:
        return {"reason": f"sd^{k}: stable={stable}, manipulable={manipulable}"}, None
    return None, None


def _pred_p6(inst, params, aux):
    import numpy as np

    from . import _kernels as kernels

    k = params["k"]
    subsets = params["fpf_subsets"]
    m = inst.n_schools
    if subsets == "all_nonempty":
        subsets = [
            frozenset(s for s in range(m) if bits >> s & 1) for bits in range(1, 1 << m)
        ]
    p = inst.packed()
    limits = np.full(inst.n_students, k, dtype=np.int32)
    gs_manip = None
    for subset in subsets:
        fpf_mask = np.zeros(m, dtype=np.uint8)
        for s in subset:
            fpf_mask[s] = 1
        adjusted = kernels.fpf_adjust(p.prefs, p.plen, limits, p.prank, fpf_mask)
        assign = kernels.da(p.prefs, p.plen, limits, adjusted, p.cap)
        # mechanism outcomes are individually rational by construction, so
        # stability reduces to the absence of blocking students
        if kernels.blocking_mask(p.prefs, p.plen, p.prank, p.cap, assign).any():
            continue
        if gs_manip is None:
            gs_manip = manipulating_students(_gs(k), inst)
        if gs_manip:
            return {
                "reason": f"fpf^{k} stable for fpf set {sorted(subset)} but gs^{k} manipulable",
                "manipulating": sorted(gs_manip),
            }, None
    return None, None


def _pred_rh(inst, params, aux):
    matchings = stable_set_bruteforce(inst)
    if not matchings:
        return {"reason": "no stable matching found"}, None
    matched = {m.matched_students() for m in matchings}
    fills = {m.fill_counts(inst.n_schools) for m in matchings}
    if len(matched) != 1 or len(fills) != 1:
        return {
            "reason": "stable matchings differ in matched students or fills",
            "stable_set": [_mdoc(m) for m in matchings],
        }, None
    return None, {"stable_matchings": len(matchings)}


def _pred_l3(inst, params, aux):
    limits = tuple(aux["limits"])
    matching = run_mechanism(MechanismSpec(Mechanism.GS, limits), inst)
    blockers = blocking_students(matching, inst)
    matched_blockers = [i for i in blockers if matching.assignment[i] != -1]
    if matched_blockers:
        return {
            "reason": "matched student blocks a per-student-truncated outcome",
            "limits": list(limits),
            "students": matched_blockers,
        }, None
    return None, None


def _pred_l5(inst, params, aux):
    lo, hi = tuple(aux["l_limits"]), tuple(aux["k_limits"])
    shorter = _count(MechanismSpec(Mechanism.GS, lo), inst)
    longer = _count(MechanismSpec(Mechanism.GS, hi), inst)
    if shorter < longer:
        return {
            "reason": "per-student shortening decreased the blocking count",
            "l_limits": list(lo),
            "k_limits": list(hi),
        }, None
    return None, ({"strict": 1} if shorter > longer else None)


def _pred_l6(inst, params, aux):
    try:
        semi_sophisticated_outcome(inst, params["l"])
    except LemmaViolationError as exc:
        return {"reason": str(exc)}, None
    return None, None


# -- auxiliary draws -----------------------------------------------------------


def _aux_partition(inst, params, rng):
    return {"sincere": sorted(i for i in range(inst.n_students) if rng.random() < 0.5)}


def _aux_limits(inst, params, rng):
    m = inst.n_schools
    return {"limits": [rng.randint(1, max(1, m)) for _ in range(inst.n_students)]}


def _aux_limit_pairs(inst, params, rng):
    m = max(2, inst.n_schools)
    lo = [rng.randint(2, m) for _ in range(inst.n_students)]
    hi = [rng.randint(l, m) for l in lo]
    return {"l_limits": lo, "k_limits": hi}


# -- witnesses -----------------------------------------------------------------


def _witness_t1(params):
    k = params["k"]
    inst = fixture_instance("T1PROOF")
    new_stable = _stable(_gs(k), inst)
    old_stable = _stable(_boston(k), inst)
    return {
        "fixture": "T1PROOF",
        "new_stable": new_stable,
        "old_stable": old_stable,
        "ok": new_stable and not old_stable,
    }


def _witness_p1(params):
    k = params["k"]
    base = fixture_instance("T1PROOF")
    inst = Instance(
        base.preferences, base.priorities, base.capacities, frozenset(range(base.n_schools))
    )
    new_stable = _stable(_sd(k), inst)
    old_stable = _stable(_fpf(k), inst)
    return {
        "fixture": "T1PROOF with every school first-preference-first",
        "new_stable": new_stable,
        "old_stable": old_stable,
        "ok": new_stable and not old_stable,
    }


def _ladder_instance(k):
    """Unit capacities, k schools, k+1 students all ranking them identically."""
    prefs = (tuple(range(k)),) * (k + 1)
    prios = (tuple(range(k + 1)),) * k
    return Instance(prefs, prios, (1,) * k)


def _witness_t2(params):
    k, l = params["k"], params["l"]
    inst = _ladder_instance(k)
    return {
        "fixture": f"common-ranking ladder ({k + 1} students, {k} unit schools)",
        "new_stable": _stable(_gs(k), inst),
        "old_stable": _stable(_gs(l), inst),
        "ok": _stable(_gs(k), inst) and not _stable(_gs(l), inst),
    }


def _witness_t3(params):
    pairs = [(lo, hi) for lo, hi in params["pairs"] if lo == 1 and hi >= 2]
    if not pairs:
        return None
    inst = fixture_instance("T1PROOF")
    ok = all(
        is_stable(chinese_parallel(inst, hi), inst)
        and not is_stable(chinese_parallel(inst, lo), inst)
        for lo, hi in pairs
    )
    return {"fixture": "T1PROOF", "pairs": [list(p) for p in pairs], "ok": ok}


def _witness_t4(params):
    k, l = params["k"], params["l"]
    inst = _ladder_instance(k)
    shorter, longer = _count(_gs(l), inst), _count(_gs(k), inst)
    return {
        "fixture": f"common-ranking ladder ({k + 1} students, {k} unit schools)",
        "count_short": shorter,
        "count_long": longer,
        "ok": shorter > longer,
    }


# -- default families ----------------------------------------------------------


def _fam(params, **overrides):
    base = dict(
        n_students=(3, 5),
        n_schools=(2, 4),
        capacity=(1, 2),
        priority_mode="arbitrary",
        mode="random",
        samples=params.get("samples", 1000),
        seed=params.get("seed", 0),
    )
    base.update(overrides)
    return FamilyConfig(**base)


def _require(cond, msg):
    if not cond:
        raise ValueError(msg)


CATALOG = {}


def _register(entry: ClaimEntry):
    CATALOG[entry.claim_id] = entry


_register(ClaimEntry(
    "T1",
    "constrained deferred acceptance is more fair by stability than constrained immediate acceptance",
    {"k": 2},
    lambda p: _fam(p),
    _pred_t1,
    witness=_witness_t1,
    validate=lambda p: _require(p["k"] > 1, "T1 needs k > 1"),
))
_register(ClaimEntry(
    "P1",
    "under a common priority, constrained sequential picks are more fair by stability than constrained first-preference-first",
    {"k": 2},
    lambda p: _fam(p, priority_mode="common", fpf_policy="random"),
    _pred_p1,
    witness=_witness_p1,
    validate=lambda p: _require(p["k"] > 1, "P1 needs k > 1"),
))
_register(ClaimEntry(
    "L1",
    "a constrained deferred-acceptance outcome is stable iff the constraint did not change it",
    {"k": 2},
    lambda p: _fam(p),
    _pred_l1,
    validate=lambda p: _require(p["k"] > 1, "L1 needs k > 1"),
))
_register(ClaimEntry(
    "T2",
    "longer-list deferred acceptance is more fair by stability than shorter-list",
    {"k": 3, "l": 2},
    lambda p: _fam(p),
    _pred_t2,
    witness=_witness_t2,
    validate=lambda p: _require(p["k"] > p["l"] >= 1, "T2 needs k > l >= 1"),
))
_register(ClaimEntry(
    "T3",
    "a sequential-round mechanism with multiple round length is more fair by stability",
    {"pairs": ((1, 2), (1, 3), (2, 4))},
    lambda p: _fam(p),
    _pred_t3,
    witness=_witness_t3,
    validate=lambda p: _require(
        all(hi % lo == 0 and hi >= lo >= 1 for lo, hi in p["pairs"]),
        "T3 needs divisible round-length pairs",
    ),
))
_register(ClaimEntry(
    "T4",
    "longer-list deferred acceptance is more fair by counting than shorter-list",
    {"k": 3, "l": 2},
    lambda p: _fam(p),
    _pred_t4,
    witness=_witness_t4,
    validate=lambda p: _require(p["k"] > p["l"] >= 1, "T4 needs k > l >= 1"),
))
_register(ClaimEntry(
    "T5",
    "with sincere and best-responding students, shorter-list sequential picks have at least as many blocking students in equilibrium",
    {"k": 3, "l": 2},
    lambda p: _fam(p, priority_mode="common"),
    _pred_t5,
    draw_aux=_aux_partition,
    validate=lambda p: _require(p["k"] > p["l"] > 1, "T5 needs k > l > 1"),
))
_register(ClaimEntry(
    "T6",
    "with semi-sophisticated students, shorter-list deferred acceptance has at least as many blocking students in equilibrium",
    {"k": 3, "l": 2},
    lambda p: _fam(p),
    _pred_t6,
    validate=lambda p: _require(p["k"] > p["l"] > 1, "T6 needs k > l > 1"),
))
_register(ClaimEntry(
    "TM",
    "blocking students of immediate acceptance manipulate it; manipulators of deferred acceptance block it",
    {"k": 2},
    lambda p: _fam(p),
    _pred_tm,
    validate=lambda p: _require(p["k"] > 1, "TM needs k > 1"),
))
_register(ClaimEntry(
    "C1",
    "non-manipulable immediate acceptance is stable; stable deferred acceptance is non-manipulable",
    {"k": 2},
    lambda p: _fam(p),
    _pred_c1,
    validate=lambda p: _require(p["k"] > 1, "C1 needs k > 1"),
))
_register(ClaimEntry(
    "P5",
    "constrained sequential picks are stable exactly when non-manipulable",
    {"k": 2},
    lambda p: _fam(p, priority_mode="common"),
    _pred_p5,
    validate=lambda p: _require(p["k"] > 1, "P5 needs k > 1"),
))
_register(ClaimEntry(
    "P6",
    "where constrained first-preference-first is stable, constrained deferred acceptance is non-manipulable",
    {"k": 2, "fpf_subsets": "all_nonempty"},
    lambda p: _fam(p),
    _pred_p6,
    validate=lambda p: _require(p["k"] > 1, "P6 needs k > 1"),
))
_register(ClaimEntry(
    "RH",
    "all stable matchings of an instance match the same students and fill each school equally",
    {},
    lambda p: _fam(p),
    _pred_rh,
))
_register(ClaimEntry(
    "L3",
    "every blocking student of a per-student-truncated deferred-acceptance outcome is unmatched",
    {},
    lambda p: _fam(p),
    _pred_l3,
    draw_aux=_aux_limits,
))
_register(ClaimEntry(
    "L5",
    "per-student list shortening never decreases the number of blocking students",
    {},
    lambda p: _fam(p),
    _pred_l5,
    draw_aux=_aux_limit_pairs,
))
_register(ClaimEntry(
    "L6",
    "the semi-sophisticated equilibrium equals deferred acceptance under per-student limits l + r_i",
    {"l": 2},
    lambda p: _fam(p),
    _pred_l6,
    validate=lambda p: _require(p["l"] > 1, "L6 needs l > 1"),
))


def claim_ids():
    return tuple(CATALOG)


def check_entry(entry: ClaimEntry, config: FamilyConfig, **params) -> ClaimReport:
    merged = dict(entry.defaults)
    merged.update(params)
    if entry.validate is not None:
        entry.validate(merged)
    start = time.perf_counter()
    counterexample = None
    stats = {}
    checked = 0
    seed = config.seed if config.mode == "random" else None
    for idx, inst in enumerate(instances(config)):
        aux = {}
        if entry.draw_aux is not None:
            aux = entry.draw_aux(inst, merged, random.Random(f"{config.seed}:{idx}:aux"))
        violation, extra = entry.predicate(inst, merged, aux)
        checked += 1
        if extra:
            for key, val in extra.items():
                stats[key] = stats.get(key, 0) + val
        if violation is not None:
            counterexample = {
                "index": idx,
                "instance": instance_to_document(inst),
                "aux": aux,
                "details": violation,
            }
            break
    witness = entry.witness(merged) if entry.witness is not None else None
    return ClaimReport(
        claim_id=entry.claim_id,
        title=entry.title,
        params=merged,
        family=config.describe(),
        instances_checked=checked,
        stats=stats,
        result="confirmed" if counterexample is None else "counterexample",
        counterexample=counterexample,
        witness=witness,
        seed=seed,
        wall_time=time.perf_counter() - start,
    )


def configure(
    claim_id: str,
    *,
    students: int | None = None,
    schools: int | None = None,
    samples: int | None = None,
    seed: int | None = None,
    exhaustive: bool = False,
    common_priority: bool = False,
    **params,
) -> FamilyConfig:
    """Build a family config for a claim: its documented default family with
    CLI-style overrides applied, keeping claim side-conditions intact."""
    from dataclasses import replace

    from .families import common_identity_priorities, staggered_priorities

    try:
        entry = CATALOG[claim_id.upper()]
    except KeyError:
        raise UnknownClaimError(claim_id)
    merged = dict(entry.defaults)
    merged.update(params)
    base = entry.family(merged)
    if exhaustive:
        n = students or 4
        m = schools or 3
        if common_priority or base.priority_mode == "common":
            profiles = (common_identity_priorities(n, m),)
        else:
            profiles = (common_identity_priorities(n, m), staggered_priorities(n, m))
        return replace(
            base,
            n_students=n,
            n_schools=m,
            capacity=(1, 1),
            priority_profiles=profiles,
            mode="exhaustive",
            fpf_policy=base.fpf_policy if base.fpf_policy != "random" else "all",
        )
    overrides = {}
    if students is not None:
        lo = min(base.n_students[0] if isinstance(base.n_students, tuple) else students, students)
        overrides["n_students"] = (lo, students)
    if schools is not None:
        lo = min(base.n_schools[0] if isinstance(base.n_schools, tuple) else schools, schools)
        overrides["n_schools"] = (lo, schools)
    if samples is not None:
        overrides["samples"] = samples
    if seed is not None:
        overrides["seed"] = seed
    if common_priority:
        overrides["priority_mode"] = "common"
    return replace(base, **overrides)


def check_claim(claim_id: str, config: FamilyConfig | None = None, **params) -> ClaimReport:
    """Evaluate one catalog claim over a family (the claim's documented
    default family when none is given)."""
    try:
        entry = CATALOG[claim_id.upper()]
    except KeyError:
        raise UnknownClaimError(claim_id)
    if config is None:
        merged = dict(entry.defaults)
        merged.update(params)
        config = entry.family(merged)
    params.pop("samples", None)
    params.pop("seed", None)
    return check_entry(entry, config, **params)


def replay_counterexample(claim_id: str, counterexample: dict, **params):
    """Re-run a reported counterexample standalone; returns the violation
    details (None would mean it no longer fails)."""
    try:
        entry = CATALOG[claim_id.upper()]
    except KeyError:
        raise UnknownClaimError(claim_id)
    merged = dict(entry.defaults)
    merged.update(params)
    inst, _, _ = document_to_instance(counterexample["instance"])
    violation, _ = entry.predicate(inst, merged, counterexample.get("aux", {}))
    return violation
