"""Command-line surface.

Standard output carries exactly one canonical-JSON report document per
invocation; everything else (warnings, progress, errors) goes to standard
error.  Exit codes: 0 success, 1 mismatch or counterexample, 2 usage or
validation error.
"""

from __future__ import annotations

import argparse
import sys
from importlib import resources

from . import claims
from .errors import (
    CommonPriorityError,
    InstanceValidationError,
    SizeGuardError,
    UnknownClaimError,
)
from .fairness import blocking_pairs, blocking_students, compare_at, is_individually_rational, is_stable
from .fixtures import FIXTURE_IDS, canonical_fixture_id, reproduce_fixture
from .families import FamilyConfig, random_instance
from .mechanisms import Mechanism, MechanismSpec, run_mechanism
from .model import Matching
from .serialize import (
    DocumentError,
    canonical_json,
    instance_to_document,
    load_named_instance,
    matching_to_document,
)
from .strategy import (
    SophisticationPartition,
    boston_equilibrium_outcome,
    manipulating_students,
    sd_equilibrium_outcome,
    semi_sophisticated_outcome,
    semi_sophisticated_profile,
    competitive_schools,
)

SCHEMA_VERSION = 1


def _emit(doc: dict) -> None:
    doc = {"schema_version": SCHEMA_VERSION, **doc}
    sys.stdout.write(canonical_json(doc))


def _fail_usage(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return 2


def _resolve_instance(ref: str):
    """Instance argument: a bundled fixture id or a document path."""
    try:
        fid = canonical_fixture_id(ref)
    except KeyError:
        return load_named_instance(ref)
    path = resources.files("schoolmatch").joinpath(f"data/fixtures/{fid}.json")
    with resources.as_file(path) as concrete:
        return load_named_instance(concrete)


def _parse_limits(text: str):
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError:
        raise DocumentError(f"--limits must be comma-separated integers, got {text!r}")


def _mech_spec(mech: str, k, limits, e) -> MechanismSpec:
    kind = Mechanism(mech)
    constraint = None
    if limits is not None:
        constraint = _parse_limits(limits)
    elif k is not None:
        constraint = k
    return MechanismSpec(kind, constraint, parallel_e=e if kind is Mechanism.CHINESE else None)


def _matching_doc(matching: Matching, students, schools):
    return matching_to_document(matching, students, schools)


def _add_instance_arg(sub):
    sub.add_argument("instance", help=f"instance document path or fixture id ({', '.join(FIXTURE_IDS)})")


def _add_mech_args(sub, *, append=False):
    action = "append" if append else "store"
    sub.add_argument("--mech", choices=[m.value for m in Mechanism], action=action, required=True)
    sub.add_argument("--k", type=int, action=action)
    sub.add_argument("--limits", action=action, help="per-student limits, comma separated")
    sub.add_argument("--e", type=int, action=action, help="round length for the chinese mechanism")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="schoolmatch",
        description="School-choice mechanisms, stability diagnostics, and claim verification.",
    )
    sub = parser.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("run", help="run one mechanism on an instance")
    _add_instance_arg(p)
    _add_mech_args(p)

    p = sub.add_parser("analyze", help="stability and blocking report for a mechanism outcome or a matching file")
    _add_instance_arg(p)
    p.add_argument("matching", nargs="?", help="optional matching document {student: school|null}")
    p.add_argument("--mech", choices=[m.value for m in Mechanism])
    p.add_argument("--k", type=int)
    p.add_argument("--limits")
    p.add_argument("--e", type=int)

    p = sub.add_parser("compare", help="run two specs and report the fairness verdict")
    _add_instance_arg(p)
    _add_mech_args(p, append=True)

    p = sub.add_parser("manipulations", help="exhaustively find manipulating students")
    _add_instance_arg(p)
    _add_mech_args(p)

    p = sub.add_parser("equilibrium", help="equilibrium constructions")
    _add_instance_arg(p)
    p.add_argument("construction", choices=["boston", "sd", "semi"])
    p.add_argument("--sincere", default="", help="comma-separated sincere student names")
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--l", type=int, default=2)

    p = sub.add_parser("verify", help="check a catalog claim over a family")
    p.add_argument("claim", help=f"one of {', '.join(claims.claim_ids())}")
    p.add_argument("--k", type=int)
    p.add_argument("--l", type=int)
    p.add_argument("--e", type=int, help="round length M for claim T3 (paired with 2M)")
    p.add_argument("--samples", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--students", type=int)
    p.add_argument("--schools", type=int)
    p.add_argument("--exhaustive", action="store_true")
    p.add_argument("--common-priority", action="store_true")

    p = sub.add_parser("reproduce", help="recompute a fixture's pinned outcomes")
    p.add_argument("fixture", help=f"one of {', '.join(FIXTURE_IDS)}")

    p = sub.add_parser("generate", help="draw a seeded random instance")
    p.add_argument("out", nargs="?", help="optional output path")
    p.add_argument("--students", type=int, default=5)
    p.add_argument("--schools", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=1, help="unused; accepted for flag symmetry")
    p.add_argument("--common-priority", action="store_true")
    return parser


def _cmd_run(args) -> int:
    inst, students, schools = _resolve_instance(args.instance)
    spec = _mech_spec(args.mech, args.k, args.limits, args.e)
    matching = run_mechanism(spec, inst)
    _emit(
        {
            "command": "run",
            "instance_digest": inst.digest(),
            "mechanism": spec.label(),
            "matching": _matching_doc(matching, students, schools),
        }
    )
    return 0


def _load_matching(path, inst, students, schools) -> Matching:
    import json

    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    sidx = {name: i for i, name in enumerate(students)}
    cidx = {name: s for s, name in enumerate(schools)}
    assign = [-1] * inst.n_students
    for name, school in doc.items():
        if name not in sidx:
            raise DocumentError(f"matching: unknown student {name!r}")
        if school is not None:
            if school not in cidx:
                raise DocumentError(f"matching: unknown school {school!r}")
            assign[sidx[name]] = cidx[school]
    return Matching(tuple(assign))


def _cmd_analyze(args) -> int:
    inst, students, schools = _resolve_instance(args.instance)
    doc = {"command": "analyze", "instance_digest": inst.digest()}
    if args.matching is not None:
        matching = _load_matching(args.matching, inst, students, schools)
        doc["source"] = "matching-file"
    elif args.mech is not None:
        spec = _mech_spec(args.mech, args.k, args.limits, args.e)
        matching = run_mechanism(spec, inst)
        doc["source"] = spec.label()
    else:
        return _fail_usage("analyze needs --mech or a matching document")
    pairs = blocking_pairs(matching, inst)
    doc.update(
        {
            "matching": _matching_doc(matching, students, schools),
            "individually_rational": is_individually_rational(matching, inst),
            "stable": is_stable(matching, inst),
            "blocking_students": sorted(students[i] for i in blocking_students(matching, inst)),
            "blocking_pairs": [
                {
                    "student": students[p.student],
                    "school": schools[p.school],
                    "witness": "empty-seat" if p.witness is None else students[p.witness],
                }
                for p in pairs
            ],
        }
    )
    _emit(doc)
    return 0


def _pick(values, idx):
    if values is None:
        return None
    if idx < len(values):
        return values[idx]
    return values[0] if len(values) == 1 else None


def _cmd_compare(args) -> int:
    inst, students, schools = _resolve_instance(args.instance)
    mechs = args.mech if args.mech else []
    if len(mechs) == 1:
        mechs = mechs * 2
    if len(mechs) != 2:
        return _fail_usage("compare needs --mech given once or twice")
    spec_a = _mech_spec(mechs[0], _pick(args.k, 0), _pick(args.limits, 0), _pick(args.e, 0))
    spec_b = _mech_spec(mechs[1], _pick(args.k, 1), _pick(args.limits, 1), _pick(args.e, 1))
    verdict = compare_at(spec_a, spec_b, inst)
    _emit(
        {
            "command": "compare",
            "instance_digest": verdict.instance_digest,
            "mechanism_a": spec_a.label(),
            "mechanism_b": spec_b.label(),
            "stable_a": verdict.stable_a,
            "stable_b": verdict.stable_b,
            "blocking_count_a": verdict.count_a,
            "blocking_count_b": verdict.count_b,
        }
    )
    return 0


def _cmd_manipulations(args) -> int:
    inst, students, schools = _resolve_instance(args.instance)
    spec = _mech_spec(args.mech, args.k, args.limits, args.e)
    found = manipulating_students(spec, inst)
    _emit(
        {
            "command": "manipulations",
            "instance_digest": inst.digest(),
            "mechanism": spec.label(),
            "manipulating_students": sorted(students[i] for i in found),
        }
    )
    return 0


def _cmd_equilibrium(args) -> int:
    inst, students, schools = _resolve_instance(args.instance)
    doc = {"command": "equilibrium", "instance_digest": inst.digest()}
    if args.construction == "semi":
        matching, limits = semi_sophisticated_outcome(inst, args.l)
        profile = semi_sophisticated_profile(inst, args.l)
        competitive, _ = competitive_schools(inst)
        doc.update(
            {
                "construction": "semi-sophisticated-drop",
                "l": args.l,
                "competitive_schools": sorted(schools[s] for s in competitive),
                "per_student_limits": {students[i]: limits[i] for i in range(inst.n_students)},
            }
        )
        outcome_profile = profile
    else:
        sidx = {name: i for i, name in enumerate(students)}
        names = [x for x in args.sincere.split(",") if x]
        unknown = [x for x in names if x not in sidx]
        if unknown:
            return _fail_usage(f"unknown sincere students: {', '.join(unknown)}")
        partition = SophisticationPartition(inst.n_students, frozenset(sidx[x] for x in names))
        builder = boston_equilibrium_outcome if args.construction == "boston" else sd_equilibrium_outcome
        eq = builder(inst, partition, args.k)
        matching = eq.matching
        outcome_profile = eq.profile
        doc.update({"construction": eq.construction, "k": args.k, "sincere": sorted(names)})
    doc.update(
        {
            "profile": {
                students[i]: [schools[s] for s in rep] for i, rep in enumerate(outcome_profile)
            },
            "matching": _matching_doc(matching, students, schools),
            "stable": is_stable(matching, inst),
            "blocking_students": sorted(students[i] for i in blocking_students(matching, inst)),
        }
    )
    _emit(doc)
    return 0


def _cmd_verify(args) -> int:
    params = {}
    if args.k is not None:
        params["k"] = args.k
    if args.l is not None:
        params["l"] = args.l
    if args.e is not None:
        params["pairs"] = ((args.e, 2 * args.e),)
    config = claims.configure(
        args.claim,
        students=args.students,
        schools=args.schools,
        samples=args.samples,
        seed=args.seed,
        exhaustive=args.exhaustive,
        common_priority=args.common_priority,
        **params,
    )
    report = claims.check_claim(args.claim, config, **params)
    print(f"claim {report.claim_id}: {report.result} after {report.instances_checked} instances "
          f"({report.wall_time:.2f}s)", file=sys.stderr)
    _emit({"command": "verify", **report.to_document()})
    return 0 if report.passed else 1


def _cmd_reproduce(args) -> int:
    report = reproduce_fixture(args.fixture)
    _emit({"command": "reproduce", **report.to_document()})
    return 0 if report.passed else 1


def _cmd_generate(args) -> int:
    config = FamilyConfig(
        n_students=(2, args.students),
        n_schools=(1, args.schools),
        priority_mode="common" if args.common_priority else "arbitrary",
        samples=1,
        seed=args.seed,
    )
    inst = random_instance(config, args.seed)
    doc = instance_to_document(inst)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(canonical_json(doc))
    _emit({"command": "generate", "seed": args.seed, "instance": doc})
    return 0


_COMMANDS = {
    "run": _cmd_run,
    "analyze": _cmd_analyze,
    "compare": _cmd_compare,
    "manipulations": _cmd_manipulations,
    "equilibrium": _cmd_equilibrium,
    "verify": _cmd_verify,
    "reproduce": _cmd_reproduce,
    "generate": _cmd_generate,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.cmd](args)
    except (
        DocumentError,
        InstanceValidationError,
        UnknownClaimError,
        CommonPriorityError,
        SizeGuardError,
        KeyError,
        ValueError,
        OSError,
    ) as exc:
        return _fail_usage(str(exc))


if __name__ == "__main__":
    sys.exit(main())
