"""On-disk instance and report documents.

Instances serialize to a JSON tree keyed by student/school *names* (never
indices) so documents survive roster edits; loading maps names back to
dense indices and runs full validation.  All emitted JSON is canonical:
sorted keys, two-space indent, trailing newline, sets rendered as sorted
lists, so identical inputs yield identical bytes.
"""

from __future__ import annotations

import json

from .model import Instance, Matching, validate_instance

SCHEMA_VERSION = 1


class DocumentError(ValueError):
    """Malformed instance document; message carries field context."""


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def default_student_names(n: int):
    return [f"i{i + 1}" for i in range(n)]


def default_school_names(m: int):
    return [f"s{s + 1}" for s in range(m)]


def instance_to_document(instance: Instance, student_names=None, school_names=None) -> dict:
    students = list(student_names or default_student_names(instance.n_students))
    schools = list(school_names or default_school_names(instance.n_schools))
    doc = {
        "schema_version": SCHEMA_VERSION,
        "students": students,
        "schools": [
            {
                "name": schools[s],
                "capacity": instance.capacities[s],
                "fpf": s in instance.fpf_schools,
            }
            for s in range(instance.n_schools)
        ],
        "preferences": {
            students[i]: [schools[s] for s in pref]
            for i, pref in enumerate(instance.preferences)
        },
    }
    if instance.n_schools and instance.has_common_priority():
        doc["priorities"] = {"common": [students[i] for i in instance.priorities[0]]}
    else:
        doc["priorities"] = {
            schools[s]: [students[i] for i in order]
            for s, order in enumerate(instance.priorities)
        }
    return doc


def document_to_instance(doc) -> tuple:
    """Parse a document into (Instance, student_names, school_names).

    Raises DocumentError on structural problems (with the offending field
    named) and InstanceValidationError on semantic ones.
    """
    if not isinstance(doc, dict):
        raise DocumentError("instance document must be a JSON object")
    students = doc.get("students")
    if not isinstance(students, list) or not all(isinstance(x, str) for x in students):
        raise DocumentError("field 'students' must be a list of names")
    if len(set(students)) != len(students):
        raise DocumentError("student names must be unique")
    schools_raw = doc.get("schools")
    if not isinstance(schools_raw, list):
        raise DocumentError("field 'schools' must be a list")

    school_names, capacities, fpf = [], [], []
    for entry in schools_raw:
        if not isinstance(entry, dict) or "name" not in entry:
            raise DocumentError("each school entry needs a 'name'")
        name = entry["name"]
        if "capacity" not in entry:
            raise DocumentError(f"school {name}: missing capacity")
        school_names.append(name)
        capacities.append(entry["capacity"])
        fpf.append(bool(entry.get("fpf", False)))
    if len(set(school_names)) != len(school_names):
        raise DocumentError("school names must be unique")

    sidx = {name: i for i, name in enumerate(students)}
    cidx = {name: s for s, name in enumerate(school_names)}

    prefs_raw = doc.get("preferences", {})
    preferences = []
    for name in students:
        if name not in prefs_raw:
            raise DocumentError(f"student {name}: missing preference list")
        row = []
        for school in prefs_raw[name]:
            if school not in cidx:
                raise DocumentError(f"student {name}: unknown school {school!r} in preferences")
            row.append(cidx[school])
        preferences.append(row)

    prios_raw = doc.get("priorities", {})
    if not isinstance(prios_raw, dict):
        raise DocumentError("field 'priorities' must be an object")

    def order_of(names, context):
        out = []
        for x in names:
            if x not in sidx:
                raise DocumentError(f"{context}: unknown student {x!r}")
            out.append(sidx[x])
        return out

    if "common" in prios_raw:
        order = order_of(prios_raw["common"], "common priority")
        priorities = [list(order) for _ in school_names]
    else:
        priorities = []
        for name in school_names:
            if name not in prios_raw:
                raise DocumentError(f"school {name}: missing priority order")
            priorities.append(order_of(prios_raw[name], f"school {name}"))

    instance = validate_instance(
        {
            "n_students": len(students),
            "n_schools": len(school_names),
            "preferences": preferences,
            "priorities": priorities,
            "capacities": capacities,
            "fpf_schools": [s for s, flag in enumerate(fpf) if flag],
        }
    )
    return instance, students, school_names


def load_instance(path) -> Instance:
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise DocumentError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}")
    return document_to_instance(doc)[0]


def load_named_instance(path):
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise DocumentError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}")
    return document_to_instance(doc)


def save_instance(instance: Instance, path, student_names=None, school_names=None) -> None:
    doc = instance_to_document(instance, student_names, school_names)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(canonical_json(doc))


def matching_to_document(matching: Matching, student_names, school_names) -> dict:
    """{student name: school name or null}; null encodes unmatched."""
    return {
        student_names[i]: (None if s == -1 else school_names[s])
        for i, s in enumerate(matching.assignment)
    }
