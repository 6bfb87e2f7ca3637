"""JSON documents: presentations, complexes, chain maps and jobs.

Every document is an object with ``"version": 1`` and a ``"kind"``.
Unknown fields are errors. Errors carry the document path and the
offending field so the command line can report them.
"""

from __future__ import annotations

import json
import os

from . import builtins
from .complexes import TRIVIAL, CellOrbit, ChainMapSpec, EquivariantComplexSpec
from .errors import FillvolError, ValidationError
from .groups import Generator, GroupPresentation

VERSION = 1

TASKS = ("fill", "fv", "operator-bound", "equivalence", "dehn-consistency",
         "subgroup-check", "confluence")


def load_document(path) -> dict:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ValidationError(f"cannot read document: {exc.strerror}", path=str(path)) from None
    except json.JSONDecodeError as exc:
        raise ValidationError(f"invalid JSON: {exc.msg} (line {exc.lineno})",
                              path=str(path)) from None
    return doc


def _fields(doc, kind, required, optional, path):
    if not isinstance(doc, dict):
        raise ValidationError(f"{kind} document must be a JSON object", path=path)
    if doc.get("version") != VERSION:
        raise ValidationError(f"unsupported or missing version {doc.get('version')!r}",
                              path=path, field="version")
    if doc.get("kind", kind) != kind:
        raise ValidationError(f"expected a {kind} document, got {doc.get('kind')!r}",
                              path=path, field="kind")
    allowed = set(required) | set(optional) | {"version", "kind"}
    for key in doc:
        if key not in allowed:
            raise ValidationError(f"unknown field {key!r}", path=path, field=key)
    for key in required:
        if key not in doc:
            raise ValidationError(f"missing field {key!r}", path=path, field=key)


def _wrap(fn, path, field=None):
    # re-raise library validation errors with the document location attached
    try:
        return fn()
    except ValidationError as exc:
        exc.path = exc.path or path
        exc.field = exc.field or field
        raise
    except FillvolError as exc:
        if getattr(exc, "path", None) is None:
            exc.path = path
        raise


def presentation_from_doc(doc, path=None) -> GroupPresentation:
    _fields(doc, "presentation", ("name", "generators"),
            ("relators", "rewrite_rules", "order", "step_budget"), path)
    gens = doc["generators"]
    if not isinstance(gens, list) or not all(
            isinstance(g, list) and len(g) == 2 and all(isinstance(s, str) for s in g)
            for g in gens):
        raise ValidationError("generators must be [name, inverse_name] pairs",
                              path=path, field="generators")
    rules = doc.get("rewrite_rules", [])
    if not isinstance(rules, list) or not all(
            isinstance(r, list) and len(r) == 2 for r in rules):
        raise ValidationError("rewrite_rules must be [lhs, rhs] pairs", path=path,
                              field="rewrite_rules")
    relators = doc.get("relators", [])
    if not isinstance(relators, list) or not all(isinstance(r, str) for r in relators):
        raise ValidationError("relators must be strings", path=path, field="relators")
    kw = {}
    if "order" in doc:
        kw["order"] = doc["order"]
    if "step_budget" in doc:
        kw["step_budget"] = int(doc["step_budget"])
    return _wrap(lambda: GroupPresentation(
        doc["name"], tuple(Generator(a, b) for a, b in gens), tuple(relators),
        tuple(tuple(r) for r in rules), **kw), path)


def _group_ref(ref, path):
    if isinstance(ref, dict):
        return presentation_from_doc(ref, path)
    if not isinstance(ref, str):
        raise ValidationError("group must be a name or a presentation document",
                              path=path, field="group")
    if ref == "trivial":
        return TRIVIAL
    if os.path.isfile(ref):
        return presentation_from_doc(load_document(ref), ref)
    return _wrap(lambda: builtins.presentation(ref), path, "group")


def build_direct_spec(doc, path=None) -> EquivariantComplexSpec:
    """Complex from ``{"group": ..., "orbits": [{id, dim, boundary: [[coef, word, target]]}]}``."""
    _fields(doc, "complex", ("group", "orbits"), ("label",), path)
    group = _group_ref(doc["group"], path)
    if not isinstance(doc["orbits"], list):
        raise ValidationError("orbits must be a list", path=path, field="orbits")
    orbits = []
    for i, o in enumerate(doc["orbits"]):
        where = f"orbits[{i}]"
        if not isinstance(o, dict) or set(o) - {"id", "dim", "boundary"} or \
                not {"id", "dim"} <= set(o):
            raise ValidationError("orbit entries are {id, dim, boundary}", path=path,
                                  field=where)
        if not isinstance(o["dim"], int) or o["dim"] < 0:
            raise ValidationError("orbit dim must be a non-negative integer", path=path,
                                  field=f"{where}.dim")
        terms = []
        for t in o.get("boundary", []):
            if not (isinstance(t, list) and len(t) == 3 and isinstance(t[0], int)
                    and isinstance(t[1], str) and isinstance(t[2], str)):
                raise ValidationError("boundary terms are [coef, word, target_id]",
                                      path=path, field=f"{where}.boundary")
            word = _wrap(lambda w=t[1]: group.parse(w), path, f"{where}.boundary")
            terms.append((t[0], word, t[2]))
        orbits.append(CellOrbit(str(o["id"]), o["dim"], tuple(terms)))
    label = doc.get("label") or (os.path.splitext(os.path.basename(path))[0] if path else "complex")
    spec = _wrap(lambda: EquivariantComplexSpec(label, group, tuple(orbits)), path, "orbits")
    _wrap(spec.check_boundary_squared, path, "orbits")
    return spec


def chain_map_from_doc(doc, path=None) -> ChainMapSpec:
    _fields(doc, "chain-map", ("source", "target", "images"), ("label", "group_images"), path)
    src = resolve_complex(doc["source"], path)
    tgt = resolve_complex(doc["target"], path)
    images = {}
    for oid, terms in doc["images"].items():
        images[oid] = tuple((int(c), w, t) for c, w, t in terms)
    label = doc.get("label", "chain-map")
    return _wrap(lambda: ChainMapSpec(label, src, tgt, doc.get("group_images", {}), images),
                 path, "images")


def resolve_complex(ref, path=None) -> EquivariantComplexSpec:
    """A built-in complex name, a path to a complex document, or an inline document."""
    if isinstance(ref, dict):
        return build_direct_spec(ref, path)
    if not isinstance(ref, str):
        raise ValidationError("complex must be a name, a file or a document", path=path,
                              field="complex")
    if os.path.isfile(ref):
        return build_direct_spec(load_document(ref), ref)
    return _wrap(lambda: builtins.complex_spec(ref), path, "complex")


def resolve_presentation(ref, path=None) -> GroupPresentation:
    return _group_ref(ref, path)


def resolve_map(ref, path=None) -> ChainMapSpec:
    if isinstance(ref, dict):
        return chain_map_from_doc(ref, path)
    if not isinstance(ref, str):
        raise ValidationError("map must be a name, a file or a document", path=path, field="map")
    if os.path.isfile(ref):
        return chain_map_from_doc(load_document(ref), ref)
    return _wrap(lambda: builtins.chain_map(ref), path, "map")


JOB_FIELDS = {
    "task": str, "complex": (str, dict), "presentation": (str, dict), "dim": int,
    "max_k": int, "radius": int, "target_radius": int, "max_radius": int,
    "mode": str, "seed": int, "samples": int, "target": list, "map": (str, dict),
    "reverse_map": (str, dict), "retraction": (str, dict), "g_complex": (str, dict),
    "g_radius": int, "c_cap": int, "length": int, "caps": dict,
}


def validate_job(doc, path=None) -> dict:
    """Check a job document and return it with the envelope stripped."""
    _fields(doc, "job", ("task",), tuple(k for k in JOB_FIELDS if k != "task"), path)
    for key, typ in JOB_FIELDS.items():
        if key in doc and (not isinstance(doc[key], typ) or isinstance(doc[key], bool)):
            raise ValidationError(f"field {key!r} has the wrong type", path=path, field=key)
    if doc["task"] not in TASKS:
        raise ValidationError(f"unknown task {doc['task']!r}", path=path, field="task")
    if "mode" in doc and doc["mode"] not in ("exhaustive", "circuits"):
        raise ValidationError(f"unknown mode {doc['mode']!r}", path=path, field="mode")
    return {k: v for k, v in doc.items() if k not in ("version", "kind")}


def expand_refs(job: dict) -> dict:
    """Replace file references by the documents they name, for cache keys."""
    out = {}
    for key, val in job.items():
        if isinstance(val, str) and key in ("complex", "presentation", "map", "reverse_map",
                                            "retraction", "g_complex") and os.path.isfile(val):
            out[key] = {"file": load_document(val)}
        else:
            out[key] = val
    return out
