import json

import pytest

from fillvol.documents import (
    build_direct_spec,
    presentation_from_doc,
    resolve_complex,
    validate_job,
)
from fillvol.errors import SpecConsistencyError, ValidationError
from fillvol.groups import verify_confluence

Z3_DOC = {
    "version": 1, "kind": "complex", "label": "cubes", "group": "z3",
    "orbits": [
        {"id": "v", "dim": 0},
        {"id": "x", "dim": 1, "boundary": [[1, "x", "v"], [-1, "", "v"]]},
        {"id": "y", "dim": 1, "boundary": [[1, "y", "v"], [-1, "", "v"]]},
        {"id": "z", "dim": 1, "boundary": [[1, "z", "v"], [-1, "", "v"]]},
        {"id": "xy", "dim": 2, "boundary": [[1, "", "x"], [1, "x", "y"], [-1, "y", "x"], [-1, "", "y"]]},
        {"id": "xz", "dim": 2, "boundary": [[1, "", "x"], [1, "x", "z"], [-1, "z", "x"], [-1, "", "z"]]},
        {"id": "yz", "dim": 2, "boundary": [[1, "", "y"], [1, "y", "z"], [-1, "z", "y"], [-1, "", "z"]]},
        {"id": "xyz", "dim": 3, "boundary": [[-1, "", "yz"], [1, "x", "yz"], [1, "", "xz"],
                                             [-1, "y", "xz"], [-1, "", "xy"], [1, "z", "xy"]]},
    ],
}


def gersten_doc(k):
    return {"version": 1, "kind": "complex", "group": "trivial", "orbits": [
        {"id": "v", "dim": 0}, {"id": "e", "dim": 1, "boundary": []},
        {"id": "c1", "dim": 2, "boundary": [[2, "", "e"]]},
        {"id": "c2", "dim": 2, "boundary": [[2 * k, "", "e"]]}]}


def test_cube_document():
    spec = build_direct_spec(Z3_DOC)
    assert [len(spec.orbits_of_dim(d)) for d in range(4)] == [1, 3, 3, 1]


def test_gersten_document():
    spec = build_direct_spec(gersten_doc(3))
    assert spec.top_dim == 2 and spec.group.name == "trivial"


def test_boundary_not_a_cycle():
    doc = json.loads(json.dumps(Z3_DOC))
    doc["orbits"][4]["boundary"] = [[1, "", "x"], [1, "", "y"]]
    with pytest.raises(SpecConsistencyError):
        build_direct_spec(doc)


def test_unknown_field(tmp_path):
    doc = dict(Z3_DOC, colour="red")
    path = tmp_path / "c.json"
    path.write_text(json.dumps(doc))
    with pytest.raises(ValidationError) as e:
        resolve_complex(str(path))
    assert e.value.field == "colour" and e.value.path == str(path)


def test_missing_version():
    doc = dict(Z3_DOC)
    del doc["version"]
    with pytest.raises(ValidationError) as e:
        build_direct_spec(doc)
    assert e.value.field == "version"


def test_bad_boundary_word():
    doc = json.loads(json.dumps(Z3_DOC))
    doc["orbits"][1]["boundary"][0][1] = "q"
    with pytest.raises(ValidationError) as e:
        build_direct_spec(doc)
    assert e.value.field.startswith("orbits[1]")


def test_presentation_document():
    p = presentation_from_doc({"version": 1, "kind": "presentation", "name": "z2",
                               "generators": [["a", "A"], ["b", "B"]], "relators": ["abAB"],
                               "rewrite_rules": [["aA", ""], ["Aa", ""], ["bB", ""], ["Bb", ""],
                                                 ["ba", "ab"], ["bA", "Ab"], ["Ba", "aB"],
                                                 ["BA", "AB"]]})
    assert verify_confluence(p).ok


def test_job_validation():
    job = validate_job({"version": 1, "kind": "job", "task": "fv", "complex": "z2-torus",
                        "max_k": 4})
    assert job == {"task": "fv", "complex": "z2-torus", "max_k": 4}
    with pytest.raises(ValidationError) as e:
        validate_job({"version": 1, "kind": "job", "task": "fv", "max_k": "4"})
    assert e.value.field == "max_k"
    with pytest.raises(ValidationError):
        validate_job({"version": 1, "kind": "job", "task": "paint"})
