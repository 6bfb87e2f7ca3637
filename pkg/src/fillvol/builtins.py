"""Built-in presentations, complexes and chain maps."""

from __future__ import annotations

import re

from .complexes import (
    TRIVIAL,
    CellOrbit,
    ChainMapSpec,
    EquivariantComplexSpec,
    build_presentation_complex,
)
from .errors import ValidationError
from .groups import Generator, GroupPresentation

_NAMES = "xyz"


def _gens(names):
    return tuple(Generator(a, a.upper()) for a in names)


def free_group(n: int = 2) -> GroupPresentation:
    names = _NAMES[:n] if n <= 3 else [f"a{i}" for i in range(n)]
    gens = _gens(names)
    rules = []
    for g in gens:
        rules += [((g.name, g.inverse_name), ()), ((g.inverse_name, g.name), ())]
    return GroupPresentation(f"free{n}", gens, (), tuple(rules))


def free_abelian(n: int) -> GroupPresentation:
    """Z^n with shortlex rules sorting letters into x^a y^b z^c order."""
    if not 1 <= n <= 3:
        raise ValidationError("built-in free abelian groups have rank 1..3")
    gens = _gens(_NAMES[:n])
    rules = []
    for g in gens:
        rules += [((g.name, g.inverse_name), ()), ((g.inverse_name, g.name), ())]
    for i, gi in enumerate(gens):
        for gj in gens[i + 1:]:
            for a in (gi.name, gi.inverse_name):
                for b in (gj.name, gj.inverse_name):
                    rules.append(((b, a), (a, b)))
    relators = tuple((gi.name, gj.name, gi.inverse_name, gj.inverse_name)
                     for i, gi in enumerate(gens) for gj in gens[i + 1:])
    return GroupPresentation(f"z{n}", gens, relators, tuple(rules))


def heisenberg() -> GroupPresentation:
    """H3 with central z = [x, y]; normal forms x^a y^b z^c.

    The element with normal form x^a y^b z^c is the unipotent matrix
    [[1, a, ab + c], [0, 1, b], [0, 0, 1]].
    """
    gens = _gens("xyz")
    rules = []
    for g in gens:
        rules += [((g.name, g.inverse_name), ()), ((g.inverse_name, g.name), ())]
    for a in "xXyY":
        for c in "zZ":
            rules.append(((c, a), (a, c)))
    rules += [
        (("y", "x"), ("x", "y", "Z")),
        (("y", "X"), ("X", "y", "z")),
        (("Y", "x"), ("x", "Y", "z")),
        (("Y", "X"), ("X", "Y", "Z")),
    ]
    relators = ("xyXYZ", "xzXZ", "yzYZ")
    return GroupPresentation("heisenberg3", gens, relators, tuple(rules), order="recursive")


def gersten_presentation(k: int) -> GroupPresentation:
    """<x | x^2, x^(2k)>, the cyclic group of order two."""
    if k < 2:
        raise ValidationError("gersten(k) requires k >= 2", field="k")
    gens = _gens("x")
    rules = ((("x", "x"), ()), (("X",), ("x",)))
    return GroupPresentation(f"gersten({k})", gens, ("xx", "x" * (2 * k)), rules)


def z2_redundant() -> GroupPresentation:
    """Z^2 on generators x, y, t with t = xy."""
    gens = (Generator("t", "T"), Generator("x", "X"), Generator("y", "Y"))
    rules = [(("t",), ("x", "y")), (("T",), ("X", "Y"))]
    for g in gens[1:]:
        rules += [((g.name, g.inverse_name), ()), ((g.inverse_name, g.name), ())]
    for a in "xX":
        for b in "yY":
            rules.append(((b, a), (a, b)))
    return GroupPresentation("z2-redundant", gens, ("xyXY", "Txy"), tuple(rules),
                             order="recursive")


# -- complexes ---------------------------------------------------------------


def _square(s, t):
    # boundary of the square spanned by s then t, anchored at the identity
    return ((1, "", s), (1, s, t), (-1, t, s), (-1, "", t))


def cube_complex(n: int) -> EquivariantComplexSpec:
    """The standard cubical structure on R^n, acted on by Z^n (n = 2 or 3)."""
    p = free_abelian(n)
    names = _NAMES[:n]
    orbits = [CellOrbit("v", 0)]
    for s in names:
        orbits.append(CellOrbit(s, 1, ((1, s, "v"), (-1, "", "v"))))
    pairs = [(a, b) for i, a in enumerate(names) for b in names[i + 1:]]
    for s, t in pairs:
        orbits.append(CellOrbit(s + t, 2, _square(s, t)))
    if n == 3:
        # cubical boundary: sum_i (-1)^i (face_i^0 - face_i^1)
        cube = ((-1, "", "yz"), (1, "x", "yz"),
                (1, "", "xz"), (-1, "y", "xz"),
                (-1, "", "xy"), (1, "z", "xy"))
        orbits.append(CellOrbit("xyz", 3, cube))
    label = "z2-torus" if n == 2 else "z3-cubes"
    spec = EquivariantComplexSpec(label, p, tuple(orbits))
    spec.check_boundary_squared()
    return spec


def z2_subdivided() -> EquivariantComplexSpec:
    """The Z^2 torus complex with every edge subdivided at a midpoint."""
    p = free_abelian(2)
    orbits = (
        CellOrbit("v", 0), CellOrbit("mx", 0), CellOrbit("my", 0),
        CellOrbit("x1", 1, ((1, "", "mx"), (-1, "", "v"))),
        CellOrbit("x2", 1, ((1, "x", "v"), (-1, "", "mx"))),
        CellOrbit("y1", 1, ((1, "", "my"), (-1, "", "v"))),
        CellOrbit("y2", 1, ((1, "y", "v"), (-1, "", "my"))),
        CellOrbit("sq", 2, ((1, "", "x1"), (1, "", "x2"), (1, "x", "y1"), (1, "x", "y2"),
                            (-1, "y", "x1"), (-1, "y", "x2"), (-1, "", "y1"), (-1, "", "y2"))),
    )
    spec = EquivariantComplexSpec("z2-subdivided", p, orbits)
    spec.check_boundary_squared()
    return spec


def gersten_complex(k: int) -> EquivariantComplexSpec:
    """Chains of the presentation complex of <x | x^2, x^(2k)> itself.

    One vertex, one loop ``e`` and 2-cells ``c1``, ``c2`` with boundaries
    ``2e`` and ``2k e``; the acting group is trivial.
    """
    if k < 2:
        raise ValidationError("gersten(k) requires k >= 2", field="k")
    orbits = (
        CellOrbit("v", 0),
        CellOrbit("e", 1, ()),
        CellOrbit("c1", 2, ((2, "", "e"),)),
        CellOrbit("c2", 2, ((2 * k, "", "e"),)),
    )
    return EquivariantComplexSpec(f"gersten({k})", TRIVIAL, orbits)


def gersten_cover(k: int) -> EquivariantComplexSpec:
    """Universal cover of the same presentation complex (Z/2 acting)."""
    return build_presentation_complex(gersten_presentation(k), label=f"gersten-cover({k})")


# -- chain maps --------------------------------------------------------------


def _identity_images(spec):
    return {o.id: ((1, "", o.id),) for o in spec.orbits}


def identity_map(spec) -> ChainMapSpec:
    gi = {g.name: g.name for g in spec.group.generators}
    return ChainMapSpec(f"{spec.label}-identity", spec, spec, gi, _identity_images(spec))


def z2_double() -> ChainMapSpec:
    """Multiplication by (1 + y) on every chain group of the torus complex."""
    spec = complex_spec("z2-torus")
    images = {o.id: ((1, "", o.id), (1, "y", o.id)) for o in spec.orbits}
    return ChainMapSpec("z2-double", spec, spec, {"x": "x", "y": "y"}, images)


def z2_subdivide() -> ChainMapSpec:
    src, tgt = complex_spec("z2-torus"), complex_spec("z2-subdivided")
    images = {
        "v": ((1, "", "v"),),
        "x": ((1, "", "x1"), (1, "", "x2")),
        "y": ((1, "", "y1"), (1, "", "y2")),
        "xy": ((1, "", "sq"),),
    }
    return ChainMapSpec("z2-subdivide", src, tgt, {"x": "x", "y": "y"}, images)


def z2_to_redundant() -> ChainMapSpec:
    src, tgt = complex_spec("z2-torus"), complex_spec("z2-redundant")
    images = {"v": ((1, "", "v"),), "x": ((1, "", "x"),), "y": ((1, "", "y"),),
              "xy": ((1, "", "r0"),)}
    return ChainMapSpec("z2-to-redundant", src, tgt, {"x": "x", "y": "y"}, images)


def redundant_to_z2() -> ChainMapSpec:
    src, tgt = complex_spec("z2-redundant"), complex_spec("z2-torus")
    images = {"v": ((1, "", "v"),), "x": ((1, "", "x"),), "y": ((1, "", "y"),),
              "t": ((1, "", "x"), (1, "x", "y")),
              "r0": ((1, "", "xy"),), "r1": ()}
    return ChainMapSpec("redundant-to-z2", src, tgt, {"t": "xy", "x": "x", "y": "y"}, images)


def z2_in_z3() -> ChainMapSpec:
    """Coordinate-plane inclusion of the Z^2 torus complex into the Z^3 cube complex."""
    src, tgt = complex_spec("z2-torus"), complex_spec("z3-cubes")
    return ChainMapSpec("z2-in-z3", src, tgt, {"x": "x", "y": "y"}, _identity_images(src))


def z3_onto_z2() -> ChainMapSpec:
    """Projection killing the z direction; a retraction for :func:`z2_in_z3`."""
    src, tgt = complex_spec("z3-cubes"), complex_spec("z2-torus")
    images = {"v": ((1, "", "v"),), "x": ((1, "", "x"),), "y": ((1, "", "y"),),
              "xy": ((1, "", "xy"),)}
    return ChainMapSpec("z3-onto-z2", src, tgt, {"x": "x", "y": "y", "z": ""}, images)


def free2_in_z2() -> ChainMapSpec:
    """Abelianization-compatible map from the free-group tree to the torus complex."""
    src, tgt = complex_spec("free2"), complex_spec("z2-torus")
    images = {"v": ((1, "", "v"),), "x": ((1, "", "x"),), "y": ((1, "", "y"),)}
    return ChainMapSpec("free2-in-z2", src, tgt, {"x": "x", "y": "y"}, images)


def gersten_double(k: int) -> ChainMapSpec:
    """Doubling map on the Gersten complex: v -> 2v, e -> 2e, c1 -> c2, c2 -> 2 c2.

    Commuting with the boundary needs 2 * 2e = d(c1 image), which the x^4-cell
    provides only when 2k = 4, so the map exists for k = 2 only.
    """
    if k != 2:
        raise ValidationError("gersten-double is defined for k = 2", field="k")
    spec = complex_spec(f"gersten({k})")
    images = {"v": ((2, "", "v"),), "e": ((2, "", "e"),),
              "c1": ((1, "", "c2"),), "c2": ((2, "", "c2"),)}
    return ChainMapSpec("gersten-double(2)", spec, spec, {}, images)


# -- catalog -------------------------------------------------------------------

_PRESENTATIONS = {
    "z1": lambda: free_abelian(1),
    "z2": lambda: free_abelian(2),
    "z3": lambda: free_abelian(3),
    "free1": lambda: free_group(1),
    "free2": lambda: free_group(2),
    "free3": lambda: free_group(3),
    "heisenberg3": heisenberg,
    "z2-redundant": z2_redundant,
    "trivial": lambda: TRIVIAL,
}

_COMPLEXES = {
    "z2-torus": lambda: cube_complex(2),
    "z3-cubes": lambda: cube_complex(3),
    "free2": lambda: build_presentation_complex(presentation("free2")),
    "heisenberg3": lambda: build_presentation_complex(presentation("heisenberg3")),
    "z2-redundant": lambda: build_presentation_complex(presentation("z2-redundant")),
    "z2-subdivided": z2_subdivided,
}

_PARAM_COMPLEXES = {"gersten": gersten_complex, "gersten-cover": gersten_cover}

_MAPS = {
    "z2-identity": lambda: identity_map(complex_spec("z2-torus")),
    "z3-identity": lambda: identity_map(complex_spec("z3-cubes")),
    "z2-double": z2_double,
    "z2-subdivide": z2_subdivide,
    "z2-to-redundant": z2_to_redundant,
    "redundant-to-z2": redundant_to_z2,
    "z2-in-z3": z2_in_z3,
    "z3-onto-z2": z3_onto_z2,
    "free2-in-z2": free2_in_z2,
    "gersten-double(2)": lambda: gersten_double(2),
}

_cache = {}
_PARAM = re.compile(r"^([a-z0-9-]+)\((\d+)\)$")


def _parse_name(name):
    m = _PARAM.match(name)
    if m:
        return m.group(1), int(m.group(2))
    return name, None


def presentation(name: str) -> GroupPresentation:
    base, k = _parse_name(name)
    if base == "gersten":
        if k is None:
            raise ValidationError("gersten(k) requires a parameter k >= 2", field="k")
        key = ("p", base, k)
        if key not in _cache:
            _cache[key] = gersten_presentation(k)
        return _cache[key]
    if name not in _PRESENTATIONS:
        raise ValidationError(f"unknown built-in presentation {name!r}", field="group")
    key = ("p", name)
    if key not in _cache:
        _cache[key] = _PRESENTATIONS[name]()
    return _cache[key]


def complex_spec(name: str) -> EquivariantComplexSpec:
    base, k = _parse_name(name)
    if base in _PARAM_COMPLEXES:
        if k is None:
            raise ValidationError(f"{base}(k) requires a parameter k >= 2", field="k")
        key = ("c", base, k)
        if key not in _cache:
            _cache[key] = _PARAM_COMPLEXES[base](k)
        return _cache[key]
    if name in ("gersten", "gersten-cover"):
        raise ValidationError(f"{name}(k) requires a parameter k >= 2", field="k")
    if name not in _COMPLEXES:
        raise ValidationError(f"unknown built-in complex {name!r}", field="complex")
    key = ("c", name)
    if key not in _cache:
        _cache[key] = _COMPLEXES[name]()
    return _cache[key]


def chain_map(name: str) -> ChainMapSpec:
    if name not in _MAPS:
        raise ValidationError(f"unknown built-in chain map {name!r}", field="map")
    key = ("m", name)
    if key not in _cache:
        _cache[key] = _MAPS[name]()
    return _cache[key]


def catalog():
    """Built-in complexes, presentations and maps, with their dimensions."""
    complexes = []
    for name in sorted(_COMPLEXES):
        spec = complex_spec(name)
        complexes.append({"name": name, "group": spec.group.name, "top_dim": spec.top_dim})
    complexes.append({"name": "gersten(k)", "group": "trivial", "top_dim": 2,
                      "parameters": {"k": ">= 2"}})
    complexes.append({"name": "gersten-cover(k)", "group": "gersten(k)", "top_dim": 2,
                      "parameters": {"k": ">= 2"}})
    complexes.sort(key=lambda c: c["name"])
    presentations = [{"name": n, "generators": len(presentation(n).generators)}
                     for n in sorted(_PRESENTATIONS)]
    presentations.append({"name": "gersten(k)", "generators": 1, "parameters": {"k": ">= 2"}})
    maps = []
    for name in sorted(_MAPS):
        m = chain_map(name)
        maps.append({"name": name, "source": m.source.label, "target": m.target.label})
    return {"complexes": complexes, "presentations": presentations, "maps": maps}
