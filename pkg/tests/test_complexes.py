import random

import pytest
import sympy
from hypothesis import given, strategies as st

from fillvol.builtins import catalog, chain_map, complex_spec, presentation
from fillvol.chains import boundary, random_chain
from fillvol.complexes import (
    CellOrbit,
    ChainMapSpec,
    EquivariantComplexSpec,
    build_presentation_complex,
    eilenberg_trick,
    instantiate_map,
    instantiate_window,
)
from fillvol.errors import MapValidationError, SpecConsistencyError, WindowTooSmallError
from fillvol.groups import ball_enumerate, multiply, reduce_word
from oracles import integer_rank

BUILTIN = [c["name"] for c in catalog()["complexes"] if "(k)" not in c["name"]]
BUILTIN += ["gersten(2)", "gersten(3)", "gersten-cover(2)", "gersten-cover(3)"]


def test_catalog_names():
    names = {c["name"] for c in catalog()["complexes"]}
    assert {"z2-torus", "z3-cubes", "free2", "heisenberg3", "gersten(k)"} <= names
    top = {c["name"]: c["top_dim"] for c in catalog()["complexes"]}
    assert top["z3-cubes"] == 3


@pytest.mark.parametrize("name,counts", [
    ("z2-torus", {0: 1, 1: 2, 2: 1}),
    ("z3-cubes", {0: 1, 1: 3, 2: 3, 3: 1}),
    ("free2", {0: 1, 1: 2}),
    ("gersten(2)", {0: 1, 1: 1, 2: 2}),
])
def test_radius_zero_counts(name, counts):
    assert instantiate_window(complex_spec(name), 0).cell_counts() == counts


def _dd_zero(w):
    for d in range(2, w.spec.top_dim + 1):
        for j in w.complete_cells(d):
            col = w.boundary[d][j]
            if any(not w.is_complete(d - 1, i) for i, _ in col):
                continue
            acc = {}
            for i, c in col:
                for k, c2 in w.boundary[d - 1][i]:
                    acc[k] = acc.get(k, 0) + c * c2
            assert not any(acc.values())


@pytest.mark.parametrize("name", BUILTIN)
@pytest.mark.parametrize("r", [0, 1, 2, 3])
def test_boundary_squared_zero_on_builtin_windows(name, r):
    _dd_zero(instantiate_window(complex_spec(name), r))


def _closed_cols(w, d):
    # cells whose boundary and second boundary both stay in the window
    return [j for j in w.complete_cells(d)
            if all(w.is_complete(d - 1, i) for i, _ in w.boundary[d][j])]


def test_boundary_squared_zero_on_random_chains(win):
    rng = random.Random(7)
    cases = 0
    for name, r, d in [("z2-torus", 3, 2), ("z3-cubes", 2, 2), ("z3-cubes", 2, 3),
                       ("z2-subdivided", 2, 2), ("heisenberg3", 2, 2), ("z2-redundant", 2, 2)]:
        w = win(name, r)
        cols = _closed_cols(w, d)
        for _ in range(1000 // 6 + 1):
            x = random_chain(rng, w, d, cols)
            assert not boundary(boundary(x))
            cases += 1
    assert cases >= 1000


def test_inconsistent_boundary_detected():
    p = presentation("z2")
    orbits = (CellOrbit("v", 0), CellOrbit("x", 1, ((1, ("x",), "v"), (-1, (), "v"))),
              CellOrbit("y", 1, ((1, ("y",), "v"), (-1, (), "v"))),
              CellOrbit("bad", 2, ((1, (), "x"), (1, (), "y"))))
    spec = EquivariantComplexSpec("bad", p, orbits)
    with pytest.raises(SpecConsistencyError):
        spec.check_boundary_squared()
    with pytest.raises(SpecConsistencyError):
        instantiate_window(spec, 1)


@pytest.mark.parametrize("name", ["z1", "z2", "z3", "free2", "heisenberg3", "z2-redundant",
                                  "gersten(2)"])
def test_presentation_complexes_square_to_zero(name):
    spec = build_presentation_complex(presentation(name))
    _dd_zero(instantiate_window(spec, 2))


def test_eilenberg_trick_adds_free_summand():
    base = complex_spec("z2-torus")
    spec = eilenberg_trick(base, 1)
    assert spec.top_dim == 2
    w0, w1 = instantiate_window(base, 2), instantiate_window(spec, 2)

    def matrix(w):
        rows = len(w.cells[1])
        cols = w.complete_cells(2)
        m = [[0] * len(cols) for _ in range(rows)]
        for k, j in enumerate(cols):
            for i, c in w.boundary[2][j]:
                m[i][k] = c
        return m

    m0, m1 = matrix(w0), matrix(w1)
    r0, r1 = integer_rank(m0), integer_rank(m1)
    assert r0 == sympy.Matrix(m0).rank()
    assert r1 == sympy.Matrix(m1).rank()
    new_balls = sum(1 for o, _ in w1.cells[2] if o == "b2")
    assert r1 == r0 + new_balls


hw = st.lists(st.sampled_from("xXyYzZ"), max_size=6).map(tuple)


@given(hw, hw)
def test_boundary_is_equivariant(u, v):
    spec = complex_spec("heisenberg3")
    p = spec.group
    g, h = reduce_word(p, u), reduce_word(p, v)
    for o in spec.orbits:
        lhs = spec.symbolic_boundary(o.id, multiply(p, g, h))
        rhs = {(t, multiply(p, g, k)): c for (t, k), c in spec.symbolic_boundary(o.id, h).items()}
        assert lhs == rhs


@pytest.mark.parametrize("name", ["z2-torus", "heisenberg3"])
def test_windows_nest(name):
    spec = complex_spec(name)
    small, big = instantiate_window(spec, 1), instantiate_window(spec, 2)
    for d, cells in small.cells.items():
        assert set(cells) <= set(big.cells[d])
        for j in small.complete_cells(d):
            labels = {(small.cells[d - 1][i], c) for i, c in small.boundary[d][j]} if d else set()
            jj = big.index[d][cells[j]]
            big_labels = {(big.cells[d - 1][i], c) for i, c in big.boundary[d][jj]} if d else set()
            assert labels == big_labels


def test_window_cells_are_ball():
    spec = complex_spec("heisenberg3")
    w = instantiate_window(spec, 2)
    assert {g for _, g in w.cells[0]} == set(ball_enumerate(spec.group, 2))


def test_clipped_columns_refuse():
    w = instantiate_window(complex_spec("z2-torus"), 1)
    clipped = sorted(w.clipped[1])
    assert clipped
    with pytest.raises(WindowTooSmallError):
        w.column(1, clipped[0])
    with pytest.raises(WindowTooSmallError):
        w.find(0, "v", reduce_word(w.group, ("x", "x", "x")))


def test_noncommuting_map_rejected():
    src = complex_spec("z2-torus")
    with pytest.raises(MapValidationError):
        ChainMapSpec("bad", src, src, {"x": "x", "y": "y"},
                     {"v": ((1, "", "v"),), "x": ((2, "", "x"),), "y": ((1, "", "y"),),
                      "xy": ((1, "", "xy"),)})


@pytest.mark.parametrize("name", [m["name"] for m in catalog()["maps"]])
def test_builtin_maps_commute_on_windows(name):
    m = chain_map(name)
    instantiate_map(m, instantiate_window(m.source, 2), instantiate_window(m.target, 3))
