import pytest

from fillvol.builtins import chain_map, complex_spec
from fillvol.complexes import eilenberg_trick, instantiate_map
from fillvol.errors import ValidationError
from fillvol.functions import (
    EXACT,
    LOWER_BOUND,
    DegenerateFitError,
    check_norm_equivalence,
    dehn_consistency,
    fv_table,
    linear_equiv_fit,
    operator_bound,
    subgroup_inequality_check,
)
from oracles import fv_from_components, frontier_cycles, z2_winding_fill

# frozen from the frontier oracle with winding-number fills (see test_z2_fv_matches_oracle)
Z2_FV = [0, 0, 0, 1, 1, 2, 2, 4]


def test_z2_fv_table(fv):
    t = fv("z2-torus", 1, 8, 4)
    assert [r.value for r in t.rows] == Z2_FV
    assert all(r.status == EXACT and r.mode == "exhaustive" for r in t.rows)
    assert t.row(3).value == 0 and t.row(4).value == 1 and t.row(8).value == 4
    assert t.row(8).witness is not None


def test_z2_fv_matches_oracle():
    conn = {}
    for c in frontier_cycles(2, 1, 8):
        n = sum(abs(v) for _, v in c)
        conn[n] = max(conn.get(n, 0), z2_winding_fill(dict(c)))
    assert fv_from_components(conn, 8)[1:] == Z2_FV


def test_z3_fv_table_dim2(fv):
    t = fv("z3-cubes", 2, 6, 2)
    assert t.row(5).value == 0 and t.row(6).value == 1
    assert t.row(6).cycles == 2


def test_z3_fv_table_dim1(fv):
    t = fv("z3-cubes", 1, 8, 3)
    assert [r.value for r in t.rows] == [0, 0, 0, 1, 1, 3, 3, 4]


def test_fv_monotone_and_equal_to_max(fv):
    t = fv("z2-torus", 1, 8, 4)
    vals = [r.value for r in t.rows]
    assert vals == sorted(vals)


def test_free_group_fv_is_zero():
    t = fv_table(complex_spec("free2"), 1, 6, radius=3)
    assert [r.value for r in t.rows] == [0] * 6
    assert all(r.status == EXACT and r.cycles == 0 for r in t.rows)


def test_fv_after_wedging_a_sphere():
    # on a tree the only cycles are multiples of the wedged circle, each capped once per unit
    t = fv_table(eilenberg_trick(complex_spec("free2"), 1), 1, 5, radius=2)
    assert [r.value for r in t.rows] == [1, 2, 3, 4, 5]


def test_fv_rejects_bad_dimension():
    with pytest.raises(ValidationError):
        fv_table(complex_spec("free2"), 2, 4)


def test_fv_degrades_to_circuits():
    t = fv_table(complex_spec("z2-torus"), 1, 10, radius=3, k_cap=6)
    assert [r.mode for r in t.rows] == ["exhaustive"] * 6 + ["circuits"] * 4
    assert all(r.status == LOWER_BOUND for r in t.rows[6:])
    assert t.notes


def test_fv_window_stability(fv):
    small = fv("z2-torus", 1, 6, 3)
    big = fv("z2-torus", 1, 8, 4)
    assert [r.value for r in small.rows] == [r.value for r in big.rows][:6]


@pytest.mark.parametrize("name,dim,const", [
    ("z2-identity", 1, 1), ("z2-double", 1, 2), ("z2-subdivide", 1, 2),
    ("z2-subdivide", 2, 1), ("redundant-to-z2", 1, 2), ("gersten-double(2)", 2, 2),
])
def test_operator_bound_examples(win, name, dim, const):
    m = chain_map(name)
    cmap = instantiate_map(m, win(m.source.label, 2), win(m.target.label, 3))
    rep = operator_bound(cmap, dim)
    assert rep.constant == const
    assert rep.samples == 500 and rep.failures == 0
    assert rep.max_ratio <= const


def test_norm_equivalence_torus_vs_redundant():
    rep = check_norm_equivalence(chain_map("z2-to-redundant"), chain_map("redundant-to-z2"),
                                 1, samples=50)
    assert len(rep.samples) >= 50
    assert rep.ok, rep.violations
    for s in rep.samples:
        assert s.norm_b <= rep.constant_ab * s.norm_a
        assert s.norm_back <= rep.constant_ba * s.norm_b


def test_norm_equivalence_identity():
    m = chain_map("z2-identity")
    rep = check_norm_equivalence(m, m, 1, samples=50)
    assert rep.ok and rep.constant_ab == rep.constant_ba == 1
    assert rep.ratios() == (1.0, 1.0)


def test_norm_equivalence_gersten_doubling():
    rep = check_norm_equivalence(chain_map("gersten-double(2)"), None, 1, samples=3,
                                 radius_a=0, radius_b=0)
    assert rep.constant_ab == 2
    assert rep.ok, rep.violations
    assert all(s.norm_b <= 2 * s.norm_a for s in rep.samples)


def test_dehn_consistency(fv):
    t = fv("z2-torus", 1, 8, 4)
    rep = dehn_consistency(complex_spec("z2-torus"), 8, radius=4, fv=t)
    assert rep.ok
    rows = {k: (a, d) for k, a, d, _, _, _ in rep.rows}
    assert rows[4] == (1, 1) and rows[8] == (4, 4)


def test_linear_fit_identical():
    f = {k: k * k for k in range(1, 7)}
    assert linear_equiv_fit(f, {k: k * k for k in range(1, 30)}).constant == 1


def _scan(f, g, cap):
    for c in range(1, cap + 1):
        if all(v <= c * g(c * k + c) + c * k + c for k, v in f.items()):
            return c
    return None


def test_linear_fit_square_vs_linear():
    f = {k: k * k for k in range(1, 7)}
    res = linear_equiv_fit(f, lambda x: x, 10)
    assert res.constant == _scan(f, lambda x: x, 10) == 2
    assert all(v <= 5 * (5 * k + 5) + 5 * k + 5 for k, v in f.items())


def test_linear_fit_exponential_fails():
    f = {k: 2 ** k for k in range(1, 11)}
    assert linear_equiv_fit(f, lambda x: x, 3).constant is None


def test_linear_fit_skips_rows_past_table():
    res = linear_equiv_fit({1: 0, 2: 0, 3: 0}, {k: 0 for k in range(1, 4)}, 3)
    assert res.constant == 1 and res.skipped == [3]


def test_linear_fit_degenerate():
    with pytest.raises(DegenerateFitError):
        linear_equiv_fit({}, {1: 1})
    with pytest.raises(DegenerateFitError):
        linear_equiv_fit({5: 1}, {1: 1}, 2)


def test_subgroup_z2_in_z3(fv, win):
    th, tg = fv("z2-torus", 1, 8, 4), fv("z3-cubes", 1, 8, 3)
    emb = instantiate_map(chain_map("z2-in-z3"), win("z2-torus", 4), win("z3-cubes", 4))
    ret = instantiate_map(chain_map("z3-onto-z2"), win("z3-cubes", 2), win("z2-torus", 3))
    rep = subgroup_inequality_check(th, tg, emb, c_cap=10, retraction=ret)
    assert rep.constant is not None and rep.constant <= 4
    assert rep.ok and rep.non_exact == []
    assert rep.embedding_checked > 0
    assert rep.retraction["failures"] == 0


def test_subgroup_identity(fv, win):
    t = fv("z2-torus", 1, 8, 4)
    emb = instantiate_map(chain_map("z2-identity"), win("z2-torus", 4), win("z2-torus", 4))
    rep = subgroup_inequality_check(t, t, emb)
    assert rep.constant == 1 and rep.ok


def test_subgroup_free_in_z2(win, fv):
    h = fv_table(complex_spec("free2"), 1, 8, radius=3)
    emb = instantiate_map(chain_map("free2-in-z2"), win("free2", 3), win("z2-torus", 3))
    rep = subgroup_inequality_check(h, fv("z2-torus", 1, 8, 4), emb)
    assert rep.constant == 1
    assert all(v[1] == 0 for v in rep.verdicts)
