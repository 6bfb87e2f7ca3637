import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from fillvol.errors import ResourceLimitError
from fillvol.lp import branch_and_bound, integer_solution, simplex


def test_simplex_small():
    res = simplex([{0: 1, 1: 2}], [3], [1, 1])
    assert res.status == "optimal" and res.value == Fraction(3, 2)
    assert res.x == [0, Fraction(3, 2)]


def test_simplex_infeasible():
    assert simplex([{0: 1}, {0: 1}], [1, 2], [1]).status == "infeasible"


def test_simplex_redundant_rows():
    res = simplex([{0: 1, 1: 1}, {0: 2, 1: 2}], [2, 4], [1, 3])
    assert res.status == "optimal" and res.value == 2


def _brute(A, b, c, hi):
    best = None
    for x in itertools.product(range(hi + 1), repeat=len(c)):
        if all(sum(r.get(j, 0) * x[j] for j in range(len(c))) == bi for r, bi in zip(A, b)):
            v = sum(ci * xi for ci, xi in zip(c, x))
            best = v if best is None else min(best, v)
    return best


@given(st.integers(0, 10_000))
def test_branch_and_bound_matches_brute_force(seed):
    rng = random.Random(seed)
    n, m = rng.randint(2, 4), rng.randint(1, 2)
    A = [{j: rng.randint(-3, 3) for j in range(n)} for _ in range(m)]
    x0 = [rng.randint(0, 3) for _ in range(n)]
    b = [sum(r[j] * x0[j] for j in range(n)) for r in A]
    c = [rng.randint(1, 3) for _ in range(n)]
    res = branch_and_bound(A, b, c)
    # the optimum costs at most c.x0 <= 9 n, so entries are bounded by that
    hi = sum(ci * xi for ci, xi in zip(c, x0))
    assert res.status == "optimal"
    assert res.value == _brute(A, b, c, hi)
    assert res.lp_bound <= res.value
    assert all(sum(r.get(j, 0) * res.x[j] for j in range(n)) == bi for r, bi in zip(A, b))


@given(st.integers(0, 10_000))
def test_integer_solution_finds_planted_point(seed):
    rng = random.Random(seed)
    n, m = rng.randint(1, 5), rng.randint(1, 4)
    A = [{j: rng.randint(-4, 4) for j in range(n)} for _ in range(m)]
    x0 = [rng.randint(-3, 3) for _ in range(n)]
    b = [sum(r[j] * x0[j] for j in range(n)) for r in A]
    x = integer_solution(A, b, n)
    assert x is not None
    assert all(sum(r[j] * x[j] for j in range(n)) == bi for r, bi in zip(A, b))


def test_integer_solution_detects_parity():
    assert integer_solution([{0: 2, 1: 4}], [1], 2) is None
    assert integer_solution([{0: 2, 1: 3}], [1], 2) is not None


def test_node_budget():
    # x1 + ... with a fractional LP optimum and a tiny budget
    A = [{0: 2, 1: 2, 2: 2, 3: 2, 4: 1}]
    with pytest.raises(ResourceLimitError):
        branch_and_bound([{0: 3, 1: 5, 2: 7}], [101], [1, 1, 1], node_budget=0)
    assert branch_and_bound(A, [5], [1, 1, 1, 1, 3]).value == 5
