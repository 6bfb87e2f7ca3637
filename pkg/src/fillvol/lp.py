"""Exact rational simplex and best-bound branch-and-bound.

Only integers and rationals appear: gmpy2's ``mpq`` when available,
``fractions.Fraction`` otherwise. Pivoting follows Bland's rule.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import ResourceLimitError

try:  # pragma: no cover - depends on the environment
    from gmpy2 import mpq as Q
except ImportError:  # pragma: no cover
    Q = Fraction

ZERO = Q(0)
ONE = Q(1)


def to_fraction(q) -> Fraction:
    return Fraction(int(q.numerator), int(q.denominator))


@dataclass
class LPResult:
    status: str                  # "optimal" or "infeasible"
    value: Fraction | None = None
    x: list = field(default_factory=list)   # Fractions
    pivots: int = 0


def simplex(A, b, c) -> LPResult:
    """Minimize ``c.x`` subject to ``A x = b``, ``x >= 0``.

    ``A`` is a list of sparse rows ``{col: coef}`` over ``len(c)`` columns;
    entries may be ints or rationals. Two-phase tableau method. The problem
    is assumed bounded (true for nonnegative costs).
    """
    m, n = len(A), len(c)
    rows = []
    rhs = []
    for r, bi in zip(A, b):
        sgn = -1 if bi < 0 else 1
        row = [ZERO] * (n + m)
        for j, a in r.items():
            row[j] = Q(a) * sgn
        rows.append(row)
        rhs.append(Q(bi) * sgn)
    for i in range(m):
        rows[i][n + i] = ONE
    basis = [n + i for i in range(m)]
    pivots = 0

    def pivot(r, j):
        nonlocal pivots
        pivots += 1
        prow = rows[r]
        piv = prow[j]
        if piv != ONE:
            inv = ONE / piv
            for t in range(len(prow)):
                if prow[t]:
                    prow[t] *= inv
            rhs[r] *= inv
        nz = [t for t in range(len(prow)) if prow[t]]
        for i in range(m):
            if i == r:
                continue
            f = rows[i][j]
            if f:
                ri = rows[i]
                for t in nz:
                    ri[t] -= f * prow[t]
                rhs[i] -= f * rhs[r]
        basis[r] = j

    def run(cost, allowed):
        # reduced costs recomputed from the basis each iteration (small problems)
        while True:
            cb = [cost[basis[i]] for i in range(m)]
            in_basis = set(basis)
            enter = None
            for j in allowed:
                if j in in_basis:
                    continue
                red = cost[j] - sum(cb[i] * rows[i][j] for i in range(m) if rows[i][j])
                if red < 0:
                    enter = j
                    break
            if enter is None:
                return
            best = None
            for i in range(m):
                a = rows[i][enter]
                if a > 0:
                    ratio = rhs[i] / a
                    key = (ratio, basis[i])
                    if best is None or key < best[0]:
                        best = (key, i)
            if best is None:
                raise ArithmeticError("unbounded linear program")
            pivot(best[1], enter)

    cost1 = [ZERO] * n + [ONE] * m
    run(cost1, range(n + m))
    phase1 = sum(rhs[i] for i in range(m) if basis[i] >= n)
    if phase1 > 0:
        return LPResult("infeasible", pivots=pivots)
    # drive artificial variables out of the basis; drop redundant rows
    keep = []
    for i in range(m):
        if basis[i] >= n:
            j = next((j for j in range(n) if rows[i][j] != 0 and j not in basis), None)
            if j is None:
                continue
            pivot(i, j)
        keep.append(i)
    rows = [rows[i][:n] for i in keep]
    rhs = [rhs[i] for i in keep]
    basis = [basis[i] for i in keep]
    m = len(rows)
    cost2 = [Q(v) for v in c]
    run(cost2, range(n))
    x = [ZERO] * n
    for i in range(m):
        x[basis[i]] = rhs[i]
    value = sum(cost2[j] * x[j] for j in range(n) if x[j])
    return LPResult("optimal", to_fraction(Q(value)), [to_fraction(v) for v in x], pivots)


@dataclass
class MILPResult:
    status: str                  # "optimal" or "infeasible"
    value: int | None
    x: list                      # ints
    lp_bound: Fraction | None
    lp_x: list
    nodes: int


def _with_bounds(A, b, n, bounds):
    """Append ``x_j <= u`` / ``x_j >= l`` rows using fresh slack columns."""
    A2 = [dict(r) for r in A]
    b2 = list(b)
    extra = 0
    for (j, kind), val in sorted(bounds.items()):
        s = n + extra
        extra += 1
        A2.append({j: 1, s: 1 if kind == "ub" else -1})
        b2.append(val)
    return A2, b2, extra


def branch_and_bound(A, b, c, node_budget: int = 20_000) -> MILPResult:
    """Minimize ``c.x`` over nonnegative integer ``x`` with ``A x = b``.

    Best-bound node order; branching on the most fractional coordinate, ties
    broken by the lower index. ``c`` must be integral so that ceilings of LP
    bounds are valid pruning thresholds.
    """
    n = len(c)
    root = _solve_node(A, b, c, n, {})
    if root.status == "infeasible":
        return MILPResult("infeasible", None, [], None, [], 1)
    incumbent = None
    heap = [(root.value, 0, {}, root)]
    counter = 1
    nodes = 0
    while heap:
        bound, _, bounds, res = heapq.heappop(heap)
        if incumbent is not None and math.ceil(bound) >= incumbent[0]:
            continue
        nodes += 1
        if nodes > node_budget:
            raise ResourceLimitError(
                f"branch-and-bound exceeded {node_budget} nodes",
                partial={"lp_bound": root.value,
                         "best": incumbent[0] if incumbent else None},
            )
        frac = [(abs(v - math.floor(v) - Fraction(1, 2)), j)
                for j, v in enumerate(res.x) if v.denominator != 1]
        if not frac:
            val = int(res.value)
            if incumbent is None or val < incumbent[0]:
                incumbent = (val, [int(v) for v in res.x])
            continue
        _, j = min(frac)
        v = res.x[j]
        for kind, lim in (("ub", math.floor(v)), ("lb", math.ceil(v))):
            nb = dict(bounds)
            key = (j, kind)
            if kind == "ub" and (j, "ub") in nb:
                lim = min(lim, nb[key])
            if kind == "lb" and (j, "lb") in nb:
                lim = max(lim, nb[key])
            nb[key] = lim
            if (j, "lb") in nb and (j, "ub") in nb and nb[(j, "lb")] > nb[(j, "ub")]:
                continue
            child = _solve_node(A, b, c, n, nb)
            if child.status == "infeasible":
                continue
            if incumbent is not None and math.ceil(child.value) >= incumbent[0]:
                continue
            heapq.heappush(heap, (child.value, counter, nb, child))
            counter += 1
    if incumbent is None:
        return MILPResult("infeasible", None, [], root.value, root.x, nodes)
    return MILPResult("optimal", incumbent[0], incumbent[1], root.value, root.x, nodes)


def _solve_node(A, b, c, n, bounds):
    A2, b2, extra = _with_bounds(A, b, n, bounds)
    res = simplex(A2, b2, list(c) + [0] * extra)
    if res.status == "optimal":
        res.x = res.x[:n]
    return res


def integer_solution(A, b, n):
    """An integer ``x`` with ``A x = b`` (no sign constraint), or ``None``.

    Column-style Hermite elimination with unimodular column operations,
    followed by forward substitution.
    """
    m = len(A)
    M = [[0] * n for _ in range(m)]
    for i, r in enumerate(A):
        for j, a in r.items():
            M[i][j] = int(a)
    U = [[int(i == j) for j in range(n)] for i in range(n)]

    def col_op(j, k, a, bb, c, d):
        # (col_j, col_k) <- (a col_j + bb col_k, c col_j + d col_k)
        for R in (M, U):
            for row in R:
                x, y = row[j], row[k]
                row[j], row[k] = a * x + bb * y, c * x + d * y

    pivots = []
    col = 0
    for i in range(m):
        if col >= n:
            break
        for k in range(col + 1, n):
            if M[i][k] == 0:
                continue
            x, y = M[i][col], M[i][k]
            g, s, t = _xgcd(x, y)
            col_op(col, k, s, t, -y // g, x // g)
        if M[i][col] != 0:
            pivots.append((i, col))
            col += 1
    y = [0] * n
    prow = {i: c for i, c in pivots}
    for i in range(m):
        acc = sum(M[i][j] * y[j] for j in range(n) if M[i][j] and j not in (prow.get(i),))
        rem = int(b[i]) - acc
        if i in prow:
            c = prow[i]
            if rem % M[i][c]:
                return None
            y[c] = rem // M[i][c]
        elif rem:
            return None
    return [sum(U[r][j] * y[j] for j in range(n)) for r in range(n)]


def _xgcd(a, b):
    # returns (g, s, t) with s*a + t*b = g > 0
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t
