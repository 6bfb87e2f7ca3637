"""Filling norms: least l1 norm of a chain with prescribed boundary."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction

from .chains import (
    Chain,
    _search_order,
    boundary,
    bounded_solutions,
    chain_from_literal,
    is_cycle,
    l1_norm,
)
from .complexes import ComplexWindow, EquivariantComplexSpec, instantiate_window
from .errors import InconsistencyError, ValidationError
from .lp import branch_and_bound, integer_solution, simplex

WINDOW_EXACT = "window-exact-upper-bound"
STABILIZED = "stabilized"
INFEASIBLE = "infeasible-in-window"

DEFAULT_NODE_BUDGET = 20_000


@dataclass(frozen=True)
class FillingInstance:
    window: ComplexWindow
    target: Chain

    def __post_init__(self):
        if self.target.window is not self.window:
            raise ValidationError("target chain belongs to another window")
        if self.target.dim + 1 > self.window.spec.top_dim:
            raise ValidationError(f"no cells of dimension {self.target.dim + 1} to fill with")
        if self.target.dim >= 1 and not is_cycle(self.target):
            raise ValidationError("filling target is not a cycle", field="target")

    @property
    def dim(self):
        return self.target.dim + 1


@dataclass
class FillingCertificate:
    value: int | None
    witness: Chain | None
    lp_bound: Fraction | None
    status: str
    radius: int
    node_count: int = 0
    elapsed_ms: float = 0.0
    lp_witness: dict = field(default_factory=dict, repr=False)

    @property
    def feasible(self):
        return self.value is not None

    def as_dict(self, timing=True):
        d = {
            "value": self.value,
            "status": self.status,
            "lp_bound": None if self.lp_bound is None else
            f"{self.lp_bound.numerator}/{self.lp_bound.denominator}",
            "witness": None if self.witness is None else self.witness.to_literal(),
            "radius": self.radius,
            "node_count": self.node_count,
        }
        if timing:
            d["elapsed_ms"] = round(self.elapsed_ms, 3)
        return d


@dataclass
class _Reduced:
    cols: list          # remaining free column indices (cells of dim n+1)
    rows: list          # remaining row indices (cells of dim n)
    A: dict             # row -> {col: coef}
    b: dict             # row -> Fraction
    fixed: dict         # col -> Fraction
    infeasible: bool = False
    integral: bool = True


def _presolve(inst: FillingInstance) -> _Reduced:
    """Fix columns forced by rows with a single live column.

    A row touched by one undecided column determines that column's value; a
    row touched by none must already be satisfied. Both rules are exact for
    the linear relaxation and the integer problem alike.
    """
    w, n1 = inst.window, inst.dim
    cols = w.complete_cells(n1)
    A, touching = {}, {}
    for j in cols:
        for i, a in w.boundary[n1][j]:
            A.setdefault(i, {})[j] = a
            touching.setdefault(j, []).append(i)
    b = {i: Fraction(0) for i in A}
    for i, v in inst.target.terms:
        if i not in A:
            return _Reduced([], [], {}, {}, {}, infeasible=True)
        b[i] = Fraction(v)
    fixed = {}
    integral = True
    live = set(cols)
    queue = [i for i in A if len(A[i]) <= 1]
    while queue:
        i = queue.pop()
        if i not in A:
            continue
        row = A[i]
        if not row:
            if b[i] != 0:
                return _Reduced([], [], {}, {}, {}, infeasible=True)
            del A[i], b[i]
            continue
        if len(row) > 1:
            continue
        (j, a), = row.items()
        val = b[i] / a
        if val.denominator != 1:
            integral = False
        fixed[j] = val
        live.discard(j)
        for r in touching[j]:
            if r in A and j in A[r]:
                b[r] -= A[r].pop(j) * val
                if len(A[r]) <= 1:
                    queue.append(r)
    return _Reduced(sorted(live), sorted(A), A, b, fixed, integral=integral)


def _split_system(red: _Reduced):
    """Rows ``sum_j a_ij (u_j - v_j) = b_i`` over nonnegative ``u, v``."""
    pos = {j: k for k, j in enumerate(red.cols)}
    nc = len(red.cols)
    A, b = [], []
    for i in red.rows:
        row = {}
        for j, a in red.A[i].items():
            row[pos[j]] = a
            row[nc + pos[j]] = -a
        A.append(row)
        b.append(red.b[i])
    return A, b, [1] * (2 * nc)


def _scale_rows(A, b):
    # clear denominators so the integer routines see integer data
    A2, b2 = [], []
    for row, bi in zip(A, b):
        den = 1
        for v in list(row.values()) + [bi]:
            den = den * Fraction(v).denominator // _gcd(den, Fraction(v).denominator)
        A2.append({j: int(Fraction(v) * den) for j, v in row.items()})
        b2.append(int(Fraction(bi) * den))
    return A2, b2


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


def lp_relaxation(inst: FillingInstance):
    """Exact optimum of the linear relaxation: ``(value, {cell_index: Fraction})``.

    Returns ``(None, {})`` when the relaxation is infeasible in the window.
    """
    red = _presolve(inst)
    if red.infeasible:
        return None, {}
    fixed_cost = sum(abs(v) for v in red.fixed.values())
    if not red.cols:
        if any(red.b[i] for i in red.rows):
            return None, {}
        return fixed_cost, {j: v for j, v in red.fixed.items() if v}
    A, b, c = _split_system(red)
    res = simplex(A, b, c)
    if res.status != "optimal":
        return None, {}
    x = _combine(red, res.x)
    return fixed_cost + res.value, x


def _combine(red, x):
    nc = len(red.cols)
    out = {j: v for j, v in red.fixed.items() if v}
    for k, j in enumerate(red.cols):
        u, v = x[k], x[nc + k]
        if u and v:
            raise InconsistencyError("optimal basis uses both signs of one cell")
        if u - v:
            out[j] = u - v
    return out


def fill_norm(inst: FillingInstance, node_budget: int = DEFAULT_NODE_BUDGET) -> FillingCertificate:
    """Least l1 norm of an integer chain on complete window cells with boundary ``target``."""
    t0 = time.perf_counter()
    w = inst.window
    red = _presolve(inst)
    if red.infeasible or (not red.integral):
        status_lp = None if red.infeasible else lp_relaxation(inst)[0]
        return FillingCertificate(None, None, status_lp, INFEASIBLE, w.radius, 0,
                                  (time.perf_counter() - t0) * 1e3)
    fixed = {j: int(v) for j, v in red.fixed.items() if v}
    fixed_cost = sum(abs(v) for v in fixed.values())
    if not red.cols:
        if any(red.b[i] for i in red.rows):
            return FillingCertificate(None, None, None, INFEASIBLE, w.radius, 0,
                                      (time.perf_counter() - t0) * 1e3)
        return _certify(inst, fixed, Fraction(fixed_cost), 0, t0, dict(fixed))
    A, b, c = _split_system(red)
    Ai, bi = _scale_rows(A, b)
    nc = len(red.cols)
    if integer_solution([{k: v for k, v in r.items() if k < nc} for r in Ai], bi, nc) is None:
        lp = simplex(A, b, c)
        lpb = None if lp.status != "optimal" else fixed_cost + lp.value
        return FillingCertificate(None, None, lpb, INFEASIBLE, w.radius, 0,
                                  (time.perf_counter() - t0) * 1e3)
    res = branch_and_bound(Ai, bi, c, node_budget=node_budget)
    if res.status != "optimal":
        lpb = None if res.lp_bound is None else fixed_cost + res.lp_bound
        return FillingCertificate(None, None, lpb, INFEASIBLE, w.radius, res.nodes,
                                  (time.perf_counter() - t0) * 1e3)
    coeffs = dict(fixed)
    for k, j in enumerate(red.cols):
        u, v = res.x[k], res.x[nc + k]
        if u and v:
            raise InconsistencyError("optimal integer point uses both signs of one cell")
        if u - v:
            coeffs[j] = u - v
    lp_x = _combine(red, res.lp_x)
    return _certify(inst, coeffs, fixed_cost + res.lp_bound, res.nodes, t0, lp_x)


def _certify(inst, coeffs, lp_bound, nodes, t0, lp_x):
    witness = Chain.from_dict(inst.window, inst.dim, coeffs)
    if boundary(witness) != inst.target:
        raise InconsistencyError("filling witness does not have the target boundary")
    value = l1_norm(witness)
    if lp_bound > value:
        raise InconsistencyError("linear relaxation bound exceeds the integer optimum")
    return FillingCertificate(value, witness, Fraction(lp_bound), WINDOW_EXACT,
                              inst.window.radius, nodes,
                              (time.perf_counter() - t0) * 1e3, lp_x)


def fill(window: ComplexWindow, target: Chain, **kw) -> FillingCertificate:
    return fill_norm(FillingInstance(window, target), **kw)


def escalate_until_stable(spec: EquivariantComplexSpec, target_literal, dim: int,
                          r0: int, r_max: int, node_budget: int = DEFAULT_NODE_BUDGET,
                          windows: dict | None = None):
    """Fill the same labelled cycle in windows of radius ``r0, r0 + 1, ...``.

    Stops at the first radius whose value equals the previous one (that
    certificate is marked ``stabilized``) or at ``r_max``. Values can only
    decrease as the window grows; every feasible value is an upper bound.
    """
    if r_max < r0:
        raise ValidationError("r_max must be at least r0")
    certs = []
    prev = None
    for r in range(r0, r_max + 1):
        w = (windows or {}).get(r) or instantiate_window(spec, r)
        target = chain_from_literal(w, dim, target_literal)
        cert = fill(w, target, node_budget=node_budget)
        if prev is not None and prev.feasible:
            if not cert.feasible or cert.value > prev.value:
                raise InconsistencyError("filling value grew with the window")
        certs.append(cert)
        if prev is not None and prev.feasible and cert.value == prev.value:
            cert.status = STABILIZED
            break
        prev = cert
    return certs


def exhaustive_fill(window: ComplexWindow, target: Chain, budget: int,
                    node_budget: int = 50_000_000):
    """Reference minimum by depth-first enumeration of all fillings with norm <= budget.

    Shares no code with the linear-programming path. Returns ``None`` when
    no filling of norm at most ``budget`` exists.
    """
    n1 = target.dim + 1
    cols = window.complete_cells(n1)
    if not target:
        return 0
    order, n_seed = _search_order(window, n1, cols)
    best = [None]

    def seen(x):
        v = sum(abs(c) for c in x.values())
        if best[0] is None or v < best[0]:
            best[0] = v

    for k in range(1, budget + 1):
        bounded_solutions(window, n1, cols, order, n_seed, k, rhs=dict(target.terms),
                          node_budget=node_budget, on_solution=seen, require_seed=False)
        if best[0] is not None:
            return best[0]
    return None
