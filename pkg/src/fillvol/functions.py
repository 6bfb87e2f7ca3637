"""Filling functions and the comparison checks built on them."""

from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass, field

from .chains import (
    Chain,
    boundary,
    enumerate_cycles,
    is_cycle,
    l1_norm,
    push_forward,
    random_chain,
)
from .complexes import ChainMap, ChainMapSpec, EquivariantComplexSpec, instantiate_map, instantiate_window
from .errors import (
    MapValidationError,
    ResourceLimitError,
    ValidationError,
    WindowTooSmallError,
)
from .filling import DEFAULT_NODE_BUDGET, INFEASIBLE, FillingCertificate, fill

EXACT = "exact"
LOWER_BOUND = "lower-bound"


def witness_id(c: Chain | None) -> str:
    """Short content hash of a chain's labelled literal ("-" for no chain)."""
    if c is None:
        return "-"
    blob = json.dumps(c.to_literal(), separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:12]


# -- FV tables -------------------------------------------------------------------


@dataclass
class FVRow:
    k: int
    value: int
    witness: Chain | None
    mode: str
    status: str
    cycles: int = 0
    unfillable: int = 0


@dataclass
class FVTable:
    label: str
    dim: int
    radius: int
    rows: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    def values(self):
        return {r.k: r.value for r in self.rows}

    def exact_values(self):
        return {r.k: r.value for r in self.rows if r.status == EXACT}

    def row(self, k):
        return next(r for r in self.rows if r.k == k)

    def csv_rows(self):
        return [(r.k, r.value, r.status, r.mode, witness_id(r.witness), self.radius)
                for r in self.rows]

    def as_dict(self):
        return {
            "complex": self.label, "dim": self.dim, "radius": self.radius,
            "rows": [{"k": r.k, "value": r.value, "status": r.status, "mode": r.mode,
                      "witness_id": witness_id(r.witness), "cycles": r.cycles,
                      "unfillable": r.unfillable} for r in self.rows],
            "witnesses": {witness_id(r.witness): r.witness.to_literal()
                          for r in self.rows if r.witness is not None},
            "notes": list(self.notes),
        }


def default_radius(spec: EquivariantComplexSpec, n: int, k_max: int) -> int:
    # a norm-k cycle spans at most k cells; half of that reaches any of them
    # from a canonical anchor, plus one so the filling has room
    return max(2, min(4, k_max // 2 + 1)) if n == 1 else 2


def _fill_all(window, cycles, node_budget):
    if cycles and cycles[0].dim + 1 > window.spec.top_dim:
        # nothing to fill with: every cycle is unfillable
        return [(c, FillingCertificate(None, None, None, INFEASIBLE, window.radius))
                for c in cycles]
    return [(c, fill(window, c, node_budget=node_budget)) for c in cycles]


def fv_table(spec: EquivariantComplexSpec, n: int, k_max: int, mode: str = "exhaustive",
             radius: int | None = None, window=None, k_cap: int = 8,
             enum_cap: int = 200_000, node_budget: int = DEFAULT_NODE_BUDGET) -> FVTable:
    """Running maxima of certified filling norms over the enumerated cycles.

    Exhaustive rows are exact within the window. Rows past the exhaustive
    caps fall back to simple circuits (dim 1) and are labelled lower bounds.
    """
    if k_max < 1:
        raise ValidationError("k_max must be >= 1", field="max_k")
    if not 1 <= n <= spec.top_dim:
        raise ValidationError(f"{spec.label} has no cells of dimension {n}", field="dim")
    if mode not in ("exhaustive", "circuits"):
        raise ValidationError(f"unknown mode {mode!r}", field="mode")
    if window is None:
        radius = default_radius(spec, n, k_max) if radius is None else radius
        window = instantiate_window(spec, radius)
    table = FVTable(spec.label, n, window.radius)

    row_mode = {k: mode for k in range(1, k_max + 1)}
    cycles = []
    if mode == "exhaustive":
        k_ok = 0
        try:
            cycles = enumerate_cycles(window, n, k_max, "exhaustive", k_cap=k_cap,
                                      enum_cap=enum_cap)
            k_ok = k_max
        except ResourceLimitError as exc:
            # find the largest k that still fits, then degrade the rest
            for k in range(1, k_max + 1):
                try:
                    cycles = enumerate_cycles(window, n, k, "exhaustive", k_cap=k_cap,
                                              enum_cap=enum_cap)
                    k_ok = k
                except ResourceLimitError:
                    break
            if n != 1:
                raise ResourceLimitError(
                    f"exhaustive enumeration stopped at k = {k_ok}; no circuit fallback "
                    f"in dimension {n}", partial={"k_exhaustive": k_ok}) from exc
            table.notes.append(f"exhaustive enumeration capped at k = {k_ok}: {exc}")
            for k in range(k_ok + 1, k_max + 1):
                row_mode[k] = "circuits"
        extra = []
        if k_ok < k_max:
            seen = {c.terms for c in cycles}
            extra = [c for c in enumerate_cycles(window, n, k_max, "circuits",
                                                 enum_cap=enum_cap) if c.terms not in seen]
        cycles = cycles + extra
    else:
        cycles = enumerate_cycles(window, n, k_max, "circuits", enum_cap=enum_cap)

    filled = sorted(_fill_all(window, cycles, node_budget), key=lambda p: l1_norm(p[0]))
    best, best_w = 0, None
    count = unfillable = 0
    pos = 0
    for k in range(1, k_max + 1):
        while pos < len(filled) and l1_norm(filled[pos][0]) <= k:
            c, cert = filled[pos]
            count += 1
            if cert.feasible:
                if cert.value > best:
                    best, best_w = cert.value, c
            else:
                unfillable += 1
            pos += 1
        m = row_mode[k]
        status = EXACT if m == "exhaustive" and unfillable == 0 else LOWER_BOUND
        table.rows.append(FVRow(k, best, best_w, m, status, count, unfillable))
    if unfillable:
        table.notes.append(f"{unfillable} cycles had no filling inside the window")
    return table


# -- operator bounds -------------------------------------------------------------


@dataclass
class OperatorBound:
    label: str
    dim: int
    constant: int
    witness_orbit: str | None
    samples: int = 0
    max_ratio: float = 0.0
    failures: int = 0

    def as_dict(self):
        return {"map": self.label, "dim": self.dim, "constant": self.constant,
                "witness_orbit": self.witness_orbit, "samples": self.samples,
                "max_ratio": self.max_ratio, "failures": self.failures}


def _bound_constant(mspec: ChainMapSpec, dim):
    norms = mspec.orbit_norms()
    best, arg = 0, None
    for o in mspec.source.orbits_of_dim(dim):
        if norms[o.id] > best or arg is None:
            best, arg = max(best, norms[o.id]), o.id
    return best, arg


def operator_bound(cmap: ChainMap, dim: int, samples: int = 500, seed: int = 0) -> OperatorBound:
    """Largest image norm of a basis orbit, checked on random window chains."""
    if cmap.source.spec.top_dim < dim:
        raise ValidationError(f"{cmap.label}: no cells of dimension {dim}", field="dim")
    const, arg = _bound_constant(cmap.spec, dim)
    cols = [j for j in range(len(cmap.source.cells[dim])) if j not in cmap.clipped[dim]]
    if not cols:
        raise WindowTooSmallError(f"{cmap.label}: every dimension-{dim} image leaves the window")
    rng = random.Random(seed)
    rep = OperatorBound(cmap.label, dim, const, arg)
    for _ in range(samples):
        x = random_chain(rng, cmap.source, dim, cols)
        nx, ny = l1_norm(x), l1_norm(push_forward(cmap, x))
        rep.samples += 1
        rep.max_ratio = max(rep.max_ratio, ny / nx)
        if ny > const * nx:
            rep.failures += 1
    return rep


# -- norm equivalence ------------------------------------------------------------


@dataclass
class EquivalenceSample:
    cycle: list
    norm_a: int
    norm_b: int
    norm_back: int | None
    roundtrip: bool


@dataclass
class EquivalenceReport:
    label_a: str
    label_b: str
    dim: int
    constant_ab: int
    constant_ba: int | None
    samples: list = field(default_factory=list)
    skipped: int = 0
    violations: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.violations

    def ratios(self):
        ab = max((s.norm_b / s.norm_a for s in self.samples if s.norm_a), default=0.0)
        ba = max((s.norm_a / s.norm_b for s in self.samples if s.norm_b), default=0.0)
        return ab, ba

    def as_dict(self):
        ab, ba = self.ratios()
        return {
            "complex_a": self.label_a, "complex_b": self.label_b, "dim": self.dim,
            "constant_ab": self.constant_ab, "constant_ba": self.constant_ba,
            "max_ratio_ab": ab, "max_ratio_ba": ba, "skipped": self.skipped,
            "ok": self.ok, "violations": self.violations,
            "samples": [{"cycle": s.cycle, "norm_a": s.norm_a, "norm_b": s.norm_b,
                         "norm_back": s.norm_back, "roundtrip": s.roundtrip}
                        for s in self.samples],
        }


def sample_cycles(window, n, count, rng, k_small=6):
    """Small enumerated cycles first, then boundaries of random (n+1)-chains."""
    out, seen = [], set()
    try:
        small = enumerate_cycles(window, n, k_small, "exhaustive")
    except ResourceLimitError:
        small = []
    for c in small:
        if c.terms not in seen:
            seen.add(c.terms)
            out.append(c)
    cols = window.complete_cells(n + 1)
    cols = [j for j in cols if all(window.is_complete(n, i) for i, _ in window.column(n + 1, j))]
    tries = 0
    while len(out) < count and tries < 50 * count:
        tries += 1
        z = boundary(random_chain(rng, window, n + 1, cols, max_terms=4, max_coef=2))
        if z and z.terms not in seen:
            seen.add(z.terms)
            out.append(z)
    return out[:count] if len(out) > count else out


def check_norm_equivalence(map_ab: ChainMapSpec, map_ba: ChainMapSpec | None, n: int,
                           samples: int = 50, seed: int = 0, radius_a: int = 3,
                           radius_b: int = 3, node_budget: int = DEFAULT_NODE_BUDGET,
                           windows=None) -> EquivalenceReport:
    """Compare filling norms of sampled ``n``-cycles across two complexes.

    The constants are operator bounds of the maps in dimension ``n + 1``.
    Forward: ``|phi m|_B <= C_AB |m|_A``. Backward: ``|psi phi m|_A <=
    C_BA |phi m|_B``, which is ``|m|_A <= C_BA |m|_B`` whenever the round
    trip returns ``m`` itself (recorded per sample).
    """
    if samples < 1:
        raise ValidationError("need at least one sample", field="samples")
    A, B = map_ab.source, map_ab.target
    if map_ba is not None and (map_ba.source is not B or map_ba.target is not A):
        raise ValidationError("reverse map does not go from the second complex to the first")
    windows = windows or {}
    wa = windows.get("a") or instantiate_window(A, radius_a)
    wb = windows.get("b") or instantiate_window(B, radius_b)
    phi = instantiate_map(map_ab, wa, wb)
    psi = instantiate_map(map_ba, wb, wa) if map_ba is not None else None
    c_ab, _ = _bound_constant(map_ab, n + 1)
    c_ba = _bound_constant(map_ba, n + 1)[0] if map_ba is not None else None
    rep = EquivalenceReport(A.label, B.label, n, c_ab, c_ba)
    rng = random.Random(seed)
    for m in sample_cycles(wa, n, 4 * samples, rng):
        if len(rep.samples) == samples:
            break
        try:
            pm = push_forward(phi, m)
        except WindowTooSmallError:
            rep.skipped += 1
            continue
        if not is_cycle(pm):
            raise MapValidationError(f"{map_ab.label} sends a cycle to a non-cycle")
        fa = fill(wa, m, node_budget=node_budget)
        fb = fill(wb, pm, node_budget=node_budget)
        if not (fa.feasible and fb.feasible):
            rep.skipped += 1
            continue
        back, roundtrip = None, False
        if psi is not None:
            try:
                qm = push_forward(psi, pm)
            except WindowTooSmallError:
                qm = None
            if qm is not None:
                if not is_cycle(qm):
                    raise MapValidationError(f"{map_ba.label} sends a cycle to a non-cycle")
                roundtrip = qm == m
                fq = fa if roundtrip else fill(wa, qm, node_budget=node_budget)
                back = fq.value if fq.feasible else None
        s = EquivalenceSample(m.to_literal(), fa.value, fb.value, back, roundtrip)
        rep.samples.append(s)
        if fb.value > c_ab * fa.value:
            rep.violations.append({"cycle": s.cycle, "bound": "forward",
                                   "lhs": fb.value, "rhs": c_ab * fa.value})
        if psi is not None and back is not None and back > c_ba * fb.value:
            rep.violations.append({"cycle": s.cycle, "bound": "backward",
                                   "lhs": back, "rhs": c_ba * fb.value})
    if len(rep.samples) < samples:
        rep.violations.append({"bound": "sample-count", "lhs": len(rep.samples),
                               "rhs": samples})
    return rep


# -- Dehn consistency -------------------------------------------------------------


@dataclass
class DehnReport:
    label: str
    rows: list            # (k, fv, d, k * d, ok, status)

    @property
    def ok(self):
        return all(r[4] for r in self.rows)

    def as_dict(self):
        return {"complex": self.label, "ok": self.ok,
                "rows": [{"k": k, "fv": fv, "circuit_fill": d, "bound": b, "ok": ok,
                          "status": st} for k, fv, d, b, ok, st in self.rows]}


def dehn_consistency(spec: EquivariantComplexSpec, k_max: int, radius: int | None = None,
                     window=None, fv: FVTable | None = None) -> DehnReport:
    """Check ``FV(k) <= k * D(k)`` where ``D`` maximizes over simple circuits."""
    if window is None:
        radius = default_radius(spec, 1, k_max) if radius is None else radius
        window = instantiate_window(spec, radius)
    fv = fv or fv_table(spec, 1, k_max, "exhaustive", window=window)
    d = fv_table(spec, 1, k_max, "circuits", window=window)
    rows = []
    for r in fv.rows:
        if r.status != EXACT:
            continue
        dk = d.row(r.k).value
        rows.append((r.k, r.value, dk, r.k * dk, r.value <= r.k * dk, r.status))
    return DehnReport(spec.label, rows)


# -- linear equivalence fits ------------------------------------------------------


class DegenerateFitError(ValidationError):
    pass


@dataclass
class FitResult:
    constant: int | None
    used: list
    skipped: list
    cap: int

    def as_dict(self):
        return {"constant": self.constant, "cap": self.cap, "used": self.used,
                "skipped": self.skipped}


def _as_lookup(g):
    if callable(g):
        return g, None
    table = dict(g)
    return table.get, max(table) if table else -1


def linear_equiv_fit(f_rows, g_rows, c_cap: int = 10, monotone_floor: bool = False) -> FitResult:
    """Least ``C`` in ``1..c_cap`` with ``f(k) <= C g(Ck + C) + Ck + C`` on usable rows.

    ``f_rows`` and ``g_rows`` are ``{k: value}`` maps (``g`` may also be a
    callable). A row whose ``g`` argument lies past the table is skipped for
    that ``C`` unless ``monotone_floor`` is set, in which case the last
    tabulated value is used as a lower estimate of ``g`` (valid because
    filling functions are non-decreasing). Rows skipped for the chosen ``C``
    are reported.
    """
    if c_cap < 1:
        raise ValidationError("C cap must be >= 1")
    f = dict(f_rows)
    if not f:
        raise DegenerateFitError("no rows to fit")
    g, g_top = _as_lookup(g_rows)

    def g_at(x):
        v = g(x)
        if v is None and monotone_floor and g_top is not None and g_top >= 0 and x > g_top:
            v = g(g_top)
        return v

    any_usable = False
    for c in range(1, c_cap + 1):
        used, skipped, ok = [], [], True
        for k in sorted(f):
            gv = g_at(c * k + c)
            if gv is None:
                skipped.append(k)
                continue
            used.append(k)
            if f[k] > c * gv + c * k + c:
                ok = False
                break
        if used:
            any_usable = True
        if ok and used:
            return FitResult(c, used, skipped, c_cap)
    if not any_usable:
        raise DegenerateFitError("no row has g tabulated at C k + C for any C up to the cap")
    return FitResult(None, [], [], c_cap)


# -- subgroup inequality ----------------------------------------------------------


@dataclass
class SubgroupCheckReport:
    h_label: str
    g_label: str
    embedding: str
    dim: int
    h_rows: list
    g_rows: list
    constant: int | None
    verdicts: list          # (k, fv_h, g_arg, fv_g, rhs, verdict)
    non_exact: list
    retraction: dict | None = None
    embedding_checked: int = 0

    @property
    def ok(self):
        return self.constant is not None and all(v[5] != "violated" for v in self.verdicts)

    def as_dict(self):
        return {
            "h_complex": self.h_label, "g_complex": self.g_label,
            "embedding": self.embedding, "dim": self.dim, "constant": self.constant,
            "ok": self.ok, "non_exact_k": self.non_exact,
            "embedding_cycles_checked": self.embedding_checked,
            "retraction": self.retraction,
            "h_rows": self.h_rows, "g_rows": self.g_rows,
            "verdicts": [{"k": k, "fv_h": a, "g_arg": x, "fv_g": b, "rhs": r, "verdict": v}
                         for k, a, x, b, r, v in self.verdicts],
        }


def _rows(table: FVTable):
    return [{"k": r.k, "value": r.value, "status": r.status, "mode": r.mode}
            for r in table.rows]


def subgroup_inequality_check(h_table: FVTable, g_table: FVTable, embedding: ChainMap,
                              c_cap: int = 10, retraction: ChainMap | None = None,
                              samples: int = 500, seed: int = 0) -> SubgroupCheckReport:
    """Fit one ``C`` with ``FV_H(k) <= C FV_G(Ck + C) + Ck + C`` on exact rows.

    The embedding must carry cycles to cycles; this is checked on every
    FV witness of the H table and on sampled boundaries. Beyond the G
    table the last value is used as a floor (monotonicity), and such rows
    are marked ``floor``.
    """
    n = h_table.dim
    if g_table.dim != n:
        raise ValidationError("FV tables are for different dimensions")
    checked = 0
    rng = random.Random(seed)
    to_check = [r.witness for r in h_table.rows if r.witness is not None]
    try:
        to_check += sample_cycles(embedding.source, n, 20, rng, k_small=4)
    except WindowTooSmallError:
        pass
    for z in to_check:
        if z.window is not embedding.source:
            continue
        try:
            img = push_forward(embedding, z)
        except WindowTooSmallError:
            continue
        if not is_cycle(img):
            raise MapValidationError(f"{embedding.label} sends a cycle to a non-cycle")
        checked += 1

    exact_h = h_table.exact_values()
    exact_g = g_table.exact_values()
    non_exact = sorted(set(h_table.values()) - set(exact_h))
    f_rows = exact_h
    degraded = False
    if not f_rows:
        f_rows, degraded = h_table.values(), True
    g_vals = exact_g or g_table.values()
    fit = linear_equiv_fit(f_rows, g_vals, c_cap, monotone_floor=True)
    c = fit.constant
    g_top = max(g_vals)
    verdicts = []
    for k in sorted(h_table.values()):
        fh = h_table.values()[k]
        if c is None:
            verdicts.append((k, fh, None, None, None, "no-constant"))
            continue
        x = c * k + c
        fg = g_vals.get(x, g_vals[g_top] if x > g_top else None)
        rhs = c * fg + c * k + c
        if fh > rhs:
            v = "violated"
        elif k in non_exact or degraded:
            v = "consistent-with-bound"
        elif x > g_top:
            v = "holds-with-floor"
        else:
            v = "holds"
        verdicts.append((k, fh, x, fg, rhs, v))
    ret = None
    if retraction is not None:
        rb = operator_bound(retraction, n, samples=samples, seed=seed)
        ret = rb.as_dict()
    return SubgroupCheckReport(h_table.label, g_table.label, embedding.label, n,
                               _rows(h_table), _rows(g_table), c, verdicts, non_exact,
                               ret, checked)


__all__ = [
    "EXACT", "LOWER_BOUND", "FVRow", "FVTable", "fv_table", "OperatorBound",
    "operator_bound", "EquivalenceReport", "check_norm_equivalence", "DehnReport",
    "dehn_consistency", "FitResult", "linear_equiv_fit", "DegenerateFitError",
    "SubgroupCheckReport", "subgroup_inequality_check", "witness_id", "sample_cycles",
]
