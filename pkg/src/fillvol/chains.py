"""Sparse integer chains on complex windows."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .complexes import ComplexWindow
from .errors import ResourceLimitError, ValidationError, WindowTooSmallError
from .groups import IDENTITY, GroupElement, inverse, multiply, reduce_word

DEFAULT_EXHAUSTIVE_K_CAP = 8
DEFAULT_ENUM_CAP = 200_000
DEFAULT_SEARCH_NODES = 20_000_000


@dataclass(frozen=True, eq=False)
class Chain:
    """Integer combination of the dim-``dim`` cells of ``window``.

    ``terms`` is a sorted tuple of ``(cell_index, coefficient)`` pairs with no
    zero coefficients.
    """

    window: ComplexWindow
    dim: int
    terms: tuple = ()

    @classmethod
    def from_dict(cls, window, dim, coeffs):
        n = len(window.cells.get(dim, ()))
        for j in coeffs:
            if not 0 <= j < n:
                raise ValidationError(f"cell index {j} out of range for dimension {dim}")
        return cls(window, dim, tuple(sorted((j, c) for j, c in coeffs.items() if c)))

    @classmethod
    def zero(cls, window, dim):
        return cls(window, dim, ())

    @property
    def coeffs(self):
        return dict(self.terms)

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if not isinstance(other, Chain):
            return NotImplemented
        return self.window is other.window and self.dim == other.dim and self.terms == other.terms

    def __hash__(self):
        return hash((id(self.window), self.dim, self.terms))

    def _same(self, other):
        if self.window is not other.window or self.dim != other.dim:
            raise ValidationError("chains live in different windows or dimensions")

    def __add__(self, other):
        self._same(other)
        acc = dict(self.terms)
        for j, c in other.terms:
            acc[j] = acc.get(j, 0) + c
        return Chain.from_dict(self.window, self.dim, acc)

    def __neg__(self):
        return Chain(self.window, self.dim, tuple((j, -c) for j, c in self.terms))

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, n):
        if not isinstance(n, int):
            return NotImplemented
        if n == 0:
            return Chain.zero(self.window, self.dim)
        return Chain(self.window, self.dim, tuple((j, n * c) for j, c in self.terms))

    __rmul__ = __mul__

    def labels(self):
        """``[(coef, orbit_id, element)]`` in index order."""
        cells = self.window.cells[self.dim]
        return [(c, cells[j][0], cells[j][1]) for j, c in self.terms]

    def support_elements(self):
        cells = self.window.cells[self.dim]
        return {cells[j][1] for j, _ in self.terms}

    def to_literal(self):
        return [[c, o, " ".join(g.normal_form)] for c, o, g in self.labels()]

    def __repr__(self):
        body = " + ".join(f"{c}*({o},{g})" for c, o, g in self.labels()) or "0"
        return f"Chain[{self.dim}]({body})"


def chain_from_literal(window: ComplexWindow, dim: int, literal) -> Chain:
    """Build a chain from ``[[coef, orbit_id, word], ...]``."""
    acc = {}
    group = window.group
    for item in literal:
        if len(item) != 3:
            raise ValidationError(f"chain literal entries are [coef, orbit, word]: {item!r}")
        coef, oid, word = item
        if oid not in window.spec._by_id or window.spec.orbit(oid).dim != dim:
            raise ValidationError(f"orbit {oid!r} is not a {dim}-cell orbit", field="target")
        g = reduce_word(group, group.parse(word) if isinstance(word, str) else tuple(word))
        j = window.find(dim, oid, g)
        acc[j] = acc.get(j, 0) + int(coef)
    return Chain.from_dict(window, dim, acc)


def chain_from_cells(window, dim, items) -> Chain:
    """Build a chain from ``{(orbit_id, element): coef}``."""
    acc = {}
    for (oid, g), c in items.items():
        j = window.find(dim, oid, g)
        acc[j] = acc.get(j, 0) + c
    return Chain.from_dict(window, dim, acc)


def l1_norm(c: Chain) -> int:
    return sum(abs(v) for _, v in c.terms)


def boundary(c: Chain) -> Chain:
    if c.dim == 0:
        return Chain.zero(c.window, 0)
    acc = {}
    for j, v in c.terms:
        for i, a in c.window.column(c.dim, j):
            acc[i] = acc.get(i, 0) + v * a
    return Chain.from_dict(c.window, c.dim - 1, acc)


def is_cycle(c: Chain) -> bool:
    return not boundary(c)


# -- translation -----------------------------------------------------------------


def translate_labels(group, labels, h):
    return [(c, o, multiply(group, h, g)) for c, o, g in labels]


def translate(c: Chain, h: GroupElement) -> Chain:
    """Left translate ``h . c``; raises when the translate leaves the window."""
    w = c.window
    acc = {}
    for coef, o, g in translate_labels(w.group, c.labels(), h):
        acc[w.find(c.dim, o, g)] = coef
    return Chain.from_dict(w, c.dim, acc)


def _label_key(group, labels):
    # sign-blind first so that c and -c pick the same anchor
    items = sorted((group.shortlex_key(g.normal_form), o, c) for c, o, g in labels)
    return tuple((k, o, abs(c)) for k, o, c in items), tuple(items)


def canonical_anchor(c: Chain) -> GroupElement:
    """Translating element sending ``c`` to its canonical representative.

    Every support element is tried as the new identity; the translate with
    the least sorted label key wins. The choice depends only on the
    translation class, so it is idempotent and translation-invariant.
    """
    if not c:
        raise ValidationError("the zero chain has no canonical translate")
    group = c.window.group
    labels = c.labels()
    best = None
    for g in sorted(c.support_elements(), key=lambda g: group.shortlex_key(g.normal_form)):
        h = inverse(group, g)
        key = _label_key(group, translate_labels(group, labels, h))
        if best is None or key < best[0]:
            best = (key, h)
    return best[1]


def canonical_key(c: Chain):
    group = c.window.group
    return _label_key(group, translate_labels(group, c.labels(), canonical_anchor(c)))


def canonical_translate(c: Chain) -> Chain:
    return translate(c, canonical_anchor(c))


def is_canonical(c: Chain) -> bool:
    group = c.window.group
    return _label_key(group, c.labels()) == canonical_key(c)


# -- cycle enumeration ----------------------------------------------------------------


def _search_order(window, dim, cols):
    """Breadth-first order of columns through shared rows.

    Identity-anchored columns seed the search and come first, so the first
    nonzero coefficient of a canonical representative is met early and rows
    close soon after they open.
    """
    cells = window.cells[dim]
    by_row = {}
    for j in cols:
        for i, _ in window.boundary[dim][j]:
            by_row.setdefault(i, []).append(j)
    seeds = [j for j in cols if cells[j][1] == IDENTITY]
    order, seen = [], set(seeds)
    queue = deque(seeds)
    for start in [None] + sorted(cols):
        if start is not None:
            if start in seen:
                continue
            seen.add(start)
            queue.append(start)
        while queue:
            j = queue.popleft()
            order.append(j)
            for i, _ in window.boundary[dim][j]:
                for k in by_row[i]:
                    if k not in seen:
                        seen.add(k)
                        queue.append(k)
    return order, len(seeds)


def bounded_solutions(window, dim, cols, order, n_seed, k, rhs=None,
                      node_budget=DEFAULT_SEARCH_NODES, on_solution=None,
                      require_seed=True):
    """Depth-first search for integer vectors x on ``cols`` with ||x||_1 <= k and
    boundary(x) == rhs.

    Columns are visited in ``order``; a row is closed once its last column is
    decided and must then match ``rhs``. The open residual is pruned against
    the largest column norm times the remaining budget. With ``require_seed``
    the first nonzero coefficient must sit on one of the first ``n_seed``
    columns. Each solution is reported once, at its last nonzero coordinate.
    """
    rhs = dict(rhs or {})
    colmap = {j: window.boundary[dim][j] for j in order}
    last = {}
    for pos, j in enumerate(order):
        for i, _ in colmap[j]:
            last[i] = pos
    closes = [[] for _ in order]
    for i, pos in last.items():
        closes[pos].append(i)
    # rows never touched must already agree with rhs
    for i, v in rhs.items():
        if v and i not in last:
            return 0
    colnorm = [sum(abs(a) for _, a in colmap[j]) for j in order]
    suffix_max = [0] * (len(order) + 1)
    for pos in range(len(order) - 1, -1, -1):
        suffix_max[pos] = max(colnorm[pos], suffix_max[pos + 1])

    resid = {i: -v for i, v in rhs.items() if v}  # boundary(x) - rhs
    state = {"open_abs": sum(abs(v) for v in resid.values()), "nodes": 0}
    x = {}
    n = len(order)

    def apply(pos, c):
        for i, a in colmap[order[pos]]:
            old = resid.get(i, 0)
            new = old + c * a
            state["open_abs"] += abs(new) - abs(old)
            if new:
                resid[i] = new
            else:
                resid.pop(i, None)

    def rec(pos, budget, started):
        state["nodes"] += 1
        if state["nodes"] > node_budget:
            raise ResourceLimitError(f"cycle search exceeded {node_budget} nodes")
        if pos == n or budget == 0:
            return
        if require_seed and not started and pos >= n_seed:
            return
        values = [0]
        for m in range(1, budget + 1):
            values += [m, -m]
        for c in values:
            if c:
                apply(pos, c)
            ok = all(i not in resid for i in closes[pos])
            nb = budget - abs(c)
            if ok and state["open_abs"] <= suffix_max[pos + 1] * nb:
                if c:
                    x[order[pos]] = c
                    if not resid:
                        on_solution(dict(x))
                rec(pos + 1, nb, started or c != 0)
                if c:
                    del x[order[pos]]
            if c:
                apply(pos, -c)

    rec(0, k, False)
    return state["nodes"]


def enumerate_cycles(w: ComplexWindow, dim: int, k: int, mode: str = "exhaustive",
                     k_cap: int = DEFAULT_EXHAUSTIVE_K_CAP, enum_cap: int = DEFAULT_ENUM_CAP,
                     node_budget: int = DEFAULT_SEARCH_NODES):
    """Canonical representatives of nonzero ``dim``-cycles with l1 norm <= k.

    ``exhaustive`` finds every integer cycle supported on complete cells of
    the window (disconnected ones and multiples included); ``circuits``
    (dim 1 only) finds simple edge circuits. Results are sorted by norm and
    then by canonical key.
    """
    if k < 1:
        raise ValidationError("norm bound k must be >= 1")
    if dim < 1:
        raise ValidationError("cycles are enumerated in dimension >= 1")
    if mode == "exhaustive":
        if k > k_cap:
            raise ResourceLimitError(f"exhaustive enumeration capped at k = {k_cap}")
        found = _exhaustive_cycles(w, dim, k, enum_cap, node_budget)
    elif mode == "circuits":
        if dim != 1:
            raise ValidationError("circuits mode requires dim = 1")
        found = _circuit_cycles(w, k, enum_cap)
    else:
        raise ValidationError(f"unknown enumeration mode {mode!r}", field="mode")
    found.sort(key=lambda ch: (l1_norm(ch), _label_key(w.group, ch.labels())))
    return found


def _exhaustive_cycles(w, dim, k, enum_cap, node_budget):
    cols = w.complete_cells(dim)
    if not cols:
        return []
    order, n_seed = _search_order(w, dim, cols)
    out = []

    def keep(x):
        ch = Chain.from_dict(w, dim, x)
        if is_canonical(ch):
            out.append(ch)
            if len(out) > enum_cap:
                raise ResourceLimitError(f"more than {enum_cap} cycles with norm <= {k}",
                                         partial=out)

    bounded_solutions(w, dim, cols, order, n_seed, k, node_budget=node_budget,
                      on_solution=keep)
    return out


def edge_endpoints(w: ComplexWindow, j: int):
    """``(tail, head)`` vertex indices of edge ``j``, or ``None`` for a loop with
    zero boundary."""
    col = w.column(1, j)
    if not col:
        return None
    coefs = sorted(col, key=lambda t: t[1])
    if len(col) == 2 and coefs[0][1] == -1 and coefs[1][1] == 1:
        return coefs[0][0], coefs[1][0]
    raise ValidationError(f"edge {w.cells[1][j]} does not have boundary head - tail")


def _circuit_cycles(w, k, enum_cap):
    cols = w.complete_cells(1)
    adj = {}
    loops = []
    for j in cols:
        ends = edge_endpoints(w, j)
        if ends is None or ends[0] == ends[1]:
            loops.append(j)
            continue
        t, h = ends
        adj.setdefault(t, []).append((h, j, 1))
        adj.setdefault(h, []).append((t, j, -1))
    raw = [{j: 1} for j in loops] + [{j: -1} for j in loops]
    for s in sorted(adj):
        path_edges = []
        on_path = {s}

        def dfs(v):
            if len(path_edges) >= k:
                return
            for u, j, sign in adj.get(v, ()):
                if any(j == e for e, _ in path_edges):
                    continue
                if u == s:
                    cyc = dict(path_edges)
                    cyc[j] = sign
                    raw.append(cyc)
                    continue
                if u < s or u in on_path:
                    continue
                on_path.add(u)
                path_edges.append((j, sign))
                dfs(u)
                path_edges.pop()
                on_path.discard(u)

        dfs(s)
    out, seen = [], set()
    for cyc in raw:
        ch = Chain.from_dict(w, 1, cyc)
        if l1_norm(ch) > k or not is_canonical(ch):
            continue
        if ch.terms in seen:
            continue
        seen.add(ch.terms)
        out.append(ch)
        if len(out) > enum_cap:
            raise ResourceLimitError(f"more than {enum_cap} circuits", partial=out)
    return out


# -- circuit decomposition -------------------------------------------------------------


@dataclass(frozen=True)
class CircuitDecomposition:
    parts: tuple
    total_length: int


def circuit_decompose(z: Chain) -> CircuitDecomposition:
    """Split a 1-cycle into chains of simple closed edge paths.

    Each unit of coefficient is an arc (tail to head for positive
    coefficients, reversed for negative ones). Walks start at the least
    remaining arc and always leave a vertex along its least remaining arc;
    the first repeated vertex closes a simple circuit, which is removed.
    """
    if z.dim != 1:
        raise ValidationError("circuit decomposition needs a 1-chain")
    if not is_cycle(z):
        raise ValidationError("circuit decomposition needs a cycle")
    w = z.window
    parts = []
    remaining = {}
    out_arcs = {}
    for j, c in z.terms:
        ends = edge_endpoints(w, j)
        if ends is None or ends[0] == ends[1]:
            sign = 1 if c > 0 else -1
            parts.extend(Chain(w, 1, ((j, sign),)) for _ in range(abs(c)))
            continue
        t, h = ends if c > 0 else (ends[1], ends[0])
        sign = 1 if c > 0 else -1
        remaining[j] = abs(c)
        out_arcs.setdefault(t, []).append((j, h, sign))
    for v in out_arcs:
        out_arcs[v].sort()

    def next_arc(v):
        for j, h, sign in out_arcs.get(v, ()):
            if remaining[j] > 0:
                return j, h, sign
        return None

    while any(remaining.values()):
        j0 = min(j for j, n in remaining.items() if n > 0)
        start = next(t for t, arcs in out_arcs.items() for a in arcs if a[0] == j0)
        path_v = [start]
        path_a = []
        pos = {start: 0}
        v = start
        while True:
            arc = next_arc(v) if path_a else next(a for a in out_arcs[start] if a[0] == j0)
            if arc is None:
                raise ValidationError("unbalanced cycle during decomposition")
            j, h, sign = arc
            remaining[j] -= 1
            path_a.append((j, sign))
            if h in pos:
                p = pos[h]
                loop = path_a[p:]
                acc = {}
                for jj, s in loop:
                    acc[jj] = acc.get(jj, 0) + s
                parts.append(Chain.from_dict(w, 1, acc))
                for u in path_v[p + 1:]:
                    del pos[u]
                del path_v[p + 1:]
                del path_a[p:]
                v = h
                if not path_a:
                    break
                continue
            pos[h] = len(path_v)
            path_v.append(h)
            v = h
    total = sum(l1_norm(p) for p in parts)
    return CircuitDecomposition(tuple(parts), total)


def push_forward(cmap, c: Chain) -> Chain:
    """Image of ``c`` under a window-level chain map."""
    if c.window is not cmap.source:
        raise ValidationError("chain does not live in the map's source window")
    acc = {}
    for j, v in c.terms:
        for i, a in cmap.column(c.dim, j):
            acc[i] = acc.get(i, 0) + v * a
    return Chain.from_dict(cmap.target, c.dim, acc)


def random_chain(rng, window, dim, cols=None, max_terms=6, max_coef=3) -> Chain:
    """A random nonzero chain on ``cols`` (default: complete cells of ``dim``)."""
    cols = list(window.complete_cells(dim) if cols is None else cols)
    if not cols:
        raise WindowTooSmallError(f"no usable cells of dimension {dim}")
    while True:
        size = rng.randint(1, min(max_terms, len(cols)))
        acc = {}
        for j in rng.sample(cols, size):
            acc[j] = rng.choice([-1, 1]) * rng.randint(1, max_coef)
        ch = Chain.from_dict(window, dim, acc)
        if ch:
            return ch
