"""Equivariant cell complexes and their finite windows.

An :class:`EquivariantComplexSpec` lists one representative cell per orbit
together with its boundary as a ZG-chain ``[(coef, element, target_orbit)]``.
:func:`instantiate_window` translates every orbit by each group element of
word length at most ``r`` and assembles integer boundary matrices. Boundary
terms landing outside the window are kept in a clipped-terms ledger and the
owning cell is marked incomplete; chain operations refuse incomplete cells.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import (
    MapValidationError,
    SpecConsistencyError,
    ValidationError,
    WindowTooSmallError,
)
from .groups import (
    IDENTITY,
    GroupElement,
    GroupPresentation,
    ball_with_lengths,
    inverse,
    multiply,
    reduce_word,
)

TRIVIAL = GroupPresentation("trivial")


@dataclass(frozen=True)
class CellOrbit:
    id: str
    dim: int
    boundary: tuple = ()  # ((coef, GroupElement, orbit_id), ...)


@dataclass(frozen=True, eq=False)
class EquivariantComplexSpec:
    label: str
    group: GroupPresentation
    orbits: tuple
    top_dim: int = field(init=False)

    def __post_init__(self):
        orbits = tuple(self.orbits)
        ids = [o.id for o in orbits]
        if len(set(ids)) != len(ids):
            raise ValidationError(f"{self.label}: duplicate orbit ids")
        dims = {o.dim for o in orbits}
        if not orbits:
            raise ValidationError(f"{self.label}: no orbits")
        top = max(dims)
        if dims != set(range(top + 1)):
            raise ValidationError(f"{self.label}: orbit dimensions must fill 0..{top}")
        by_id = {o.id: o for o in orbits}
        cleaned = []
        for o in orbits:
            if o.dim == 0 and o.boundary:
                raise ValidationError(f"{self.label}: 0-cell {o.id!r} has a boundary",
                                      field=o.id)
            terms = {}
            for coef, g, t in o.boundary:
                if t not in by_id:
                    raise ValidationError(
                        f"{self.label}: orbit {o.id!r} references unknown orbit {t!r}",
                        field=o.id)
                if by_id[t].dim != o.dim - 1:
                    raise ValidationError(
                        f"{self.label}: orbit {o.id!r} boundary term {t!r} has wrong dimension",
                        field=o.id)
                if not isinstance(g, GroupElement):
                    g = reduce_word(self.group, g)
                terms[(g, t)] = terms.get((g, t), 0) + int(coef)
            bd = tuple(sorted(
                ((c, g, t) for (g, t), c in terms.items() if c),
                key=lambda x: (x[2], self.group.shortlex_key(x[1].normal_form)),
            ))
            cleaned.append(CellOrbit(o.id, o.dim, bd))
        object.__setattr__(self, "orbits", tuple(cleaned))
        object.__setattr__(self, "top_dim", top)
        object.__setattr__(self, "_by_id", {o.id: o for o in cleaned})

    def orbit(self, oid) -> CellOrbit:
        return self._by_id[oid]

    def orbits_of_dim(self, d):
        return sorted((o for o in self.orbits if o.dim == d), key=lambda o: o.id)

    def symbolic_boundary(self, oid, g=IDENTITY):
        """Boundary of the cell ``(oid, g)`` as ``{(orbit_id, element): coef}``."""
        out = {}
        for c, h, t in self._by_id[oid].boundary:
            key = (t, multiply(self.group, g, h))
            out[key] = out.get(key, 0) + c
        return {k: v for k, v in out.items() if v}

    def check_boundary_squared(self, g=IDENTITY):
        """Raise unless the boundary formula squares to zero at anchor ``g``."""
        for o in self.orbits:
            if o.dim < 2:
                continue
            total = {}
            for (t, h), c in self.symbolic_boundary(o.id, g).items():
                for key, c2 in self.symbolic_boundary(t, h).items():
                    total[key] = total.get(key, 0) + c * c2
            bad = {k: v for k, v in total.items() if v}
            if bad:
                raise SpecConsistencyError(
                    f"{self.label}: boundary of boundary of {o.id!r} is nonzero "
                    f"({len(bad)} terms)")

    def __repr__(self):
        return f"EquivariantComplexSpec({self.label!r}, top_dim={self.top_dim})"


def build_presentation_complex(p: GroupPresentation, quotient: bool = False,
                               label: str | None = None) -> EquivariantComplexSpec:
    """The presentation 2-complex: one vertex, an edge per generator, a 2-cell per relator.

    Relator boundaries use Fox-derivative terms: a letter ``s`` after prefix
    ``u`` contributes ``+(u, s)``; a letter ``s^-1`` contributes ``-(u s^-1, s)``.
    With ``quotient=True`` the chains of the presentation complex itself are
    returned, acted on by the trivial group, so every prefix collapses to the
    identity and each 2-cell boundary is the exponent-sum vector.
    """
    group = TRIVIAL if quotient else p
    orbits = [CellOrbit("v", 0)]
    gen_of = {}
    for gen in p.generators:
        gen_of[gen.name] = (gen.name, +1)
        gen_of[gen.inverse_name] = (gen.name, -1)
        if quotient:
            bd = ((1, IDENTITY, "v"), (-1, IDENTITY, "v"))
        else:
            bd = ((1, reduce_word(p, (gen.name,)), "v"), (-1, IDENTITY, "v"))
        orbits.append(CellOrbit(gen.name, 1, bd))
    for i, rel in enumerate(p.relators):
        if not rel:
            raise ValidationError(f"{p.name}: empty relator")
        terms = []
        prefix = ()
        for a in rel:
            name, sign = gen_of[a]
            if quotient:
                where = IDENTITY
            elif sign > 0:
                where = reduce_word(p, prefix)
            else:
                where = reduce_word(p, prefix + (a,))
            terms.append((sign, where, name))
            prefix = prefix + (a,)
        orbits.append(CellOrbit(f"r{i}", 2, tuple(terms)))
    spec = EquivariantComplexSpec(label or p.name, group, tuple(orbits))
    spec.check_boundary_squared()
    return spec


def eilenberg_trick(spec: EquivariantComplexSpec, n: int,
                    sphere_id: str | None = None, ball_id: str | None = None):
    """Wedge on an n-sphere orbit and cap it with an (n+1)-cell orbit.

    The new n-orbit has zero boundary and the new (n+1)-orbit has boundary
    exactly the new n-orbit, so the n-cycles gain a free summand.
    """
    if n < 1:
        raise ValidationError("the wedge construction needs n >= 1")
    if n > spec.top_dim:
        raise ValidationError(f"{spec.label}: no cells in dimension {n}")
    taken = {o.id for o in spec.orbits}
    sphere_id = sphere_id or _fresh(taken, f"s{n}")
    taken.add(sphere_id)
    ball_id = ball_id or _fresh(taken, f"b{n + 1}")
    orbits = list(spec.orbits) + [
        CellOrbit(sphere_id, n, ()),
        CellOrbit(ball_id, n + 1, ((1, IDENTITY, sphere_id),)),
    ]
    return EquivariantComplexSpec(f"{spec.label}+S{n}", spec.group, tuple(orbits))


def _fresh(taken, base):
    name = base
    i = 1
    while name in taken:
        name = f"{base}_{i}"
        i += 1
    return name


# -- windows -------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ComplexWindow:
    spec: EquivariantComplexSpec
    radius: int
    cells: dict          # dim -> tuple of (orbit_id, GroupElement), canonical order
    index: dict          # dim -> {(orbit_id, GroupElement): position}
    boundary: dict       # dim -> tuple of column tuples ((row, coef), ...)
    clipped: dict        # dim -> {position: ((coef, orbit_id, GroupElement), ...)}
    lengths: dict        # GroupElement -> word length, for elements in the ball
    certified: bool = True

    @property
    def group(self):
        return self.spec.group

    def cell_counts(self):
        return {d: len(c) for d, c in sorted(self.cells.items())}

    def is_complete(self, dim, j):
        return j not in self.clipped.get(dim, {})

    def complete_cells(self, dim):
        clip = self.clipped.get(dim, {})
        return [j for j in range(len(self.cells.get(dim, ()))) if j not in clip]

    def find(self, dim, orbit_id, g):
        try:
            return self.index[dim][(orbit_id, g)]
        except KeyError:
            raise WindowTooSmallError(
                f"cell ({orbit_id}, {g}) is outside the radius-{self.radius} window") from None

    def contains(self, dim, orbit_id, g):
        return (orbit_id, g) in self.index.get(dim, {})

    def column(self, dim, j):
        if j in self.clipped.get(dim, {}):
            o, g = self.cells[dim][j]
            raise WindowTooSmallError(
                f"boundary of cell ({o}, {g}) leaves the radius-{self.radius} window")
        return self.boundary[dim][j]

    def __repr__(self):
        return f"ComplexWindow({self.spec.label!r}, r={self.radius}, cells={self.cell_counts()})"


def cell_sort_key(group, cell):
    oid, g = cell
    return (oid, group.shortlex_key(g.normal_form))


def instantiate_window(spec: EquivariantComplexSpec, r: int,
                       ball_cap: int = 50_000) -> ComplexWindow:
    """Cells ``(o, g)`` with ``|g| <= r`` and their boundary matrices.

    Raises :class:`SpecConsistencyError` when the boundary formula does not
    square to zero at some anchor, or when the assembled matrices fail to
    compose to zero on columns whose boundary is fully in-window.
    """
    if r < 0:
        raise ValidationError("radius must be non-negative")
    group = spec.group
    lengths = ball_with_lengths(group, r, ball_cap)
    elements = sorted(lengths, key=lambda g: group.shortlex_key(g.normal_form))
    cells, index = {}, {}
    for d in range(spec.top_dim + 1):
        cs = [(o.id, g) for o in spec.orbits_of_dim(d) for g in elements]
        cs.sort(key=lambda c: cell_sort_key(group, c))
        cells[d] = tuple(cs)
        index[d] = {c: i for i, c in enumerate(cs)}

    boundary, clipped = {0: tuple(() for _ in cells[0])}, {0: {}}
    for d in range(1, spec.top_dim + 1):
        cols, clip = [], {}
        for j, (oid, g) in enumerate(cells[d]):
            col, lost = [], []
            for (t, h), c in spec.symbolic_boundary(oid, g).items():
                i = index[d - 1].get((t, h))
                if i is None:
                    lost.append((c, t, h))
                else:
                    col.append((i, c))
            cols.append(tuple(sorted(col)))
            if lost:
                clip[j] = tuple(lost)
        boundary[d] = tuple(cols)
        clipped[d] = clip

    for g in elements:
        spec.check_boundary_squared(g)
    window = ComplexWindow(spec, r, cells, index, boundary, clipped, dict(lengths))
    _certify_matrices(window)
    return window


def _certify_matrices(w: ComplexWindow):
    for d in range(2, w.spec.top_dim + 1):
        for j in range(len(w.cells[d])):
            if not w.is_complete(d, j):
                continue
            col = w.boundary[d][j]
            if any(not w.is_complete(d - 1, i) for i, _ in col):
                continue
            acc = {}
            for i, c in col:
                for k, c2 in w.boundary[d - 1][i]:
                    acc[k] = acc.get(k, 0) + c * c2
            if any(acc.values()):
                o, g = w.cells[d][j]
                raise SpecConsistencyError(
                    f"{w.spec.label}: d{d - 1} d{d} != 0 at cell ({o}, {g})")


# -- chain maps --------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ChainMapSpec:
    """An equivariant chain map given on orbit representatives.

    ``group_images`` sends each source generator name to a target word and
    defines the homomorphism along which translates are carried;
    ``images`` sends each source orbit id to a target ZG-chain
    ``[(coef, element, target_orbit)]``.
    """

    label: str
    source: EquivariantComplexSpec
    target: EquivariantComplexSpec
    group_images: dict
    images: dict

    def __post_init__(self):
        sg, tg = self.source.group, self.target.group
        gi = {}
        for gen in sg.generators:
            word = self.group_images.get(gen.name, ())
            img = reduce_word(tg, tg.parse(word) if isinstance(word, str) else tuple(word))
            gi[gen.name] = img
            gi[gen.inverse_name] = inverse(tg, img)
        object.__setattr__(self, "_letter_images", gi)
        images = {}
        for o in self.source.orbits:
            terms = {}
            for coef, g, t in self.images.get(o.id, ()):
                if t not in self.target._by_id:
                    raise ValidationError(f"{self.label}: unknown target orbit {t!r}")
                if self.target.orbit(t).dim != o.dim:
                    raise ValidationError(f"{self.label}: image of {o.id!r} changes dimension")
                if not isinstance(g, GroupElement):
                    g = reduce_word(tg, tg.parse(g) if isinstance(g, str) else tuple(g))
                terms[(t, g)] = terms.get((t, g), 0) + int(coef)
            images[o.id] = {k: v for k, v in terms.items() if v}
        object.__setattr__(self, "_images", images)
        self.check_commutes()

    def hom(self, g: GroupElement) -> GroupElement:
        tg = self.target.group
        out = IDENTITY
        for a in g.normal_form:
            out = multiply(tg, out, self._letter_images[a])
        return out

    def image(self, oid, g=IDENTITY):
        """Image of the source cell ``(oid, g)`` as ``{(orbit_id, element): coef}``."""
        hg = self.hom(g)
        tg = self.target.group
        return {(t, multiply(tg, hg, h)): c for (t, h), c in self._images[oid].items()}

    def orbit_norms(self):
        return {oid: sum(abs(c) for c in img.values()) for oid, img in self._images.items()}

    def check_commutes(self, g=IDENTITY):
        """Symbolic check of boundary(phi(o)) == phi(boundary(o)) for every orbit."""
        for o in self.source.orbits:
            if o.dim == 0:
                continue
            lhs = {}
            for (t, h), c in self.image(o.id, g).items():
                for key, c2 in self.target.symbolic_boundary(t, h).items():
                    lhs[key] = lhs.get(key, 0) + c * c2
            rhs = {}
            for (t, h), c in self.source.symbolic_boundary(o.id, g).items():
                for key, c2 in self.image(t, h).items():
                    rhs[key] = rhs.get(key, 0) + c * c2
            keys = set(lhs) | set(rhs)
            if any(lhs.get(k, 0) != rhs.get(k, 0) for k in keys):
                raise MapValidationError(
                    f"{self.label}: map does not commute with boundaries at orbit {o.id!r}")


@dataclass(frozen=True, eq=False)
class ChainMap:
    """A chain map restricted to a pair of windows.

    ``matrices[d][j]`` is the image column of source cell ``j`` in dimension
    ``d``; columns whose image leaves the target window are listed in
    ``clipped[d]`` and make any chain touching them untransportable.
    """

    spec: ChainMapSpec
    source: ComplexWindow
    target: ComplexWindow
    matrices: dict
    clipped: dict

    @property
    def label(self):
        return self.spec.label

    def column(self, d, j):
        if j in self.clipped.get(d, ()):
            o, g = self.source.cells[d][j]
            raise WindowTooSmallError(
                f"{self.label}: image of ({o}, {g}) leaves the target window")
        return self.matrices[d][j]


def instantiate_map(mspec: ChainMapSpec, source: ComplexWindow, target: ComplexWindow,
                    check: bool = True) -> ChainMap:
    if source.spec is not mspec.source or target.spec is not mspec.target:
        raise ValidationError(f"{mspec.label}: windows do not belong to the map's complexes")
    matrices, clipped = {}, {}
    for d, cells in source.cells.items():
        cols, clip = [], set()
        for j, (oid, g) in enumerate(cells):
            col = []
            for (t, h), c in mspec.image(oid, g).items():
                i = target.index.get(d, {}).get((t, h))
                if i is None:
                    clip.add(j)
                    col = []
                    break
                col.append((i, c))
            cols.append(tuple(sorted(col)))
        matrices[d] = tuple(cols)
        clipped[d] = frozenset(clip)
    cmap = ChainMap(mspec, source, target, matrices, clipped)
    if check:
        _check_window_commutes(cmap)
    return cmap


def _check_window_commutes(m: ChainMap):
    src, tgt = m.source, m.target
    for d in range(1, src.spec.top_dim + 1):
        for j in range(len(src.cells[d])):
            if j in m.clipped[d] or not src.is_complete(d, j):
                continue
            img = m.matrices[d][j]
            if any(not tgt.is_complete(d, i) for i, _ in img):
                continue
            bcol = src.boundary[d][j]
            if any(i in m.clipped[d - 1] for i, _ in bcol):
                continue
            lhs, rhs = {}, {}
            for i, c in img:
                for k, c2 in tgt.boundary[d][i]:
                    lhs[k] = lhs.get(k, 0) + c * c2
            for i, c in bcol:
                for k, c2 in m.matrices[d - 1][i]:
                    rhs[k] = rhs.get(k, 0) + c * c2
            keys = set(lhs) | set(rhs)
            if any(lhs.get(k, 0) != rhs.get(k, 0) for k in keys):
                o, g = src.cells[d][j]
                raise MapValidationError(
                    f"{m.label}: window map does not commute at ({o}, {g})")
