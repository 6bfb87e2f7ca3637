"""Finitely presented groups with normal forms from rewriting systems.

A word is a tuple of letter symbols. Every generator contributes two letters,
its own name and its inverse name; the alphabet order is the declaration
order (generator, inverse, next generator, ...). Normal forms come from a
user-supplied rewriting system, which must be terminating with respect to a
reduction order (shortlex, or a recursive path order for systems such as the
Heisenberg group whose rules lengthen words).
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field

from .errors import (
    MalformedWordError,
    NonTerminationError,
    ResourceLimitError,
    ValidationError,
)

Word = tuple  # tuple[str, ...]

DEFAULT_STEP_BUDGET = 100_000
DEFAULT_BALL_CAP = 50_000


@dataclass(frozen=True)
class Generator:
    name: str
    inverse_name: str

    def __post_init__(self):
        if not self.name or not self.inverse_name:
            raise ValidationError("generator names must be non-empty")
        if self.name == self.inverse_name:
            raise ValidationError(f"generator {self.name!r} is its own inverse name")


@dataclass(frozen=True, order=False)
class GroupElement:
    """A group element, stored as its normal form."""

    normal_form: Word = ()

    def __str__(self):
        return " ".join(self.normal_form) if self.normal_form else "e"

    def __len__(self):
        return len(self.normal_form)

    @property
    def is_identity(self):
        return not self.normal_form


IDENTITY = GroupElement(())


@dataclass(frozen=True, eq=False)
class GroupPresentation:
    name: str
    generators: tuple = ()
    relators: tuple = ()
    rewrite_rules: tuple = ()
    order: str = "shortlex"
    step_budget: int = DEFAULT_STEP_BUDGET
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "generators", tuple(self.generators))
        letters = []
        for g in self.generators:
            letters.extend([g.name, g.inverse_name])
        if len(set(letters)) != len(letters):
            raise ValidationError(f"{self.name}: duplicate generator symbols")
        object.__setattr__(self, "_letters", tuple(letters))
        object.__setattr__(self, "_rank", {a: i for i, a in enumerate(letters)})
        inv = {}
        for g in self.generators:
            inv[g.name] = g.inverse_name
            inv[g.inverse_name] = g.name
        object.__setattr__(self, "_inverse", inv)
        if self.order not in ("shortlex", "recursive"):
            raise ValidationError(f"unknown reduction order {self.order!r}")

        rules = tuple(
            (self.parse(lhs) if isinstance(lhs, str) else tuple(lhs),
             self.parse(rhs) if isinstance(rhs, str) else tuple(rhs))
            for lhs, rhs in self.rewrite_rules
        )
        for lhs, rhs in rules:
            self._check_word(lhs)
            self._check_word(rhs)
            if not lhs:
                raise ValidationError(f"{self.name}: rule with empty left-hand side")
            if not self.greater(lhs, rhs):
                raise ValidationError(
                    f"{self.name}: rule {fmt(lhs)} -> {fmt(rhs)} does not decrease "
                    f"the {self.order} order"
                )
        object.__setattr__(self, "rewrite_rules", rules)
        by_first = {}
        for lhs, rhs in rules:
            by_first.setdefault(lhs[0], []).append((lhs, rhs))
        object.__setattr__(self, "_by_first", by_first)
        object.__setattr__(self, "_max_lhs", max((len(l) for l, _ in rules), default=0))

        relators = tuple(self.parse(r) if isinstance(r, str) else tuple(r)
                         for r in self.relators)
        for r in relators:
            self._check_word(r)
            if not r:
                raise ValidationError(f"{self.name}: empty relator")
        object.__setattr__(self, "relators", relators)
        for r in relators:
            if reduce_word(self, r) != IDENTITY:
                raise ValidationError(
                    f"{self.name}: relator {fmt(r)} does not reduce to the identity"
                )

    # -- alphabet ----------------------------------------------------------

    @property
    def letters(self):
        return self._letters

    def inverse_letter(self, a):
        return self._inverse[a]

    def _check_word(self, w):
        for a in w:
            if a not in self._rank:
                raise MalformedWordError(f"{self.name}: symbol {a!r} is not a generator or inverse")

    def parse(self, text):
        """Tokenize ``text`` by greedy longest match against the alphabet.

        Whitespace is ignored; ``""``, ``"e"`` and ``"1"`` denote the empty word
        unless those strings are themselves letters.
        """
        if isinstance(text, (tuple, list)):
            w = tuple(text)
            self._check_word(w)
            return w
        s = text.strip()
        if s in ("", "e", "1") and s not in self._rank:
            return ()
        symbols = sorted(self._rank, key=len, reverse=True)
        out = []
        i = 0
        while i < len(s):
            if s[i].isspace():
                i += 1
                continue
            for sym in symbols:
                if s.startswith(sym, i):
                    out.append(sym)
                    i += len(sym)
                    break
            else:
                raise MalformedWordError(
                    f"{self.name}: cannot parse {text!r} at position {i}")
        return tuple(out)

    def shortlex_key(self, w):
        return (len(w), tuple(self._rank[a] for a in w))

    def greater(self, u, v):
        """Strict reduction order used to certify termination of the rules."""
        if self.order == "shortlex":
            return self.shortlex_key(u) > self.shortlex_key(v)
        return _rpo_greater(tuple(u), tuple(v), self._rank)

    def element(self, w):
        return reduce_word(self, self.parse(w) if isinstance(w, str) else tuple(w))

    def __repr__(self):
        return f"GroupPresentation({self.name!r})"


def fmt(w):
    return " ".join(w) if w else "e"


def _rpo_greater(u, v, rank):
    # Recursive path order on words read as monadic terms with the rightmost
    # letter at the root; letters declared earlier have higher precedence.
    memo = {}

    def gt(s, t):
        if not s:
            return False
        if not t:
            return True
        key = (s, t)
        if key in memo:
            return memo[key]
        f, rest_s = s[-1], s[:-1]
        g, rest_t = t[-1], t[:-1]
        if rest_s == t or gt(rest_s, t):
            res = True
        elif rank[f] < rank[g]:
            res = gt(s, rest_t)
        elif f == g:
            res = gt(rest_s, rest_t)
        else:
            res = False
        memo[key] = res
        return res

    return gt(u, v)


def _rewrite_once(p, w, start=0):
    """Apply the leftmost rule occurrence at or after ``start``.

    Returns ``(new_word, position)`` or ``None`` when ``w`` is irreducible.
    """
    by_first = p._by_first
    n = len(w)
    for i in range(start, n):
        for lhs, rhs in by_first.get(w[i], ()):
            m = len(lhs)
            if i + m <= n and w[i:i + m] == lhs:
                return w[:i] + rhs + w[i + m:], i
    return None


def reduce_word(p: GroupPresentation, w) -> GroupElement:
    """Reduce ``w`` to its irreducible descendant under the rewrite rules."""
    if isinstance(w, str):
        w = p.parse(w)
    w = tuple(w)
    cache = p._cache
    hit = cache.get(w)
    if hit is not None:
        return hit
    p._check_word(w)
    cur = w
    pos = 0
    back = max(p._max_lhs - 1, 0)
    for _ in range(p.step_budget):
        step = _rewrite_once(p, cur, pos)
        if step is None:
            break
        cur, i = step
        pos = max(0, i - back)
    else:
        raise NonTerminationError(
            f"{p.name}: reduction of {fmt(w)} exceeded {p.step_budget} steps")
    g = GroupElement(cur)
    cache[w] = g
    cache.setdefault(cur, g)
    return g


def multiply(p: GroupPresentation, g: GroupElement, h: GroupElement) -> GroupElement:
    return reduce_word(p, g.normal_form + h.normal_form)


def inverse(p: GroupPresentation, g: GroupElement) -> GroupElement:
    return reduce_word(p, tuple(p.inverse_letter(a) for a in reversed(g.normal_form)))


def ball_with_lengths(p: GroupPresentation, r: int, cap: int = DEFAULT_BALL_CAP):
    """Breadth-first search of the Cayley graph; returns ``{element: length}``."""
    if r < 0:
        raise ValidationError("radius must be non-negative")
    key = ("__ball__", r)
    if key in p._cache and len(p._cache[key]) <= cap:
        return p._cache[key]
    dist = {IDENTITY: 0}
    frontier = deque([IDENTITY])
    while frontier:
        g = frontier.popleft()
        d = dist[g]
        if d == r:
            continue
        for a in p.letters:
            h = reduce_word(p, g.normal_form + (a,))
            if h not in dist:
                dist[h] = d + 1
                if len(dist) > cap:
                    raise ResourceLimitError(
                        f"{p.name}: ball of radius {r} exceeds cap {cap}")
                frontier.append(h)
    p._cache[key] = dist
    return dist


def ball_enumerate(p: GroupPresentation, r: int, cap: int = DEFAULT_BALL_CAP):
    """All elements of word length at most ``r``, sorted shortlex by normal form."""
    dist = ball_with_lengths(p, r, cap)
    return sorted(dist, key=lambda g: p.shortlex_key(g.normal_form))


def word_length(p: GroupPresentation, g: GroupElement, r_max: int = 64):
    for r in range(r_max + 1):
        dist = ball_with_lengths(p, r)
        if g in dist:
            return dist[g]
    raise ResourceLimitError(f"word length of {g} exceeds {r_max}")


# -- confluence --------------------------------------------------------------


def all_normal_forms(p: GroupPresentation, w, limit: int = 100_000):
    """Irreducible words reachable from ``w`` along every reduction path."""
    w = tuple(w)
    seen = {w}
    stack = [w]
    forms = set()
    while stack:
        cur = stack.pop()
        succ = one_step_rewrites(p, cur)
        if not succ:
            forms.add(cur)
        for nxt in succ:
            if nxt not in seen:
                seen.add(nxt)
                if len(seen) > limit:
                    raise ResourceLimitError(f"reduction graph of {fmt(w)} exceeds {limit}")
                stack.append(nxt)
    return forms


def one_step_rewrites(p: GroupPresentation, w):
    out = []
    n = len(w)
    for i in range(n):
        for lhs, rhs in p._by_first.get(w[i], ()):
            m = len(lhs)
            if i + m <= n and w[i:i + m] == lhs:
                out.append(w[:i] + rhs + w[i + m:])
    return out


@dataclass
class ConfluenceReport:
    presentation: str
    length_bound: int
    critical_words: int
    exhaustive_words: int
    violations: list  # (word, sorted list of distinct normal forms)

    @property
    def ok(self):
        return not self.violations

    def as_dict(self):
        return {
            "presentation": self.presentation,
            "length_bound": self.length_bound,
            "critical_words": self.critical_words,
            "exhaustive_words": self.exhaustive_words,
            "ok": self.ok,
            "violations": [
                {"word": fmt(w), "normal_forms": [fmt(f) for f in forms]}
                for w, forms in self.violations
            ],
        }


def critical_words(p: GroupPresentation, L: int):
    """Overlap and inclusion words of rule left-hand sides, of length <= L."""
    words = set()
    lhss = [l for l, _ in p.rewrite_rules]
    for a, b in itertools.product(lhss, repeat=2):
        for k in range(1, min(len(a), len(b))):
            if a[-k:] == b[:k]:
                w = a + b[k:]
                if len(w) <= L:
                    words.add(w)
        if a != b and len(b) <= len(a):
            for i in range(len(a) - len(b) + 1):
                if a[i:i + len(b)] == b and len(a) <= L:
                    words.add(a)
    return sorted(words, key=p.shortlex_key)


def verify_confluence(p: GroupPresentation, L: int | None = None,
                      exhaustive_cap: int = 20_000) -> ConfluenceReport:
    """Check that reduction is a function on words of length <= L.

    Every critical word (rule overlap or inclusion) of length <= L is checked
    for joinability of all its one-step rewrites. When the number of words of
    length <= L is at most ``exhaustive_cap`` every such word is additionally
    checked along all reduction paths.
    """
    if L is None:
        L = 2 * max((len(r) for r in p.relators), default=0)
        L = max(L, 2 * p._max_lhs)
    violations = {}
    crit = critical_words(p, L)
    for w in crit:
        forms = {reduce_word(p, s).normal_form for s in one_step_rewrites(p, w)}
        if len(forms) > 1:
            violations[w] = sorted(forms, key=p.shortlex_key)

    n_letters = len(p.letters)
    total = sum(n_letters ** j for j in range(L + 1))
    n_exh = 0
    if total <= exhaustive_cap:
        for j in range(L + 1):
            for w in itertools.product(p.letters, repeat=j):
                n_exh += 1
                forms = all_normal_forms(p, w)
                if len(forms) > 1 and w not in violations:
                    violations[w] = sorted(forms, key=p.shortlex_key)
    return ConfluenceReport(
        presentation=p.name,
        length_bound=L,
        critical_words=len(crit),
        exhaustive_words=n_exh,
        violations=sorted(violations.items(), key=lambda kv: p.shortlex_key(kv[0])),
    )
