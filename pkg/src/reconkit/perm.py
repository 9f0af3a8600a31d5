"""Permutations of {0..n-1} and permutation groups given by generators.

Groups carry a base and strong generating set (Schreier-Sims), which gives
order, membership, element enumeration and pointwise stabilizers.  Setwise
stabilizers and the restricted-image subgroups ``G_(K,L)`` are found by
backtracking over the stabilizer chain.
"""
from __future__ import annotations

import itertools
import re
from collections.abc import Callable, Iterable, Iterator, Sequence
from dataclasses import dataclass, field

from .errors import (
    DegreeMismatch,
    NotASubgroup,
    NotNormal,
    NotSetwiseInvariant,
    OrderBoundExceeded,
    PointOutOfRange,
)

DEFAULT_SUBGROUP_BOUND = 1000


class Permutation(tuple):
    """A bijection of {0..n-1}, stored as its tuple of images.

    ``p * q`` is composition with ``q`` applied first, so ``(p * q)[x] ==
    p[q[x]]``.  Ordering and hashing are those of the image tuple, which makes
    lexicographic tie-breaking free.
    """

    __slots__ = ()

    def __new__(cls, images: Iterable[int] = ()) -> Permutation:
        return tuple.__new__(cls, images)

    @classmethod
    def checked(cls, images: Iterable[int]) -> Permutation:
        p = cls(images)
        if sorted(p) != list(range(len(p))):
            raise ValueError(f"not a permutation: {tuple(p)}")
        return p

    @classmethod
    def identity(cls, n: int) -> Permutation:
        return cls(range(n))

    @classmethod
    def from_cycles(cls, n: int, cycles: Iterable[Sequence[int]]) -> Permutation:
        images = list(range(n))
        seen: set[int] = set()
        for cycle in cycles:
            for a in cycle:
                if not 0 <= a < n:
                    raise PointOutOfRange(f"point {a} outside degree {n}")
                if a in seen:
                    raise ValueError(f"point {a} appears twice in {cycles}")
                seen.add(a)
            for a, b in zip(cycle, cycle[1:]):
                images[a] = b
            if cycle:
                images[cycle[-1]] = cycle[0]
        return cls(images)

    @classmethod
    def parse(cls, text: str, n: int) -> Permutation:
        """Parse cycle notation such as ``(0 1)(2 3)``; ``()`` is the identity."""
        text = text.strip()
        if not re.fullmatch(r"(\(\s*(\d+[\s,]*)*\)\s*)*", text):
            raise ValueError(f"cannot parse permutation {text!r}")
        cycles = [
            [int(x) for x in re.split(r"[\s,]+", body.strip()) if x]
            for body in re.findall(r"\(([^)]*)\)", text)
        ]
        return cls.from_cycles(n, cycles)

    @property
    def degree(self) -> int:
        return len(self)

    def __mul__(self, other: Permutation) -> Permutation:  # type: ignore[override]
        if len(self) != len(other):
            raise DegreeMismatch(f"degrees {len(self)} and {len(other)}")
        return tuple.__new__(Permutation, map(self.__getitem__, other))

    __rmul__ = None  # type: ignore[assignment]

    def inverse(self) -> Permutation:
        inv = [0] * len(self)
        for i, x in enumerate(self):
            inv[x] = i
        return tuple.__new__(Permutation, inv)

    __invert__ = inverse

    def __pow__(self, k: int) -> Permutation:
        if k < 0:
            return self.inverse() ** (-k)
        result = Permutation.identity(len(self))
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def is_identity(self) -> bool:
        return all(i == x for i, x in enumerate(self))

    def support(self) -> list[int]:
        return [i for i, x in enumerate(self) if i != x]

    def order(self) -> int:
        from math import lcm

        return lcm(*(len(c) for c in self.cycles()), 1)

    def cycles(self) -> list[tuple[int, ...]]:
        seen = set()
        out = []
        for i in range(len(self)):
            if i in seen or self[i] == i:
                continue
            cycle = [i]
            seen.add(i)
            j = self[i]
            while j != i:
                cycle.append(j)
                seen.add(j)
                j = self[j]
            out.append(tuple(cycle))
        return out

    def conjugate(self, g: Permutation) -> Permutation:
        """Return ``g * self * g^-1``."""
        return g * self * g.inverse()

    def __str__(self) -> str:
        cs = self.cycles()
        if not cs:
            return "()"
        return "".join("(" + " ".join(map(str, c)) + ")" for c in cs)

    def __repr__(self) -> str:
        return f"Permutation({list(self)})"


def compose(p: Permutation, q: Permutation) -> Permutation:
    """``(p o q)(x) = p(q(x))``."""
    return p * q


def inverse(p: Permutation) -> Permutation:
    return p.inverse()


def restriction(p: Permutation, points: Sequence[int]) -> Permutation:
    """The permutation of ``range(len(points))`` that ``p`` induces on ``points``.

    Position ``i`` goes to the position of ``p[points[i]]`` inside ``points``.
    """
    index = {a: i for i, a in enumerate(points)}
    try:
        return Permutation(index[p[a]] for a in points)
    except KeyError:
        raise NotSetwiseInvariant(f"{p} does not map {tuple(points)} onto itself") from None


def transport(p: Permutation, source: Sequence[int], target: Sequence[int], f: Permutation) -> Permutation:
    """Move ``p`` acting on positions of ``source`` to positions of ``target``.

    ``f`` must map the set ``source`` onto the set ``target``; the result is
    ``(f|source) p (f|source)^-1`` written in the coordinates of ``target``.
    """
    tindex = {a: i for i, a in enumerate(target)}
    out = [0] * len(source)
    for i, a in enumerate(source):
        out[tindex[f[a]]] = tindex[f[source[p[i]]]]
    return Permutation(out)


def closure(gens: Iterable[Permutation], degree: int | None = None) -> set[Permutation]:
    """All elements of the group generated by ``gens``, by breadth-first search.

    Intended for small groups and as an independent check of the Schreier-Sims
    machinery.
    """
    gens = list(gens)
    if degree is None:
        if not gens:
            raise ValueError("degree needed for an empty generator list")
        degree = len(gens[0])
    ident = Permutation.identity(degree)
    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for x in frontier:
            for s in gens:
                y = s * x
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return seen


# -- Schreier-Sims ---------------------------------------------------------


@dataclass
class _Level:
    point: int
    gens: list[Permutation]
    transversal: dict[int, Permutation]
    inverses: dict[int, Permutation] = field(default_factory=dict)

    def inv(self, b: int) -> Permutation:
        u = self.inverses.get(b)
        if u is None:
            u = self.inverses[b] = self.transversal[b].inverse()
        return u


def _orbit_transversal(point: int, gens: Sequence[Permutation], degree: int) -> dict[int, Permutation]:
    trans = {point: Permutation.identity(degree)}
    queue = [point]
    for b in queue:
        u = trans[b]
        for s in gens:
            c = s[b]
            if c not in trans:
                trans[c] = s * u
                queue.append(c)
    return trans


def _fixes(g: Permutation, points: Iterable[int]) -> bool:
    return all(g[b] == b for b in points)


def _schreier_sims(gens: Sequence[Permutation], degree: int, base_prefix: Sequence[int] = ()) -> tuple[list[int], list[Permutation], list[_Level]]:
    """Deterministic Schreier-Sims.

    Returns ``(base, strong_gens, levels)``; the base starts with
    ``base_prefix`` (points fixed by the whole group are allowed there).
    """
    base = list(dict.fromkeys(base_prefix))
    strong: list[Permutation] = []
    for g in gens:
        if not g.is_identity() and g not in strong:
            strong.append(g)
    for g in strong:
        if _fixes(g, base):
            base.append(g.support()[0])

    def make_level(i: int) -> _Level:
        lgens = [s for s in strong if _fixes(s, base[:i])]
        return _Level(base[i], lgens, _orbit_transversal(base[i], lgens, degree))

    levels = [make_level(i) for i in range(len(base))]

    def sift(h: Permutation, start: int) -> tuple[Permutation, int]:
        for j in range(start, len(levels)):
            lv = levels[j]
            c = h[lv.point]
            if c not in lv.transversal:
                return h, j
            h = lv.inv(c) * h
        return h, len(levels)

    i = len(levels) - 1
    while i >= 0:
        lv = levels[i]
        residue = None
        for b, u in lv.transversal.items():
            for s in lv.gens:
                h = lv.inv(s[b]) * s * u
                h, j = sift(h, i + 1)
                if not h.is_identity():
                    residue = (h, j)
                    break
            if residue:
                break
        if residue is None:
            i -= 1
            continue
        h, j = residue
        strong.append(h)
        if j == len(levels):
            base.append(h.support()[0])
            levels.append(make_level(j))
        for l in range(i + 1, j + 1):
            levels[l] = make_level(l)
        i = j
    return base, strong, levels


class GeneratedGroup:
    """A permutation group given by generators, indexed by a BSGS.

    Instances are treated as immutable values.
    """

    def __init__(self, gens: Iterable[Permutation], degree: int | None = None, base: Sequence[int] = ()):
        gens = [Permutation(g) for g in gens]
        if degree is None:
            if not gens:
                raise ValueError("degree needed for an empty generator list")
            degree = len(gens[0])
        for g in gens:
            if len(g) != degree:
                raise DegreeMismatch(f"generator {g} has degree {len(g)}, expected {degree}")
        for b in base:
            if not 0 <= b < degree:
                raise PointOutOfRange(f"base point {b} outside degree {degree}")
        self.degree = degree
        self.generators: tuple[Permutation, ...] = tuple(gens)
        b, strong, levels = _schreier_sims(self.generators, degree, base)
        self.base: tuple[int, ...] = tuple(b)
        self.strong_generators: tuple[Permutation, ...] = tuple(strong)
        self._levels = levels
        self._elements: frozenset[Permutation] | None = None

    @classmethod
    def trivial(cls, degree: int) -> GeneratedGroup:
        return cls([], degree)

    @classmethod
    def symmetric(cls, degree: int) -> GeneratedGroup:
        if degree < 2:
            return cls.trivial(degree)
        gens = [Permutation.from_cycles(degree, [(0, 1)])]
        if degree > 2:
            gens.append(Permutation.from_cycles(degree, [tuple(range(degree))]))
        return cls(gens, degree)

    @classmethod
    def cyclic(cls, degree: int) -> GeneratedGroup:
        return cls([Permutation.from_cycles(degree, [tuple(range(degree))])], degree)

    @property
    def transversals(self) -> list[dict[int, Permutation]]:
        return [lv.transversal for lv in self._levels]

    def order(self) -> int:
        n = 1
        for lv in self._levels:
            n *= len(lv.transversal)
        return n

    def __len__(self) -> int:
        return self.order()

    def identity(self) -> Permutation:
        return Permutation.identity(self.degree)

    def sift(self, g: Permutation) -> tuple[Permutation, int]:
        for j, lv in enumerate(self._levels):
            c = g[lv.point]
            if c not in lv.transversal:
                return g, j
            g = lv.inv(c) * g
        return g, len(self._levels)

    def contains(self, g: Permutation) -> bool:
        if len(g) != self.degree:
            raise DegreeMismatch(f"degree {len(g)} vs group degree {self.degree}")
        if self._elements is not None:
            return g in self._elements
        h, _ = self.sift(g)
        return h.is_identity()

    __contains__ = contains

    def elements(self) -> Iterator[Permutation]:
        """All elements, each exactly once (order follows the transversals)."""
        ident = self.identity()
        factors = [list(lv.transversal.values()) for lv in self._levels]
        for combo in itertools.product(*factors):
            g = ident
            for u in combo:
                g = g * u
            yield g

    def element_set(self) -> frozenset[Permutation]:
        if self._elements is None:
            self._elements = frozenset(self.elements())
        return self._elements

    def sorted_elements(self) -> list[Permutation]:
        return sorted(self.element_set())

    def is_subgroup_of(self, other: GeneratedGroup) -> bool:
        return all(other.contains(g) for g in self.strong_generators)

    def same_group(self, other: GeneratedGroup) -> bool:
        return self.degree == other.degree and self.order() == other.order() and self.is_subgroup_of(other)

    def image(self, f: Callable[[Permutation], Permutation], degree: int | None = None) -> GeneratedGroup:
        """The group generated by the images of the strong generators under ``f``."""
        return GeneratedGroup([f(g) for g in self.strong_generators], degree if degree is not None else self.degree)

    def conjugate(self, g: Permutation) -> GeneratedGroup:
        """``g G g^-1``."""
        return self.image(lambda x: x.conjugate(g))

    def is_transitive(self) -> bool:
        return self.degree == 0 or len(orbit(self, 0)) == self.degree

    def __repr__(self) -> str:
        gens = ", ".join(map(str, self.generators)) or "()"
        return f"<GeneratedGroup degree={self.degree} order={self.order()} gens=[{gens}]>"


def bsgs_build(gens: Sequence[Permutation], degree: int | None = None) -> GeneratedGroup:
    if not gens and degree is None:
        raise ValueError("need at least one generator or an explicit degree")
    return GeneratedGroup(gens, degree)


def orbit(G: GeneratedGroup, a: int) -> set[int]:
    if not 0 <= a < G.degree:
        raise PointOutOfRange(f"point {a} outside degree {G.degree}")
    seen = {a}
    queue = [a]
    for x in queue:
        for s in G.strong_generators:
            y = s[x]
            if y not in seen:
                seen.add(y)
                queue.append(y)
    return seen


def orbits(G: GeneratedGroup) -> list[list[int]]:
    """The orbits of ``G`` on points, each sorted, listed by smallest point."""
    done: set[int] = set()
    out = []
    for a in range(G.degree):
        if a not in done:
            o = orbit(G, a)
            done |= o
            out.append(sorted(o))
    return out


def _check_points(G: GeneratedGroup, A: Iterable[int]) -> list[int]:
    pts = sorted(set(A))
    for a in pts:
        if not 0 <= a < G.degree:
            raise PointOutOfRange(f"point {a} outside degree {G.degree}")
    return pts


def pointwise_stabilizer(G: GeneratedGroup, A: Iterable[int]) -> GeneratedGroup:
    """``{g in G : g(a) = a for all a in A}``, read off a BSGS whose base starts with ``A``."""
    pts = _check_points(G, A)
    if not pts:
        return G
    H = GeneratedGroup(G.strong_generators, G.degree, base=pts)
    return GeneratedGroup([s for s in H.strong_generators if _fixes(s, pts)], G.degree)


def _coset_search(G: GeneratedGroup, A: Sequence[int], accept: Callable[[Permutation], bool] | None = None) -> tuple[GeneratedGroup, list[Permutation]]:
    """Representatives of the cosets ``g G_(A)`` with ``g(A) = A`` and ``accept(g)``.

    Backtracks over a stabilizer chain whose base starts with ``A``; a branch
    is cut as soon as a base point of ``A`` leaves ``A``.  Returns the
    pointwise stabilizer together with the representatives.
    """
    H = GeneratedGroup(G.strong_generators, G.degree, base=A)
    k = len(A)
    target = set(A)
    levels = H._levels
    stab = GeneratedGroup([s for s in H.strong_generators if _fixes(s, A)], G.degree)
    reps: list[Permutation] = []

    def walk(i: int, g: Permutation) -> None:
        if i == k:
            if accept is None or accept(g):
                reps.append(g)
            return
        lv = levels[i]
        for c in sorted(lv.transversal):
            if g[c] in target:
                walk(i + 1, g * lv.transversal[c])

    walk(0, H.identity())
    return stab, reps


def _extend_group(H: GeneratedGroup, extra: Iterable[Permutation]) -> GeneratedGroup:
    for r in extra:
        if not H.contains(r):
            H = GeneratedGroup(list(H.strong_generators) + [r], H.degree)
    return H


def setwise_stabilizer(G: GeneratedGroup, A: Iterable[int]) -> GeneratedGroup:
    """``{g in G : g(A) = A}``."""
    pts = _check_points(G, A)
    if not pts or len(pts) == G.degree:
        return G
    stab, reps = _coset_search(G, pts)
    return _extend_group(stab, reps)


def restricted_subgroup(G: GeneratedGroup, K: Sequence[int], L: GeneratedGroup) -> GeneratedGroup:
    """``{g in G : g(K) = K and g|K in L}`` with ``L`` acting on positions of ``K``."""
    K = list(K)
    if L.degree != len(K):
        raise DegreeMismatch(f"L has degree {L.degree}, K has {len(K)} points")
    _check_points(G, K)
    if not K:
        return G
    stab, reps = _coset_search(G, K, lambda g: L.contains(restriction(g, K)))
    return _extend_group(stab, reps)


def restriction_group(G: GeneratedGroup, K: Sequence[int]) -> GeneratedGroup:
    """The image of the setwise stabilizer of ``K`` under restriction to ``K``."""
    K = list(K)
    S = setwise_stabilizer(G, K)
    return GeneratedGroup([restriction(g, K) for g in S.strong_generators], len(K))


def is_normal(H: GeneratedGroup, G: GeneratedGroup) -> bool:
    if not H.is_subgroup_of(G):
        raise NotASubgroup("H is not contained in G")
    return all(H.contains(h.conjugate(g)) for g in G.strong_generators for h in H.strong_generators)


def index(H: GeneratedGroup, G: GeneratedGroup) -> int:
    if not H.is_subgroup_of(G):
        raise NotASubgroup("H is not contained in G")
    return G.order() // H.order()


# -- subgroup enumeration ---------------------------------------------------


@dataclass(frozen=True)
class SubgroupEntry:
    group: GeneratedGroup
    is_normal_in_parent: bool
    index_in_parent: int

    @property
    def order(self) -> int:
        return self.group.order()


@dataclass(frozen=True)
class SubgroupList:
    parent: GeneratedGroup
    subgroups: tuple[SubgroupEntry, ...]

    def __len__(self) -> int:
        return len(self.subgroups)

    def __iter__(self) -> Iterator[SubgroupEntry]:
        return iter(self.subgroups)

    def orders(self) -> list[int]:
        return [e.order for e in self.subgroups]


def _close(gens: Sequence[Permutation], ident: Permutation) -> frozenset[Permutation]:
    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for x in frontier:
            for s in gens:
                y = s * x
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return frozenset(seen)


def subgroup_element_sets(G: GeneratedGroup, bound: int = DEFAULT_SUBGROUP_BOUND) -> dict[frozenset[Permutation], tuple[Permutation, ...]]:
    """Every subgroup of ``G`` as an element set, mapped to a generating tuple.

    Cyclic extension: starting from the trivial group, repeatedly join a known
    subgroup with a cyclic subgroup it does not contain.  Every subgroup is a
    join of cyclic subgroups, so the search is complete.
    """
    if G.order() > bound:
        raise OrderBoundExceeded(f"group order {G.order()} exceeds bound {bound}")
    ident = G.identity()
    cyclic: dict[frozenset[Permutation], Permutation] = {}
    for g in G.sorted_elements():
        C = _close([g], ident)
        if C not in cyclic:
            cyclic[C] = g
    cyc = sorted(cyclic.items(), key=lambda kv: (len(kv[0]), kv[1]))
    trivial = frozenset([ident])
    found: dict[frozenset[Permutation], tuple[Permutation, ...]] = {trivial: ()}
    layer = [trivial]
    while layer:
        nxt = []
        for H in layer:
            gens = found[H]
            for C, z in cyc:
                if z in H:
                    continue
                J = _close(gens + (z,), ident)
                if J not in found:
                    found[J] = gens + (z,)
                    nxt.append(J)
        layer = nxt
    return found


def all_subgroups(G: GeneratedGroup, bound: int = DEFAULT_SUBGROUP_BOUND) -> SubgroupList:
    """All subgroups of ``G`` with normality flags and indices.

    Sorted by order, then by sorted element list, so the output is
    deterministic.
    """
    found = subgroup_element_sets(G, bound)
    gset = G.element_set()
    gens_G = G.strong_generators
    entries = []
    for elems, gens in sorted(found.items(), key=lambda kv: (len(kv[0]), sorted(kv[0]))):
        H = GeneratedGroup(gens, G.degree)
        H._elements = elems
        assert elems <= gset
        normal = all(h.conjugate(g) in elems for g in gens_G for h in gens)
        entries.append(SubgroupEntry(H, normal, G.order() // len(elems)))
    return SubgroupList(G, tuple(entries))


def quotient_group(G: GeneratedGroup, N: GeneratedGroup):
    """Cayley table of ``G/N`` on cosets.

    Cosets are numbered by their lexicographically least element, so the
    coset ``N`` itself is number 0.
    """
    from .fingroup import FiniteGroup

    if not is_normal(N, G):
        raise NotNormal("N is not normal in G")
    nset = N.element_set()
    coset_of: dict[Permutation, int] = {}
    reps: list[Permutation] = []
    for g in G.sorted_elements():
        if g in coset_of:
            continue
        idx = len(reps)
        reps.append(g)
        for n in nset:
            coset_of[g * n] = idx
    table = [[coset_of[a * b] for b in reps] for a in reps]
    return FiniteGroup(table, names=[str(r) for r in reps])


def to_finite_group(G: GeneratedGroup):
    """The Cayley table of ``G`` with elements in lexicographic order (identity first)."""
    from .fingroup import FiniteGroup

    elems = G.sorted_elements()
    pos = {g: i for i, g in enumerate(elems)}
    table = [[pos[a * b] for b in elems] for a in elems]
    return FiniteGroup(table, names=[str(g) for g in elems])


# -- text format -------------------------------------------------------------


def format_group(G: GeneratedGroup) -> str:
    lines = [f"degree {G.degree}"]
    lines += [str(g) for g in G.generators]
    return "\n".join(lines) + "\n"


def parse_group(text: str) -> GeneratedGroup:
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines or not lines[0].startswith("degree"):
        raise ValueError("group file must start with 'degree n'")
    n = int(lines[0].split()[1])
    return GeneratedGroup([Permutation.parse(ln, n) for ln in lines[1:]], n)
