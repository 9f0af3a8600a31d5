"""Finite relational structures, their automorphism groups and closures.

Automorphisms are found by individualization and refinement: points are
coloured by an iterated, label-invariant refinement over all relation tuples,
and the search only pairs points of equal colour.
"""
from __future__ import annotations

import itertools
from collections.abc import Iterable, Iterator, Mapping, Sequence
from dataclasses import dataclass
from typing import Union

from .errors import PointOutOfRange, SignatureMismatch
from .perm import GeneratedGroup, Permutation, orbits, pointwise_stabilizer

Tuple = tuple[int, ...]
_EMPTY: frozenset = frozenset()


@dataclass(frozen=True)
class Signature:
    symbols: tuple[tuple[str, int], ...]

    def __post_init__(self):
        names = [s for s, _ in self.symbols]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate symbol names in {names}")
        for name, arity in self.symbols:
            if arity < 1:
                raise ValueError(f"symbol {name} has arity {arity}")
        object.__setattr__(self, "_arity", dict(self.symbols))
        object.__setattr__(self, "_names", tuple(names))

    @classmethod
    def of(cls, *pairs: tuple[str, int]) -> Signature:
        return cls(tuple((str(n), int(a)) for n, a in pairs))

    @property
    def names(self) -> tuple[str, ...]:
        return self._names

    def arity(self, name: str) -> int:
        return self._arity[name]

    def __contains__(self, name: str) -> bool:
        return name in self._arity

    def __len__(self) -> int:
        return len(self.symbols)


GRAPH_SIGNATURE = Signature.of(("E", 2))


class FinStructure:
    """A structure on ``range(n)`` with one canonical tuple set per symbol."""

    __slots__ = ("n", "signature", "tables", "_incidence", "_key")

    def __init__(self, n: int, signature: Signature, tables: Mapping[str, Iterable[Sequence[int]]] | None = None):
        self.n = int(n)
        self.signature = signature
        canon: dict[str, tuple[Tuple, ...]] = dict.fromkeys(signature.names, ())
        arities = signature._arity
        for name, given in (tables or {}).items():
            arity = arities.get(name)
            if arity is None:
                raise SignatureMismatch(f"symbol {name!r} not in signature")
            if not given:
                continue
            tuples = set()
            for t in given:
                t = tuple(int(x) for x in t)
                if len(t) != arity:
                    raise ValueError(f"tuple {t} has wrong arity for {name}/{arity}")
                for x in t:
                    if not 0 <= x < self.n:
                        raise PointOutOfRange(f"tuple {t} of {name} outside domain of size {self.n}")
                tuples.add(t)
            canon[name] = tuple(sorted(tuples))
        self.tables = canon
        self._incidence = None
        self._key = None

    # -- basics ---------------------------------------------------------------

    @property
    def domain_size(self) -> int:
        return self.n

    def key(self) -> tuple:
        if self._key is None:
            self._key = (self.n, self.signature, tuple(self.tables[s] for s in self.signature.names))
        return self._key

    def __eq__(self, other) -> bool:
        return isinstance(other, FinStructure) and self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())

    def __repr__(self) -> str:
        rels = ", ".join(f"{s}:{len(t)}" for s, t in self.tables.items())
        return f"<FinStructure n={self.n} {rels}>"

    def holds(self, name: str, t: Sequence[int]) -> bool:
        return tuple(t) in self._table_sets()[name]

    def _table_sets(self) -> dict[str, frozenset[Tuple]]:
        inc = self.incidence()
        return inc[1]

    def incidence(self):
        """Per-point list of ``(symbol index, position, tuple)`` and per-symbol tuple sets."""
        if self._incidence is None:
            per_point: list[list[tuple[int, int, Tuple]]] = [[] for _ in range(self.n)]
            sets = {}
            for si, (name, _) in enumerate(self.signature.symbols):
                tab = self.tables[name]
                if not tab:
                    sets[name] = _EMPTY
                    continue
                sets[name] = frozenset(tab)
                for t in tab:
                    for pos, x in enumerate(t):
                        per_point[x].append((si, pos, t))
            self._incidence = (per_point, sets)
        return self._incidence

    def relabel(self, sigma: Sequence[int]) -> FinStructure:
        """The isomorphic copy in which point ``x`` is renamed ``sigma[x]``."""
        return FinStructure(self.n, self.signature, {s: [tuple(sigma[x] for x in t) for t in tab] for s, tab in self.tables.items()})

    def is_automorphism(self, p: Sequence[int]) -> bool:
        sets = self._table_sets()
        for name, tab in self.tables.items():
            s = sets[name]
            for t in tab:
                if tuple(p[x] for x in t) not in s:
                    return False
        return True

    def edges(self, name: str = "E") -> list[tuple[int, int]]:
        return [t for t in self.tables[name] if t[0] < t[1]]


# -- constructors -------------------------------------------------------------


def graph(n: int, edges: Iterable[Sequence[int]], name: str = "E") -> FinStructure:
    """A simple graph as a symmetric irreflexive binary relation."""
    tuples = set()
    for u, v in edges:
        if u == v:
            raise ValueError(f"loop at {u}")
        tuples.add((u, v))
        tuples.add((v, u))
    sig = GRAPH_SIGNATURE if name == "E" else Signature.of((name, 2))
    return FinStructure(n, sig, {name: tuples})


def pure_set(n: int) -> FinStructure:
    """The structure with no relations: edgeless graph in the graph signature."""
    return graph(n, [])


def cycle_graph(n: int) -> FinStructure:
    return graph(n, [(i, (i + 1) % n) for i in range(n)])


def path_graph(n: int) -> FinStructure:
    return graph(n, [(i, i + 1) for i in range(n - 1)])


def complete_graph(n: int) -> FinStructure:
    return graph(n, itertools.combinations(range(n), 2))


def rook_graph(m: int) -> FinStructure:
    """The m x m rook's graph: cells ``(r, c) -> m*r + c``, adjacent when sharing a row or column."""
    edges = []
    for a, b in itertools.combinations(range(m * m), 2):
        if a // m == b // m or a % m == b % m:
            edges.append((a, b))
    return graph(m * m, edges)


def disjoint_cliques(count: int, size: int) -> FinStructure:
    edges = []
    for c in range(count):
        edges += [(c * size + i, c * size + j) for i, j in itertools.combinations(range(size), 2)]
    return graph(count * size, edges)


def playground(name: str) -> FinStructure:
    """Named presets: ``pureset:n``, ``c5``, ``cycle:n``, ``path:n``, ``rook3``, ``cliques:a:b``, ``complete:n``."""
    parts = name.strip().lower().split(":")
    head, args = parts[0], [int(x) for x in parts[1:]]
    if head == "pureset":
        return pure_set(args[0])
    if head == "c5":
        return cycle_graph(5)
    if head == "cycle":
        return cycle_graph(args[0])
    if head == "path":
        return path_graph(args[0])
    if head == "complete":
        return complete_graph(args[0])
    if head == "rook3":
        return rook_graph(3)
    if head == "rook":
        return rook_graph(args[0])
    if head == "cliques":
        return disjoint_cliques(args[0], args[1])
    raise ValueError(f"unknown playground {name!r}")


# -- refinement and automorphisms ------------------------------------------------


def refine(M: FinStructure, colors: Sequence[int]) -> list[int]:
    """Iterated colour refinement; the result is invariant under relabelling of ``M``."""
    per_point, _ = M.incidence()
    colors = list(colors)
    n_classes = len(set(colors))
    while True:
        sigs = [
            (colors[x], tuple(sorted((si, pos, tuple(colors[y] for y in t)) for si, pos, t in per_point[x])))
            for x in range(M.n)
        ]
        table = {s: i for i, s in enumerate(sorted(set(sigs)))}
        colors = [table[s] for s in sigs]
        if len(table) == n_classes:
            return colors
        n_classes = len(table)


def _individualize(colors: Sequence[int], seq: Sequence[int]) -> list[int]:
    pos = {v: i for i, v in enumerate(seq)}
    keys = [(pos[x] + 1, c) if x in pos else (0, c) for x, c in enumerate(colors)]
    table = {k: i for i, k in enumerate(sorted(set(keys)))}
    return [table[k] for k in keys]


def _cells(colors: Sequence[int]) -> dict[int, list[int]]:
    cells: dict[int, list[int]] = {}
    for x, c in enumerate(colors):
        cells.setdefault(c, []).append(x)
    return cells


class _AutSearch:
    def __init__(self, M: FinStructure, initial: Sequence[int] | None = None):
        self.M = M
        self.base_colors = refine(M, initial if initial is not None else [0] * M.n)
        self._cache: dict[tuple[int, ...], list[int]] = {}

    def colors(self, seq: Sequence[int]) -> list[int]:
        key = tuple(seq)
        c = self._cache.get(key)
        if c is None:
            c = self._cache[key] = refine(self.M, _individualize(self.base_colors, seq))
        return c

    def extend(self, left: list[int], right: list[int]) -> Permutation | None:
        """An automorphism mapping ``left[i] -> right[i]`` for all i, if one exists."""
        cl = self.colors(left)
        cr = refine(self.M, _individualize(self.base_colors, right))
        if sorted(cl) != sorted(cr):
            return None
        cells_l, cells_r = _cells(cl), _cells(cr)
        if len(cells_l) == self.M.n:
            p = [0] * self.M.n
            for c, (x,) in cells_l.items():
                p[x] = cells_r[c][0]
            return Permutation(p) if self.M.is_automorphism(p) else None
        c = min(k for k, v in cells_l.items() if len(v) > 1)
        v = cells_l[c][0]
        for w in cells_r[c]:
            found = self.extend(left + [v], right + [w])
            if found is not None:
                return found
        return None


def automorphism_group(M: FinStructure, initial_colors: Sequence[int] | None = None) -> GeneratedGroup:
    """``Aut(M)``, optionally restricted to maps preserving ``initial_colors``.

    A base is chosen by individualizing the first point of the first
    non-trivial cell until the partition is discrete.  Levels are then
    processed deepest first; at each level every candidate image outside the
    orbit found so far is tried once.
    """
    if M.n == 0:
        return GeneratedGroup.trivial(0)
    search = _AutSearch(M, initial_colors)
    seq: list[int] = []
    while True:
        cells = _cells(search.colors(seq))
        big = [v for _, v in sorted(cells.items()) if len(v) > 1]
        if not big:
            break
        seq.append(big[0][0])
    gens: list[Permutation] = []
    for i in range(len(seq) - 1, -1, -1):
        prefix = seq[:i]
        v = seq[i]
        cl = search.colors(prefix)
        cell = [w for w in range(M.n) if cl[w] == cl[v]]
        level_gens = [g for g in gens if all(g[x] == x for x in prefix)]
        orb = _orbit_of(v, level_gens)
        for w in cell:
            if w in orb:
                continue
            g = search.extend(prefix + [v], prefix + [w])
            if g is not None:
                gens.append(g)
                level_gens.append(g)
                orb = _orbit_of(v, level_gens)
    return GeneratedGroup(gens, M.n)


def _orbit_of(v: int, gens: Sequence[Permutation]) -> set[int]:
    seen = {v}
    queue = [v]
    for x in queue:
        for g in gens:
            y = g[x]
            if y not in seen:
                seen.add(y)
                queue.append(y)
    return seen


def brute_force_automorphisms(M: FinStructure) -> set[Permutation]:
    """Every relation-preserving bijection, by trying all ``n!`` of them."""
    return {Permutation(p) for p in itertools.permutations(range(M.n)) if M.is_automorphism(p)}


def find_isomorphism(M: FinStructure, N: FinStructure) -> Permutation | None:
    """A bijection ``f`` with ``M.relabel(f) == N``, or ``None``.

    Works on the disjoint union, individualizing a point of ``M`` together
    with a candidate point of ``N`` under one shared colour.
    """
    if M.n != N.n or M.signature != N.signature:
        return None
    if any(len(M.tables[s]) != len(N.tables[s]) for s in M.signature.names):
        return None
    n = M.n
    if n == 0:
        return Permutation([])
    U = disjoint_union(M, N)
    base = refine(U, [0] * U.n)

    def go(pairs: list[tuple[int, int]]) -> Permutation | None:
        keys = list(base)
        for i, (a, b) in enumerate(pairs):
            keys[a] = keys[b] = U.n + i
        colors = refine(U, keys)
        cells: dict[int, tuple[list[int], list[int]]] = {}
        for x, c in enumerate(colors):
            cells.setdefault(c, ([], []))[x >= n].append(x)
        if any(len(l) != len(r) for l, r in cells.values()):
            return None
        if all(len(l) == 1 for l, _ in cells.values()):
            f = [0] * n
            for l, r in cells.values():
                f[l[0]] = r[0] - n
            return Permutation(f) if M.relabel(f) == N else None
        _, (l, r) = min((c, v) for c, v in cells.items() if len(v[0]) > 1)
        for w in r:
            found = go(pairs + [(l[0], w)])
            if found is not None:
                return found
        return None

    return go([])


def disjoint_union(M: FinStructure, N: FinStructure) -> FinStructure:
    if M.signature != N.signature:
        raise SignatureMismatch("signatures differ")
    tables = {s: list(M.tables[s]) + [tuple(x + M.n for x in t) for t in N.tables[s]] for s in M.signature.names}
    return FinStructure(M.n + N.n, M.signature, tables)


def canonical_form(M: FinStructure, fixed: Sequence[int] = ()) -> tuple:
    """A complete isomorphism invariant (points in ``fixed`` keep their order).

    Minimizes the relabelled tuple tables over all colour-respecting
    orderings, so it is meant for small structures.
    """
    colors = refine(M, _individualize([0] * M.n, fixed))
    cells = [v for _, v in sorted(_cells(colors).items())]
    best = None
    for choice in itertools.product(*(itertools.permutations(c) for c in cells)):
        order = [x for part in choice for x in part]
        label = [0] * M.n
        for i, x in enumerate(order):
            label[x] = i
        enc = tuple(tuple(sorted(tuple(label[x] for x in t) for t in M.tables[s])) for s in M.signature.names)
        if best is None or enc < best:
            best = enc
    return (M.n, M.signature, best)


# -- substructures and embeddings ------------------------------------------------


def induced_substructure(M: FinStructure, A: Sequence[int]) -> FinStructure:
    A = list(A)
    pos = {a: i for i, a in enumerate(A)}
    if len(pos) != len(A):
        raise ValueError(f"repeated points in {A}")
    for a in A:
        if not 0 <= a < M.n:
            raise PointOutOfRange(f"point {a} outside domain of size {M.n}")
    tables = {s: [tuple(pos[x] for x in t) for t in tab if all(x in pos for x in t)] for s, tab in M.tables.items()}
    return FinStructure(len(A), M.signature, tables)


@dataclass(frozen=True)
class Embedding:
    source: FinStructure
    target: FinStructure
    map: tuple[int, ...]


def _embedding_maps(A: FinStructure, M: FinStructure, partial: Sequence[int] = ()) -> Iterator[tuple[int, ...]]:
    if A.signature != M.signature:
        raise SignatureMismatch("signatures differ")
    a_sets = A._table_sets()
    m_sets = M._table_sets()
    # tuples of A checked once their largest point is assigned
    checks: list[list[tuple[str, Tuple]]] = [[] for _ in range(A.n)]
    for name, tab in A.tables.items():
        for t in tab:
            checks[max(t)].append((name, t))
    m_per_point, _ = M.incidence()
    names = M.signature.names

    def consistent(img: list[int]) -> bool:
        i = len(img) - 1
        for name, t in checks[i]:
            if tuple(img[x] for x in t) not in m_sets[name]:
                return False
        # reflection: tuples of M inside the image that involve the new point
        back = {y: x for x, y in enumerate(img)}
        for sj, _, t in m_per_point[img[i]]:
            if all(z in back for z in t) and tuple(back[z] for z in t) not in a_sets[names[sj]]:
                return False
        return True

    def go(img: list[int]) -> Iterator[tuple[int, ...]]:
        if len(img) == A.n:
            yield tuple(img)
            return
        used = set(img)
        for y in range(M.n):
            if y in used:
                continue
            img.append(y)
            if consistent(img):
                yield from go(img)
            img.pop()

    start = list(partial)
    if start:
        for k in range(1, len(start) + 1):
            if not consistent(start[:k]):
                return
    yield from go(start)


def embeddings(A: FinStructure, M: FinStructure) -> list[Embedding]:
    """All induced-substructure embeddings of ``A`` into ``M`` in lexicographic order of maps."""
    return [Embedding(A, M, m) for m in sorted(set(_embedding_maps(A, M)))]


def has_embedding(A: FinStructure, M: FinStructure) -> bool:
    return next(_embedding_maps(A, M), None) is not None


# -- homogeneity ----------------------------------------------------------------------


@dataclass(frozen=True)
class HomogeneityReport:
    homogeneous: bool
    subset: tuple[int, ...] = ()
    image: tuple[int, ...] = ()

    def __bool__(self) -> bool:
        return self.homogeneous


def _tuple_orbit(G: GeneratedGroup, t: Tuple) -> set[Tuple]:
    seen = {t}
    queue = [t]
    for x in queue:
        for g in G.strong_generators:
            y = tuple(g[a] for a in x)
            if y not in seen:
                seen.add(y)
                queue.append(y)
    return seen


def is_homogeneous(M: FinStructure, G: GeneratedGroup | None = None) -> HomogeneityReport:
    """Check that every isomorphism between induced substructures extends to an automorphism.

    Sizes are scanned in increasing order; the first failure is returned as a
    subset together with an image tuple that no automorphism realizes.
    """
    if G is None:
        G = automorphism_group(M)
    for k in range(1, M.n + 1):
        seen_orbits: set[Tuple] = set()
        for S in itertools.combinations(range(M.n), k):
            if S in seen_orbits:
                continue
            orb = _tuple_orbit(G, S)
            seen_orbits |= {tuple(sorted(t)) for t in orb}
            sub = induced_substructure(M, S)
            for img in _embedding_maps(sub, M):
                if img not in orb:
                    return HomogeneityReport(False, S, img)
    return HomogeneityReport(True)


# -- closures ----------------------------------------------------------------------------


def dcl(M: FinStructure, A: Iterable[int], G: GeneratedGroup | None = None) -> frozenset[int]:
    """Points fixed by the pointwise stabilizer of ``A``."""
    return acl_threshold(M, A, 1, G)


def acl_threshold(M: FinStructure, A: Iterable[int], t: int, G: GeneratedGroup | None = None) -> frozenset[int]:
    """Points whose orbit under the pointwise stabilizer of ``A`` has at most ``t`` elements.

    In a finite structure every orbit is finite, so this threshold version
    stands in for algebraic closure; ``t = 1`` is the definable closure.
    """
    if t < 1:
        raise ValueError("threshold must be positive")
    if G is None:
        G = automorphism_group(M)
    H = pointwise_stabilizer(G, A)
    out = set()
    for o in orbits(H):
        if len(o) <= t:
            out.update(o)
    return frozenset(out)


# -- canonical relational structure ------------------------------------------------------


def canonical_relational(G: GeneratedGroup, arity_bound: int, injective_only: bool = False) -> FinStructure:
    """One relation per ``G``-orbit on ``k``-tuples, for every ``k <= arity_bound``.

    Symbols are named ``O<k>_<i>`` with orbits ordered by their least tuple.
    """
    n = G.degree
    if arity_bound > max(n, 1):
        raise ValueError(f"arity bound {arity_bound} exceeds degree {n}")
    symbols = []
    tables = {}
    for k in range(1, arity_bound + 1):
        tuples = itertools.permutations(range(n), k) if injective_only else itertools.product(range(n), repeat=k)
        done: set[Tuple] = set()
        idx = 0
        for t in tuples:
            if t in done:
                continue
            orb = _tuple_orbit(G, t)
            done |= orb
            name = f"O{k}_{idx}"
            idx += 1
            symbols.append((name, k))
            tables[name] = orb
    return FinStructure(n, Signature(tuple(symbols)), tables)


# -- text format ------------------------------------------------------------------------------


def format_structure(M: FinStructure) -> str:
    lines = [f"domain {M.n}"]
    for name, arity in M.signature.symbols:
        lines.append(f"rel {name} {arity}")
        lines += [" ".join(map(str, t)) for t in M.tables[name]]
    return "\n".join(lines) + "\n"


def parse_structure(text: str) -> FinStructure:
    """Read ``domain n`` / ``rel name arity`` blocks, or the ``graph n`` edge-list shorthand."""
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise ValueError("empty structure file")
    head = lines[0].split()
    if head[0] == "graph":
        n = int(head[1])
        return graph(n, [tuple(int(x) for x in ln.split()) for ln in lines[1:]])
    if head[0] != "domain":
        raise ValueError("structure file must start with 'domain n' or 'graph n'")
    n = int(head[1])
    symbols: list[tuple[str, int]] = []
    tables: dict[str, list[Tuple]] = {}
    current = None
    for ln in lines[1:]:
        parts = ln.split()
        if parts[0] == "rel":
            current = parts[1]
            symbols.append((current, int(parts[2])))
            tables[current] = []
        else:
            if current is None:
                raise ValueError(f"tuple {ln!r} before any 'rel' line")
            tables[current].append(tuple(int(x) for x in parts))
    return FinStructure(n, Signature(tuple(symbols)), tables)


StructureLike = Union[FinStructure, str]
