"""Finitely presented amalgamation classes and their staged generic structures.

A class is cut out by universal constraints: a set of unary symbols that
partition the domain, symmetric irreflexive binary symbols (optionally tied
to a pair of sorts), groups of binary symbols that partition the pairs of
distinct points, and forbidden induced substructures.  All such classes are
hereditary, and membership of a structure is decided by its substructures on
at most ``max(2, largest forbidden size)`` points.
"""
from __future__ import annotations

import itertools
import random
from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass, field, replace

from .errors import NotAMember, SignatureMismatch, SpecNotAmalgamating
from .perm import GeneratedGroup, Permutation
from .structures import (
    FinStructure,
    Signature,
    automorphism_group,
    canonical_form,
    complete_graph,
    find_isomorphism,
    has_embedding,
    induced_substructure,
)

Tuple = tuple[int, ...]


@dataclass(frozen=True)
class ClassSpec:
    signature: Signature
    partition_unaries: tuple[str, ...] = ()
    # (symbol, sorts) where sorts is None or a pair of partition unaries
    symmetric_irreflexive: tuple[tuple[str, tuple[str, str] | None], ...] = ()
    pair_partition: tuple[str, ...] = ()
    forbidden: tuple[FinStructure, ...] = ()
    name: str = ""

    def __post_init__(self):
        names = set(self.signature.names)
        for u in self.partition_unaries:
            if u not in names or self.signature.arity(u) != 1:
                raise ValueError(f"partition symbol {u!r} is not a declared unary")
        for r, sorts in self.symmetric_irreflexive:
            if r not in names or self.signature.arity(r) != 2:
                raise ValueError(f"{r!r} is not a declared binary symbol")
            if sorts is not None and any(s not in self.partition_unaries for s in sorts):
                raise ValueError(f"sort constraint {sorts} of {r!r} must name partition unaries")
        sym = {r for r, _ in self.symmetric_irreflexive}
        for r in self.pair_partition:
            if r not in sym:
                raise ValueError(f"pair-partition symbol {r!r} must be symmetric irreflexive")
        for F in self.forbidden:
            if F.signature != self.signature:
                raise SignatureMismatch("forbidden structure uses a different signature")

    @property
    def sorts(self) -> dict[str, tuple[str, str] | None]:
        return dict(self.symmetric_irreflexive)

    def locality(self) -> int:
        return max([2] + [F.n for F in self.forbidden])


# -- built-in library ----------------------------------------------------------------


def pure_set_class() -> ClassSpec:
    return ClassSpec(Signature.of(("E", 2)), symmetric_irreflexive=(("E", None),), forbidden=(complete_graph(2),), name="pure_set")


def graphs() -> ClassSpec:
    return ClassSpec(Signature.of(("E", 2)), symmetric_irreflexive=(("E", None),), name="graphs")


def kn_free(n: int) -> ClassSpec:
    """Graphs omitting the complete graph on ``n`` vertices."""
    return ClassSpec(Signature.of(("E", 2)), symmetric_irreflexive=(("E", None),), forbidden=(complete_graph(n),), name=f"kn_free({n})")


def colored_graph(n: int) -> ClassSpec:
    """Complete graphs whose edges carry exactly one of ``n`` colours ``E0..E{n-1}``."""
    names = tuple(f"E{i}" for i in range(n))
    sig = Signature(tuple((c, 2) for c in names))
    return ClassSpec(sig, symmetric_irreflexive=tuple((c, None) for c in names), pair_partition=names, name=f"colored_graph({n})")


def gamma_class(gamma: FinStructure) -> ClassSpec:
    """Sorted structures over a graph: unaries ``P<l>`` partition the domain and
    each edge ``{l, k}`` (``l < k``) gives a symmetric irreflexive ``R<l>_<k>``
    living on ``P<l> x P<k>``."""
    n = gamma.n
    unaries = [(f"P{l}", 1) for l in range(n)]
    edges = sorted({(min(u, v), max(u, v)) for u, v in gamma.tables[gamma.signature.names[0]]}) if len(gamma.signature) else []
    binaries = [(f"R{l}_{k}", 2) for l, k in edges]
    sig = Signature(tuple(unaries + binaries))
    sym = tuple((f"R{l}_{k}", (f"P{l}", f"P{k}")) for l, k in edges)
    return ClassSpec(sig, partition_unaries=tuple(u for u, _ in unaries), symmetric_irreflexive=sym, name=f"gamma_class(n={n})")


def builtin_spec(name: str) -> ClassSpec:
    """``pure_set``, ``graphs``, ``kn_free:n``, ``colored_graph:n``."""
    head, *args = name.strip().lower().split(":")
    if head == "pure_set":
        return pure_set_class()
    if head == "graphs":
        return graphs()
    if head == "kn_free":
        return kn_free(int(args[0]))
    if head == "colored_graph":
        return colored_graph(int(args[0]))
    raise ValueError(f"unknown class {name!r}")


# -- membership -------------------------------------------------------------------------


@dataclass(frozen=True)
class Membership:
    member: bool
    violation: str = ""
    witness: tuple = ()

    def __bool__(self) -> bool:
        return self.member


def _sort_of(M: FinStructure, spec: ClassSpec) -> list[list[str]]:
    sorts: list[list[str]] = [[] for _ in range(M.n)]
    for u in spec.partition_unaries:
        for (x,) in M.tables[u]:
            sorts[x].append(u)
    return sorts


def is_member(M: FinStructure, spec: ClassSpec, check_forbidden: bool = True) -> Membership:
    if M.signature != spec.signature:
        raise SignatureMismatch("structure and class use different signatures")
    sorts = _sort_of(M, spec)
    if spec.partition_unaries:
        for x, s in enumerate(sorts):
            if len(s) != 1:
                return Membership(False, "partition", (x, tuple(s)))
    sets = M._table_sets()
    for r, srt in spec.symmetric_irreflexive:
        rel = sets[r]
        for x, y in rel:
            if x == y:
                return Membership(False, "irreflexive", (r, x))
            if (y, x) not in rel:
                return Membership(False, "symmetric", (r, x, y))
            if srt is not None and {sorts[x][0], sorts[y][0]} != set(srt):
                # a symbol with sorts (l, l) needs both ends in P_l
                return Membership(False, "sorts", (r, x, y))
    if spec.pair_partition:
        for x, y in itertools.combinations(range(M.n), 2):
            hits = [r for r in spec.pair_partition if (x, y) in sets[r]]
            if len(hits) != 1:
                return Membership(False, "pair_partition", (x, y, tuple(hits)))
    if check_forbidden:
        for i, F in enumerate(spec.forbidden):
            if F.n <= M.n and has_embedding(F, M):
                return Membership(False, "forbidden", (i,))
    return Membership(True)


# -- enumeration --------------------------------------------------------------------------


def _pair_options(spec: ClassSpec, sort_a: str | None, sort_b: str | None) -> list[tuple[str, ...]]:
    """Sets of symmetric binary symbols that may hold on a pair with the given sorts."""
    allowed = []
    for r, srt in spec.symmetric_irreflexive:
        if srt is None or {sort_a, sort_b} == set(srt):
            allowed.append(r)
    pp = set(spec.pair_partition)
    free = [r for r in allowed if r not in pp]
    colours = [r for r in allowed if r in pp]
    opts = []
    colour_choices: list[tuple[str, ...]] = [(c,) for c in colours] if spec.pair_partition else [()]
    for mask in itertools.product((False, True), repeat=len(free)):
        chosen = tuple(r for r, m in zip(free, mask) if m)
        for c in colour_choices:
            opts.append(tuple(sorted(chosen + c)))
    return opts


def _free_symbols(spec: ClassSpec) -> list[tuple[str, int]]:
    constrained = set(spec.partition_unaries) | {r for r, _ in spec.symmetric_irreflexive}
    return [(s, a) for s, a in spec.signature.symbols if s not in constrained]


def one_point_extensions(spec: ClassSpec, B: FinStructure) -> Iterator[FinStructure]:
    """Every member on ``B.n + 1`` points whose restriction to ``range(B.n)`` is ``B``."""
    v = B.n
    sorts = _sort_of(B, spec)
    free = _free_symbols(spec)
    sort_choices: list[str | None] = list(spec.partition_unaries) or [None]
    free_tuples = [(s, [t for t in itertools.product(range(v + 1), repeat=a) if v in t]) for s, a in free]
    free_choices = []
    for s, tuples in free_tuples:
        free_choices.append([(s, tuple(c)) for k in range(len(tuples) + 1) for c in itertools.combinations(tuples, k)])
    base_tables = {s: list(t) for s, t in B.tables.items()}
    for sv in sort_choices:
        per_point = [_pair_options(spec, sv, sorts[u][0] if sorts[u] else None) for u in range(v)]
        for pair_choice in itertools.product(*per_point):
            for fc in itertools.product(*free_choices):
                tables = {s: list(t) for s, t in base_tables.items()}
                if sv is not None:
                    tables[sv].append((v,))
                for u, rs in enumerate(pair_choice):
                    for r in rs:
                        tables[r] += [(u, v), (v, u)]
                for s, ts in fc:
                    tables[s] += list(ts)
                C = FinStructure(v + 1, spec.signature, tables)
                if is_member(C, spec):
                    yield C


def enumerate_members(spec: ClassSpec, size: int) -> Iterator[FinStructure]:
    """All labelled members on ``range(size)``."""
    if size == 0:
        E = FinStructure(0, spec.signature)
        if is_member(E, spec):
            yield E
        return
    for B in enumerate_members(spec, size - 1):
        yield from one_point_extensions(spec, B)


def members_up_to_iso(spec: ClassSpec, size: int, fixed: Sequence[int] = ()) -> list[FinStructure]:
    out = {}
    for B in enumerate_members(spec, size):
        out.setdefault(canonical_form(B, fixed), B)
    return [out[k] for k in sorted(out, key=repr)]


def _extensions_over(spec: ClassSpec, A: FinStructure, max_size: int) -> list[FinStructure]:
    """Members ``B`` on ``range(m)``, ``A.n < m <= max_size``, with ``B[range(A.n)] = A``,
    up to isomorphism fixing ``A`` pointwise."""
    fixed = tuple(range(A.n))
    out: list[FinStructure] = []
    layer = [A]
    for _ in range(A.n, max_size):
        seen: dict[tuple, FinStructure] = {}
        for B in layer:
            for C in one_point_extensions(spec, B):
                seen.setdefault(canonical_form(C, fixed), C)
        layer = [seen[k] for k in sorted(seen, key=repr)]
        out += layer
    return out


# -- amalgamation -----------------------------------------------------------------------


def free_amalgam(A_size: int, B1: FinStructure, B2: FinStructure) -> FinStructure:
    """Glue ``B1`` and ``B2`` along their common first ``A_size`` points, adding nothing else."""
    n1 = B1.n
    shift = [x if x < A_size else x - A_size + n1 for x in range(B2.n)]
    tables = {s: list(B1.tables[s]) + [tuple(shift[x] for x in t) for t in B2.tables[s]] for s in B1.signature.names}
    return FinStructure(n1 + B2.n - A_size, B1.signature, tables)


def _completions(spec: ClassSpec, D: FinStructure, left: Sequence[int], right: Sequence[int]) -> Iterator[FinStructure]:
    """``D`` with every admissible choice of binary symbols on the pairs ``left x right``."""
    sorts = _sort_of(D, spec)
    pairs = [(a, b) for a in left for b in right]
    options = [_pair_options(spec, sorts[a][0] if sorts[a] else None, sorts[b][0] if sorts[b] else None) for a, b in pairs]
    for choice in itertools.product(*options):
        tables = {s: list(t) for s, t in D.tables.items()}
        for (a, b), rs in zip(pairs, choice):
            for r in rs:
                tables[r] += [(a, b), (b, a)]
        yield FinStructure(D.n, D.signature, tables)


@dataclass
class AmalgamationReport:
    bound: int
    members_checked: int = 0
    amalgams_checked: int = 0
    hp_failures: list = field(default_factory=list)
    free_failures: list = field(default_factory=list)
    ap_failures: list = field(default_factory=list)
    method: str = "exhaustive"

    @property
    def free(self) -> bool:
        return not self.hp_failures and not self.free_failures

    @property
    def amalgamating(self) -> bool:
        return not self.hp_failures and not self.ap_failures

    @property
    def failures(self) -> list:
        return self.hp_failures + self.free_failures

    def to_dict(self) -> dict:
        def enc(items):
            return [repr(x) for x in items[:20]]

        return {
            "bound": self.bound,
            "method": self.method,
            "members_checked": self.members_checked,
            "amalgams_checked": self.amalgams_checked,
            "hp_failures": len(self.hp_failures),
            "free_failures": len(self.free_failures),
            "ap_failures": len(self.ap_failures),
            "witnesses": enc(self.hp_failures + self.free_failures + self.ap_failures),
        }


def _amalgam_violation(spec: ClassSpec, a: int, B1: FinStructure, B2: FinStructure, full_check: bool) -> str:
    """Why the free amalgam of two members over their first ``a`` points is not a member ('' if it is).

    Every tuple of ``D`` lies inside one of the two members, so partition,
    symmetry and sort constraints carry over; only uncoloured cross pairs and
    forbidden copies spread over both sides can break membership.
    """
    if full_check:
        return is_member(free_amalgam(a, B1, B2), spec).violation
    if spec.pair_partition and B1.n > a and B2.n > a:
        return "pair_partition"
    if spec.forbidden:
        return is_member(free_amalgam(a, B1, B2), spec).violation
    return ""


def check_amalgamation(spec: ClassSpec, size_bound: int = 4, search_amalgams: bool = True, full_check: bool = False) -> AmalgamationReport:
    """Exhaustive HP / JEP / free-amalgamation check up to ``size_bound``.

    For every member ``A`` (up to isomorphism) and every pair of extensions
    ``A <= B1, B2`` with ``|Bi| <= size_bound`` (up to isomorphism over
    ``A``), the free amalgam is tested for membership; ``A`` empty covers
    joint embedding.  When a free amalgam fails and ``search_amalgams`` is
    set, other amalgams (extra binary facts across the two sides) are tried
    so that amalgamation failures are told apart from free-amalgamation ones.
    ``full_check`` re-tests every amalgam against all constraints instead of
    only those that gluing can break.
    """
    if size_bound < 1:
        raise ValueError("size bound must be positive")
    rep = AmalgamationReport(size_bound)
    for size in range(size_bound + 1):
        for B in members_up_to_iso(spec, size):
            rep.members_checked += 1
            for k in range(size):
                for S in itertools.combinations(range(size), k):
                    if not is_member(induced_substructure(B, S), spec):
                        rep.hp_failures.append((B, S))
    for a in range(size_bound):
        for A in members_up_to_iso(spec, a):
            exts = _extensions_over(spec, A, size_bound)
            for i, B1 in enumerate(exts):
                for B2 in exts[i:]:
                    rep.amalgams_checked += 1
                    violation = _amalgam_violation(spec, a, B1, B2, full_check)
                    if not violation:
                        continue
                    rep.free_failures.append((A, B1, B2, violation))
                    if search_amalgams:
                        D = free_amalgam(a, B1, B2)
                        left = range(a, B1.n)
                        right = range(B1.n, D.n)
                        if not any(is_member(C, spec) for C in _completions(spec, D, left, right)):
                            rep.ap_failures.append((A, B1, B2))
                    else:
                        rep.ap_failures.append((A, B1, B2))
    return rep


def _irreducible(F: FinStructure) -> bool:
    related = set()
    for tab in F.tables.values():
        for t in tab:
            for x, y in itertools.combinations(set(t), 2):
                related.add((min(x, y), max(x, y)))
    return all((x, y) in related for x, y in itertools.combinations(range(F.n), 2))


def free_amalgamation_certificate(spec: ClassSpec) -> AmalgamationReport:
    """Structural check that the class is closed under free amalgamation.

    The constraints other than forbidden substructures only speak about one
    point or one pair, so they survive gluing; a class omitting a set of
    structures is closed under free amalgams iff every omitted structure is
    irreducible (each pair of its points lies in a common tuple).  A
    pair-partition constraint is never preserved, since free amalgams leave
    cross pairs uncoloured.
    """
    rep = AmalgamationReport(0, method="certificate")
    if spec.pair_partition:
        rep.free_failures.append(("pair_partition", spec.pair_partition))
    for i, F in enumerate(spec.forbidden):
        if not _irreducible(F):
            rep.free_failures.append(("reducible_forbidden", i))
    return rep


# -- generic structures ------------------------------------------------------------------


def point_type(M: FinStructure, w: int, S: Sequence[int]) -> tuple:
    """The facts linking ``w`` to the tuple ``S``, with ``w`` written -1 and
    ``S[i]`` written ``i``."""
    pos = {s: i for i, s in enumerate(S)}
    pos[w] = -1
    per_point, _ = M.incidence()
    names = M.signature.names
    facts = set()
    for si, _, t in per_point[w]:
        if all(x in pos for x in t):
            facts.add((names[si], tuple(pos[x] for x in t)))
    return tuple(sorted(facts))


def allowed_types(spec: ClassSpec, M: FinStructure, S: Sequence[int], cache: dict | None = None) -> list[tuple]:
    """One-point extension types over ``S`` that the class allows."""
    base = induced_substructure(M, S)
    if cache is not None and base in cache:
        return cache[base]
    out = []
    for C in one_point_extensions(spec, base):
        t = point_type(C, base.n, range(base.n))
        if t not in out:
            out.append(t)
    if cache is not None:
        cache[base] = out
    return out


@dataclass(frozen=True)
class ExtensionReport:
    ok: bool
    missing: tuple = ()

    def __bool__(self) -> bool:
        return self.ok


def _missing_over(spec: ClassSpec, M: FinStructure, S: Sequence[int], cache: dict | None = None) -> list[tuple]:
    realized = {point_type(M, w, S) for w in range(M.n) if w not in S}
    return [t for t in allowed_types(spec, M, S, cache) if t not in realized]


def extension_property_check(M: FinStructure, spec: ClassSpec, k: int) -> ExtensionReport:
    """Whether every allowed one-point extension of every subset of size ``<= k`` is realized in ``M``.

    ``k`` is the size of the base subset; ``k = 0`` asks that every allowed
    one-point structure occurs.
    """
    m = is_member(M, spec)
    if not m:
        raise NotAMember(f"structure violates {m.violation}")
    cache: dict = {}
    for size in range(k + 1):
        for S in itertools.combinations(range(M.n), size):
            missing = _missing_over(spec, M, S, cache)
            if missing:
                return ExtensionReport(False, (S, missing[0]))
    return ExtensionReport(True)


@dataclass
class GenericBuild:
    structure: FinStructure
    complete: bool
    stages: int
    deficiencies: list = field(default_factory=list)


def _add_point(spec: ClassSpec, M: FinStructure, S: Sequence[int], typ: tuple, rng: random.Random) -> FinStructure | None:
    v = M.n
    tables = {s: list(t) for s, t in M.tables.items()}
    for name, t in typ:
        tables[name].append(tuple(v if x == -1 else S[x] for x in t))
    D = FinStructure(v + 1, spec.signature, tables)
    # pairs towards points outside S are still open, so colouring is checked at the end
    partial = replace(spec, pair_partition=())
    if not is_member(D, partial):
        return None
    sorts = _sort_of(D, spec)
    sv = sorts[v][0] if sorts[v] else None
    for u in range(M.n):
        if u in S:
            continue
        opts = _pair_options(spec, sv, sorts[u][0] if sorts[u] else None)
        rng.shuffle(opts)
        for rs in opts:
            trial = {s: list(t) for s, t in D.tables.items()}
            for r in rs:
                trial[r] += [(u, v), (v, u)]
            E = FinStructure(v + 1, spec.signature, trial)
            if is_member(E, partial):
                D = E
                break
        else:
            return None
    return D if is_member(D, spec) else None


def generic_build(spec: ClassSpec, k: int, stage_bound: int = 200, seed: int = 0, check_bound: int | None = None) -> GenericBuild:
    """Grow a member realizing every one-point extension over subsets of size ``<= k``.

    Each stage takes the first missing requirement (subsets by size, then
    lexicographically; types in enumeration order) and adds a witness point.
    Its relations to points outside the base subset are drawn with a seeded
    generator among the admissible choices, so runs are reproducible.
    """
    rep = check_amalgamation(spec, check_bound if check_bound is not None else k + 1)
    if not rep.amalgamating:
        raise SpecNotAmalgamating(f"{len(rep.ap_failures)} amalgamation failures at bound {rep.bound}")
    rng = random.Random(seed)
    M = FinStructure(0, spec.signature)
    done: set[tuple[int, ...]] = set()
    cache: dict = {}
    stages = 0
    while True:
        req = None
        for size in range(k + 1):
            for S in itertools.combinations(range(M.n), size):
                if S in done:
                    continue
                missing = _missing_over(spec, M, S, cache)
                if not missing:
                    done.add(S)
                    continue
                req = (S, missing[0])
                break
            if req:
                break
        if req is None:
            return GenericBuild(M, True, stages)
        if stages >= stage_bound:
            deficits = []
            for size in range(k + 1):
                for S in itertools.combinations(range(M.n), size):
                    if S not in done:
                        deficits += [(S, t) for t in _missing_over(spec, M, S, cache)]
            return GenericBuild(M, False, stages, deficits)
        S, typ = req
        new = _add_point(spec, M, S, typ, rng)
        if new is None:
            return GenericBuild(M, False, stages, [req])
        M = new
        stages += 1


# -- class-level algebraicity -----------------------------------------------------------


def _duplicate(M: FinStructure, a: int, copies: int) -> tuple[FinStructure, list[int]]:
    """``M`` plus ``copies - 1`` clones of ``a`` that share all of ``a``'s facts with
    the rest of ``M`` and have no facts among themselves or with ``a``."""
    clones = list(range(M.n, M.n + copies - 1))
    tables = {s: list(t) for s, t in M.tables.items()}
    for s, tab in M.tables.items():
        for t in tab:
            if a not in t:
                continue
            others = [x for x in t if x != a]
            if others and len(others) + t.count(a) == len(t):
                for c in clones:
                    tables[s].append(tuple(c if x == a else x for x in t))
            elif not others:
                for c in clones:
                    tables[s].append(tuple(c for _ in t))
    return FinStructure(M.n + copies - 1, M.signature, tables), clones


def class_acl(spec: ClassSpec, M: FinStructure, A: Iterable[int], copies: int = 2) -> frozenset[int]:
    """Points of ``M`` outside ``A`` that cannot be duplicated ``copies`` times over the rest.

    ``a`` counts as non-algebraic when some member extends ``M`` by
    ``copies - 1`` further points carrying the same facts as ``a`` towards
    ``M - {a}``; the free choice (nothing among the copies) is tried first,
    then every choice of binary facts among the copies.
    """
    m = is_member(M, spec)
    if not m:
        raise NotAMember(f"structure violates {m.violation}")
    A = frozenset(A)
    out = set(A)
    for a in range(M.n):
        if a in A or copies <= 1:
            continue
        D, clones = _duplicate(M, a, copies)
        if is_member(D, spec):
            continue
        group = [a] + clones
        ok = False
        sorts = _sort_of(D, spec)
        pairs = list(itertools.combinations(group, 2))
        options = [_pair_options(spec, sorts[x][0] if sorts[x] else None, sorts[y][0] if sorts[y] else None) for x, y in pairs]
        for choice in itertools.product(*options):
            tables = {s: list(t) for s, t in D.tables.items()}
            for (x, y), rs in zip(pairs, choice):
                for r in rs:
                    tables[r] += [(x, y), (y, x)]
            if is_member(FinStructure(D.n, D.signature, tables), spec):
                ok = True
                break
        if not ok:
            out.add(a)
    return frozenset(out)


# -- signature symmetries ---------------------------------------------------------------


@dataclass(frozen=True)
class SymmetryWitness:
    symbol_permutation: dict
    sort_permutation: dict


@dataclass
class SymmetryResult:
    group: GeneratedGroup
    symbols: tuple[str, ...]
    witnesses: list[SymmetryWitness]
    verified_up_to: int
    members_checked: int

    def order(self) -> int:
        return self.group.order()


def rename_symbols(M: FinStructure, mapping: dict[str, str]) -> FinStructure:
    return FinStructure(M.n, M.signature, {mapping[s]: t for s, t in M.tables.items()})


def constraint_structure(spec: ClassSpec) -> FinStructure:
    """The constraint system as a structure on symbols, whose automorphisms are
    the symbol permutations preserving every constraint except forbidden lists."""
    names = spec.signature.names
    idx = {s: i for i, s in enumerate(names)}
    arities = sorted({a for _, a in spec.signature.symbols})
    sig = [(f"arity{a}", 1) for a in arities] + [("part", 1), ("symirr", 1), ("pairpart", 1), ("sorted", 2)]
    tables: dict[str, list[Tuple]] = {s: [] for s, _ in sig}
    for s, a in spec.signature.symbols:
        tables[f"arity{a}"].append((idx[s],))
    tables["part"] = [(idx[u],) for u in spec.partition_unaries]
    tables["pairpart"] = [(idx[u],) for u in spec.pair_partition]
    for r, srt in spec.symmetric_irreflexive:
        tables["symirr"].append((idx[r],))
        if srt is not None:
            for u in srt:
                tables["sorted"].append((idx[r], idx[u]))
    return FinStructure(len(names), Signature(tuple(sig)), tables)


def _maps_members(spec: ClassSpec, mappings: Sequence[dict[str, str]], size_bound: int) -> tuple[int | None, int]:
    """Index of the first mapping sending some member of size ``<= size_bound``
    outside the class (``None`` if all pass), and the number of members tried."""
    count = 0
    for size in range(size_bound + 1):
        for B in enumerate_members(spec, size):
            count += 1
            for i, mapping in enumerate(mappings):
                if not is_member(rename_symbols(B, mapping), spec):
                    return i, count
    return None, count


def signature_symmetry_group(spec: ClassSpec, check_bound: int = 2) -> SymmetryResult:
    """Permutations of the signature mapping the class onto itself.

    Candidates are the automorphisms of the constraint structure; when the
    class forbids substructures, candidates must also permute the forbidden
    list up to isomorphism.  Every generator is then checked against all
    labelled members of size ``<= check_bound``.
    """
    if check_bound < 2:
        raise ValueError("check bound must be at least 2")
    names = tuple(spec.signature.names)
    G = automorphism_group(constraint_structure(spec))
    if spec.forbidden:
        keep = []
        for g in G.sorted_elements():
            mapping = {names[i]: names[g[i]] for i in range(len(names))}
            images = [rename_symbols(F, mapping) for F in spec.forbidden]
            if all(any(I.n == F.n and find_isomorphism(I, F) is not None for F in spec.forbidden) for I in images):
                keep.append(g)
        G = GeneratedGroup(keep, len(names))
    mappings = [{names[i]: names[g[i]] for i in range(len(names))} for g in G.strong_generators]
    bad, checked = _maps_members(spec, mappings, check_bound)
    if bad is not None:
        raise AssertionError(f"symbol permutation {mappings[bad]} does not preserve the class")
    witnesses = [SymmetryWitness(m, {u: m[u] for u in spec.partition_unaries}) for m in mappings]
    return SymmetryResult(G, names, witnesses, check_bound, checked)


def sort_action(result: SymmetryResult, spec: ClassSpec) -> GeneratedGroup:
    """The symmetry group acting on the partition unaries (sorts)."""
    part = list(spec.partition_unaries)
    pos = {u: i for i, u in enumerate(part)}
    gens = []
    for g in result.group.strong_generators:
        gens.append(Permutation(pos[result.symbols[g[result.symbols.index(u)]]] for u in part))
    return GeneratedGroup(gens, len(part))


# -- text format -------------------------------------------------------------------------------


def format_spec(spec: ClassSpec) -> str:
    from .structures import format_structure

    lines = ["sig"]
    lines += [f"  {s} {a}" for s, a in spec.signature.symbols]
    lines.append("end")
    if spec.partition_unaries:
        lines.append("partition " + " ".join(spec.partition_unaries))
    for r, srt in spec.symmetric_irreflexive:
        lines.append(f"symmetric_irreflexive {r}" + (f" sorts {srt[0]} {srt[1]}" if srt else ""))
    if spec.pair_partition:
        lines.append("pair_partition " + " ".join(spec.pair_partition))
    for F in spec.forbidden:
        lines.append("forbid")
        lines += format_structure(F).strip().splitlines()
        lines.append("end")
    return "\n".join(lines) + "\n"


def parse_spec(text: str) -> ClassSpec:
    """Read a class file: a ``sig`` block, ``partition``, ``symmetric_irreflexive``
    (optionally ``sorts A B``), ``pair_partition`` lines and ``forbid`` blocks
    holding structure files written in the class signature."""
    from .structures import parse_structure

    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    symbols: list[tuple[str, int]] = []
    partition: tuple[str, ...] = ()
    sym: list[tuple[str, tuple[str, str] | None]] = []
    pairp: tuple[str, ...] = ()
    forbid_texts: list[str] = []
    i = 0
    while i < len(lines):
        parts = lines[i].split()
        head = parts[0]
        if head == "sig":
            i += 1
            while lines[i] != "end":
                name, arity = lines[i].split()
                symbols.append((name, int(arity)))
                i += 1
        elif head == "partition":
            partition = tuple(parts[1:])
        elif head == "symmetric_irreflexive":
            srt = None
            if len(parts) > 2:
                if parts[2] != "sorts" or len(parts) != 5:
                    raise ValueError(f"bad line {lines[i]!r}")
                a, b = parts[3], parts[4]
                # bare indices refer to the partition order
                if a.isdigit() and b.isdigit():
                    a, b = partition[int(a)], partition[int(b)]
                srt = (a, b)
            sym.append((parts[1], srt))
        elif head == "pair_partition":
            pairp = tuple(parts[1:])
        elif head == "forbid":
            body = []
            i += 1
            while lines[i] != "end":
                body.append(lines[i])
                i += 1
            forbid_texts.append("\n".join(body))
        else:
            raise ValueError(f"unknown line {lines[i]!r}")
        i += 1
    sig = Signature(tuple(symbols))
    forbidden = []
    for t in forbid_texts:
        F = parse_structure(t)
        # declared relations only; the signature is the class signature
        forbidden.append(FinStructure(F.n, sig, {s: F.tables.get(s, ()) for s in sig.names}))
    return ClassSpec(sig, partition, tuple(sym), pairp, tuple(forbidden))
