"""The two-sorted model pairing Aut(M) with closed sets and their restricted groups.

Over a finite playground ``M`` with ``G = Aut(M)``, every closed set ``K``
(a closure of a small subset) and every subgroup ``L`` of ``Aut(M[K])`` give a
pair ``(K, L)``, sent by ``j`` to ``G_(K,L)``: the elements of ``G`` that
stabilize ``K`` and restrict into ``L``.  The verifiers in this module test
the finite identities relating pairs, their ``j``-images and the action of
``G``.  Checks whose justification needs an infinite structure are reported
as empirical and never raised.
"""
from __future__ import annotations

import itertools
from collections.abc import Callable, Iterable, Sequence
from dataclasses import dataclass, field

from .errors import NotAnAutomorphism, NotASubgroupOfAutK
from .fingroup import FiniteGroup, group_isomorphic
from .fraisse import ClassSpec, builtin_spec, class_acl
from .homomorphism import GroupIso
from .perm import (
    GeneratedGroup,
    Permutation,
    all_subgroups,
    is_normal,
    pointwise_stabilizer,
    quotient_group,
    restricted_subgroup,
    restriction,
    restriction_group,
    setwise_stabilizer,
    to_finite_group,
    transport,
)
from .structures import FinStructure, acl_threshold, automorphism_group, dcl, induced_substructure

EXACT_PASS = "exact-pass"
EXACT_FAIL = "exact-fail"
EMPIRICAL_PASS = "empirical-pass"
EMPIRICAL_FAIL = "empirical-fail"

Points = tuple[int, ...]


@dataclass
class CheckReport:
    check: str
    status: str
    witnesses: list = field(default_factory=list)
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status in (EXACT_PASS, EMPIRICAL_PASS)

    @property
    def exact(self) -> bool:
        return self.status.startswith("exact")

    def to_dict(self, playground: str = "", parameters: dict | None = None) -> dict:
        return {
            "check": self.check,
            "playground": playground,
            "parameters": parameters or {},
            "status": self.status,
            "details": self.details,
            "witnesses": [_jsonable(w) for w in self.witnesses],
        }


def _jsonable(x):
    if isinstance(x, Permutation):
        return str(x)
    if isinstance(x, GeneratedGroup):
        return {"order": x.order(), "generators": [str(g) for g in x.generators]}
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, frozenset, set)):
        items = sorted(x) if isinstance(x, (set, frozenset)) else x
        return [_jsonable(v) for v in items]
    return x


def _status(ok: bool, exact: bool) -> str:
    if exact:
        return EXACT_PASS if ok else EXACT_FAIL
    return EMPIRICAL_PASS if ok else EMPIRICAL_FAIL


# -- closed sets -----------------------------------------------------------------------


def closure_operator(M: FinStructure, kind: str | ClassSpec = "dcl", G: GeneratedGroup | None = None) -> Callable[[Iterable[int]], frozenset[int]]:
    """``dcl``, ``threshold:t`` (orbits of size ``<= t``) or ``class:<name>`` / a ClassSpec."""
    if isinstance(kind, ClassSpec):
        spec = kind
        return lambda A: class_acl(spec, M, A)
    if G is None:
        G = automorphism_group(M)
    if kind == "dcl":
        return lambda A: dcl(M, A, G)
    if kind.startswith("threshold:"):
        t = int(kind.split(":", 1)[1])
        return lambda A: acl_threshold(M, A, t, G)
    if kind.startswith("class:"):
        spec = builtin_spec(kind.split(":", 1)[1])
        return lambda A: class_acl(spec, M, A)
    raise ValueError(f"unknown closure kind {kind!r}")


def _kind_name(kind: str | ClassSpec) -> str:
    return f"class:{kind.name}" if isinstance(kind, ClassSpec) else kind


@dataclass(frozen=True)
class ClosedFamily:
    base: FinStructure
    closure_kind: str
    size_bound: int
    sets: tuple[Points, ...]
    empty_closure: Points

    def __iter__(self):
        return iter(self.sets)

    def __len__(self) -> int:
        return len(self.sets)

    def __contains__(self, K) -> bool:
        return tuple(sorted(K)) in self.sets

    def intersection_failures(self) -> list[tuple[Points, Points]]:
        """Pairs whose intersection is closed and small but missing from the family."""
        out = []
        for A, B in itertools.combinations(self.sets, 2):
            C = tuple(sorted(set(A) & set(B)))
            if len(C) <= self.size_bound and C not in self.sets:
                out.append((A, B))
        return out


def enumerate_A(M: FinStructure, closure_kind: str | ClassSpec = "dcl", size_bound: int = 2, G: GeneratedGroup | None = None) -> ClosedFamily:
    """Closures of every subset with at most ``size_bound`` points, deduplicated."""
    cl = closure_operator(M, closure_kind, G)
    found = set()
    for size in range(min(size_bound, M.n) + 1):
        for B in itertools.combinations(range(M.n), size):
            found.add(tuple(sorted(cl(B))))
    sets = tuple(sorted(found, key=lambda K: (len(K), K)))
    return ClosedFamily(M, _kind_name(closure_kind), size_bound, sets, tuple(sorted(cl(()))))


# -- pairs and the model ----------------------------------------------------------------


@dataclass(frozen=True)
class EAPair:
    K: Points
    L: GeneratedGroup

    @property
    def key(self) -> tuple:
        return (self.K, self.L.element_set())

    @property
    def is_trivial(self) -> bool:
        return self.L.order() == 1

    def __repr__(self) -> str:
        gens = ", ".join(str(g) for g in self.L.generators) or "id"
        return f"EAPair(K={self.K}, L=<{gens}> order {self.L.order()})"


def g_KL(G: GeneratedGroup, K: Sequence[int], L: GeneratedGroup, M: FinStructure | None = None) -> GeneratedGroup:
    """``{g in G : g(K) = K and g|K in L}``; with ``M`` given, ``L`` is first checked
    to consist of automorphisms of ``M[K]``."""
    K = tuple(K)
    if L.degree != len(K):
        raise NotASubgroupOfAutK(f"L acts on {L.degree} points, K has {len(K)}")
    if M is not None:
        sub = induced_substructure(M, K)
        for g in L.generators:
            if not sub.is_automorphism(g):
                raise NotASubgroupOfAutK(f"{g} is not an automorphism of the structure on {K}")
    return restricted_subgroup(G, K, L)


class ExAutModel:
    """Pairs ``(K, L)`` over a closed family, with relations, actions and ``j``."""

    def __init__(self, M: FinStructure, family: ClosedFamily, G: GeneratedGroup, subgroup_bound: int = 1000):
        self.M = M
        self.family = family
        self.G = G
        self.pairs: list[EAPair] = []
        self.aut: dict[Points, GeneratedGroup] = {}
        self.aut_label: dict[Points, int] = {}
        self.label_groups: list[FiniteGroup] = []
        for K in family:
            A = automorphism_group(induced_substructure(M, K))
            self.aut[K] = A
            self.aut_label[K] = self._label(to_finite_group(A))
            for entry in all_subgroups(A, subgroup_bound):
                self.pairs.append(EAPair(K, entry.group))
        self.index = {p.key: i for i, p in enumerate(self.pairs)}
        self.j_table: list[GeneratedGroup] = [restricted_subgroup(G, p.K, p.L) for p in self.pairs]
        self._jsets: list[frozenset[Permutation] | None] = [None] * len(self.pairs)
        self.P_A = [i for i, p in enumerate(self.pairs) if p.is_trivial]
        self.trivial_pair = {self.pairs[i].K: i for i in self.P_A}
        self.P_min = self._minimal_sets()
        gens = list(G.generators)
        self.op_set_table = {(gi, K): self.op_set(g, K) for gi, g in enumerate(gens) for K in family}
        self.op_pair_table = {(gi, i): self.op_pair(g, i) for gi, g in enumerate(gens) for i in range(len(self.pairs))}

    def _label(self, A: FiniteGroup) -> int:
        for i, B in enumerate(self.label_groups):
            if A.order == B.order and group_isomorphic(A, B) is not None:
                return i
        self.label_groups.append(A)
        return len(self.label_groups) - 1

    def _minimal_sets(self) -> list[Points]:
        # minimal among the closed sets other than the closure of the empty set
        cands = [K for K in self.family if K != self.family.empty_closure]
        return [K for K in cands if not any(set(J) < set(K) for J in cands)]

    def jset(self, i: int) -> frozenset[Permutation]:
        s = self._jsets[i]
        if s is None:
            s = self._jsets[i] = self.j_table[i].element_set()
        return s

    def j(self, i: int) -> GeneratedGroup:
        return self.j_table[i]

    def pair_of(self, K: Sequence[int], L: GeneratedGroup) -> int:
        return self.index[(tuple(K), L.element_set())]

    # relations

    def le_A(self, K1: Points, K2: Points) -> bool:
        return set(K1) <= set(K2)

    def le_EA(self, p: int, q: int) -> bool:
        """``K_p`` inside ``K_q`` and every element of ``L_q`` maps ``K_p`` onto itself
        with restriction in ``L_p``."""
        K1, L1 = self.pairs[p].K, self.pairs[p].L
        K2, L2 = self.pairs[q].K, self.pairs[q].L
        if not set(K1) <= set(K2):
            return False
        pos = [K2.index(x) for x in K1]
        for g in L2.generators:
            try:
                r = restriction(g, pos)
            except ValueError:
                return False
            if not L1.contains(r):
                return False
        return True

    def has_label(self, K: Points, A: FiniteGroup) -> bool:
        B = self.label_groups[self.aut_label[K]]
        return A.order == B.order and group_isomorphic(A, B) is not None

    # operations

    def compose(self, f: Permutation, g: Permutation) -> Permutation:
        return f * g

    @staticmethod
    def op_set(f: Permutation, K: Points) -> Points:
        return tuple(sorted(f[x] for x in K))

    def op_pair(self, f: Permutation, i: int) -> int:
        p = self.pairs[i]
        K2 = self.op_set(f, p.K)
        L2 = GeneratedGroup([transport(g, p.K, K2, f) for g in p.L.generators], len(K2))
        return self.pair_of(K2, L2)

    def summary(self) -> dict:
        return {
            "group_order": self.G.order(),
            "closed_sets": len(self.family),
            "pairs": len(self.pairs),
            "empty_closure": list(self.family.empty_closure),
            "P_min": [list(K) for K in self.P_min],
            "labels": [g.order for g in self.label_groups],
        }


def build_exaut(M: FinStructure, closure_kind: str | ClassSpec = "dcl", size_bound: int = 2, subgroup_bound: int = 1000) -> ExAutModel:
    G = automorphism_group(M)
    family = enumerate_A(M, closure_kind, size_bound, G)
    return ExAutModel(M, family, G, subgroup_bound)


# -- verifiers ------------------------------------------------------------------------------


def _distinct_subgroups(model: ExAutModel) -> dict[frozenset[Permutation], list[int]]:
    out: dict[frozenset[Permutation], list[int]] = {}
    for i in range(len(model.pairs)):
        out.setdefault(model.jset(i), []).append(i)
    return out


def verify_star(M: FinStructure, K: Sequence[int], G: GeneratedGroup | None = None) -> CheckReport:
    """Whether setwise / pointwise stabilizer of ``K`` is isomorphic to ``Aut(M[K])``.

    The restriction map embeds the quotient into ``Aut(M[K])``; when the two
    differ, the automorphisms of ``M[K]`` that extend to no automorphism of
    ``M`` are listed.
    """
    if G is None:
        G = automorphism_group(M)
    K = tuple(K)
    S = setwise_stabilizer(G, K)
    P = pointwise_stabilizer(G, K)
    Q = quotient_group(S, P)
    A = automorphism_group(induced_substructure(M, K))
    iso = group_isomorphic(Q, to_finite_group(A))
    witnesses = []
    if iso is None:
        R = restriction_group(G, K) if K else A
        witnesses = [g for g in A.sorted_elements() if not R.contains(g)][:5]
    return CheckReport(
        "star",
        _status(iso is not None, True),
        witnesses,
        {"K": list(K), "quotient_order": Q.order, "aut_order": A.order()},
    )


def verify_injectivity(model: ExAutModel) -> CheckReport:
    groups = _distinct_subgroups(model)
    collisions = [[model.pairs[i] for i in idx] for idx in groups.values() if len(idx) > 1]
    return CheckReport(
        "injectivity",
        _status(not collisions, True),
        [[repr(p) for p in c] for c in collisions],
        {"pairs": len(model.pairs), "distinct_images": len(groups)},
    )


def verify_op_invariant(model: ExAutModel) -> CheckReport:
    """``j(Op(f, p)) = f j(p) f^-1`` for every generator ``f`` of ``G`` and every pair."""
    bad = []
    for (gi, i), k in model.op_pair_table.items():
        f = model.G.generators[gi]
        if not model.j(k).same_group(model.j(i).conjugate(f)):
            bad.append((str(f), repr(model.pairs[i])))
    return CheckReport("op_invariant", _status(not bad, True), bad, {"checked": len(model.op_pair_table)})


def verify_order_correspondence(model: ExAutModel) -> tuple[CheckReport, CheckReport]:
    """``p <=_EA q`` against reverse inclusion of ``j``-images.

    The forward direction is exact; the converse is reported empirically.
    """
    forward, converse = [], []
    n = len(model.pairs)
    checked = 0
    for p in range(n):
        for q in range(n):
            checked += 1
            le = model.le_EA(p, q)
            inc = model.jset(q) <= model.jset(p)
            if le and not inc:
                forward.append((repr(model.pairs[p]), repr(model.pairs[q])))
            if inc and not le:
                converse.append((repr(model.pairs[p]), repr(model.pairs[q])))
    return (
        CheckReport("order_forward", _status(not forward, True), forward, {"checked": checked}),
        CheckReport("order_converse", _status(not converse, False), converse, {"checked": checked}),
    )


def verify_prop_normality(model: ExAutModel) -> tuple[CheckReport, CheckReport]:
    """Normal pairs of restricted groups against normal pairs of subgroups.

    First report (exact): ``L1`` normal in ``L2`` on a common ``K`` forces
    ``j(K, L1)`` normal of finite index in ``j(K, L2)``.  Second report
    (empirical): each normal pair of ``j``-images comes from such ``K, L1, L2``.
    """
    by_K: dict[Points, list[int]] = {}
    for i, p in enumerate(model.pairs):
        by_K.setdefault(p.K, []).append(i)
    exact_bad, exact_checked = [], 0
    source_pairs: set[tuple[int, int]] = set()
    for K, idx in by_K.items():
        for a in idx:
            for b in idx:
                L1, L2 = model.pairs[a].L, model.pairs[b].L
                if not L1.is_subgroup_of(L2) or not is_normal(L1, L2):
                    continue
                exact_checked += 1
                H1, H2 = model.j(a), model.j(b)
                if not (H1.is_subgroup_of(H2) and is_normal(H1, H2)):
                    exact_bad.append((repr(model.pairs[a]), repr(model.pairs[b])))
                source_pairs.add((a, b))
    groups = _distinct_subgroups(model)
    keys = list(groups)
    realized = {(model.jset(a), model.jset(b)) for a, b in source_pairs}
    converse_bad, converse_checked = [], 0
    for s1 in keys:
        H1 = model.j(groups[s1][0])
        for s2 in keys:
            if not s1 <= s2:
                continue
            H2 = model.j(groups[s2][0])
            if not is_normal(H1, H2):
                continue
            converse_checked += 1
            if (s1, s2) not in realized:
                converse_bad.append({"H1": H1, "H2": H2, "H1_from": repr(model.pairs[groups[s1][0]]), "H2_from": repr(model.pairs[groups[s2][0]])})
    return (
        CheckReport("normality_finitary", _status(not exact_bad, True), exact_bad, {"checked": exact_checked}),
        CheckReport("normality_converse", _status(not converse_bad, False), converse_bad, {"checked": converse_checked}),
    )


def minimality_family(model: ExAutModel) -> list[frozenset[Permutation]]:
    """Members of the ``j``-range with no proper normal subgroup inside the range."""
    groups = _distinct_subgroups(model)
    out = []
    for s in groups:
        H = model.j(groups[s][0])
        if not any(t < s and is_normal(model.j(groups[t][0]), H) for t in groups):
            out.append(s)
    return out


def verify_char_pointwise(model: ExAutModel) -> CheckReport:
    """The minimality family against the pointwise stabilizers of closed sets."""
    minimal = set(minimality_family(model))
    pointwise = {model.jset(i): model.pairs[i].K for i in model.P_A}
    extra = [s for s in minimal if s not in pointwise]
    missing = [K for s, K in pointwise.items() if s not in minimal]
    groups = _distinct_subgroups(model)
    witnesses = [{"unexpected_minimal": repr(model.pairs[groups[s][0]])} for s in extra]
    witnesses += [{"pointwise_not_minimal": list(K)} for K in missing]
    return CheckReport(
        "char_pointwise",
        _status(not witnesses, False),
        witnesses,
        {"minimal": len(minimal), "pointwise": len(pointwise)},
    )


def verify_char_L(model: ExAutModel) -> CheckReport:
    """For each pointwise stabilizer, its maximal normal over-group in the range
    should be the setwise stabilizer, with quotient isomorphic to ``Aut(K)``."""
    groups = _distinct_subgroups(model)
    witnesses = []
    checked = 0
    for i in model.P_A:
        K = model.pairs[i].K
        H = model.j(i)
        hs = model.jset(i)
        over = [s for s in groups if hs <= s and is_normal(H, model.j(groups[s][0]))]
        maximal = [s for s in over if not any(s < t for t in over)]
        checked += 1
        setwise = setwise_stabilizer(model.G, K)
        if len(maximal) != 1:
            witnesses.append({"K": list(K), "problem": "maximal over-group not unique", "count": len(maximal)})
            continue
        Hp = model.j(groups[maximal[0]][0])
        if not Hp.same_group(setwise):
            witnesses.append({"K": list(K), "problem": "maximal over-group is not the setwise stabilizer", "order": Hp.order()})
            continue
        Q = quotient_group(Hp, H)
        if group_isomorphic(Q, to_finite_group(model.aut[K])) is None:
            witnesses.append({"K": list(K), "problem": "quotient not isomorphic to Aut(K)", "quotient_order": Q.order})
    return CheckReport("char_L", _status(not witnesses, False), witnesses, {"checked": checked})


def verify_equivariance(model: ExAutModel, F: GroupIso, all_elements: bool = False) -> CheckReport:
    """Identities for an automorphism ``F`` of ``G``.

    ``F`` is transferred to pairs through ``j``: ``F^(p)`` is the set of
    pairs whose ``j``-image is ``F(j(p))``.  Checked: ``F`` respects products,
    and ``Op(F(f), .)`` carries ``F^(p)`` into ``F^(Op(f, p))``, on closed sets
    (trivial ``L``) and on all pairs.
    """
    G = model.G
    if F.source.degree != G.degree or F.target.degree != G.degree or not F.source.same_group(G) or not F.target.same_group(G):
        raise NotAnAutomorphism("F must map Aut(M) onto itself")
    fs = G.sorted_elements() if all_elements else list(G.generators)
    witnesses = []
    for f in fs:
        for g in G.generators:
            if F(f * g) != F(f) * F(g):
                witnesses.append({"identity": "product", "f": f, "g": g})
    groups = _distinct_subgroups(model)
    hat: dict[int, list[int]] = {}
    for i in range(len(model.pairs)):
        img = F.image_group(model.j(i)).element_set()
        hat[i] = groups.get(img, [])
        if not hat[i]:
            witnesses.append({"identity": "image outside range", "pair": repr(model.pairs[i])})
    for f in fs:
        Ff = F(f)
        for i in range(len(model.pairs)):
            k = model.op_pair(f, i)
            targets = set(hat[k])
            for q in hat[i]:
                if model.op_pair(Ff, q) not in targets:
                    kind = "closed set" if model.pairs[i].is_trivial else "pair"
                    witnesses.append({"identity": kind, "f": f, "pair": repr(model.pairs[i])})
    return CheckReport("equivariance", _status(not witnesses, True), witnesses[:20], {"elements": len(fs), "pairs": len(model.pairs)})


def ss_sweep(model: ExAutModel, index_bound: int, subgroup_bound: int = 1000) -> CheckReport:
    """Subgroups of ``G`` of index ``<= index_bound`` that are not ``j``-images."""
    groups = _distinct_subgroups(model)
    outside = []
    total = 0
    for entry in all_subgroups(model.G, subgroup_bound):
        if entry.index_in_parent > index_bound:
            continue
        total += 1
        if entry.group.element_set() not in groups:
            outside.append(entry.group)
    return CheckReport("ss_sweep", _status(not outside, False), outside, {"index_bound": index_bound, "subgroups": total})


def verify_all(model: ExAutModel, star_bound: int | None = None) -> list[CheckReport]:
    """Every model-level check, plus the quotient check on every closed set up to ``star_bound`` points."""
    reports = []
    bound = model.family.size_bound if star_bound is None else star_bound
    star_bad = []
    checked = 0
    for K in model.family:
        if len(K) > bound:
            continue
        checked += 1
        r = verify_star(model.M, K, model.G)
        if not r.passed:
            star_bad.append({"K": list(K), "details": r.details, "non_extendable": r.witnesses})
    reports.append(CheckReport("star", _status(not star_bad, True), star_bad, {"checked": checked}))
    reports.append(verify_injectivity(model))
    reports.append(verify_op_invariant(model))
    reports.extend(verify_order_correspondence(model))
    reports.extend(verify_prop_normality(model))
    reports.append(verify_char_pointwise(model))
    reports.append(verify_char_L(model))
    reports.append(verify_equivariance(model, GroupIso.identity(model.G)))
    return reports
