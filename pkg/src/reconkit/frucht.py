"""Graphs with a prescribed automorphism group, and the class-symmetry pipeline built on them."""
from __future__ import annotations

import time
from collections.abc import Sequence
from dataclasses import dataclass, field

from .errors import IdentityGenerator, NotGenerating
from .fingroup import FiniteGroup, group_isomorphic, is_isomorphism
from .fraisse import (
    check_amalgamation,
    free_amalgamation_certificate,
    gamma_class,
    signature_symmetry_group,
    sort_action,
)
from .perm import GeneratedGroup, Permutation, to_finite_group
from .structures import FinStructure, automorphism_group, complete_graph, graph


@dataclass(frozen=True)
class CayleyColorGraph:
    group: FiniteGroup
    generating_set: tuple[int, ...]
    arcs: frozenset[tuple[int, int, int]]


def cayley_color_graph(K: FiniteGroup, gens: Sequence[int]) -> CayleyColorGraph:
    """Arcs ``(g, g*s_i, i)`` for every element ``g`` and generator ``s_i``."""
    gens = tuple(gens)
    if any(s == 0 for s in gens):
        raise IdentityGenerator("the identity cannot be a generator")
    if len(K.subgroup_closure(gens)) != K.order:
        raise NotGenerating(f"{gens} does not generate the group")
    arcs = frozenset((g, K.mul(g, s), i) for i, s in enumerate(gens) for g in range(K.order))
    return CayleyColorGraph(K, gens, arcs)


@dataclass
class FruchtGraph:
    graph: FinStructure
    group: FiniteGroup
    generating_set: tuple[int, ...]
    witness: list[Permutation]  # left translation by element a, as a vertex permutation

    @property
    def vertex_count(self) -> int:
        return self.graph.n


def frucht_vertex_count(order: int, gens: Sequence[int], involution: Sequence[bool]) -> int:
    """Vertices produced by the gadget scheme for a given generating set."""
    total = order
    for i, inv in enumerate(involution):
        if inv:
            total += (order // 2) * (2 + 2 * (2 * i + 1))
        else:
            total += order * (2 + (2 * i + 1) + (2 * i + 2))
    return total


def frucht_graph(K: FiniteGroup) -> FruchtGraph:
    """A simple graph whose automorphism group is isomorphic to ``K``.

    Vertices ``0..|K|-1`` are the group elements.  An arc ``g -> g s_i`` of
    the Cayley colour graph becomes a path ``g - x - y - g s_i`` with a
    pendant path of ``2i+1`` vertices hung from ``x`` and one of ``2i+2``
    from ``y``.  For an involution ``s_i`` the two arcs between ``g`` and
    ``g s_i`` share one gadget whose pendants both have ``2i+1`` vertices.
    Groups of order one and two are the graphs ``K1`` and ``K2``.
    """
    n = K.order
    if n == 1:
        return FruchtGraph(complete_graph(1), K, (), [Permutation.identity(1)])
    if n == 2:
        return FruchtGraph(complete_graph(2), K, (1,), [Permutation.identity(2), Permutation((1, 0))])
    gens = tuple(K.generating_set(smallest_order_first=True))
    C = cayley_color_graph(K, gens)
    edges: list[tuple[int, int]] = []
    nxt = n
    # gadget key -> (first endpoint, x, y, x-pendant, y-pendant)
    gadgets: dict[tuple, tuple[int, int, int, list[int], list[int]]] = {}

    def path(start: int, length: int) -> list[int]:
        nonlocal nxt
        verts = list(range(nxt, nxt + length))
        nxt += length
        prev = start
        for v in verts:
            edges.append((prev, v))
            prev = v
        return verts

    for i, s in enumerate(gens):
        inv = K.mul(s, s) == 0
        for g in range(n):
            h = K.mul(g, s)
            if inv:
                key = (i, frozenset((g, h)))
                if key in gadgets:
                    continue
                lx, ly = 2 * i + 1, 2 * i + 1
            else:
                key = (i, g)
                lx, ly = 2 * i + 1, 2 * i + 2
            x, y = nxt, nxt + 1
            nxt += 2
            edges += [(g, x), (x, y), (y, h)]
            gadgets[key] = (g, x, y, path(x, lx), path(y, ly))
    assert len(C.arcs) == n * len(gens)
    G = graph(nxt, edges)

    witness = []
    for a in range(n):
        img = list(range(nxt))
        for g in range(n):
            img[g] = K.mul(a, g)
        for key, (g, x, y, px, py) in gadgets.items():
            i, rest = key
            if isinstance(rest, frozenset):
                pair = frozenset(K.mul(a, v) for v in rest)
                g2, x2, y2, px2, py2 = gadgets[(i, pair)]
                if g2 != K.mul(a, g):
                    x2, y2, px2, py2 = y2, x2, py2, px2
            else:
                g2, x2, y2, px2, py2 = gadgets[(i, K.mul(a, g))]
            img[x], img[y] = x2, y2
            for u, v in zip(px + py, px2 + py2):
                img[u] = v
        witness.append(Permutation(img))
    return FruchtGraph(G, K, gens, witness)


@dataclass
class FruchtCertificate:
    ok: bool
    aut_order: int
    isomorphism: list[int] | None
    witness_ok: bool | None
    automorphism_group: GeneratedGroup = field(repr=False)

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "aut_order": self.aut_order,
            "isomorphism": self.isomorphism,
            "witness_ok": self.witness_ok,
            "aut_generators": [str(g) for g in self.automorphism_group.generators],
        }


def check_witness(K: FiniteGroup, G: FinStructure, witness: Sequence[Permutation]) -> bool:
    """The witness is an injective homomorphism from ``K`` into ``Aut(G)``."""
    if len(witness) != K.order or len(set(witness)) != K.order:
        return False
    if not all(G.is_automorphism(w) for w in witness):
        return False
    return all(witness[K.mul(a, b)] == witness[a] * witness[b] for a in range(K.order) for b in range(K.order))


def verify_frucht(K: FiniteGroup, G: FinStructure | FruchtGraph) -> FruchtCertificate:
    """Compare ``Aut(G)`` with ``K``; the isomorphism maps element indices of ``K``
    to the lexicographically sorted automorphisms of ``G``."""
    witness = None
    if isinstance(G, FruchtGraph):
        witness = G.witness
        G = G.graph
    A = automorphism_group(G)
    iso = None
    if A.order() == K.order:
        iso = group_isomorphic(K, to_finite_group(A))
    wok = check_witness(K, G, witness) if witness is not None else None
    ok = iso is not None and wok is not False
    return FruchtCertificate(ok, A.order(), iso, wok, A)


# -- the class-symmetry pipeline ------------------------------------------------------------


@dataclass
class OutPipelineReport:
    group_order: int
    graph_vertices: int
    graph_edges: int
    frucht: FruchtCertificate
    amalgamation: dict
    symmetry_order: int
    sort_group_order: int
    iso_to_aut_gamma: list[int] | None
    iso_to_group: list[int] | None
    timings: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.frucht.ok and self.iso_to_group is not None and self.iso_to_aut_gamma is not None and self.amalgamation.get("free", False)

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "group_order": self.group_order,
            "graph": {"vertices": self.graph_vertices, "edges": self.graph_edges},
            "frucht": self.frucht.to_dict(),
            "amalgamation": self.amalgamation,
            "symmetry_order": self.symmetry_order,
            "sort_group_order": self.sort_group_order,
            "iso_symmetry_to_aut_gamma": self.iso_to_aut_gamma,
            "iso_symmetry_to_group": self.iso_to_group,
            "timings": self.timings,
        }


def out_pipeline(K: FiniteGroup, check_bound: int = 2, amalgamation_bound: int = 3, exhaustive_sorts: int = 4) -> OutPipelineReport:
    """Group -> graph -> sorted class -> symbol symmetries, with every certificate.

    The amalgamation stage runs the exhaustive check when the graph has at
    most ``exhaustive_sorts`` vertices, and the structural free-amalgamation
    certificate otherwise.
    """
    timings = {}
    t = time.perf_counter()
    F = frucht_graph(K)
    cert = verify_frucht(K, F)
    timings["frucht"] = time.perf_counter() - t
    gamma = F.graph
    spec = gamma_class(gamma)
    t = time.perf_counter()
    if gamma.n <= exhaustive_sorts:
        rep = check_amalgamation(spec, amalgamation_bound)
    else:
        rep = free_amalgamation_certificate(spec)
    amalg = rep.to_dict()
    amalg["free"] = rep.free
    timings["amalgamation"] = time.perf_counter() - t
    t = time.perf_counter()
    sym = signature_symmetry_group(spec, check_bound)
    sorts = sort_action(sym, spec)
    timings["symmetry"] = time.perf_counter() - t
    t = time.perf_counter()
    S = to_finite_group(sym.group)
    iso_group = group_isomorphic(S, K) if S.order == K.order else None
    A = cert.automorphism_group
    iso_aut = None
    if S.order == A.order():
        iso_aut = group_isomorphic(S, to_finite_group(A))
    if iso_group is not None:
        assert is_isomorphism(S, K, iso_group)
    timings["isomorphisms"] = time.perf_counter() - t
    return OutPipelineReport(
        K.order,
        gamma.n,
        len(gamma.edges()),
        cert,
        amalg,
        sym.order(),
        sorts.order(),
        iso_aut,
        iso_group,
        {k: round(v, 3) for k, v in timings.items()},
    )
