"""Recover a point bijection from an isomorphism of automorphism groups.

An isomorphism ``F: Aut(M) -> Aut(N)`` sends the stabilizer of a point of
``M`` to some subgroup of ``Aut(N)``.  When that image is again a point
stabilizer for every point, matching gives a bijection ``f`` and ``F`` should
be conjugation by ``f``.  Everything here is checked, not assumed.
"""
from __future__ import annotations

import itertools
import random
import warnings
from collections.abc import Sequence
from dataclasses import dataclass, field

from .errors import AmbiguousMatch, NoMinimalStabilizerMatch, NotAHomomorphism
from .exaut import closure_operator
from .homomorphism import GroupIso
from .perm import GeneratedGroup, Permutation, pointwise_stabilizer
from .structures import FinStructure, Signature, automorphism_group, canonical_relational, is_homogeneous


@dataclass(frozen=True)
class MinimalStabilizer:
    points: tuple[int, ...]
    group: GeneratedGroup


def minimal_stabilizers(M: FinStructure, closure_kind="dcl", G: GeneratedGroup | None = None) -> list[MinimalStabilizer]:
    """Pointwise stabilizers of the minimal closed sets other than the closure of the empty set.

    Every such set is the closure of a single point.  A warning is issued when
    some of them have more than one point.
    """
    if G is None:
        G = automorphism_group(M)
    cl = closure_operator(M, closure_kind, G)
    base = cl(())
    sets = {tuple(sorted(cl((a,)))) for a in range(M.n) if a not in base}
    minimal = sorted(K for K in sets if not any(set(J) < set(K) for J in sets))
    if any(len(K) > 1 for K in minimal):
        warnings.warn("some points have closures larger than themselves; stabilizers are of sets", stacklevel=2)
    return [MinimalStabilizer(K, pointwise_stabilizer(G, K)) for K in minimal]


@dataclass(frozen=True)
class PointBijection:
    map: Permutation

    def __call__(self, a: int) -> int:
        return self.map[a]


def _stabilizer_index(G: GeneratedGroup) -> dict[frozenset[Permutation], list[int]]:
    out: dict[frozenset[Permutation], list[int]] = {}
    for b in range(G.degree):
        out.setdefault(pointwise_stabilizer(G, [b]).element_set(), []).append(b)
    return out


def induced_bijection(F: GroupIso, M: FinStructure | None = None, N: FinStructure | None = None) -> PointBijection:
    """Match ``F(G_a)`` against the point stabilizers of the target.

    Raises NoMinimalStabilizerMatch when some image is no point stabilizer
    (``F`` is induced by no bijection) and AmbiguousMatch when several target
    points, or several source points, share a stabilizer.
    """
    G, H = F.source, F.target
    if M is not None and M.n != G.degree or N is not None and N.n != H.degree:
        raise ValueError("structures and groups have different domain sizes")
    index = _stabilizer_index(H)
    image = []
    for a in range(G.degree):
        Ha = F.image_group(pointwise_stabilizer(G, [a]))
        cands = index.get(Ha.element_set(), [])
        if not cands:
            raise NoMinimalStabilizerMatch(f"image of the stabilizer of {a} fixes no single point of the target", point=a, image=Ha)
        if len(cands) > 1:
            raise AmbiguousMatch(f"target points {cands} share the image of the stabilizer of {a}", point=a, candidates=cands)
        image.append(cands[0])
    if len(set(image)) != len(image):
        dup = next(b for b in image if image.count(b) > 1)
        raise AmbiguousMatch(f"several source points are sent to {dup}", point=dup, candidates=[a for a, b in enumerate(image) if b == dup])
    return PointBijection(Permutation(image))


def verify_conjugation(F: GroupIso, f: PointBijection | Permutation, all_elements: bool = False) -> bool:
    """``F(g) = f g f^-1`` on the source generators (or on every element)."""
    p = f.map if isinstance(f, PointBijection) else Permutation(f)
    if len(p) != F.source.degree or F.source.degree != F.target.degree:
        return False
    gs = F.source.elements() if all_elements else F.source.generators
    return all(F(g) == g.conjugate(p) for g in gs)


def centralizer(G: GeneratedGroup) -> GeneratedGroup:
    """Permutations commuting with every generator of ``G``: automorphisms of the
    digraph with an arc ``x -> g_i(x)`` of colour ``i``."""
    sig = Signature(tuple((f"C{i}", 2) for i in range(len(G.generators))))
    D = FinStructure(G.degree, sig, {f"C{i}": [(x, g[x]) for x in range(G.degree)] for i, g in enumerate(G.generators)})
    return automorphism_group(D)


def valid_bijections(F: GroupIso, f: PointBijection) -> list[Permutation]:
    """Every ``f'`` with ``F(g) = f' g f'^-1``: the coset ``f C`` with ``C`` the centralizer of the source."""
    C = centralizer(F.source)
    return sorted(f.map * c for c in C.elements())


# -- bi-definability at the orbit level -------------------------------------------------


def _orbit_ids(G: GeneratedGroup, k: int) -> dict[tuple[int, ...], int]:
    ids: dict[tuple[int, ...], int] = {}
    count = 0
    for t in itertools.product(range(G.degree), repeat=k):
        if t in ids:
            continue
        ids[t] = count
        queue = [t]
        for u in queue:
            for g in G.generators:
                v = tuple(g[x] for x in u)
                if v not in ids:
                    ids[v] = count
                    queue.append(v)
        count += 1
    return ids


@dataclass
class BidefReport:
    ok: bool
    arities: list[dict] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.ok


def bidef_check(M: FinStructure, N: FinStructure, f: PointBijection | Permutation, arity_bound: int, GM: GeneratedGroup | None = None, GN: GeneratedGroup | None = None) -> BidefReport:
    """Whether ``f`` carries the ``Aut(M)``-orbits on ``k``-tuples exactly onto the
    ``Aut(N)``-orbits, for each ``k <= arity_bound``."""
    p = f.map if isinstance(f, PointBijection) else Permutation(f)
    if M.n != N.n or len(p) != M.n:
        return BidefReport(False, [{"arity": 0, "problem": "domain sizes differ"}])
    GM = GM or automorphism_group(M)
    GN = GN or automorphism_group(N)
    out = []
    ok = True
    for k in range(1, arity_bound + 1):
        idM, idN = _orbit_ids(GM, k), _orbit_ids(GN, k)
        forward: dict[int, int] = {}
        backward: dict[int, int] = {}
        witness = None
        for t, i in idM.items():
            j = idN[tuple(p[x] for x in t)]
            if forward.setdefault(i, j) != j or backward.setdefault(j, i) != i:
                witness = list(t)
                break
        entry = {"arity": k, "orbits_source": max(idM.values()) + 1, "orbits_target": max(idN.values()) + 1, "ok": witness is None}
        if witness is not None:
            entry["witness"] = witness
            ok = False
        out.append(entry)
    return BidefReport(ok, out)


# -- harness and pipeline ---------------------------------------------------------------


@dataclass
class Scramble:
    N: FinStructure
    F: GroupIso
    sigma: Permutation


def scramble_harness(M: FinStructure, seed: int | None = None, G: GeneratedGroup | None = None, sigma: Sequence[int] | None = None) -> Scramble:
    """Relabel ``M`` by a seeded random ``sigma`` and present conjugation by ``sigma``
    as an isomorphism between the two automorphism groups, each computed from
    its own structure."""
    if sigma is None:
        pts = list(range(M.n))
        random.Random(seed).shuffle(pts)
        sigma = pts
    sigma = Permutation(sigma)
    G = G or automorphism_group(M)
    N = M.relabel(sigma)
    H = automorphism_group(N)
    return Scramble(N, GroupIso.conjugation(G, H, sigma), sigma)


@dataclass
class ReconstructionReport:
    f: Permutation | None
    verified: bool
    bidef: BidefReport | None
    coset: list[Permutation] = field(default_factory=list)
    error: str = ""

    def to_dict(self) -> dict:
        return {
            "f": list(self.f) if self.f is not None else None,
            "verified": self.verified,
            "bidef": None if self.bidef is None else {"ok": self.bidef.ok, "arities": self.bidef.arities},
            "coset_size": len(self.coset),
            "coset": [list(c) for c in self.coset[:24]],
            "error": self.error,
        }


def canonical_preprocess(M: FinStructure, arity: int, G: GeneratedGroup | None = None) -> FinStructure:
    """The orbit structure of ``Aut(M)`` on ``arity``-tuples when ``M`` is not homogeneous, else ``M``."""
    G = G or automorphism_group(M)
    if is_homogeneous(M, G):
        return M
    return canonical_relational(G, arity)


def reconstruct(F: GroupIso, M: FinStructure, N: FinStructure, arity_bound: int = 2, canonical: bool = False) -> ReconstructionReport:
    """Recover ``f``, check ``F`` is conjugation by it, and compare orbits up to ``arity_bound``."""
    if canonical:
        M = canonical_preprocess(M, arity_bound, F.source)
        N = canonical_preprocess(N, arity_bound, F.target)
    try:
        f = induced_bijection(F, M, N)
    except (NoMinimalStabilizerMatch, AmbiguousMatch) as e:
        return ReconstructionReport(None, False, None, error=f"{type(e).__name__}: {e}")
    ok = verify_conjugation(F, f)
    bidef = bidef_check(M, N, f, arity_bound, F.source, F.target)
    return ReconstructionReport(f.map, ok, bidef, valid_bijections(F, f) if ok else [])


def exceptional_s6_automorphism() -> GroupIso:
    """An automorphism of ``Sym(6)`` sending a transposition to a product of three.

    The generators are ``(0 1)`` and ``(0 1 2 3 4 5)``; the transposition goes to
    the lexicographically first triple transposition and the image of the
    6-cycle is found by scanning the elements of order six.
    """
    n = 6
    G = GeneratedGroup([Permutation.from_cycles(n, [(0, 1)]), Permutation.from_cycles(n, [tuple(range(n))])])
    elements = G.sorted_elements()
    t = next(g for g in elements if g.order() == 2 and len(g.support()) == 6)
    for y in elements:
        if y.order() != 6:
            continue
        try:
            return GroupIso(G, G, [t, y])
        except NotAHomomorphism:
            continue
    raise AssertionError("no exceptional automorphism found")
