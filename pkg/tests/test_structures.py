import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from reconkit.errors import PointOutOfRange, SignatureMismatch
from reconkit.perm import GeneratedGroup, Permutation, all_subgroups, orbit
from reconkit.structures import (
    FinStructure,
    Signature,
    acl_threshold,
    automorphism_group,
    brute_force_automorphisms,
    canonical_form,
    canonical_relational,
    complete_graph,
    cycle_graph,
    dcl,
    disjoint_cliques,
    embeddings,
    find_isomorphism,
    format_structure,
    graph,
    induced_substructure,
    is_homogeneous,
    parse_structure,
    path_graph,
    playground,
    pure_set,
    rook_graph,
)


def random_graph(n, p, seed):
    rng = random.Random(seed)
    return graph(n, [e for e in itertools.combinations(range(n), 2) if rng.random() < p])


def brute_homogeneous(M):
    auts = brute_force_automorphisms(M)
    for k in range(1, M.n + 1):
        for S in itertools.combinations(range(M.n), k):
            sub = induced_substructure(M, S)
            for img in itertools.permutations(range(M.n), k):
                if induced_substructure(M, img) != sub:
                    continue
                if not any(all(g[s] == t for s, t in zip(S, img)) for g in auts):
                    return False
    return True


def test_signature_mismatch():
    with pytest.raises(SignatureMismatch):
        FinStructure(3, Signature.of(("E", 2)), {"R": [(0, 1)]})
    with pytest.raises(ValueError):
        FinStructure(3, Signature.of(("E", 2)), {"E": [(0, 1, 2)]})
    with pytest.raises(PointOutOfRange):
        graph(3, [(0, 3)])


@pytest.mark.parametrize(
    "M,order",
    [(pure_set(4), 24), (cycle_graph(5), 10), (path_graph(4), 2), (rook_graph(3), 72), (complete_graph(4), 24), (disjoint_cliques(2, 3), 72)],
)
def test_automorphism_group_orders(M, order):
    G = automorphism_group(M)
    assert G.order() == order
    assert all(M.is_automorphism(g) for g in G.generators)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 6), st.floats(0, 1), st.integers(0, 10**6))
def test_automorphisms_match_brute_force(n, p, seed):
    M = random_graph(n, p, seed)
    assert automorphism_group(M).element_set() == brute_force_automorphisms(M)


def test_ternary_relation_automorphisms():
    sig = Signature.of(("R", 3), ("U", 1))
    M = FinStructure(5, sig, {"R": [(0, 1, 2), (1, 2, 0), (2, 0, 1)], "U": [(3,)]})
    assert automorphism_group(M).element_set() == brute_force_automorphisms(M)
    assert automorphism_group(M).order() == 3


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 6), st.floats(0, 1), st.integers(0, 10**6), st.permutations(list(range(6))))
def test_canonical_form_is_invariant(n, p, seed, shuffle):
    M = random_graph(n, p, seed)
    sigma = [x for x in shuffle if x < n]
    N = M.relabel(sigma)
    assert canonical_form(M) == canonical_form(N)
    f = find_isomorphism(M, N)
    assert f is not None and M.relabel(f) == N


def test_canonical_form_separates():
    assert canonical_form(path_graph(4)) != canonical_form(graph(4, [(0, 1), (1, 2), (2, 0)]))
    assert find_isomorphism(path_graph(4), cycle_graph(4)) is None


def test_fixed_points_in_canonical_form():
    P = path_graph(3)
    assert canonical_form(P, fixed=(0,)) != canonical_form(P, fixed=(1,))
    assert canonical_form(P, fixed=(0,)) == canonical_form(P, fixed=(2,))


@pytest.mark.parametrize(
    "M,expected",
    [
        (pure_set(4), True),
        (cycle_graph(5), True),
        (rook_graph(3), True),
        (disjoint_cliques(2, 2), True),
        (complete_graph(3), True),
        (path_graph(3), False),
        (cycle_graph(6), False),
    ],
)
def test_homogeneity_examples(M, expected):
    assert bool(is_homogeneous(M)) == expected
    if M.n <= 6:
        assert brute_homogeneous(M) == expected


def test_homogeneity_witness():
    rep = is_homogeneous(path_graph(3))
    assert not rep.homogeneous
    sub = induced_substructure(path_graph(3), rep.subset)
    assert induced_substructure(path_graph(3), rep.image) == sub


def test_closures():
    assert dcl(pure_set(4), [0]) == {0}
    assert dcl(pure_set(4), [0, 1, 2]) == {0, 1, 2, 3}
    assert dcl(cycle_graph(5), [0]) == {0}
    assert dcl(cycle_graph(5), [0, 1]) == set(range(5))
    assert dcl(path_graph(4), []) == set()
    assert dcl(path_graph(5), []) == {2}
    assert acl_threshold(cycle_graph(5), [0], 2) == set(range(5))
    with pytest.raises(ValueError):
        acl_threshold(pure_set(3), [0], 0)


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 6), st.floats(0, 1), st.integers(0, 10**6), st.sets(st.integers(0, 5), max_size=2))
def test_dcl_against_brute_force(n, p, seed, A):
    M = random_graph(n, p, seed)
    A = {a for a in A if a < n}
    auts = brute_force_automorphisms(M)
    fixing = [g for g in auts if all(g[a] == a for a in A)]
    assert dcl(M, A) == {x for x in range(n) if all(g[x] == x for g in fixing)}


def test_embeddings_count():
    # edges of C5 as embeddings of K2: two orientations each
    assert len(embeddings(complete_graph(2), cycle_graph(5))) == 10
    assert len(embeddings(complete_graph(3), cycle_graph(5))) == 0


def small_groups(n):
    S = GeneratedGroup.symmetric(n)
    return [e.group for e in all_subgroups(S)]


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_canonical_relational_recovers_every_subgroup(n):
    for G in small_groups(n):
        M = canonical_relational(G, n)
        assert automorphism_group(M).same_group(G)


def test_canonical_relational_orbits():
    G = GeneratedGroup.cyclic(4)
    M = canonical_relational(G, 1)
    assert len(M.signature) == 1
    M2 = canonical_relational(G, 2, injective_only=True)
    # C4 acts regularly on the 12 ordered pairs: three orbits of four, plus the points
    assert sorted(len(t) for t in M2.tables.values()) == [4, 4, 4, 4]
    with pytest.raises(ValueError):
        canonical_relational(G, 5)


def test_playgrounds():
    assert playground("pureset:5").n == 5
    assert playground("c5") == cycle_graph(5)
    assert playground("rook3").n == 9
    with pytest.raises(ValueError):
        playground("nope")


def test_structure_text_roundtrip():
    M = rook_graph(3)
    assert parse_structure(format_structure(M)) == M
    assert parse_structure("graph 3\n0 1\n1 2\n") == path_graph(3)


def test_relabel_and_orbits():
    M = cycle_graph(5)
    sigma = Permutation((2, 4, 1, 0, 3))
    N = M.relabel(sigma)
    assert N.is_automorphism(Permutation.identity(5))
    assert orbit(automorphism_group(N), 0) == set(range(5))
