import itertools
import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from reconkit.errors import DegreeMismatch, NotASubgroup, NotNormal, NotSetwiseInvariant, OrderBoundExceeded, PointOutOfRange
from reconkit.fingroup import group_isomorphic, symmetric_group
from reconkit.perm import (
    GeneratedGroup,
    Permutation,
    all_subgroups,
    bsgs_build,
    closure,
    compose,
    format_group,
    index,
    inverse,
    is_normal,
    orbit,
    parse_group,
    pointwise_stabilizer,
    quotient_group,
    restricted_subgroup,
    restriction,
    setwise_stabilizer,
    transport,
)

P = Permutation
cyc = Permutation.from_cycles


def perms(n):
    return st.permutations(list(range(n))).map(Permutation)


def all_perms(n):
    return [Permutation(p) for p in itertools.permutations(range(n))]


def brute_subgroups(elements, ident):
    """Every subgroup, as closures of small subsets of the element list."""
    n = len(elements)
    k = max(1, int(math.log2(n)))
    found = set()
    for size in range(k + 1):
        for S in itertools.combinations(elements, size):
            found.add(frozenset(closure(S, len(ident)) if S else {ident}))
    return found


# -- permutations --------------------------------------------------------------


def test_compose_identity_and_involution():
    assert compose(P.identity(3), cyc(3, [(0, 1)])) == cyc(3, [(0, 1)])
    assert compose(cyc(3, [(0, 1)]), cyc(3, [(0, 1)])).is_identity()


def test_compose_matches_function_composition_on_sym3():
    for p in all_perms(3):
        for q in all_perms(3):
            r = compose(p, q)
            assert all(r[x] == p[q[x]] for x in range(3))
    assert compose(cyc(3, [(0, 1, 2)]), cyc(3, [(0, 1)])) == P((2, 1, 0))


def test_compose_degree_mismatch():
    with pytest.raises(DegreeMismatch):
        compose(P.identity(3), P.identity(4))


@given(perms(6))
def test_inverse_roundtrip(p):
    assert compose(p, inverse(p)).is_identity()
    assert (p ** p.order()).is_identity()


def test_cycle_notation_roundtrip():
    p = cyc(6, [(0, 3, 5), (1, 2)])
    assert str(p) == "(0 3 5)(1 2)"
    assert P.parse(str(p), 6) == p
    assert str(P.identity(4)) == "()"


def test_checked_rejects_non_bijections():
    with pytest.raises(ValueError):
        P.checked([0, 0, 1])


def test_restriction_examples():
    assert restriction(P.identity(5), (1, 3)) == P.identity(2)
    assert restriction(cyc(4, [(0, 1), (2, 3)]), (0, 1)) == P((1, 0))
    with pytest.raises(NotSetwiseInvariant):
        restriction(cyc(4, [(0, 2), (1, 3)]), (0, 1))


def test_transport_moves_generators_along_f():
    f = cyc(4, [(0, 2), (1, 3)])
    p = P((1, 0))
    assert transport(p, (0, 1), (2, 3), f) == P((1, 0))
    # a 3-cycle on positions of (0, 1, 2) sent through f = (0 1): conjugated coordinates
    g = cyc(3, [(0, 1)])
    t = transport(P((1, 2, 0)), (0, 1, 2), (0, 1, 2), g)
    assert t == P((1, 2, 0)).conjugate(g)


# -- BSGS ------------------------------------------------------------------------


def test_bsgs_examples():
    assert bsgs_build([P.identity(5)]).order() == 1
    assert bsgs_build([cyc(5, [(0, 1)]), cyc(5, [(0, 1, 2, 3, 4)])]).order() == 120
    assert bsgs_build([cyc(4, [(0, 1), (2, 3)]), cyc(4, [(0, 2), (1, 3)])]).order() == 4


def test_bsgs_degree_mismatch():
    with pytest.raises(DegreeMismatch):
        bsgs_build([P.identity(3), P.identity(4)])


def test_bsgs_order_matches_closure_on_random_generators():
    rng = random.Random(11)
    for _ in range(60):
        n = rng.randint(1, 7)
        gens = []
        for _ in range(rng.randint(1, 3)):
            pts = list(range(n))
            rng.shuffle(pts)
            gens.append(P(pts))
        G = GeneratedGroup(gens)
        elems = closure(gens, n)
        assert G.order() == len(elems)
        assert all(G.contains(g) for g in gens)
        assert G.element_set() == frozenset(elems)


def test_membership_rejects_outsiders():
    A = GeneratedGroup([cyc(5, [(0, 1, 2)]), cyc(5, [(2, 3, 4)])])
    assert A.order() == 60
    assert not A.contains(cyc(5, [(0, 1)]))
    assert A.contains(cyc(5, [(0, 1), (2, 3)]))


def test_sym7_is_quick():
    G = GeneratedGroup.symmetric(7)
    assert G.order() == 5040


def test_degree_zero_group():
    G = GeneratedGroup([], 0)
    assert G.order() == 1


# -- orbits and stabilizers ---------------------------------------------------------


def test_orbit_examples():
    assert orbit(GeneratedGroup.trivial(4), 2) == {2}
    assert orbit(GeneratedGroup.symmetric(3), 0) == {0, 1, 2}
    assert orbit(GeneratedGroup([cyc(5, [(0, 1), (2, 3)])]), 4) == {4}
    with pytest.raises(PointOutOfRange):
        orbit(GeneratedGroup.symmetric(3), 3)


def test_stabilizer_examples_against_enumeration():
    S4 = GeneratedGroup.symmetric(4)
    elems = all_perms(4)
    assert pointwise_stabilizer(S4, [0, 1]).order() == sum(1 for g in elems if g[0] == 0 and g[1] == 1) == 2
    assert setwise_stabilizer(S4, [0, 1]).order() == sum(1 for g in elems if {g[0], g[1]} == {0, 1}) == 4
    assert pointwise_stabilizer(S4, []).order() == 24
    assert setwise_stabilizer(S4, range(4)).order() == 24
    assert pointwise_stabilizer(GeneratedGroup.trivial(4), [1, 2]).order() == 1
    C5 = GeneratedGroup.cyclic(5)
    assert setwise_stabilizer(C5, [0, 1]).order() == 1


@settings(max_examples=40, deadline=None)
@given(st.lists(perms(6), min_size=1, max_size=3), st.sets(st.integers(0, 5), max_size=3))
def test_stabilizers_match_brute_force(gens, A):
    G = GeneratedGroup(gens)
    elems = G.element_set()
    pw = {g for g in elems if all(g[a] == a for a in A)}
    sw = {g for g in elems if {g[a] for a in A} == set(A)}
    P_ = pointwise_stabilizer(G, A)
    S_ = setwise_stabilizer(G, A)
    assert P_.element_set() == pw
    assert S_.element_set() == sw
    assert is_normal(P_, S_)


@settings(max_examples=40, deadline=None)
@given(st.lists(perms(6), min_size=1, max_size=3), st.integers(0, 5))
def test_orbit_stabilizer(gens, a):
    G = GeneratedGroup(gens)
    assert len(orbit(G, a)) * pointwise_stabilizer(G, [a]).order() == G.order()


def test_restricted_subgroup_interpolates():
    S5 = GeneratedGroup.symmetric(5)
    K = (0, 1, 2)
    L = GeneratedGroup([P((1, 2, 0))])
    H = restricted_subgroup(S5, K, L)
    brute = {g for g in all_perms(5) if {g[k] for k in K} == set(K) and L.contains(restriction(g, K))}
    assert H.element_set() == brute
    assert H.order() == 6


# -- subgroups, normality, quotients ------------------------------------------------------


def test_all_subgroups_examples():
    assert all_subgroups(GeneratedGroup.trivial(3)).orders() == [1]
    assert all_subgroups(GeneratedGroup.symmetric(3)).orders() == [1, 2, 2, 2, 3, 6]
    V4 = GeneratedGroup([cyc(4, [(0, 1), (2, 3)]), cyc(4, [(0, 2), (1, 3)])])
    assert len(all_subgroups(V4)) == 5


@pytest.mark.parametrize(
    "gens",
    [
        [cyc(4, [(0, 1)]), cyc(4, [(0, 1, 2, 3)])],
        [cyc(4, [(0, 1, 2, 3)]), cyc(4, [(0, 2)])],
        [cyc(5, [(0, 1, 2, 3, 4)]), cyc(5, [(1, 4), (2, 3)])],
        [cyc(6, [(0, 1, 2)]), cyc(6, [(3, 4)])],
        [cyc(6, [(0, 1), (2, 3)]), cyc(6, [(0, 2), (1, 3)]), cyc(6, [(4, 5)])],
    ],
)
def test_all_subgroups_match_subset_closures(gens):
    G = GeneratedGroup(gens)
    assert G.order() <= 24
    subs = all_subgroups(G)
    listed = {e.group.element_set() for e in subs}
    assert listed == brute_subgroups(G.sorted_elements(), G.identity())
    for e in subs:
        assert G.order() % e.order == 0
        assert e.index_in_parent == G.order() // e.order
        assert e.is_normal_in_parent == all(h.conjugate(g) in e.group.element_set() for g in G.elements() for h in e.group.elements())


def test_all_subgroups_bound():
    with pytest.raises(OrderBoundExceeded):
        all_subgroups(GeneratedGroup.symmetric(5), bound=100)


def test_is_normal_examples():
    S3 = GeneratedGroup.symmetric(3)
    assert is_normal(S3, S3)
    assert not is_normal(GeneratedGroup([cyc(3, [(0, 1)])]), S3)
    assert is_normal(GeneratedGroup([cyc(3, [(0, 1, 2)])]), S3)
    with pytest.raises(NotASubgroup):
        is_normal(GeneratedGroup.symmetric(3), GeneratedGroup.cyclic(3))
    assert index(GeneratedGroup.cyclic(3), S3) == 2


def test_quotient_examples():
    S3 = GeneratedGroup.symmetric(3)
    assert quotient_group(S3, S3).order == 1
    assert quotient_group(S3, GeneratedGroup([cyc(3, [(0, 1, 2)])])).order == 2
    S4 = GeneratedGroup.symmetric(4)
    V4 = GeneratedGroup([cyc(4, [(0, 1), (2, 3)]), cyc(4, [(0, 2), (1, 3)])])
    Q = quotient_group(S4, V4)
    assert Q.order == 6
    assert group_isomorphic(Q, symmetric_group(3)) is not None
    with pytest.raises(NotNormal):
        quotient_group(S3, GeneratedGroup([cyc(3, [(0, 1)])]))


def test_group_text_roundtrip():
    G = GeneratedGroup([cyc(5, [(0, 1)]), cyc(5, [(0, 1, 2, 3, 4)])])
    text = format_group(G)
    assert text.startswith("degree 5")
    H = parse_group(text)
    assert H.same_group(G) and H.degree == 5
