import itertools
import math
import random

import pytest

from reconkit.errors import NotAMember, SignatureMismatch, SpecNotAmalgamating
from reconkit.fraisse import (
    ClassSpec,
    builtin_spec,
    check_amalgamation,
    class_acl,
    colored_graph,
    enumerate_members,
    extension_property_check,
    format_spec,
    free_amalgam,
    free_amalgamation_certificate,
    gamma_class,
    generic_build,
    graphs,
    is_member,
    kn_free,
    members_up_to_iso,
    parse_spec,
    pure_set_class,
    rename_symbols,
    signature_symmetry_group,
    sort_action,
)
from reconkit.structures import FinStructure, Signature, complete_graph, cycle_graph, graph, path_graph, pure_set, rook_graph


def matchings():
    """Graphs of maximum degree one: not closed under amalgamation without identification."""
    return ClassSpec(Signature.of(("E", 2)), symmetric_irreflexive=(("E", None),), forbidden=(path_graph(3), complete_graph(3)), name="matchings")


def brute_extension_property(M, k):
    """Graph extension property: every neighbourhood pattern over every set of at most k points is realized."""
    adj = {x: set() for x in range(M.n)}
    for u, v in M.tables["E"]:
        adj[u].add(v)
    for size in range(k + 1):
        for S in itertools.combinations(range(M.n), size):
            seen = {frozenset(adj[w] & set(S)) for w in range(M.n) if w not in S}
            if len(seen) < 2**size:
                return False
    return True


def brute_symmetries(spec, size_bound):
    """Arity-preserving symbol permutations that send every small member into the class."""
    names = spec.signature.names
    members = [B for n in range(size_bound + 1) for B in enumerate_members(spec, n)]
    found = []
    for img in itertools.permutations(names):
        mapping = dict(zip(names, img))
        if any(spec.signature.arity(a) != spec.signature.arity(b) for a, b in mapping.items()):
            continue
        if all(is_member(rename_symbols(B, mapping), spec) for B in members):
            found.append(mapping)
    return found


# -- membership and enumeration ---------------------------------------------------------


def test_membership_examples():
    assert is_member(cycle_graph(5), graphs())
    assert not is_member(complete_graph(3), kn_free(3))
    assert is_member(cycle_graph(4), kn_free(3))
    m = is_member(graph(2, [(0, 1)]), pure_set_class())
    assert not m and m.violation == "forbidden"
    asym = FinStructure(2, Signature.of(("E", 2)), {"E": [(0, 1)]})
    assert is_member(asym, graphs()).violation == "symmetric"
    with pytest.raises(SignatureMismatch):
        is_member(FinStructure(1, Signature.of(("R", 1))), graphs())


def test_colored_graph_needs_one_colour_per_pair():
    spec = colored_graph(2)
    sig = spec.signature
    ok = FinStructure(2, sig, {"E0": [(0, 1), (1, 0)]})
    none = FinStructure(2, sig)
    both = FinStructure(2, sig, {"E0": [(0, 1), (1, 0)], "E1": [(0, 1), (1, 0)]})
    assert is_member(ok, spec)
    assert is_member(none, spec).violation == "pair_partition"
    assert is_member(both, spec).violation == "pair_partition"


@pytest.mark.parametrize("n", [0, 1, 2, 3, 4])
def test_labelled_graph_counts(n):
    assert sum(1 for _ in enumerate_members(graphs(), n)) == 2 ** math.comb(n, 2)
    assert sum(1 for _ in enumerate_members(colored_graph(3), n)) == 3 ** math.comb(n, 2)


def test_unlabelled_counts():
    # graphs on 4 vertices: 11; triangle-free ones: 7; two-coloured K4: 10
    assert len(members_up_to_iso(graphs(), 4)) == 11
    assert len(members_up_to_iso(kn_free(3), 4)) == 7
    assert len(members_up_to_iso(colored_graph(2), 4)) == 11
    assert len(members_up_to_iso(matchings(), 4)) == 3


def test_gamma_class_members_respect_sorts():
    spec = gamma_class(path_graph(3))
    for B in enumerate_members(spec, 2):
        sorts = {x: u for u in spec.partition_unaries for (x,) in B.tables[u]}
        for r, (a, b) in spec.sorts.items():
            for x, y in B.tables[r]:
                assert {sorts[x], sorts[y]} == {a, b}


# -- amalgamation --------------------------------------------------------------------------


def test_free_amalgam_adds_nothing():
    B1 = graph(3, [(0, 1), (1, 2)])
    B2 = graph(3, [(0, 2)])
    D = free_amalgam(1, B1, B2)
    assert D.n == 5
    assert sorted(D.edges()) == [(0, 1), (0, 4), (1, 2)]


@pytest.mark.parametrize("spec", [graphs(), kn_free(3), kn_free(4), pure_set_class()])
def test_free_classes(spec):
    rep = check_amalgamation(spec, 4)
    assert rep.free and rep.amalgamating
    assert free_amalgamation_certificate(spec).free


def test_colored_graph_amalgamates_but_not_freely():
    rep = check_amalgamation(colored_graph(2), 3)
    assert rep.amalgamating
    assert not rep.free
    assert not free_amalgamation_certificate(colored_graph(2)).free


def test_complete_graphs_amalgamate_only_with_new_edges():
    # forbidding two non-adjacent points leaves the complete graphs
    spec = ClassSpec(Signature.of(("E", 2)), symmetric_irreflexive=(("E", None),), forbidden=(pure_set(2),))
    rep = check_amalgamation(spec, 3)
    assert not rep.free and rep.free_failures
    assert rep.amalgamating


def test_matchings_fail_amalgamation():
    rep = check_amalgamation(matchings(), 3)
    assert not rep.amalgamating and rep.ap_failures
    assert not free_amalgamation_certificate(matchings()).free
    with pytest.raises(SpecNotAmalgamating):
        generic_build(matchings(), 1)


def test_full_check_agrees_with_local_check():
    for spec in (kn_free(3), colored_graph(2), matchings()):
        a = check_amalgamation(spec, 3)
        b = check_amalgamation(spec, 3, full_check=True)
        assert (a.free, a.amalgamating) == (b.free, b.amalgamating)


def test_gamma_classes_on_three_vertices():
    for edges in ([], [(0, 1)], [(0, 1), (1, 2)], [(0, 1), (1, 2), (0, 2)]):
        rep = check_amalgamation(gamma_class(graph(3, edges)), 3)
        assert rep.free


# -- extension property and generic builds -------------------------------------------------------


@pytest.mark.parametrize(
    "M,k,expected",
    [(cycle_graph(5), 1, True), (cycle_graph(5), 2, False), (rook_graph(3), 2, True), (path_graph(4), 1, True), (path_graph(3), 1, False), (pure_set(3), 1, False)],
)
def test_extension_property_examples(M, k, expected):
    assert bool(extension_property_check(M, graphs(), k)) == expected
    assert brute_extension_property(M, k) == expected


def test_extension_property_matches_brute_force_on_random_graphs():
    rng = random.Random(5)
    for _ in range(40):
        n = rng.randint(1, 8)
        M = graph(n, [e for e in itertools.combinations(range(n), 2) if rng.random() < 0.5])
        for k in (0, 1, 2):
            assert bool(extension_property_check(M, graphs(), k)) == brute_extension_property(M, k)


def test_extension_property_rejects_non_members():
    with pytest.raises(NotAMember):
        extension_property_check(complete_graph(3), kn_free(3), 1)


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_generic_build_graphs(seed):
    b = generic_build(graphs(), 2, seed=seed)
    assert b.complete
    assert is_member(b.structure, graphs())
    assert brute_extension_property(b.structure, 2)


def test_generic_build_is_reproducible():
    assert generic_build(graphs(), 2, seed=4).structure == generic_build(graphs(), 2, seed=4).structure


def test_generic_build_other_classes():
    b = generic_build(pure_set_class(), 2)
    assert b.complete and b.structure == pure_set(3)
    b = generic_build(kn_free(3), 1)
    assert b.complete and extension_property_check(b.structure, kn_free(3), 1)
    b = generic_build(colored_graph(2), 1)
    assert b.complete and is_member(b.structure, colored_graph(2))
    assert extension_property_check(b.structure, colored_graph(2), 1)


def test_generic_build_reports_deficiencies_at_stage_bound():
    b = generic_build(graphs(), 3, stage_bound=3)
    assert not b.complete and b.deficiencies


# -- class closure ----------------------------------------------------------------------------


def test_class_acl():
    assert class_acl(graphs(), cycle_graph(5), [0]) == {0}
    assert class_acl(kn_free(3), path_graph(3), [1]) == {1}
    # in a matching a partnered point cannot be copied, an isolated one can
    M = graph(3, [(0, 1)])
    assert class_acl(matchings(), M, [0]) == {0, 1}
    assert class_acl(matchings(), M, []) == {0, 1}
    assert class_acl(matchings(), M, [0], copies=1) == {0}
    assert class_acl(graphs(), M, []) == set()
    assert class_acl(gamma_class(path_graph(3)), FinStructure(2, gamma_class(path_graph(3)).signature, {"P0": [(0,)], "P1": [(1,)], "R0_1": [(0, 1), (1, 0)]}), [1]) == {1}


# -- signature symmetries -------------------------------------------------------------------------


@pytest.mark.parametrize("n", [2, 3, 4])
def test_colored_graph_symmetries(n):
    res = signature_symmetry_group(colored_graph(n))
    assert res.order() == math.factorial(n)


@pytest.mark.parametrize("n", [2, 3])
def test_colored_graph_symmetries_against_brute_force(n):
    assert len(brute_symmetries(colored_graph(n), 3)) == signature_symmetry_group(colored_graph(n), 3).order()


def test_single_symbol_classes_have_trivial_symmetry():
    for spec in (kn_free(3), kn_free(4), graphs()):
        assert signature_symmetry_group(spec).order() == 1


@pytest.mark.parametrize("edges,order", [([(0, 1), (1, 2)], 2), ([(0, 1)], 2), ([(0, 1), (1, 2), (0, 2)], 6)])
def test_gamma_class_symmetries(edges, order):
    spec = gamma_class(graph(3, edges))
    res = signature_symmetry_group(spec, 2)
    assert res.order() == order
    assert len(brute_symmetries(spec, 2)) == order
    assert sort_action(res, spec).order() == order


def test_symmetry_check_bound():
    with pytest.raises(ValueError):
        signature_symmetry_group(graphs(), 1)


# -- text format ------------------------------------------------------------------------------


@pytest.mark.parametrize("spec", [kn_free(3), colored_graph(3), gamma_class(path_graph(3)), matchings()])
def test_spec_roundtrip(spec):
    back = parse_spec(format_spec(spec))
    assert back.signature == spec.signature
    assert back.partition_unaries == spec.partition_unaries
    assert back.symmetric_irreflexive == spec.symmetric_irreflexive
    assert back.pair_partition == spec.pair_partition
    assert back.forbidden == spec.forbidden


def test_builtin_names():
    assert builtin_spec("kn_free:3").forbidden == (complete_graph(3),)
    assert len(builtin_spec("colored_graph:4").signature) == 4
    with pytest.raises(ValueError):
        builtin_spec("nonsense")
