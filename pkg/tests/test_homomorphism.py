import pytest

from reconkit.errors import DegreeMismatch, NotAHomomorphism
from reconkit.homomorphism import GroupIso
from reconkit.perm import GeneratedGroup, Permutation

cyc = Permutation.from_cycles


def test_conjugation_is_an_isomorphism():
    S4 = GeneratedGroup.symmetric(4)
    sigma = cyc(4, [(0, 2, 3)])
    F = GroupIso.conjugation(S4, S4, sigma)
    for g in S4.elements():
        assert F(g) == sigma * g * sigma.inverse()
        assert F.preimage(F(g)) == g
    assert F.is_inner_by(sigma)
    assert not F.is_inner_by(Permutation.identity(4))


def test_homomorphism_property_on_all_pairs():
    D5 = GeneratedGroup([cyc(5, [(0, 1, 2, 3, 4)]), cyc(5, [(1, 4), (2, 3)])])
    # rotation r -> r^2 extends to an automorphism of the dihedral group
    r, s = D5.generators
    F = GroupIso(D5, D5, [r * r, s])
    els = D5.sorted_elements()
    assert len({F(g) for g in els}) == 10
    for g in els:
        for h in els:
            assert F(g * h) == F(g) * F(h)


def test_between_different_degrees():
    C3a = GeneratedGroup([cyc(3, [(0, 1, 2)])])
    C3b = GeneratedGroup([cyc(6, [(0, 1, 2), (3, 4, 5)])])
    F = GroupIso(C3a, C3b, [cyc(6, [(0, 2, 1), (3, 5, 4)])])
    assert F(cyc(3, [(0, 2, 1)])) == cyc(6, [(0, 1, 2), (3, 4, 5)])
    assert F.inverse()(cyc(6, [(0, 1, 2), (3, 4, 5)])) == cyc(3, [(0, 2, 1)])


def test_rejects_non_homomorphisms():
    S3 = GeneratedGroup([cyc(3, [(0, 1)]), cyc(3, [(0, 1, 2)])])
    with pytest.raises(NotAHomomorphism):
        # a transposition cannot go to a 3-cycle
        GroupIso(S3, S3, [cyc(3, [(0, 1, 2)]), cyc(3, [(0, 1, 2)])])
    with pytest.raises(NotAHomomorphism):
        # not surjective
        GroupIso(S3, S3, [cyc(3, [(0, 1)]), Permutation.identity(3)])
    with pytest.raises(NotAHomomorphism):
        GroupIso(S3, GeneratedGroup.cyclic(3), [cyc(3, [(0, 1)]), cyc(3, [(0, 1, 2)])])
    with pytest.raises(DegreeMismatch):
        GroupIso(S3, S3, [Permutation.identity(4), Permutation.identity(4)])
    with pytest.raises(NotAHomomorphism):
        GroupIso(S3, S3, [cyc(3, [(0, 1)])])


def test_mapping_form_and_membership_errors():
    S3 = GeneratedGroup([cyc(3, [(0, 1)]), cyc(3, [(0, 1, 2)])])
    F = GroupIso(S3, S3, {g: g for g in S3.generators})
    assert F(cyc(3, [(1, 2)])) == cyc(3, [(1, 2)])
    C3 = GeneratedGroup([cyc(3, [(0, 1, 2)])])
    G = GroupIso.identity(C3)
    with pytest.raises(NotAHomomorphism):
        G(cyc(3, [(0, 1)]))


def test_image_group():
    S4 = GeneratedGroup.symmetric(4)
    sigma = cyc(4, [(0, 3)])
    F = GroupIso.conjugation(S4, S4, sigma)
    H = GeneratedGroup([cyc(4, [(0, 1)])])
    assert F.image_group(H).element_set() == {Permutation.identity(4), cyc(4, [(3, 1)])}
