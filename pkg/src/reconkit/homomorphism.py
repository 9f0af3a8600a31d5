"""Group isomorphisms between permutation groups, given by generator images."""
from __future__ import annotations

from collections.abc import Mapping, Sequence

from .errors import DegreeMismatch, NotAHomomorphism
from .perm import GeneratedGroup, Permutation


def _glue(g: Permutation, h: Permutation) -> Permutation:
    n = len(g)
    return Permutation(list(g) + [n + x for x in h])


class GroupIso:
    """An isomorphism ``source -> target`` determined by images of ``source.generators``.

    The map is checked on construction through its graph: the group generated
    by the pairs ``(g, F(g))`` acting on the disjoint union of both domains.
    ``F`` is a well-defined homomorphism exactly when this graph group
    projects injectively onto the source, i.e. has the source's order; it is
    bijective when moreover the orders agree and the images generate the
    target.
    """

    def __init__(self, source: GeneratedGroup, target: GeneratedGroup, generator_images: Sequence[Permutation] | Mapping[Permutation, Permutation]):
        if isinstance(generator_images, Mapping):
            try:
                imgs = [Permutation(generator_images[g]) for g in source.generators]
            except KeyError as e:
                raise NotAHomomorphism(f"no image given for generator {e.args[0]}") from None
        else:
            imgs = [Permutation(h) for h in generator_images]
        if len(imgs) != len(source.generators):
            raise NotAHomomorphism(f"{len(imgs)} images for {len(source.generators)} generators")
        for h in imgs:
            if len(h) != target.degree:
                raise DegreeMismatch(f"image {h} has degree {len(h)}, target degree {target.degree}")
            if not target.contains(h):
                raise NotAHomomorphism(f"image {h} is not in the target group")
        self.source = source
        self.target = target
        self.generator_images = dict(zip(source.generators, imgs))
        self._images = imgs
        n, m = source.degree, target.degree
        pairs = [_glue(g, h) for g, h in zip(source.generators, imgs)]
        self._graph = GeneratedGroup(pairs, n + m, base=range(n))
        self._flipped: GeneratedGroup | None = None
        if self._graph.order() != source.order():
            raise NotAHomomorphism("generator images do not respect the relations of the source")
        if source.order() != target.order() or GeneratedGroup(imgs, m).order() != target.order():
            raise NotAHomomorphism("the induced homomorphism is not bijective")

    @classmethod
    def conjugation(cls, source: GeneratedGroup, target: GeneratedGroup, sigma: Permutation) -> GroupIso:
        """``g -> sigma g sigma^-1``."""
        return cls(source, target, [g.conjugate(sigma) for g in source.generators])

    @classmethod
    def identity(cls, G: GeneratedGroup) -> GroupIso:
        return cls(G, G, list(G.generators))

    def __call__(self, g: Permutation) -> Permutation:
        n = self.source.degree
        if len(g) != n:
            raise DegreeMismatch(f"{g} has degree {len(g)}, source degree {n}")
        gamma = Permutation.identity(n + self.target.degree)
        # the first n base points are the source points, so walking them pins gamma down
        for lv in self._graph._levels[:n]:
            c = gamma.inverse()[g[lv.point]]
            u = lv.transversal.get(c)
            if u is None:
                raise NotAHomomorphism(f"{g} is not in the source group")
            gamma = gamma * u
        if tuple(gamma[:n]) != tuple(g):
            raise NotAHomomorphism(f"{g} is not in the source group")
        return Permutation(x - n for x in gamma[n:])

    def inverse(self) -> GroupIso:
        inv_images = [self.preimage(h) for h in self.target.generators]
        return GroupIso(self.target, self.source, inv_images)

    def preimage(self, h: Permutation) -> Permutation:
        n, m = self.source.degree, self.target.degree
        if len(h) != m:
            raise DegreeMismatch(f"{h} has degree {len(h)}, target degree {m}")
        if self._flipped is None:
            self._flipped = GeneratedGroup([_glue(b, a) for a, b in zip(self.source.generators, self._images)], m + n, base=range(m))
        gamma = Permutation.identity(n + m)
        for lv in self._flipped._levels[:m]:
            c = gamma.inverse()[h[lv.point]]
            u = lv.transversal.get(c)
            if u is None:
                raise NotAHomomorphism(f"{h} is not in the target group")
            gamma = gamma * u
        if tuple(gamma[:m]) != tuple(h):
            raise NotAHomomorphism(f"{h} is not in the target group")
        return Permutation(x - m for x in gamma[m:])

    def image_group(self, H: GeneratedGroup) -> GeneratedGroup:
        """``F(H)`` for a subgroup ``H`` of the source."""
        return GeneratedGroup([self(g) for g in H.strong_generators], self.target.degree)

    def is_inner_by(self, sigma: Permutation) -> bool:
        return all(self(g) == g.conjugate(sigma) for g in self.source.generators)

    def __repr__(self) -> str:
        body = ", ".join(f"{g} -> {h}" for g, h in self.generator_images.items())
        return f"<GroupIso {body}>"
