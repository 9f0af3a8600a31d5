"""Exception types shared across the toolkit."""


class ReconkitError(Exception):
    pass


class DegreeMismatch(ReconkitError, ValueError):
    pass


class PointOutOfRange(ReconkitError, ValueError):
    pass


class NotASubgroup(ReconkitError, ValueError):
    pass


class NotNormal(ReconkitError, ValueError):
    pass


class NotSetwiseInvariant(ReconkitError, ValueError):
    pass


class OrderBoundExceeded(ReconkitError):
    pass


class NotAGroup(ReconkitError, ValueError):
    """A Cayley table failed the group axioms."""


class SignatureMismatch(ReconkitError, ValueError):
    pass


class NotAMember(ReconkitError, ValueError):
    pass


class SpecNotAmalgamating(ReconkitError):
    pass


class NotASubgroupOfAutK(ReconkitError, ValueError):
    pass


class NotAnAutomorphism(ReconkitError, ValueError):
    pass


class NotGenerating(ReconkitError, ValueError):
    pass


class IdentityGenerator(ReconkitError, ValueError):
    pass


class NotAHomomorphism(ReconkitError, ValueError):
    pass


class NoMinimalStabilizerMatch(ReconkitError):
    """The image of a point stabilizer is not the stabilizer of any point."""

    def __init__(self, message, point=None, image=None):
        super().__init__(message)
        self.point = point
        self.image = image


class AmbiguousMatch(ReconkitError):
    """Several target points share the matched stabilizer."""

    def __init__(self, message, point=None, candidates=()):
        super().__init__(message)
        self.point = point
        self.candidates = tuple(candidates)
