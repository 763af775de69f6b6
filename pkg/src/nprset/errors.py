"""Exception hierarchy shared by every module."""


class NprError(Exception):
    """Base class for all errors raised by nprset."""


class GroupSpecError(NprError, ValueError):
    """Malformed group description or element data."""


class SpecMismatchError(NprError, ValueError):
    """Operands live in different groups."""


class PreconditionError(NprError):
    """An operation was called outside its documented domain."""


class InsufficientDivisibility(PreconditionError):
    """A root does not exist inside the truncated cyclic factors."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class CollisionError(PreconditionError):
    """A map that should be injective on a set identified two of its members."""

    def __init__(self, message, indices=()):
        super().__init__(message)
        self.indices = tuple(indices)


class BoundExceeded(PreconditionError):
    """An exhaustive enumeration would exceed the configured size bound."""


class CertificationError(NprError):
    """A construction failed its own certification; carries the certificate."""

    def __init__(self, message, certificate=None):
        super().__init__(message)
        self.certificate = certificate


class NontrivialIntersection(PreconditionError):
    """``<E>`` and ``<g>`` share more than the identity; ``k * g`` lies in ``<E>``."""

    def __init__(self, message, k):
        super().__init__(message)
        self.k = k
