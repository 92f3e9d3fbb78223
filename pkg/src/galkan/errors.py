"""Exception hierarchy.

Every error raised by the engine derives from :class:`GalkanError`, so the
command line can tell input problems apart from programming errors.
"""


class GalkanError(Exception):
    """Base class for all engine errors."""


# finite groups
class NotAGroup(GalkanError, ValueError):
    pass


class OrderBound(GalkanError, ValueError):
    pass


class IndexOutOfRange(GalkanError, IndexError):
    pass


class ParentMismatch(GalkanError, ValueError):
    pass


class NotNormal(GalkanError, ValueError):
    pass


class NotAHom(GalkanError, ValueError):
    pass


class NotSurjective(GalkanError, ValueError):
    pass


class CodMismatch(GalkanError, ValueError):
    pass


class SearchBudgetExceeded(GalkanError, RuntimeError):
    pass


class NotAbelian(GalkanError, ValueError):
    pass


# groupoids
class AxiomViolation(GalkanError, ValueError):
    def __init__(self, diagram, witness=None):
        self.diagram = diagram
        self.witness = witness
        super().__init__(f"axiom {diagram!r} fails at {witness!r}")


class NotAGroupoidAfterReflection(GalkanError, ValueError):
    pass


class NotAGroupOnLoops(GalkanError, ValueError):
    pass


class RestrictionEscapes(GalkanError, ValueError):
    pass


# Galois groups
class ComparisonFailure(GalkanError, AssertionError):
    pass


class SquareDoesNotCommute(GalkanError, ValueError):
    pass


class NoLifting(GalkanError, ValueError):
    def __init__(self, member, message=None):
        self.member = member
        super().__init__(message or f"no lifting into {member!r}")


class MissingCertificate(GalkanError, ValueError):
    pass


# scenarios
class SchemaError(GalkanError, ValueError):
    pass


class NaturalityViolation(GalkanError, ValueError):
    def __init__(self, square, element=None, message=None):
        self.square = square
        self.element = element
        super().__init__(message or f"naturality fails on square {square!r} at element {element!r}")


# graphs
class NotEtale(GalkanError, ValueError):
    def __init__(self, vertex, star=None):
        self.vertex = vertex
        self.star = star
        super().__init__(f"not etale at vertex {vertex}: star images {star}")


class NotConnected(GalkanError, ValueError):
    pass


class NotNormalCover(GalkanError, ValueError):
    pass
