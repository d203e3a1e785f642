"""Exception hierarchy shared by all modules."""


class SpatialAlexError(Exception):
    """Base class for every error raised by this package."""


# lattice
class EmptyGraph(SpatialAlexError):
    pass


class NonFreeQuotient(SpatialAlexError):
    pass


class UnknownEdge(SpatialAlexError, KeyError):
    pass


class NonSquare(SpatialAlexError, ValueError):
    pass


class InvalidBasis(SpatialAlexError):
    pass


# ring
class LatticeMismatch(SpatialAlexError, ValueError):
    pass


class Indivisible(SpatialAlexError, ArithmeticError):
    pass


class DivisionByZero(SpatialAlexError, ZeroDivisionError):
    pass


# diagram
class MalformedInput(SpatialAlexError, ValueError):
    def __init__(self, message, location=None):
        self.location = location
        if location is not None:
            message = f"{location}: {message}"
        super().__init__(message)


class SinkOrSourceVertex(MalformedInput):
    pass


class DanglingArc(MalformedInput):
    pass


class NonPlanarMap(MalformedInput):
    pass


class InconsistentOuter(MalformedInput):
    pass


class MarkedRegionsCoincide(SpatialAlexError):
    pass


# rotation
class InconsistentWinding(SpatialAlexError):
    pass


class NonIntegralRotation(SpatialAlexError):
    pass


class NotALink(SpatialAlexError):
    pass


# statesum
class SweepMismatch(SpatialAlexError):
    def __init__(self, arc_a, arc_b):
        self.arcs = (arc_a, arc_b)
        super().__init__(f"state sums differ for base arcs {arc_a!r} and {arc_b!r}")


class BasePointOnSite(SpatialAlexError):
    pass


# graphalg / invariant
class NotStronglyConnected(SpatialAlexError):
    pass


class UnbalancedColoring(SpatialAlexError, ValueError):
    pass


class NotTrivalent(SpatialAlexError):
    pass


# moves
class PatternNotFound(SpatialAlexError):
    pass


class OrientationIncompatible(SpatialAlexError):
    pass


class InvarianceViolation(SpatialAlexError):
    def __init__(self, message, script=None):
        self.script = script
        super().__init__(message)
