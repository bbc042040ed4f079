"""Exception hierarchy.

Each class carries the CLI exit code it maps to:
1 I/O, 2 invalid input, 3 degenerate mathematics, 4 solver/quadrature failure.
"""


class MiquelError(Exception):
    exit_code = 2


class FileFailure(MiquelError):
    """Unreadable, unwritable or malformed file."""

    exit_code = 1


class InvalidInput(MiquelError):
    exit_code = 2


class DegenerateGeometry(MiquelError):
    exit_code = 3


class SolverError(MiquelError):
    exit_code = 4


# geometry primitives
class CollinearPoints(DegenerateGeometry):
    pass


class DegenerateInput(DegenerateGeometry):
    pass


class ParallelLines(DegenerateGeometry):
    pass


# pattern validation
class PeriodicityViolation(InvalidInput):
    pass


class NonConcyclicFace(InvalidInput):
    pass


class DegenerateFace(InvalidInput):
    pass


class CollinearMonodromies(InvalidInput):
    pass


class NotOnCommonHyperbola(InvalidInput):
    pass


class AmbiguousClass(DegenerateGeometry):
    pass


class FitFailure(SolverError):
    pass


class DegenerateFaceCircle(DegenerateGeometry):
    pass


class CoincidentCenters(DegenerateGeometry):
    pass


# quartic
class ZeroDenominator(DegenerateGeometry):
    pass


class FlatAngle(DegenerateGeometry):
    pass


class WrongClass(InvalidInput):
    pass


class EmptyRealLocus(DegenerateGeometry):
    pass


class NoRealAxisPoint(DegenerateGeometry):
    pass


class NotNondegenerate(DegenerateGeometry):
    def __init__(self, message, details=None):
        super().__init__(message)
        self.details = details or {}


# group law
class NotOnCurve(InvalidInput):
    pass


class DegenerateGradient(DegenerateGeometry):
    pass


class SolverFailure(SolverError):
    pass


class AmbiguousTangency(SolverError):
    pass


# measure
class OutOfDomain(InvalidInput):
    pass


class DifferentBranches(InvalidInput):
    pass


class QuadratureFailure(SolverError):
    pass


class BranchTrackingFailure(SolverError):
    pass
