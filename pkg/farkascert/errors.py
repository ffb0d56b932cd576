"""
Exception hierarchy shared by every farkascert module.

The CLI turns these into exit codes; library callers catch FarkasError.
"""


class FarkasError(Exception):
    """Base class for all library errors"""


class DimensionMismatch(FarkasError):
    """Vectors, rows or operands disagree in length"""


class EmptyOperand(FarkasError):
    """An operation that needs a nonempty polyhedron received the empty set"""


class EmptyRegion(FarkasError):
    """A positivity test was asked about an empty feasible region"""


class ImproperFunction(FarkasError):
    """Epigraph data does not describe a proper lsc convex function"""


class ImproperSum(FarkasError):
    """f + indicator(D) has empty domain, i.e. dom f and D do not meet"""


class PointOutsideDomain(FarkasError):
    """The function takes the value +inf at the given point"""


class PointNotFeasible(FarkasError):
    """The point does not solve the constraint system"""


class HiddenAssumptionFails(FarkasError):
    """The solution set of the system does not meet dom f"""


class PremiseViolated(FarkasError):
    """An operation was called outside the situation it characterizes"""


class InconsistentSystem(FarkasError):
    """The constraint system has no solution"""


class CertificateError(FarkasError):
    """A certificate failed exact re-verification"""


class SolverError(FarkasError):
    """The exact LP kernel failed one of its own self-checks"""


class ResourceLimitExceeded(FarkasError):
    """A configured cap (generators, active sets) was hit"""

    def __init__(self, what, limit):
        super().__init__(f"{what} exceeded the configured limit of {limit}")
        self.what = what
        self.limit = limit


class ProblemFileError(FarkasError):
    """Malformed problem, report or golden file; `path` names the offending field"""

    def __init__(self, path, message):
        super().__init__(f"{path}: {message}")
        self.path = path
        self.message = message
