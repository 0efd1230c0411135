"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument is outside the mathematical domain of the operation."""


class MetricViolationError(ValueError):
    """A distance matrix fails the metric axioms.

    Carries the offending index triple (i, k, j) when the triangle
    inequality d(i,j) <= d(i,k) + d(k,j) is the axiom that failed.
    """

    def __init__(self, message: str, witness: tuple[int, int, int] | None = None):
        super().__init__(message)
        self.witness = witness


class NotInSpaceError(ValueError):
    """The function does not belong to the requested function space.

    Raised e.g. for a nonzero function in L^{inf,q} with q < inf, which
    contains only the zero function.
    """
