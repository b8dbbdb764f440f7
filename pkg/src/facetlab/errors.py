"""Exception hierarchy shared across the package."""


class FacetLabError(Exception):
    """Base class for every error raised by facetlab."""


class ParseError(FacetLabError, ValueError):
    """A text input (.vtx, .lin, model file) could not be parsed."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class SingletonSet(FacetLabError, ValueError):
    """A difference matrix was requested for a one-point set."""


class InconsistentInput(FacetLabError, ValueError):
    """Some solution point violates a supplied equality constraint."""


class NumericalStall(FacetLabError, ArithmeticError):
    """Floating-point simplex could not make reliable progress."""


class NodeLimitExceeded(FacetLabError):
    """Branch-and-bound exhausted its node budget.

    ``incumbent`` holds the best integral solution seen so far (or None).
    """

    def __init__(self, message, incumbent=None, nodes=0):
        super().__init__(message)
        self.incumbent = incumbent
        self.nodes = nodes


class TooLarge(FacetLabError, ValueError):
    """An enumeration guard was exceeded."""


class CapTooSmall(FacetLabError, ValueError):
    """The cardinality cap of the facet model is below the support floor."""


class NoNewEquality(FacetLabError, ValueError):
    """Every affine-hull row of a tight set is implied by known equalities."""


class InfeasibleRelaxation(FacetLabError, ValueError):
    """The known constraint system admits no point at all."""


class NotApplicable(FacetLabError, ValueError):
    """An inequality family does not exist for the requested size."""


class NTooSmall(FacetLabError, ValueError):
    """Node count below the smallest size a formula is defined for."""


class UnsupportedFormat(FacetLabError, ValueError):
    """A TSPLIB file uses a variant this reader does not handle."""


class DimensionMismatch(FacetLabError, ValueError):
    """Declared dimension and supplied data disagree."""
