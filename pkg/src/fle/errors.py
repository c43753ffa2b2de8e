"""Exception types shared across the package."""


class FleError(Exception):
    """Base class for all package-specific failures."""


class DegenerateWeight(FleError):
    """Weight exponent sits exactly on a degeneracy of a closed-form expression."""


class WeightNotIntegrable(FleError):
    """Requested singular weight |x|^-gamma is not integrable on the domain."""


class RuleMismatch(FleError):
    """Quadrature rule was built for a weaker singularity than requested."""


class GridMismatch(FleError):
    """Point or value array does not match the quadrature rule it is used with."""


class BasisMismatch(FleError):
    """Field and operator were built over different bases."""


class PointOutsideDomain(FleError):
    """Evaluation point lies outside the closed model domain."""


class UnsupportedKind(FleError):
    """Operation is not defined for this operator kind."""


class UnsupportedRegime(FleError):
    """Exponent configuration outside the regime the algorithm covers."""


class NotConverged(FleError):
    """Iteration exhausted its budget before reaching tolerance."""


class TrivialCollapse(FleError):
    """Iterate collapsed onto the zero solution."""


class SingularJacobian(FleError):
    """Linearized system could not be solved."""


class InvalidChain(FleError):
    """Exponent chain left the regime where its defining relations hold."""


class NegativeInput(FleError):
    """Input field violates a required sign condition."""


class QuadratureFailure(FleError):
    """Adaptive quadrature failed to reach its error target."""


class AdmissibilityFailure(FleError):
    """Problem parameters fail an admissibility condition."""
