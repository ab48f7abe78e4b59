"""Exception hierarchy shared across the package."""


class AcdesignError(Exception):
    """Base class for all package errors."""


class ModelError(AcdesignError):
    """Invalid model specification (parameters violate family constraints)."""


class DoseRangeError(AcdesignError):
    """Dose outside the model's dose range."""


class NoTargetDoseError(AcdesignError):
    """The control response is not attained by the mean curve on the dose range."""


class DegenerateGradientError(AcdesignError):
    """Mean curve is flat at the target dose; target-dose gradients undefined."""


class SingularInformationError(AcdesignError):
    """Fisher information undefined or infinite at the requested point."""


class EstimabilityError(AcdesignError):
    """Requested contrast is not in the range of the information matrix."""


class DesignError(AcdesignError):
    """Malformed design (weights, arms or support violate invariants)."""


class UnsupportedCaseError(AcdesignError):
    """Well-posed input outside the cases this implementation covers."""


class InfeasibleGeometryError(AcdesignError):
    """A closed-form construction has no solution in the dose range."""


class ScenarioError(AcdesignError):
    """Scenario or design file failed to parse or validate."""
