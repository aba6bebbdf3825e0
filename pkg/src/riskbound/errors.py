"""Exception hierarchy for the riskbound package."""


class RiskboundError(Exception):
    """Base class for all riskbound errors."""


class UnknownFamily(RiskboundError):
    """Requested distortion family is not in the catalog."""


class ParamOutOfDomain(RiskboundError):
    """A family parameter violates its admissible range."""


class ModeContractViolation(RiskboundError):
    """A transform mode was requested with an incompatible distortion."""


class BadTruncationPoint(RiskboundError):
    """Truncation level F_t outside the range the mode admits."""


class DomainError(RiskboundError):
    """Evaluation requested outside a function's declared domain."""


class NonFiniteValue(RiskboundError):
    """A function evaluated to NaN or infinity where a finite value is required."""


class NoSignChange(RiskboundError):
    """Root bracket does not straddle a sign change."""


class NoAnalyticForm(RiskboundError):
    """No closed-form envelope is known; fall back to the numeric path."""


class NonInvertibleWeight(RiskboundError):
    """Quantile recovery requested but the weight antiderivative has no inverse."""


class DegenerateResult(RiskboundError):
    """The worst case is attained by every feasible distribution; no quantile stored."""


class NonConvergent(RiskboundError):
    """Successive quadrature refinements disagree beyond tolerance."""


class BoundViolated(RiskboundError):
    """A feasible distribution exceeded the computed supremum (engine/oracle bug)."""

    def __init__(self, message, quantile=None, shape=None, observed=None, bound=None):
        super().__init__(message)
        self.quantile = quantile
        self.shape = shape
        self.observed = observed
        self.bound = bound


class MalformedCsv(RiskboundError):
    """CSV structure error (row length mismatch, missing header/column)."""


class NonNumericCell(RiskboundError):
    """A selected CSV cell is neither blank nor numeric."""


class EmptySeries(RiskboundError):
    """No usable observations after parsing."""


class TooFewObservations(RiskboundError):
    """Not enough observations to estimate the requested moments."""
