"""Exception hierarchy shared by all decaykit modules."""


class DecayKitError(Exception):
    """Base class for every error raised by decaykit."""


class QuadratureFailure(DecayKitError):
    """Requested tolerance was not reached.

    Carries the best estimate so callers can still inspect it.
    """

    def __init__(self, message, value=None, error_estimate=None):
        super().__init__(message)
        self.value = value
        self.error_estimate = error_estimate


class IntegrandFailure(DecayKitError):
    """The integrand returned NaN or Inf."""

    def __init__(self, message, abscissa):
        super().__init__(message)
        self.abscissa = abscissa


class PoleProximity(DecayKitError):
    """Evaluation point is numerically on a pole (or zero) of the model."""


class UnwrapAmbiguity(DecayKitError):
    """Adjacent phase samples are too far apart to continue the branch."""


class TZero(DecayKitError):
    """t = 0 in a grid where contour closure is undefined."""


class CutoffTooSmall(DecayKitError):
    """Truncated transform tail exceeds the allowed tolerance."""


class GuardViolation(DecayKitError):
    """Contour passes too close to a zero or pole."""


class NonInteger(DecayKitError):
    """Winding integral did not land on an integer."""

    def __init__(self, message, raw=None):
        super().__init__(message)
        self.raw = raw


class InsufficientPoints(DecayKitError):
    """Fit window holds too few usable samples."""


class NonPositiveProbability(DecayKitError):
    """Probability sample too small (or negative) to take its logarithm."""


class NoExponentialWindow(DecayKitError):
    """No 5-point window of the curve follows an exponential law within tol."""


class ScenarioError(DecayKitError):
    """Scenario file failed validation; ``field`` names the offending key."""

    def __init__(self, message, field=None, line=None):
        where = []
        if field:
            where.append(f"field '{field}'")
        if line is not None:
            where.append(f"line {line}")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)
        self.field = field
        self.line = line
