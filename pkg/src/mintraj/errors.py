"""Exception hierarchy shared by all mintraj modules."""


class MintrajError(Exception):
    """Base class for every error raised by this package."""


class ScenarioError(MintrajError, ValueError):
    """Raw scenario data failed validation."""


class LimitOrderViolation(ScenarioError):
    pass


class InitialSpeedOutOfBounds(ScenarioError):
    pass


class NonpositiveHorizon(ScenarioError):
    pass


class DegenerateDenominator(MintrajError, ArithmeticError):
    pass


class NegativeRadicand(MintrajError, ArithmeticError):
    pass


class InfeasibleProblem(MintrajError):
    """No admissible trajectory reaches the terminal position in time."""

    def __init__(self, message, L=None, L_max=None):
        super().__init__(message)
        self.L = L
        self.L_max = L_max


class PlanningError(MintrajError):
    """A profile constructor was handed data outside its domain.

    Raised only when the classification upstream is inconsistent with the
    constructor that was invoked.
    """


class JunctionOutOfRange(PlanningError):
    pass


class NegativeDiscriminant(PlanningError):
    pass


class NegativePsi(PlanningError):
    pass


class TimeOutOfRange(MintrajError, ValueError):
    pass


class NoFeasibleCandidate(MintrajError):
    pass
