"""Exception types shared across the toolkit."""


class ShiftChaosError(Exception):
    """Base class for all toolkit errors."""


class BetaDepthExceeded(ShiftChaosError):
    """A beta-shift query needs more of the expansion of 1 than is stored."""


class NotPeriodic(ShiftChaosError):
    """A word's infinite repetition is not admissible in the system."""


class BadWeights(ShiftChaosError):
    """Convex-combination weights are negative or do not sum to 1."""


class DepthMismatch(ShiftChaosError):
    """An observable needs deeper cylinder weights than are available."""


class AnchorNotOnPolyline(ShiftChaosError):
    """The designated split measure is not a vertex of the polyline."""


class NoPath(ShiftChaosError):
    """No connecting word of the requested exact length exists."""


class BudgetTooSmall(ShiftChaosError):
    """A construction was asked for fewer steps than its proof budget.

    The attribute ``budget`` reports the least admissible length.
    """

    def __init__(self, budget, message=None):
        self.budget = budget
        super().__init__(message or f"length below construction budget {budget}")


class NotDistal(ShiftChaosError):
    """A generator orbit contains a fixed point, so no distal pair exists."""


class ApproximantFailure(ShiftChaosError):
    """A periodic approximant could not be realized inside the ambient system."""


class NoExternalWord(ShiftChaosError):
    """The subsystem already exhausts the ambient language."""


class BudgetExceeded(ShiftChaosError):
    """Plan inequalities cannot be satisfied within the requested budget.

    The attribute ``constraint`` names the binding inequality.
    """

    def __init__(self, constraint, message=None):
        self.constraint = constraint
        super().__init__(message or f"plan budget exceeded; binding constraint: {constraint}")


class LevelOutOfRange(ShiftChaosError):
    """The requested Birkhoff level lies outside the attainable interval."""


class PlanMismatch(ShiftChaosError):
    """A point file does not match the plan it claims to come from."""
