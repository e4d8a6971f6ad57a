"""Exception types shared across the package."""


class SpecError(ValueError):
    """A group spec string or parameter set could not be accepted."""


class UnknownSymbol(ValueError):
    def __init__(self, symbol):
        super().__init__(f"unknown generator symbol: {symbol}")
        self.symbol = symbol


class BudgetExceeded(RuntimeError):
    def __init__(self, what, reached, budget):
        super().__init__(f"{what}: budget of {budget} exceeded (reached {reached})")
        self.reached = reached
        self.budget = budget


class UncertifiedDistance(RuntimeError):
    """A decision needs a distance the ball cannot certify; build a larger ball."""


class NotATree(ValueError):
    """Raised by constructions that only make sense on a free group with free basis."""


class StructuralError(RuntimeError):
    """An invariant guaranteed by construction failed. Always a bug signal."""
