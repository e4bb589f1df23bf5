"""Exception types shared across loclab."""


class LoclabError(Exception):
    """Base class for all loclab errors."""


class DimensionMismatch(LoclabError, ValueError):
    pass


class NotHermitian(LoclabError, ValueError):
    pass


class ZeroProbabilityUpdate(LoclabError):
    """Raised when an update is requested for an outcome of (near) zero probability.

    The update rule of a state-measurement theory is a partial function; this is
    how its undefined branch surfaces.
    """

    def __init__(self, probability, threshold):
        super().__init__(
            f"outcome probability {probability:.3e} is below threshold {threshold:.1e}"
        )
        self.probability = probability
        self.threshold = threshold


class TheoryMismatch(LoclabError, ValueError):
    pass


class NotIsometry(LoclabError, ValueError):
    pass


class NotTracePreserving(LoclabError, ValueError):
    pass


class InvalidOutputState(LoclabError):
    """A transformation family produced something that is not a state.

    ``violation`` is a non-negative magnitude (e.g. minus the smallest eigenvalue
    of a would-be density matrix) and ``details`` carries diagnostics.
    """

    def __init__(self, message, violation, details=None):
        super().__init__(message)
        self.violation = float(violation)
        self.details = dict(details or {})


class NotIndistinguishable(LoclabError, ValueError):
    pass


class UnknownZooEntry(LoclabError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else "unknown zoo entry"
