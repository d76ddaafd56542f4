"""Exception hierarchy for qwspec."""


class QWSpecError(Exception):
    """Base class for all library errors."""


class GraphError(QWSpecError, ValueError):
    """Malformed graph input (bad vertex index, degenerate torus, ...)."""


class ShiftError(QWSpecError, ValueError):
    """Invalid arc permutation or one-form."""

    def __init__(self, message, arc=None):
        super().__init__(message)
        self.arc = arc


class CoinError(QWSpecError, ValueError):
    """Coin matrices of the wrong size, non-unitary, or bad (kappa, kappa', p)."""


class SpectrumViolation(CoinError):
    """A coin eigenvalue lies near neither kappa nor kappa'."""

    def __init__(self, message, vertex=None):
        super().__init__(message)
        self.vertex = vertex


class MultiplicityViolation(CoinError):
    """The kappa-eigenspace of a coin does not have dimension p."""

    def __init__(self, message, vertex=None):
        super().__init__(message)
        self.vertex = vertex


class LiftError(QWSpecError, ValueError):
    """Inconsistent (mu, lambda) pair or a vanishing lifted eigenvector."""


class OracleMismatch(QWSpecError):
    """Predicted spectrum disagrees with the dense eigendecomposition."""


class CapExceeded(QWSpecError, ValueError):
    """Matrix larger than the configured dense-eigensolver cap."""
