"""Exception types shared across the package."""


class DomainError(ValueError):
    """An input violates a documented precondition (wrong sign, range, key...)."""


class InfeasibleDesignError(ValueError):
    """No valid cavity design exists for the requested constraints."""

    def __init__(self, message, total_kappa=None, kappa_loss=None):
        super().__init__(message)
        self.total_kappa = total_kappa
        self.kappa_loss = kappa_loss


class FitError(RuntimeError):
    """A spectrum fit cannot produce a meaningful estimate."""


class IngestError(ValueError):
    """A data file is unusable (bad header, too few valid rows...)."""


class DimensionCapError(ValueError):
    """Requested Hilbert space exceeds the configured dimension cap."""
