"""Exception types shared across the package."""


class DerhamGapError(ValueError):
    """Base class for package-specific errors."""


class ZeroOperatorError(DerhamGapError):
    """Operator is zero; the requested constant is undefined."""


class GapDomainError(DerhamGapError):
    """Shift parameter lies outside the guaranteed spectral gap."""


class ResolventAtZeroError(DerhamGapError):
    """Resolvent requested at 0 while the operator has a nontrivial kernel."""


class ComplexPropertyError(DerhamGapError):
    """A pair of operators fails the composition-is-zero requirement."""

    def __init__(self, measured: float):
        self.measured = measured
        super().__init__(f"composition is not zero: max|A1*A0| = {measured:.3e}")


class MaskViolationError(DerhamGapError):
    """Evaluation requested on or too close to a map's non-smooth locus."""


class NonConvergenceError(DerhamGapError):
    """Iterative eigensolver failed to converge within its iteration cap."""

    def __init__(self, message: str, residual: float):
        self.residual = residual
        super().__init__(f"{message} (last residual {residual:.3e})")


class GridBudgetError(DerhamGapError):
    """Requested grid exceeds the configured degree-of-freedom budget."""


class SchemaError(DerhamGapError):
    """A CSV/config file does not match its documented schema."""
