"""Exception hierarchy shared by all modules."""


class RelCosmoError(Exception):
    """Base class for every error raised by this package."""


class DomainError(RelCosmoError, ValueError):
    """An event (or a finite-difference stencil point) lies outside a chart."""


class DegenerateMetricError(RelCosmoError, ValueError):
    """The metric determinant is too small to invert (horizon or radical)."""


class InvalidInputError(RelCosmoError, ValueError):
    pass


class MixedCausalTypeError(RelCosmoError, ValueError):
    """A curve changes causal character inside a quadrature panel."""


class SingularApproachError(RelCosmoError, RuntimeError):
    """Step size underflow while integrating; carries the last good state."""

    def __init__(self, message, last_event=None, last_parameter=None):
        super().__init__(message)
        self.last_event = last_event
        self.last_parameter = last_parameter


class SingularStateError(RelCosmoError, ValueError):
    """Scale factor is zero or negative."""


class ExtensionRegionError(DomainError):
    """Point of the global de Sitter chart not covered by the static patch."""


class InconsistentInitialDataError(RelCosmoError, ValueError):
    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class UnsupportedMetricError(RelCosmoError, ValueError):
    pass


class UnknownEntryError(RelCosmoError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else "unknown entry"
