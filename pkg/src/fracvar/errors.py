"""Exception types shared across the package."""


class FracvarError(Exception):
    """Base class for all package errors."""


class DomainError(FracvarError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class InputError(FracvarError, ValueError):
    """Inputs are structurally invalid or mutually inconsistent."""


class ConfigurationError(FracvarError, ValueError):
    """An operation was configured in an unsupported way."""


class NumericError(FracvarError, ArithmeticError):
    """A computation produced non-finite values or failed to converge."""


class AccuracyError(FracvarError, ArithmeticError):
    """A result could not be computed to the promised accuracy."""


class DegeneracyError(FracvarError, ValueError):
    """A constraint or operator is degenerate where the method needs it not to be."""


class CoercivityError(FracvarError, RuntimeError):
    """Minimization diverged; the functional is not coercive on the trial space."""


class ParseError(FracvarError, ValueError):
    """A configuration document failed validation.

    Carries the list of field-level messages in ``errors``.
    """

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))
