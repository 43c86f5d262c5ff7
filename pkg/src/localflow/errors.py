"""Exception hierarchy shared by all modules.

Each class maps to one CLI exit code: input errors exit 2, convention
errors exit 3, numerical aborts exit 4.
"""


class LocalFlowError(Exception):
    exit_code = 1


class InputError(LocalFlowError, ValueError):
    """Malformed or out-of-domain input."""

    exit_code = 2


class ResourceError(InputError):
    """Request exceeds the dense-oracle size limit."""


class ConventionError(LocalFlowError, ValueError):
    """Input is well-formed but breaks a circuit convention."""

    exit_code = 3


class NumericalError(LocalFlowError, ArithmeticError):
    exit_code = 4


class NodeError(NumericalError):
    """Configuration sits in a node of the pilot wave, where velocity is undefined."""

    def __init__(self, message, time=None):
        super().__init__(message)
        self.time = time


class DegeneracyError(InputError):
    """Construction would produce the zero wavefunction."""
