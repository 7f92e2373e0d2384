# tools/errors.py

from config import EXIT_INSTABILITY, EXIT_SOLVER, EXIT_USAGE


class LabError(Exception):
    """
    Base class for every failure the laboratory reports deliberately.

    `exit_code` is what `main.py` returns to the shell when the error
    escapes a subcommand.
    """

    exit_code = EXIT_USAGE


class UsageError(LabError):
    """Missing or malformed run configuration."""


class ConfigurationError(LabError):
    """Numerical settings that cannot produce a meaningful result."""


class ParameterError(LabError, ValueError):
    """Material or reduced parameters outside their admissible range."""


class DomainError(LabError, ValueError):
    """Argument outside the domain of the operation."""


class PreconditionError(LabError, ValueError):
    """Input violates a documented precondition (unit director, admissible B)."""


class SingularPointError(LabError, ValueError):
    """Evaluation at the point defect of a singular field."""


class NearSingularError(LabError, ValueError):
    """Division by a vanishing profile value."""


class SolverFailureError(LabError):
    exit_code = EXIT_SOLVER

    def __init__(self, message: str, residual: float, iterations: int = 0):
        super().__init__(f"{message} (residual={residual:.3e}, iterations={iterations})")
        self.residual = residual
        self.iterations = iterations


class InstabilityError(LabError):
    exit_code = EXIT_INSTABILITY

    def __init__(self, message: str, step: int, increase: float = 0.0):
        super().__init__(f"{message} (step={step}, increase={increase:.3e})")
        self.step = step
        self.increase = increase


class DivergenceError(InstabilityError):
    """NaN or Inf appeared in the relaxed field."""
