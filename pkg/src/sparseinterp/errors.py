"""Exception and warning types raised across the package."""


class InterpError(Exception):
    """Base class for all package errors."""


class InputError(InterpError, ValueError):
    """Malformed or inconsistent input."""


class ConfigurationError(InterpError):
    """Invalid configuration, e.g. a base point that collides two exponents."""


class NumericalError(InterpError, ArithmeticError):
    """An iterative kernel failed to converge."""


class SolveError(NumericalError):
    """A linear system was exactly singular."""


class ExtractionError(InterpError):
    """Atoms or weights could not be extracted from a moment matrix."""


class RankDeficiencyError(ExtractionError):
    """The moment matrix has lower rank than the requested number of atoms."""


class DecodeError(InterpError):
    """An atom could not be mapped back to an integer exponent."""


class NotApplicableError(InterpError):
    """A method refuses an instance because it exceeds its size guard."""


class IllConditionedWarning(UserWarning):
    """A linear solve was performed on a badly conditioned matrix."""


class ExtractionWarning(UserWarning):
    """Recovered weights carried a non-negligible imaginary part."""
