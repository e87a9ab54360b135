"""Exception hierarchy for the recycle reactor package."""


class ReactorError(Exception):
    """Base class for all package errors."""


class DomainError(ReactorError, ValueError):
    """A state lies outside the domain of the rate law."""


class IntegrationDomainError(DomainError):
    """An integrator stage left the admissible domain of the rate law."""


class NonFiniteError(ReactorError, ArithmeticError):
    """The integrated state became NaN or infinite."""


class NoPeriodicAttractor(ReactorError):
    """No period up to ``k_max`` recurs (chaotic, quasi-periodic or divergent)."""


class NewtonDivergence(ReactorError):
    """Newton refinement of a periodic orbit failed to converge."""


class WindowNotBracketed(ReactorError):
    """The period-change indicator does not change across a bracket."""


class TooFewPeaks(ReactorError):
    """A profile has fewer than two peaks."""


class ConfigError(ReactorError):
    """Base class for configuration problems (CLI exit status 1)."""


class UnknownKey(ConfigError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class ParseError(ConfigError, ValueError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class InvariantViolation(ConfigError, ValueError):
    """A parameter value breaks a documented invariant."""


class DegenerateRangeWarning(UserWarning):
    """A grid has N_max == N_min, so it cannot be normalized to grayscale."""
