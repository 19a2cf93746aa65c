"""Exception hierarchy shared by every module.

The CLI maps these onto distinct exit statuses, so library code raises the
most specific class that applies.
"""


class LctCapError(Exception):
    """Base class for all toolkit errors."""


class InvalidParameterError(LctCapError, ValueError):
    """A parameter is outside the domain of the requested operation."""


class DeterminantError(InvalidParameterError):
    """An LCT parameter matrix does not have unit determinant."""


class NumericalPreconditionError(LctCapError):
    """Input data cannot be processed accurately (grid too coarse, poor decay, aliasing)."""


class GridError(NumericalPreconditionError):
    """The sampling grid cannot represent the requested operation."""


class ConfigError(LctCapError, ValueError):
    """A run configuration is malformed; ``problems`` lists every offending field."""

    def __init__(self, problems):
        if isinstance(problems, str):
            problems = [problems]
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))
