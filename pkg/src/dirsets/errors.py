"""Exception hierarchy shared across the package.

The CLI maps these onto process exit codes: config errors exit 1,
resource errors exit 2, failed scenario assertions exit 3.
"""


class DirsetsError(Exception):
    """Base class for all package errors."""


class DomainError(DirsetsError, ValueError):
    """A mathematical precondition was violated (bad point, bad index set)."""


class ConfigError(DirsetsError, ValueError):
    """A parameter or declarative descriptor is malformed or out of range."""


class ParseError(ConfigError):
    """A file or spec string could not be parsed; carries a location."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ResourceError(DirsetsError, RuntimeError):
    """The requested computation exceeds a configured budget."""


class ScenarioCheckFailed(DirsetsError, AssertionError):
    """A reproduce scenario ran fine but one of its claims did not hold."""

    def __init__(self, scenario: str, failures: list[str]):
        self.scenario = scenario
        self.failures = list(failures)
        super().__init__(f"{scenario}: " + "; ".join(failures))
