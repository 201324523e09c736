"""Exception hierarchy shared by all modules."""


class WeakOscError(Exception):
    """Base class for every error raised by the package."""


class DomainError(WeakOscError, ValueError):
    """An argument lies outside the domain where an operation is defined."""


class PreconditionError(WeakOscError, ValueError):
    """An operation was called with inputs that violate its contract."""


class IntegrationError(WeakOscError):
    """The ODE integrator could not complete the run."""

    def __init__(self, message: str, t_last: float):
        super().__init__(f"{message} (last t = {t_last:.17g})")
        self.t_last = t_last


class OverflowSentinel(IntegrationError):
    """The accumulated log-weight exceeded the overflow guard."""


class TailDivergenceError(WeakOscError):
    """A tail integral could not be extrapolated because it does not converge."""


class ConfigError(WeakOscError):
    """A scenario configuration file is malformed."""

    def __init__(self, message: str, line: int | None = None, key: str | None = None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if key is not None:
            where.append(f"key {key!r}")
        prefix = f"[{', '.join(where)}] " if where else ""
        super().__init__(prefix + message)
        self.line = line
        self.key = key
