"""Exception hierarchy shared by all modules."""


class ContractError(ValueError):
    """A documented precondition or invariant was violated by the caller."""


class LuttingerInstabilityError(ContractError):
    """|g(p,t)| >= omega(p,t): the quadratic theory has no ground state."""


class CDInstabilityError(ContractError):
    """v_s |p| <= |chi|: the controlled spectrum turns imaginary."""


class IntegrationError(RuntimeError):
    """Adaptive step control failed (step underflow or solver breakdown)."""

    def __init__(self, message, t=None):
        if t is not None:
            message = f"{message} (at t={t:.6g})"
        super().__init__(message)
        self.t = t


class ConfigError(ValueError):
    """Malformed or invalid run configuration."""
