"""Exception hierarchy shared by every module of the package."""


class LienardError(Exception):
    """Base class for all numerical and contract errors raised here."""


class DomainError(LienardError, ValueError):
    """An argument lies outside the declared domain of a function."""

    def __init__(self, message, x=None):
        super().__init__(message)
        self.x = x


class PoleError(LienardError, ValueError):
    """A kernel pole (or a singular point of an integrand) was hit."""

    def __init__(self, message, poles=()):
        super().__init__(message)
        self.poles = tuple(poles)


class SingularCoefficientError(LienardError, ValueError):
    """A coefficient function vanishes where it is used as a divisor."""

    def __init__(self, message, x=None):
        super().__init__(message)
        self.x = x


class QuadratureError(LienardError, ArithmeticError):
    """Adaptive quadrature did not reach the requested accuracy."""

    def __init__(self, message, estimate=float("nan"), error=float("nan")):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class BracketError(LienardError, ValueError):
    """The supplied interval does not bracket a sign change."""


class IntegrationError(LienardError, RuntimeError):
    """The reference ODE integrator gave up (step size underflow, blow-up)."""

    def __init__(self, message, t_last=None, state_last=None):
        super().__init__(message)
        self.t_last = t_last
        self.state_last = state_last


class TimeRangeError(LienardError, ValueError):
    """Requested times fall outside the span covered by a solution."""


class WindowError(LienardError, ValueError):
    """Two trajectories do not share a common time window."""
