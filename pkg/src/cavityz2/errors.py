"""Exception types shared across the package."""


class CavityError(Exception):
    """Base class for all package errors."""


class SingularParametersError(CavityError, ValueError):
    """Raised when g0 or N vanish and the reduced model is undefined."""


class PoleError(CavityError, ValueError):
    """Raised when the rate-equation nonlinearity hits a pole."""

    def __init__(self, msg, P=None):
        super().__init__(msg)
        self.P = P


class NoTransitionError(CavityError, ValueError):
    """Raised when no critical coupling exists for the given rates."""


class DegenerateCaseError(CavityError, ValueError):
    pass


class StiffnessError(CavityError, RuntimeError):
    """Raised when an ODE integration fails (step-size underflow etc.)."""

    def __init__(self, msg, t=None, state=None):
        super().__init__(msg)
        self.t = t
        self.state = state


class NumericalBlowupError(CavityError, FloatingPointError):
    """Non-finite derivative encountered; carries the last valid state."""

    def __init__(self, msg, t=None, state=None):
        super().__init__(msg)
        self.t = t
        self.state = state


class InvariantViolationError(CavityError, RuntimeError):
    pass


class CutoffSaturationError(CavityError, RuntimeError):
    """Photon truncation too small for the requested drive."""


class InconclusiveError(CavityError, RuntimeError):
    """A classification could not be made (trajectory too short, bad bracket)."""


class ConfigError(CavityError, ValueError):
    """Invalid configuration document or field."""

    def __init__(self, msg, field=None, line=None, column=None):
        super().__init__(msg)
        self.field = field
        self.line = line
        self.column = column
