"""Exception hierarchy shared by all modules."""


class OscillabError(Exception):
    """Base class for all library errors."""


class NumericalError(OscillabError):
    """A numerical procedure could not produce a trustworthy result."""


class NonFinite(NumericalError):
    def __init__(self, t, message="state or derivative became non-finite"):
        super().__init__(f"{message} at t={t!r}")
        self.t = t


class StepUnderflow(NumericalError):
    def __init__(self, t, h):
        super().__init__(f"required step {h!r} below 1e-14*|t| at t={t!r}")
        self.t = t
        self.h = h


class OutOfSpan(OscillabError, ValueError):
    pass


class RootNotBracketed(NumericalError):
    pass


class QuadratureFailure(NumericalError):
    pass


class DegenerateFit(NumericalError):
    pass


class EndpointsSameSide(OscillabError, ValueError):
    pass


class NoBracketProgress(NumericalError):
    pass


class IncommensuratePeriods(OscillabError, ValueError):
    pass


class NoConvergence(NumericalError):
    pass


class SingularJacobian(NumericalError):
    pass
