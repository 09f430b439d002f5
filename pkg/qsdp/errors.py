from __future__ import annotations


class QsdpError(Exception):
    """Base class for every error raised by qsdp."""


class ShapeMismatchError(QsdpError, ValueError):
    pass


class NotHermitianError(QsdpError, ValueError):
    def __init__(self, i: int, j: int, asymmetry: float | None = None):
        self.entry = (i, j)
        self.asymmetry = asymmetry
        msg = f"matrix is not Hermitian at entry ({i}, {j})"
        if asymmetry is not None:
            msg += f" (|a_ij - conj(a_ji)| = {asymmetry:.3g})"
        super().__init__(msg)


class InvalidStateError(QsdpError, ValueError):
    pass


class TargetNotPureError(QsdpError, ValueError):
    pass


class ProblemFileError(QsdpError, ValueError):
    def __init__(self, message: str, field: str | None = None):
        self.field = field
        super().__init__(f"{field}: {message}" if field else message)


class SolverFailure(QsdpError):
    """The engine stopped without a usable answer (MaxIterations / NumericalFailure)."""

    def __init__(self, message: str, solution=None):
        self.solution = solution
        super().__init__(message)


class InfeasibleDataError(QsdpError):
    """Measurement data admit no quantum state; ``certificate`` proves it."""

    def __init__(self, message: str, certificate=None, outcome=None):
        self.certificate = certificate
        self.outcome = outcome
        super().__init__(message)


class InfeasibleSpecError(QsdpError):
    """Marginal targets admit no global state; ``outcome`` holds the verdict."""

    def __init__(self, message: str, outcome=None):
        self.outcome = outcome
        super().__init__(message)


class CertificateUnavailable(QsdpError):
    def __init__(self, message: str, delta_star: float | None = None):
        self.delta_star = delta_star
        super().__init__(message)
