"""Exception and warning taxonomy shared by all kdvlab modules.

Every raised error names the module-level failure mode and carries enough
context (field, step index, diagnostics) for the CLI to surface it.
"""

from __future__ import annotations


class KdvLabError(Exception):
    """Base class for all kdvlab errors."""


class InvalidArgumentError(KdvLabError, ValueError):
    """A precondition on an operation argument was violated."""


class UnsupportedIndexError(KdvLabError, ValueError):
    """Sobolev index outside the supported range [-1, 6]."""


class OutOfRangeError(KdvLabError, ValueError):
    """Parameter outside the admissible range (e.g. rho <= 1)."""


class SingularFrequencyError(KdvLabError, ArithmeticError):
    """The characteristic determinant is numerically zero at this frequency."""

    def __init__(self, rho: float, magnitude: float, scale: float):
        self.rho = rho
        self.magnitude = magnitude
        self.scale = scale
        super().__init__(
            f"characteristic determinant ~ 0 at rho={rho!r} "
            f"(|det|={magnitude:.3e}, scale={scale:.3e})"
        )


class InternalError(KdvLabError, RuntimeError):
    """An internal contract failed (e.g. root polisher did not converge)."""


class SolverFailureError(KdvLabError, RuntimeError):
    """The linear solver failed (singular system)."""


class BlowupSuspectedError(KdvLabError, RuntimeError):
    """Newton iteration diverged inside a nonlinear time step."""

    def __init__(self, step: int, message: str = ""):
        self.step = step
        super().__init__(message or f"Newton divergence at time step {step}; blowup suspected")


class NonContractiveError(KdvLabError, RuntimeError):
    """Picard iteration is not contracting (horizon too large for the data size)."""

    def __init__(self, diagnostics=None, message: str = ""):
        self.diagnostics = diagnostics
        super().__init__(message or "fixed-point iteration is not contracting")


class NoConvergenceError(KdvLabError, RuntimeError):
    """Iteration budget exhausted before reaching tolerance."""

    def __init__(self, diagnostics=None, message: str = ""):
        self.diagnostics = diagnostics
        super().__init__(message or "iteration limit reached without convergence")


class UndefinedRatioError(KdvLabError, ZeroDivisionError):
    """A probe ratio has a zero denominator."""


class NotApplicableError(KdvLabError, ValueError):
    """The requested check does not apply (e.g. compatibility for s < 0)."""


class ConfigError(KdvLabError, ValueError):
    """A run configuration failed schema validation."""

    def __init__(self, field_path: str, message: str):
        self.field_path = field_path
        super().__init__(f"config error at '{field_path}': {message}")


class AccuracyWarning(UserWarning):
    """Result is returned but finite-difference noise may dominate."""


class TruncationWarning(UserWarning):
    """Quadrature truncated before reaching the target tolerance."""


class SingularFrequencyWarning(UserWarning):
    """A quadrature panel passed near a zero of the characteristic determinant."""
