"""Shared exception types."""


class DomainError(ValueError):
    """A coordinate lies outside the chart domain."""


class PreconditionError(ValueError):
    """An argument violates a documented precondition."""


class NumericalError(RuntimeError):
    """A linear-algebra or conditioning failure."""


class IntegrationError(RuntimeError):
    """An ODE solve failed (step-size underflow or solver breakdown)."""


class ChartExitError(IntegrationError):
    """A geodesic left the chart domain before reaching its target arclength."""

    def __init__(self, s_exit):
        self.s_exit = float(s_exit)
        super().__init__(f"geodesic left the chart domain at s = {self.s_exit:.6g}")


class DegenerateFrameError(RuntimeError):
    """Gram-Schmidt could not produce a full normal frame.

    Re-seed the reference basis (the ``seed`` argument of ``frame_at``) and
    retry.
    """


class DegenerateRadiusError(ValueError):
    """The tube radius is zero where a positive radius is required."""


class InsufficientDataError(ValueError):
    """Too few usable points for a least-squares fit."""
