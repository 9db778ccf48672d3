"""Exception types shared across the package."""


class SizeLimitError(ValueError):
    """A combinatorial size guard was exceeded (e.g. group enumeration cap)."""


class SingularityError(ValueError):
    """A scattering-factor denominator fell below the singularity floor.

    Callers should treat this as "move the contour / redraw the point",
    never as a NaN to propagate.
    """


class ConvergenceError(RuntimeError):
    """Adaptive refinement hit its resolution cap without converging.

    Carries the last two estimates so callers can report diagnostics.
    """

    def __init__(self, message, estimates=None):
        super().__init__(message)
        self.estimates = estimates
