"""Exception types shared across the package."""


class InvalidInputError(ValueError):
    """Raised when a parameter is outside its documented range."""


class CriticalExponentError(ValueError):
    """Raised when a control exponent sits at (or straddles) a critical value.

    At a critical exponent neither iteration direction contracts, so no
    bound of the given shape exists.
    """


class DivergentSeriesError(ArithmeticError):
    """Raised when a comparison series has step ratio >= 1 for a nonzero term."""


class UnboundablePerturbationError(ArithmeticError):
    """Raised when calibration meets a residual the control function cannot cover.

    Happens when the unit control vanishes at a grid point where the measured
    residual is above the rounding floor: no finite theta makes the control
    dominate there.
    """
