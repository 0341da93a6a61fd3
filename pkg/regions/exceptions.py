class RegionError(Exception):
    """Base class for region algebra errors."""


class InvalidSharpness(RegionError, ValueError):
    """Sharpness must be a positive finite real (a positive integer for even powers)."""


class EmptyOperandList(RegionError, ValueError):
    """An n-ary operation received no operands."""


class InvalidTolerance(RegionError, ValueError):
    """A tolerance or clip value is out of range."""


class NotUnivariate(RegionError, ValueError):
    """A smooth min/max operand depends on y."""


class NoSignChange(RegionError):
    """The log-field has the same sign at both ends of a bisection bracket."""

    def __init__(self, x, y_lo, y_hi, low_value, high_value):
        self.x = x
        self.y_lo = y_lo
        self.y_hi = y_hi
        super().__init__(
            f"No sign change of the log-field at x={x} between y={y_lo} ({low_value}) "
            f"and y={y_hi} ({high_value})"
        )
