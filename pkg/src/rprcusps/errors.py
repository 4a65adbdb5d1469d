"""Exception hierarchy shared by all modules."""


class RprError(Exception):
    """Base class for every error raised by this package."""


class GeometryError(RprError, ValueError):
    """Manipulator parameters do not describe a valid 3-RPR design."""


class TriangleInequalityViolated(GeometryError):
    pass


class CollinearBase(GeometryError):
    pass


class NonPositiveSide(GeometryError):
    pass


class DegenerateLeg(RprError, ValueError):
    """A leg length collapsed below epsilon, so its angle is undefined.

    The computed lengths are kept on the exception so callers can still
    use them (the lengths themselves are well defined).
    """

    def __init__(self, message, l2=None, l3=None, legs=()):
        super().__init__(message)
        self.l2 = l2
        self.l3 = l3
        self.legs = tuple(legs)


class ZeroAdjoint(RprError, ArithmeticError):
    """Every row of the adjugate vanishes (Jacobian rank <= 1)."""


class PolynomialError(RprError, ArithmeticError):
    pass


class PrecisionMismatch(PolynomialError):
    pass


class PrecisionExhausted(PolynomialError):
    """The working precision is too low to finish a numerical step.

    ``stage`` names the step that failed so the CLI can report it.
    """

    def __init__(self, message, stage=None):
        super().__init__(message)
        self.stage = stage


class LeadingCoefficientCollapse(PolynomialError):
    pass


class IdenticallyZeroSlice(PolynomialError):
    pass


class DegenerateResultant(PolynomialError):
    """The resultant vanishes identically (common factor in the eliminated variable)."""
