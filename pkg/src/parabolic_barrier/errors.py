"""Exceptions raised by the library."""


class PPBError(Exception):
    """Base class for all library errors."""


class RepresentationMismatch(PPBError):
    """Superposed states carry different quadratic phase signs."""


class NodalRegion(PPBError):
    """The wavefunction density is below the node threshold.

    ``mask`` holds the boolean nodal mask when the failing call was vectorized.
    """

    def __init__(self, msg="point lies in a nodal region", mask=None):
        super().__init__(msg)
        self.mask = mask


class OriginSingular(PPBError):
    """Hyperbolic frame quantities are undefined at the origin."""


class NotIrrotational(PPBError):
    def __init__(self, msg, violation):
        super().__init__(msg)
        self.violation = violation


class NotSolenoidal(PPBError):
    def __init__(self, msg, violation):
        super().__init__(msg)
        self.violation = violation


class NoMonomialFit(PPBError):
    def __init__(self, msg, residual):
        super().__init__(msg)
        self.residual = residual
