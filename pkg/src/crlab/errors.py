"""Exception types shared across the package."""


class CRLabError(Exception):
    """Base class for all package errors."""


class GridMismatch(CRLabError):
    pass


class NotHolomorphic(CRLabError):
    pass


class InsufficientResolution(CRLabError):
    pass


class ComplexTangency(CRLabError):
    """The tangent plane of the surface is a complex line at the query point."""


class SingularConfiguration(CRLabError):
    pass


class Diverged(CRLabError):
    pass


class DomainEscape(CRLabError):
    pass


class ParameterOutOfRange(CRLabError):
    pass


class NonConvergence(CRLabError):
    pass


class RankDeficiency(CRLabError):
    pass


class ChartTooSmall(CRLabError):
    pass


class SingularLeafField(CRLabError):
    pass


class NoTouchingLine(CRLabError):
    pass


class BoundaryEscape(CRLabError):
    def __init__(self, message, tau=None):
        super().__init__(message)
        self.tau = tau


class DegenerateDisc(CRLabError):
    pass


class NonHyperbolicTangency(CRLabError):
    pass


class ConfigError(CRLabError):
    pass
