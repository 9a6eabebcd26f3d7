"""Exception hierarchy shared by every module."""


class BitensionError(Exception):
    """Base class for all errors raised by the package."""


class DomainError(BitensionError, ValueError):
    """A function was evaluated outside its open interval of validity."""


class StencilOutsideDomain(DomainError):
    """A finite-difference stencil reaches past the function's domain."""


class PoleContactError(DomainError):
    """The domain warp vanishes (or is undefined) at a sample point."""


class DerivativeOrderError(BitensionError, ValueError):
    """A derivative of an order the bundle does not carry was requested."""


class QuadratureError(BitensionError, ArithmeticError):
    """Adaptive quadrature hit the subdivision cap or a non-finite value."""


class GridError(BitensionError, ValueError):
    """Invalid grid parameters."""


class TargetIntervalError(DomainError):
    """A profile leaves the interval where the target metric is defined."""
