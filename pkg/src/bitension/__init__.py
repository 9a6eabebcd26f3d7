"""Tension and bitension fields of rotationally symmetric maps between
warped-product surfaces, with closed-form solution families and a
classifier for linear sphere profiles."""

from .errors import (
    BitensionError,
    DerivativeOrderError,
    DomainError,
    GridError,
    PoleContactError,
    QuadratureError,
    StencilOutsideDomain,
    TargetIntervalError,
)
from .kernels import BACKEND

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BitensionError",
    "DerivativeOrderError",
    "DomainError",
    "GridError",
    "PoleContactError",
    "QuadratureError",
    "StencilOutsideDomain",
    "TargetIntervalError",
]
