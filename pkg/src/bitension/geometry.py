"""Warped-product surface metrics ``dr² + σ(r)² dθ²``.

Coordinates are ordered (r, θ) -> indices (1, 2).  Array forms use 0-based
indices: ``gamma[s, a, b]`` is Γ^s_ab and ``riemann[s, b, a, n]`` is the
component written R^s_ban.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import funckit
from .errors import DomainError
from .funckit import Interval, SmoothFn

WARP_FLOOR = 1e-8


@dataclass(frozen=True)
class WarpedMetric:
    warp: SmoothFn
    interval: Interval
    label: str = ""

    def __post_init__(self):
        lo, hi = self.interval
        if not lo < hi:
            raise DomainError(f"empty metric interval {self.interval}")

    def contains(self, u) -> bool:
        lo, hi = self.interval
        u = np.asarray(u, dtype=float)
        return bool(np.all((u > lo) & (u < hi)))

    def check_positive(self, u) -> None:
        w = np.asarray(self.warp(u))
        if np.any(w <= 0):
            raise DomainError(f"warp of {self.label!r} is not positive on the samples")


@dataclass(frozen=True)
class ChristoffelSet:
    g111: float
    g112: float
    g122: float
    g211: float
    g212: float
    g222: float

    def as_array(self) -> np.ndarray:
        G = np.zeros((2, 2, 2))
        G[0, 0, 0] = self.g111
        G[0, 0, 1] = G[0, 1, 0] = self.g112
        G[0, 1, 1] = self.g122
        G[1, 0, 0] = self.g211
        G[1, 0, 1] = G[1, 1, 0] = self.g212
        G[1, 1, 1] = self.g222
        return G


@dataclass(frozen=True)
class CurvatureSet:
    r1212: float
    r1221: float
    r2112: float
    r2121: float

    def as_array(self) -> np.ndarray:
        R = np.zeros((2, 2, 2, 2))
        R[0, 1, 0, 1] = self.r1212
        R[0, 1, 1, 0] = self.r1221
        R[1, 0, 0, 1] = self.r2112
        R[1, 0, 1, 0] = self.r2121
        return R


def _value_at(m: WarpedMetric, at: float, order: int) -> list[float]:
    if not m.contains(at):
        raise DomainError(f"{at} is outside the interval {m.interval} of {m.label!r}")
    return m.warp.jet(at, order)


def christoffel(m: WarpedMetric, at: float) -> ChristoffelSet:
    w, w1 = _value_at(m, at, 1)
    if w == 0:
        raise DomainError(f"warp of {m.label!r} vanishes at {at}")
    return ChristoffelSet(0.0, 0.0, -w * w1, 0.0, w1 / w, 0.0)


def curvature(m: WarpedMetric, at: float) -> CurvatureSet:
    w, _, w2 = _value_at(m, at, 2)
    if w == 0:
        raise DomainError(f"warp of {m.label!r} vanishes at {at}")
    r1212 = -w * w2
    r2112 = w2 / w
    return CurvatureSet(r1212, -r1212, r2112, -r2112)


def gauss_curvature(m: WarpedMetric, at):
    """``K = -λ''/λ`` of the metric, scalar or array ``at``."""
    if not m.contains(at):
        raise DomainError(f"outside the interval {m.interval} of {m.label!r}")
    w = np.asarray(m.warp(at))
    if np.any(w == 0):
        raise DomainError(f"zero warp: Gauss curvature undefined for {m.label!r}")
    K = -np.asarray(m.warp.deriv(2, at)) / w + 0.0  # no signed zeros
    return float(K) if K.ndim == 0 else K


def quadratic_warp_curvature(C0: float, C: float, rho, A: float = 1.0):
    """Closed form ``(C0² - A C)/λ⁴`` for ``λ² = A ρ² + 2 C0 ρ + C``."""
    rho = np.asarray(rho, dtype=float)
    q = A * rho * rho + 2 * C0 * rho + C
    K = (C0 * C0 - A * C) / (q * q)
    return float(K) if K.ndim == 0 else K


# -- catalog -----------------------------------------------------------------


def sphere_domain() -> WarpedMetric:
    """Unit 2-sphere in geodesic polar coordinates; poles excluded."""
    return WarpedMetric(funckit.sine((0.0, math.pi)), (0.0, math.pi), "sphere")


def sphere_target() -> WarpedMetric:
    """Unit sphere as a target.

    The warp is ``sin`` on the whole line so that profiles leaving (0, pi)
    can still be evaluated; the geometric interval stays (0, pi).
    """
    return WarpedMetric(funckit.sine(), (0.0, math.pi), "sphere")


def flat_metric(length: float = 2 * math.pi) -> WarpedMetric:
    """Flat torus/cylinder ``dr² + dθ²``; one period of r is ``(0, length)``."""
    return WarpedMetric(funckit.constant(1.0), (0.0, float(length)), "flat")


def polar_plane() -> WarpedMetric:
    """Punctured plane ``dr² + r² dθ²``."""
    dom = (0.0, math.inf)
    return WarpedMetric(funckit.identity(dom), dom, "polar")


def quadratic_interval(A: float, C0: float, C: float, floor: float = WARP_FLOOR,
                       branch: str = "upper") -> Interval:
    """Largest open interval on which ``A u² + 2 C0 u + C >= floor``.

    When the admissible set has two components (A > 0, real roots) the
    ``branch`` argument selects the upper or lower one.
    """
    c = C - floor
    if A == 0:
        if C0 == 0:
            if c < 0:
                raise DomainError("λ² is a non-positive constant")
            return (-math.inf, math.inf)
        root = -c / (2 * C0)
        return (root, math.inf) if C0 > 0 else (-math.inf, root)
    disc = C0 * C0 - A * c
    if A > 0:
        if disc < 0:
            return (-math.inf, math.inf)
        s = math.sqrt(disc)
        r1, r2 = sorted(((-C0 - s) / A, (-C0 + s) / A))
        return (r2, math.inf) if branch == "upper" else (-math.inf, r1)
    if disc <= 0:
        raise DomainError("λ² = Aρ²+2C0ρ+C is nowhere positive")
    s = math.sqrt(disc)
    r1, r2 = sorted(((-C0 - s) / A, (-C0 + s) / A))
    return (r1, r2)


def quadratic_warp(A: float, C0: float, C: float, branch: str = "upper") -> WarpedMetric:
    """Target metric ``dρ² + (A ρ² + 2 C0 ρ + C) dφ²``."""
    interval = quadratic_interval(A, C0, C, branch=branch)
    warp = funckit.sqrt_quadratic(A, C0, C, interval)
    return WarpedMetric(warp, interval, f"λ²={A:g}ρ²+{2 * C0:g}ρ+{C:g}")
