"""Tension and bitension fields of rotationally symmetric maps.

A map ``(r, θ) -> (ρ(r), c r + k θ + a₂)`` from ``dr² + σ² dθ²`` into
``dρ² + λ² dφ²`` has a tension field with two components ``(x, y)`` that
depend on r alone.  The bitension field reduces to a pair of scalar
residuals ``(res1, res2)``; both vanish exactly for biharmonic maps.

Residuals are computed by two independent routes:

* ``simplified``: the reduced fourth-order system in ``x`` and ``y``;
* ``term-sum``: the coordinate bitension equation assembled from its
  individual Laplacian, gradient, connection and curvature contributions.

Derivatives of ``x`` and ``y`` are obtained analytically from the profile's
derivative bundle, never by differencing ``x``.

Verdicts
--------
Near the poles of the sphere the summands of a residual grow like σ⁻⁴ and
more, so a residual that is zero in exact arithmetic carries a rounding
error of order ``eps * magnitude``, where ``magnitude`` is the same
expression with every summand replaced by its absolute value.  Verdicts
compare ``|value| - NOISE_ULPS * eps * magnitude`` against the thresholds;
the literal sup norms are reported alongside.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import (
    DerivativeOrderError,
    DomainError,
    GridError,
    PoleContactError,
    TargetIntervalError,
)
from .funckit import DEFAULT_TOL, GridSpec, NumericProfile, SmoothFn, compose, integrate_many, two_arctan_exp
from .geometry import WarpedMetric, sphere_domain, sphere_target

HARMONIC_TOL = 1e-8
BIHARMONIC_TOL = 1e-8
NOISE_ULPS = 16.0
EPS64 = float(np.finfo(float).eps)

ROUTES = ("simplified", "term-sum")
VERDICTS = ("harmonic", "proper-biharmonic", "neither")

Profile = SmoothFn | NumericProfile


@dataclass(frozen=True)
class RotSymMap:
    """The map ``(r, θ) -> (ρ(r), c r + k θ + a₂)``."""

    profile: Profile
    c: float = 0.0
    k: float = 1.0
    a2: float = 0.0
    domain_metric: WarpedMetric = field(default_factory=sphere_domain)
    target_metric: WarpedMetric = field(default_factory=sphere_target)
    label: str = ""

    def profile_values(self, r=None) -> np.ndarray:
        if isinstance(self.profile, NumericProfile):
            return self.profile.values if r is None else np.asarray(self.profile(r))
        return np.asarray(self.profile(r))

    def in_target_range(self, r=None) -> bool:
        """Whether ρ(r) lies inside the target interval at every sample."""
        return self.target_metric.contains(self.profile_values(r))


@dataclass(frozen=True)
class FieldSample:
    r: float
    x: float
    y: float
    res1: float
    res2: float


@dataclass(frozen=True)
class Fields:
    """Array-valued tension and residual data on a set of radii."""

    r: np.ndarray
    x: np.ndarray
    y: np.ndarray
    res1: np.ndarray
    res2: np.ndarray
    x_mag: np.ndarray
    y_mag: np.ndarray
    res1_mag: np.ndarray
    res2_mag: np.ndarray
    route: str = "simplified"

    def samples(self) -> list[FieldSample]:
        return [FieldSample(*map(float, row))
                for row in zip(self.r, self.x, self.y, self.res1, self.res2)]


@dataclass(frozen=True)
class ResidualReport:
    """Sup norms over a grid, literal and noise-corrected, plus a verdict."""

    grid: GridSpec
    samples: list[FieldSample]
    sup_norm: float
    route: str
    sup_tension: float
    residual_excess: float
    tension_excess: float
    in_range: bool
    verdict: str

    @property
    def sup_x(self) -> float:
        return max(abs(s.x) for s in self.samples)


# ---------------------------------------------------------------------------
# jets


def _out(scalar, *arrays):
    if scalar:
        return tuple(float(a) for a in arrays)
    return arrays


def _profile_jet(m: RotSymMap, r, order: int):
    prof = m.profile
    if isinstance(prof, NumericProfile):
        pts = prof.points
        if r is None:
            return pts, prof.jet(order)
        r_arr = np.asarray(r, dtype=float)
        if r_arr.shape != pts.shape or not np.array_equal(r_arr, pts):
            raise GridError("a grid profile can only be evaluated on its own grid")
        return pts, prof.jet(order)
    if r is None:
        raise GridError("radii are required for an analytic profile")
    if prof.max_order < order:
        raise DerivativeOrderError(
            f"profile {prof.name!r} carries {prof.max_order} derivatives, {order} needed"
        )
    return np.asarray(r, dtype=float), [np.asarray(v, dtype=float) for v in prof.jet(r, order)]


def _domain_jet(m: RotSymMap, r, order: int):
    dm = m.domain_metric
    lo, hi = dm.interval
    if np.any((r <= lo) | (r >= hi)):
        raise PoleContactError(f"radius outside the open interval {dm.interval} of {dm.label!r}")
    try:
        s = [np.asarray(v, dtype=float) for v in dm.warp.jet(r, order)]
    except DomainError as exc:
        raise PoleContactError(str(exc)) from exc
    if np.any(s[0] == 0):
        raise PoleContactError(f"warp of {dm.label!r} vanishes on the samples")
    return s


def _target_jet(m: RotSymMap, rho, order: int):
    tm = m.target_metric
    try:
        lam = [np.asarray(v, dtype=float) for v in tm.warp.jet(rho, order)]
    except DomainError as exc:
        raise TargetIntervalError(f"profile leaves the domain of the target warp: {exc}") from exc
    if not np.all(np.isfinite(lam[0])):
        raise TargetIntervalError(f"target warp of {tm.label!r} is not finite on the profile")
    if m.c != 0 and np.any(lam[0] == 0):
        raise TargetIntervalError(f"target warp of {tm.label!r} vanishes on the profile")
    return lam


def _all_jets(m: RotSymMap, r, p_order: int, s_order: int):
    r_arr, p = _profile_jet(m, r, p_order)
    if r_arr.ndim == 0:
        r_arr = r_arr.reshape(())
    s = _domain_jet(m, r_arr, s_order)
    lam = _target_jet(m, p[0], s_order)
    return r_arr, p, s, lam


# ---------------------------------------------------------------------------
# tension and residuals


def tension(m: RotSymMap, r=None, backend: str | None = None):
    """Tension components ``(x, y)`` at ``r`` (scalar or array).

    For a grid profile pass ``r=None``; values come back on its grid.
    """
    scalar = r is not None and np.ndim(r) == 0
    _, p, s, lam = _all_jets(m, r, 2, 1)
    x, y = kernels.tension(p, s, lam, m.c, m.k, backend=backend)
    return _out(scalar, x, y)


def field_data(m: RotSymMap, r=None, route: str = "simplified",
               backend: str | None = None) -> Fields:
    """Tension, residuals and their rounding magnitudes on the radii ``r``."""
    if route not in ROUTES:
        raise ValueError(f"route must be one of {ROUTES}, got {route!r}")
    r_arr, p, s, lam = _all_jets(m, r, 4, 3)
    x, y, res1, res2, xm, ym, m1, m2 = kernels.residual_simplified(
        p, s, lam, m.c, m.k, backend=backend)
    if route == "term-sum":
        res1, res2 = kernels.residual_termsum(p, s, lam, m.c, m.k, backend=backend)
    r_arr = np.broadcast_to(r_arr, np.shape(x))
    return Fields(r_arr, x, y, res1, res2, xm, ym, m1, m2, route)


def bitension_residual_simplified(m: RotSymMap, r=None, backend: str | None = None):
    """``(res1, res2)`` of the reduced biharmonic system."""
    scalar = r is not None and np.ndim(r) == 0
    f = field_data(m, r, "simplified", backend)
    return _out(scalar, f.res1, f.res2)


def bitension_residual_termsum(m: RotSymMap, r=None, backend: str | None = None):
    """``(res1, res2)`` from the twelve individual contributions.

    The second component is scaled by ``c`` so it is comparable with the
    reduced system; see :func:`bitension.kernels.residual_termsum`.
    """
    scalar = r is not None and np.ndim(r) == 0
    f = field_data(m, r, "term-sum", backend)
    return _out(scalar, f.res1, f.res2)


def termsum_contributions(m: RotSymMap, r=None) -> dict[str, np.ndarray]:
    """The individual contributions summed by the term-sum route."""
    _, p, s, lam = _all_jets(m, r, 4, 3)
    return kernels.termsum_terms(p, s, lam, m.c, m.k)


def residual_radial(m: RotSymMap, r=None):
    """First residual of the ``c = 0`` system.

    ``x'' + (σ'/σ) x' - (k²/σ²)(λλ')'(ρ) x`` with ``x`` the radial tension; the
    second equation is void when the angular part has no ``r`` dependence.
    """
    scalar = r is not None and np.ndim(r) == 0
    _, p, s, lam = _all_jets(m, r, 4, 3)
    shape, flat = kernels._flat(*p, *s, *lam)
    vals, _, geo, tgt, _ = kernels._pykernel.field_jets(*flat, 0.0, float(m.k))
    x, x1, x2 = vals[:3]
    q = geo[0]
    mu1 = tgt[1]
    s0 = flat[5]
    res = (x2 + q * x1 - (m.k * m.k / (s0 * s0)) * mu1 * x).reshape(shape)
    return float(res) if scalar else res


def torus_residual(rho: SmoothFn, kappa: float, r):
    """Fourth-order profile equation of maps from a flat torus into the sphere.

    ``ρ'''' - 2κ² cos 2ρ ρ'' + 2κ² sin 2ρ ρ'² + (κ⁴/4) sin 4ρ``
    """
    if rho.max_order < 4:
        raise DerivativeOrderError(f"profile {rho.name!r} lacks a fourth derivative")
    p0, p1, p2, _, p4 = (np.asarray(v, dtype=float) for v in rho.jet(r, 4))
    K = kappa * kappa
    res = (p4 - 2 * K * np.cos(2 * p0) * p2 + 2 * K * np.sin(2 * p0) * p1 * p1
           + 0.25 * K * K * np.sin(4 * p0))
    return float(res) if res.ndim == 0 else res


def sphere_system_t(m: RotSymMap, t):
    """Residual of the sphere equation in the variable ``t = ln tan(r/2)``.

    Returns ``(res, x)`` where ``x(t) = cosh²t (ρ_tt - k² sin ρ cos ρ)`` and
    ``res = x_tt - k² cos 2ρ · x``.  It relates to the radial residual by
    ``res(t) = sin² r · residual_radial(r)``.
    """
    if m.c != 0:
        raise ValueError("the t-form applies to maps with c = 0")
    if not isinstance(m.profile, SmoothFn):
        raise TypeError("the t-form needs an analytic profile")
    t_arr = np.asarray(t, dtype=float)
    rho_t = compose(m.profile, two_arctan_exp())
    r0, r1, r2, r3, r4 = (np.asarray(v, dtype=float) for v in rho_t.jet(t_arr, 4))
    K = m.k * m.k
    s2, c2 = np.sin(2 * r0), np.cos(2 * r0)
    h = r2 - 0.5 * K * s2
    h1 = r3 - K * c2 * r1
    h2 = r4 + 2 * K * s2 * r1 * r1 - K * c2 * r2
    C = np.cosh(t_arr) ** 2
    C1 = np.sinh(2 * t_arr)
    C2 = 2 * np.cosh(2 * t_arr)
    x = C * h
    x_tt = C2 * h + 2 * C1 * h1 + C * h2
    res = x_tt - K * c2 * x
    if res.ndim == 0:
        return float(res), float(x)
    return res, x


def bienergy(m: RotSymMap, grid: GridSpec, tol: float = DEFAULT_TOL) -> float:
    """``½ ∫ |τ|² dA`` over the grid interval.

    ``|τ|² = x² + λ(ρ)² y²`` in the target metric and ``dA = σ dr dθ``.
    """
    if isinstance(m.profile, NumericProfile):
        raise TypeError("bienergy needs an analytic profile")

    def density(r):
        x, y = tension(m, r)
        lam = np.asarray(m.target_metric.warp(m.profile(r)))
        sig = np.asarray(m.domain_metric.warp(r))
        return (x * x + lam * lam * y * y) * sig

    pts = grid.points
    total = integrate_many(density, np.array([pts[0]]), np.array([pts[-1]]), tol)[0]
    return float(0.5 * 2 * math.pi * total)


# ---------------------------------------------------------------------------
# verdicts


def noise_floor(magnitude) -> np.ndarray:
    return NOISE_ULPS * EPS64 * np.asarray(magnitude)


def excess(values, magnitudes) -> float:
    """Largest amount by which ``|value|`` exceeds its rounding floor (>= 0)."""
    e = 0.0
    for v, mag in zip(values, magnitudes):
        v = np.asarray(v)
        if v.size:
            e = max(e, float(np.max(np.abs(v) - noise_floor(mag))))
    return max(e, 0.0)


def verdict(tension_excess: float, residual_excess: float,
            harmonic_tol: float = HARMONIC_TOL,
            biharmonic_tol: float = BIHARMONIC_TOL) -> str:
    if tension_excess < harmonic_tol:
        return "harmonic"
    if residual_excess < biharmonic_tol:
        return "proper-biharmonic"
    return "neither"


def _sup(*arrays) -> float:
    return max(float(np.max(np.abs(a))) for a in arrays)


def residual_report(m: RotSymMap, grid: GridSpec | None = None, route: str = "simplified",
                    harmonic_tol: float = HARMONIC_TOL,
                    biharmonic_tol: float = BIHARMONIC_TOL,
                    backend: str | None = None) -> ResidualReport:
    """Evaluate a map on a grid and classify it.

    For a grid profile ``grid`` may be omitted (its own grid is used).
    """
    if isinstance(m.profile, NumericProfile):
        if grid is not None and grid != m.profile.grid:
            raise GridError("a grid profile is reported on its own grid")
        grid = m.profile.grid
        f = field_data(m, None, route, backend)
    else:
        if grid is None:
            raise GridError("a grid is required for an analytic profile")
        f = field_data(m, grid.points, route, backend)
    t_ex = excess((f.x, f.y), (f.x_mag, f.y_mag))
    r_ex = excess((f.res1, f.res2), (f.res1_mag, f.res2_mag))
    return ResidualReport(
        grid=grid,
        samples=f.samples(),
        sup_norm=_sup(f.res1, f.res2),
        route=route,
        sup_tension=_sup(f.x, f.y),
        residual_excess=r_ex,
        tension_excess=t_ex,
        in_range=m.in_target_range(None if isinstance(m.profile, NumericProfile) else grid.points),
        verdict=verdict(t_ex, r_ex, harmonic_tol, biharmonic_tol),
    )


def routes_agree(m: RotSymMap, r, rel: float = 1e-9, abs_tol: float = 1e-12,
                 backend: str | None = None) -> float:
    """Worst route disagreement, as a fraction of the allowed band.

    The band at each point is ``abs_tol + rel * magnitude``; a return value
    below 1 means the routes agree everywhere.
    """
    a = field_data(m, r, "simplified", backend)
    b = field_data(m, r, "term-sum", backend)
    worst = 0.0
    for va, vb, mag in ((a.res1, b.res1, a.res1_mag), (a.res2, b.res2, a.res2_mag)):
        band = abs_tol + rel * np.maximum(mag, np.maximum(np.abs(va), np.abs(vb)))
        gap = np.abs(va - vb)
        # a zero band only occurs where both routes are exactly zero
        ratio = np.divide(gap, band, out=np.where(gap > 0, np.inf, 0.0), where=band > 0)
        worst = max(worst, float(np.max(ratio)))
    return worst
