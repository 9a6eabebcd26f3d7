"""Closed-form and quadrature-built biharmonic solution families.

Every family yields a :class:`~bitension.fields.RotSymMap` ready for residual
checks.  Nested quadratures all start at ``r = π/2``, which is regular for
every domain used here.

The closed form in the variable ``t = ln tan(r/2)`` reads

    ρ(t) = (C₁ - C₂ + C₃)e⁻ᵗ + (2C₁t + C₄)eᵗ - (C₁eᵗ + C₂e⁻ᵗ) ln(1 + e²ᵗ) - C₀

and the r-profile is its composition with ``t(r)``.  On (0, π) the tangent
of r/2 is positive, so no absolute values are needed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np

from . import funckit
from .errors import PoleContactError, TargetIntervalError
from .fields import RotSymMap
from .funckit import DEFAULT_TOL, GridSpec, NumericProfile, SmoothFn
from .geometry import (
    WarpedMetric,
    flat_metric,
    quadratic_warp,
    sphere_domain,
    sphere_target,
)

BASE = math.pi / 2

FAMILIES = (
    "quadrature-biharmonic",
    "sphere-special",
    "p11-quadrature",
    "pb-profile",
    "mv",
    "example-cot",
    "stereographic",
    "f-k-linear",
    "torus-constant",
    "identity",
)
EXPECTED = ("harmonic", "proper-biharmonic", "neither")


class QuadratureSolution(NamedTuple):
    """A grid profile, its tension ``x`` on the grid, and whether it is proper."""

    profile: NumericProfile
    x: np.ndarray
    proper: bool


def _flat_line() -> WarpedMetric:
    return WarpedMetric(funckit.constant(1.0), (-math.inf, math.inf), "line")


def _check_sigma(sigma: SmoothFn, grid: GridSpec) -> None:
    try:
        s = np.asarray(sigma(grid.points))
    except Exception as exc:  # domain violations of the warp itself
        raise PoleContactError(f"warp cannot be evaluated on the grid: {exc}") from exc
    if np.any(s <= 0):
        raise PoleContactError("warp is not positive on the grid")


def _nested(sigma: SmoothFn, C0: float, C1: float, C2: float, C3: float, C4: float,
            k: float, grid: GridSpec, base: float, tol: float) -> QuadratureSolution:
    _check_sigma(sigma, grid)
    inv = funckit.antiderivative_on_grid(lambda r: 1.0 / sigma(r), grid, base, tol)

    def inner(r):
        s = sigma(r)
        return C1 * s * inv(r) + C2 * s + k * k * C0 / s

    outer = funckit.antiderivative_on_grid(inner, grid, base, tol)
    rho = funckit.antiderivative_on_grid(lambda r: (outer(r) + C3) / sigma(r), grid, base, tol)
    rho = rho.shifted(C4)
    x = C1 * inv.values + C2
    return QuadratureSolution(rho, x, bool(C1 * C1 + C2 * C2 != 0))


def build_quadrature_profile(sigma: SmoothFn, C1: float, C2: float, C3: float, C4: float,
                             grid: GridSpec, base: float = BASE,
                             tol: float = DEFAULT_TOL) -> QuadratureSolution:
    """Biharmonic functions of r for the warp ``sigma``.

    ``ρ = ∫ ([∫ (C₁σ T + C₂σ) dr + C₃] / σ) dr + C₄`` with ``T = ∫ dr/σ``;
    the Laplacian of ρ is ``x = C₁T + C₂``.
    """
    return _nested(sigma, 0.0, C1, C2, C3, C4, 0.0, grid, base, tol)


def build_p11_profile(sigma: SmoothFn, C0: float, C1: float, C2: float, C3: float,
                      C4: float, k: float, grid: GridSpec, base: float = BASE,
                      tol: float = DEFAULT_TOL) -> QuadratureSolution:
    """Profiles into ``λ² = ρ + C`` style targets (``A = 0``).

    Same nesting as :func:`build_quadrature_profile` with ``k²C₀/σ`` added
    to the inner integrand.
    """
    return _nested(sigma, C0, C1, C2, C3, C4, k, grid, base, tol)


def quadrature_map(sol: QuadratureSolution, sigma_metric: WarpedMetric) -> RotSymMap:
    """The map with constant angular image whose profile is ``sol``."""
    return RotSymMap(sol.profile, c=0.0, k=0.0, domain_metric=sigma_metric,
                     target_metric=_flat_line(), label="quadrature")


# -- closed forms -------------------------------------------------------------


def pb_profile() -> SmoothFn:
    """``¼ (ln tan(r/2))² - ln sin r + 1`` on (0, π)."""
    prof = 0.25 * funckit.compose(funckit.square(), funckit.log_tan_half())
    prof = prof + funckit.neg_log_sin() + 1.0
    return SmoothFn(prof.parts, (0.0, math.pi), "pb")


def pb_target() -> WarpedMetric:
    """``λ² = ρ + 1``."""
    return quadratic_warp(0.0, 0.5, 1.0)


def pb_map() -> RotSymMap:
    return RotSymMap(pb_profile(), 0.0, 1.0, 0.0, sphere_domain(), pb_target(), "pb")


def _mv_in_t(C0: float, C1: float, C2: float, C3: float, C4: float) -> SmoothFn:
    A = C1 - C2 + C3

    def log1p_e2t(t):
        return np.logaddexp(0.0, 2.0 * t)

    def sig(t):
        return 0.5 * (1.0 + np.tanh(t))

    def part(n):
        def fn(t):
            t = np.asarray(t, dtype=float)
            E, Ei = np.exp(t), np.exp(-t)
            s = sig(t)
            s1 = 2.0 * s * (1.0 - s)
            s2 = 2.0 * (1.0 - 2.0 * s) * s1
            s3 = 2.0 * ((1.0 - 2.0 * s) * s2 - 2.0 * s1 * s1)
            g = (log1p_e2t(t), 2.0 * s, 2.0 * s1, 2.0 * s2, 2.0 * s3)
            lg_plus = sum(math.comb(n, j) * g[j] for j in range(n + 1))
            lg_minus = sum(math.comb(n, j) * g[j] * (-1.0) ** (n - j) for j in range(n + 1))
            val = (A * (-1.0) ** n * Ei + (2.0 * C1 * t + C4 + 2.0 * n * C1) * E
                   - C1 * E * lg_plus - C2 * Ei * lg_minus)
            return val - C0 if n == 0 else val

        return fn

    return SmoothFn(tuple(part(n) for n in range(5)), name="mv(t)")


def mv_profile(C0: float = 0.0, C1: float = 0.0, C2: float = 0.0, C3: float = 0.0,
               C4: float = 0.0) -> SmoothFn:
    """The four-constant family for the sphere into ``λ² = ρ² + 2C₀ρ + C``."""
    prof = funckit.compose(_mv_in_t(C0, C1, C2, C3, C4), funckit.log_tan_half())
    return SmoothFn(prof.parts, (0.0, math.pi), f"mv({C0:g},{C1:g},{C2:g},{C3:g},{C4:g})")


def mv_map(C0: float = 0.0, C1: float = 0.0, C2: float = 0.0, C3: float = 0.0,
           C4: float = 0.0, C: float | None = None, grid: GridSpec | None = None) -> RotSymMap:
    """Map of the four-constant family.

    ``C`` defaults to ``C₀² + 1`` so that λ² is positive on the whole line.
    When a grid is given, the realized profile range is checked against the
    target interval.
    """
    C = C0 * C0 + 1.0 if C is None else float(C)
    target = quadratic_warp(1.0, C0, C)
    m = RotSymMap(mv_profile(C0, C1, C2, C3, C4), 0.0, 1.0, 0.0, sphere_domain(), target, "mv")
    if grid is not None and not m.in_target_range(grid.points):
        raise TargetIntervalError(f"profile leaves the target interval {target.interval}")
    return m


def mv_tension_closed_form(C1: float, C2: float, r):
    """``x = C₁e⁻ᵗ + C₂eᵗ`` at ``t = ln tan(r/2)``."""
    th = np.tan(0.5 * np.asarray(r, dtype=float))
    return C1 / th + C2 * th


def f_k_map(a: float, a1: float = 0.0, k: float = 1.0) -> RotSymMap:
    """Sphere map ``(r, θ) -> (a r + a₁, k θ)``."""
    prof = funckit.linear(a, a1, (0.0, math.pi))
    return RotSymMap(prof, 0.0, k, 0.0, sphere_domain(), sphere_target(),
                     f"f({a:g},{a1:g},{k:g})")


def torus_map(level: float = math.pi / 4, kappa: float = 1.0) -> RotSymMap:
    """Constant-latitude map from the flat torus wrapping the circle ``kappa`` times."""
    return RotSymMap(funckit.constant(level), 0.0, kappa, 0.0, flat_metric(),
                     sphere_target(), f"torus({level:g},{kappa:g})")


# -- variation of parameters ----------------------------------------------------


@dataclass(frozen=True)
class VariationCheck:
    u1_prime: float
    u2_prime: float
    u1: float
    u2: float
    derivative_mismatch: float
    rhs_residual: float
    wronskian_constraint: float


def _u_functions(C0: float, C1: float, C2: float):
    def u1p(t):
        e2 = math.exp(2 * t)
        return -C1 * 2 * e2 / (1 + e2) ** 2 - C2 * 2 * e2 * e2 / (1 + e2) ** 2 - 0.5 * C0 * math.exp(t)

    def u2p(t):
        e2 = math.exp(2 * t)
        return 2 * C1 / (1 + e2) ** 2 + C2 * 2 * e2 / (1 + e2) ** 2 + 0.5 * C0 * math.exp(-t)

    def u1(t):
        e2 = math.exp(2 * t)
        return C1 / (1 + e2) - C2 / (1 + e2) - C2 * math.log1p(e2) - 0.5 * C0 * math.exp(t)

    def u2(t):
        e2 = math.exp(2 * t)
        return (2 * C1 * t + C1 / (1 + e2) - C1 * math.log1p(e2) - C2 / (1 + e2)
                - 0.5 * C0 * math.exp(-t))

    return u1p, u2p, u1, u2


def variation_of_parameters_check(C0: float, C1: float, C2: float, t: float,
                                  C3: float = 0.0, C4: float = 0.0,
                                  step: float = 1e-2) -> VariationCheck:
    """Evaluate the parameter functions and check them by finite differences.

    ``derivative_mismatch`` compares fd derivatives of ``u₁, u₂`` with the
    primed formulas; ``rhs_residual`` is ``ρ_tt - ρ - RHS`` for the assembled
    ``ρ = C₃e⁻ᵗ + C₄eᵗ + u₁e⁻ᵗ + u₂eᵗ``.
    """
    u1p, u2p, u1, u2 = _u_functions(C0, C1, C2)

    def rho(s):
        return (C3 + u1(s)) * math.exp(-s) + (C4 + u2(s)) * math.exp(s)

    mismatch = max(abs(funckit.richardson(u1, 1, t, step) - u1p(t)),
                   abs(funckit.richardson(u2, 1, t, step) - u2p(t)))
    e2 = math.exp(2 * t)
    rhs = 4 * e2 / (1 + e2) ** 2 * (C1 * math.exp(-t) + C2 * math.exp(t)) + C0
    rhs_res = funckit.richardson(rho, 2, t, step) - rho(t) - rhs
    wr = u1p(t) * math.exp(-t) + u2p(t) * math.exp(t)
    return VariationCheck(u1p(t), u2p(t), u1(t), u2(t), mismatch, rhs_res, wr)


# -- catalog ------------------------------------------------------------------


SPHERE_GRID = GridSpec(0.0, math.pi, 2001, 1e-3)
TORUS_GRID = GridSpec(0.0, 2 * math.pi, 2001, 1e-3)


@dataclass(frozen=True)
class SolutionSpec:
    """A named member of a solution family with its expected verdict."""

    name: str
    family: str
    constants: dict
    expected: str
    grid: GridSpec
    builder: Callable[[], RotSymMap] = field(repr=False, compare=False)

    def build(self) -> RotSymMap:
        return self.builder()


def _f_k_expected(a: float, k: float, a1: float) -> str:
    on_set = (abs(a * a - 1) < 1e-12 and abs(k * k - 1) < 1e-12
              and (abs(a1) < 1e-12 or abs(a1 - math.pi) < 1e-12))
    return "harmonic" if on_set else "neither"


def _spec(name: str, params: dict) -> SolutionSpec:
    p = dict(params)
    if name == "identity-sphere":
        return SolutionSpec(name, "identity", {}, "harmonic", SPHERE_GRID,
                            lambda: f_k_map(1.0, 0.0, 1.0))
    if name == "f-k":
        a, k, a1 = p.get("a", 2.0), p.get("k", 1.0), p.get("a1", 0.0)
        return SolutionSpec(name, "f-k-linear", {"a": a, "k": k, "a1": a1},
                            _f_k_expected(a, k, a1), SPHERE_GRID, lambda: f_k_map(a, a1, k))
    if name in ("torus-quarter-pi", "torus-three-quarter-pi"):
        kappa = p.get("kappa", p.get("k", 1.0))
        level = math.pi / 4 if name == "torus-quarter-pi" else 3 * math.pi / 4
        return SolutionSpec(name, "torus-constant", {"kappa": kappa}, "proper-biharmonic",
                            TORUS_GRID, lambda: torus_map(level, kappa))
    if name == "pb":
        return SolutionSpec(name, "pb-profile", {"A": 0.0, "C0": 0.5, "C": 1.0},
                            "proper-biharmonic", SPHERE_GRID, pb_map)
    if name in ("mv", "example-cot", "stereographic-north", "stereographic-south"):
        C = {f"C{i}": float(p.get(f"C{i}", 0.0)) for i in range(5)}
        family = "mv"
        if name == "example-cot":
            C = {"C0": 0.0, "C1": 0.0, "C2": -1.0, "C3": 0.0, "C4": 0.0}
            family = "example-cot"
        elif name == "stereographic-north":
            C = {"C0": 0.0, "C1": 0.0, "C2": 0.0, "C3": 1.0, "C4": 0.0}
            family = "stereographic"
        elif name == "stereographic-south":
            C = {"C0": 0.0, "C1": 0.0, "C2": 0.0, "C3": 0.0, "C4": 1.0}
            family = "stereographic"
        Cq = p.get("C")
        if Cq is None:
            Cq = 0.0 if family == "stereographic" else C["C0"] ** 2 + 1.0
        consts = dict(C, A=1.0, C=float(Cq))
        expected = "proper-biharmonic" if C["C1"] ** 2 + C["C2"] ** 2 != 0 else "harmonic"
        return SolutionSpec(name, family, consts, expected, SPHERE_GRID,
                            lambda: mv_map(C["C0"], C["C1"], C["C2"], C["C3"], C["C4"], Cq))
    raise KeyError(name)


CATALOG_NAMES = (
    "identity-sphere",
    "f-k",
    "torus-quarter-pi",
    "torus-three-quarter-pi",
    "pb",
    "mv",
    "example-cot",
    "stereographic-north",
    "stereographic-south",
)


def normalize_name(name: str) -> str:
    return name.strip().lower().replace("_", "-")


def catalog_entry(name: str, **params) -> SolutionSpec:
    """Look up a catalog solution; unknown names raise ``KeyError``."""
    key = normalize_name(name)
    if key not in CATALOG_NAMES:
        raise KeyError(f"unknown catalog map {name!r}; known: {', '.join(CATALOG_NAMES)}")
    return _spec(key, {k: v for k, v in params.items() if v is not None})


def catalog() -> list[SolutionSpec]:
    """Every catalog map with its default parameters."""
    return [catalog_entry(n) for n in CATALOG_NAMES]
