"""Which linear sphere maps ``(a r + a₁, k θ)`` are biharmonic.

For a linear profile the radial residual collapses to a trigonometric
polynomial: ``2 sin⁴r · res1 = f(r)`` with

    f(r) = a sin 2r + (2k²a² - 3k²) sin 2ρ - (2k²a² + k²) cos 2r sin 2ρ
           + 2k²a sin 2r cos 2ρ + k⁴ sin 2ρ cos 2ρ,        ρ = a r + a₁.

A biharmonic map forces f and its derivatives to vanish at r₀ = π/2.  That
midpoint system splits by whether ``cos ρ₀`` vanishes; the first branch has
no real solution and the second leaves only ``a² = k² = 1`` once the cubic
``3t³ + 13t² - t + 1`` is shown to have no positive root.  The sweep checks
the resulting classification numerically on a grid.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import fields, kernels
from .funckit import GridSpec, RootBracket, bracket_positive_roots
from .solutions import f_k_map

R0 = math.pi / 2
CUBIC = (3.0, 13.0, -1.0, 1.0)
CUBIC_SEARCH_HI = 1e6

DEFAULT_A = (-3.0, -2.0, -1.5, -1.0, -0.5, -0.25, 0.25, 0.5, 1.0, 1.5, 2.0, 3.0)
DEFAULT_K = (-3.0, -2.0, -1.0, 1.0, 2.0, 3.0)
DEFAULT_A1 = (0.0, math.pi / 4, math.pi / 2, math.pi)
DEFAULT_GRID = GridSpec(0.0, math.pi, 2001, 1e-3)


# ---------------------------------------------------------------------------
# the obstruction and the midpoint system


@dataclass(frozen=True)
class ObstructionEval:
    a: float
    k: float
    a1: float
    r: float
    f: float
    f1: float
    f2: float
    f3: float


def obstruction(a: float, k: float, a1: float, r):
    """``f`` and its first three r-derivatives from the hand-derived formulas.

    Scalar ``r`` gives an :class:`ObstructionEval`; arrays give a tuple of
    four arrays.
    """
    f0, f1, f2, f3 = kernels.obstruction(a, k, a1, r)
    if np.ndim(r) == 0:
        return ObstructionEval(float(a), float(k), float(a1), float(r),
                               float(f0), float(f1), float(f2), float(f3))
    return f0, f1, f2, f3


def midpoint_system(a: float, k: float, a1: float) -> tuple[float, float, float, float]:
    """``(f, f', f'', f''')`` at ``r₀ = π/2`` in the factored closed forms."""
    rho0 = a * R0 + a1
    s, c = math.sin(rho0), math.cos(rho0)
    c2 = math.cos(2 * rho0)
    K, K2 = k * k, k ** 4
    a2 = a * a
    e0 = 2 * K * s * c * (4 * a2 - 2 + K * c2)
    e1 = 2 * a * (-1 - K2 + (4 * K * a2 - 4 * K) * c2 + 2 * K2 * c2 * c2)
    e2 = 8 * K * s * c * (-4 * a2 * a2 + 4 * a2 - 1 - 4 * K * a2 * c2)
    e3 = 8 * a * (1 + (-4 * K * a2 * a2 + 2 * K * a2 - K) * c2
                  - 8 * K2 * a2 * c2 * c2 + 4 * K2 * a2)
    return e0, e1, e2, e3


# ---------------------------------------------------------------------------
# the two branches


@dataclass(frozen=True)
class CaseAnalysis:
    verdict: str
    a_squared: tuple[float, ...]
    k4: float | None
    consistency: float | None
    reduction_error: float
    notes: str = ""


def _case_i_reduced(t: float, K: float):
    """The branch-(i) midpoint equations with ``cos 2ρ₀`` eliminated.

    ``t = a²``; the first equation is used to write ``cos 2ρ₀ = (2 - 4t)/k²``.
    Returns the three remaining quantities as computed from the unfactored
    midpoint expressions.
    """
    c2 = (2 - 4 * t) / K
    K2 = K * K
    g1 = -1 - K2 + (4 * K * t - 4 * K) * c2 + 2 * K2 * c2 * c2
    g2 = -4 * t * t + 4 * t - 1 - 4 * K * t * c2
    g3 = 1 + (-4 * K * t * t + 2 * K * t - K) * c2 - 8 * K2 * t * c2 * c2 + 4 * K2 * t
    return g1, g2, g3


def case_i_analysis(samples: int = 25, seed: int = 0) -> CaseAnalysis:
    """Branch ``cos ρ₀ ≠ 0``: no real solution.

    Checks numerically that eliminating ``cos 2ρ₀`` turns the midpoint
    equations into ``k⁴ = 16a⁴ - 8a² - 1``, ``12a⁴ - 4a² - 1 = 0`` and a third
    consistency equation, then solves the quadratic in ``a²``.
    """
    rng = np.random.default_rng(seed)
    err = 0.0
    for t, K in zip(rng.uniform(0.05, 4, samples), rng.uniform(0.2, 9, samples)):
        g1, g2, g3 = _case_i_reduced(t, K)
        err = max(err,
                  abs(g1 - (-K * K + 16 * t * t - 8 * t - 1)),
                  abs(g2 - (12 * t * t - 4 * t - 1)),
                  abs(g3 - (-112 * t ** 3 + 112 * t * t - 24 * t - 1 + 4 * K * K * t)))
    roots = np.roots([12.0, -4.0, -1.0])
    positive = tuple(sorted(float(x.real) for x in roots if abs(x.imag) < 1e-14 and x.real > 0))
    t = positive[0]
    k4 = 16 * t * t - 8 * t - 1
    third = -112 * t ** 3 + 112 * t * t - 24 * t - 1 + 4 * k4 * t
    verdict = "no real solution" if k4 < 0 else "solution candidate"
    return CaseAnalysis(verdict, positive, k4, third, err,
                        "k⁴ is forced negative; the third equation is also violated")


@dataclass(frozen=True)
class CubicCertificate:
    coefficients: tuple[float, ...]
    search_interval: tuple[float, float]
    brackets: tuple[RootBracket, ...]
    t_star: float
    phi_t_star: float
    closed_form: float
    closed_form_error: float
    phi_at_0: float
    phi_at_hi: float
    convex_on_half_line: bool
    stationary_points: int

    @property
    def no_positive_root(self) -> bool:
        return not self.brackets and self.phi_t_star > 0 and self.convex_on_half_line


def cubic_certificate(hi: float = CUBIC_SEARCH_HI) -> CubicCertificate:
    """Certify that ``φ(t) = 3t³ + 13t² - t + 1`` has no root on ``[0, hi]``.

    Two independent arguments: a sign-change scan with bisection, and the
    convexity of φ on ``t ≥ 0`` (``φ'' = 18t + 26 > 0``) together with the
    value of φ at its only positive stationary point.
    """
    coeffs = CUBIC
    brackets = tuple(bracket_positive_roots(coeffs, 0.0, hi))
    dphi = np.polyder(np.asarray(coeffs))
    stationary = [float(x.real) for x in np.roots(dphi) if abs(x.imag) < 1e-14 and x.real > 0]
    # the quadratic 9t² + 26t - 1 has exactly one positive root (one sign change)
    t_star = (-13.0 + math.sqrt(178.0)) / 9.0
    phi_star = float(np.polyval(coeffs, t_star))
    closed = 4.0 / 243.0 * (1247.0 - 89.0 * math.sqrt(178.0))
    second = np.polyder(dphi)
    convex = bool(np.polyval(second, 0.0) > 0 and second[0] > 0)
    return CubicCertificate(
        coefficients=coeffs,
        search_interval=(0.0, hi),
        brackets=brackets,
        t_star=t_star,
        phi_t_star=phi_star,
        closed_form=closed,
        closed_form_error=abs(phi_star - closed),
        phi_at_0=float(np.polyval(coeffs, 0.0)),
        phi_at_hi=float(np.polyval(coeffs, hi)),
        convex_on_half_line=convex,
        stationary_points=len(stationary),
    )


def _case_ii_equations(t_a: float, K: float) -> tuple[float, float]:
    """Branch-(ii) equations as ``lhs - rhs`` with ``t_a = a²``, ``K = k²``."""
    e1 = 4 * K * (t_a - 1) - (K * K - 1)
    e2 = 4 * K * t_a * (t_a - 1) - (4 * K * K * t_a - 2 * K * t_a - K - 1)
    return e1, e2


def case_ii_a_squared(K: float) -> float:
    return (K + 1) / (3 * K * K - 2 * K + 1)


@dataclass(frozen=True)
class CaseIIAnalysis:
    verdict: str
    unit_solution_residual: float
    midpoint_consistency: float
    elimination_error: float
    fitted_cubic: tuple[float, ...]
    cubic_fit_error: float
    certificate: CubicCertificate


def case_ii_analysis(seed: int = 0) -> CaseIIAnalysis:
    """Branch ``cos ρ₀ = 0``: only ``a² = k² = 1`` survives.

    1. ``(a², k²) = (1, 1)`` solves both equations.
    2. ``a² = (k² + 1)/(3k⁴ - 2k² + 1)`` solves the second equation once the
       first is used to replace ``a² - 1``; checked at random ``k²``.
    3. With that ``a²`` the first equation equals
       ``(1 - k²) φ(k²) / (3k⁴ - 2k² + 1)``; φ is recovered by a cubic fit.
    4. φ has no positive root (:func:`cubic_certificate`).
    """
    unit = max(abs(v) for v in _case_ii_equations(1.0, 1.0))

    # the branch equations are the midpoint system at cos 2ρ₀ = -1
    rng = np.random.default_rng(seed)
    mid = 0.0
    for a, k in zip(rng.uniform(0.2, 3, 20), rng.uniform(0.2, 3, 20)):
        a1 = R0 - a * R0  # puts ρ₀ at π/2
        m0, m1, m2, m3 = midpoint_system(a, k, a1)
        e1, e2 = _case_ii_equations(a * a, k * k)
        # f'/(2a) and f'''/(8a) are the two equations up to sign
        mid = max(mid, abs(m0), abs(m2), abs(m1 / (2 * a) + e1), abs(m3 / (8 * a) - e2))

    elim = 0.0
    Ks = np.linspace(0.1, 5.0, 41)
    Ks = Ks[np.abs(Ks - 1.0) > 1e-6]
    scaled = []
    for K in Ks:
        ta = case_ii_a_squared(K)
        # second equation after substituting a² - 1 from the first
        elim = max(elim, abs(ta * (K * K - 1) - (4 * K * K * ta - 2 * K * ta - K - 1)))
        e1, _ = _case_ii_equations(ta, K)
        scaled.append(e1 * (3 * K * K - 2 * K + 1) / (1 - K))
    fit = np.polyfit(Ks, scaled, 3)
    fit_err = float(np.max(np.abs(fit - np.asarray(CUBIC))))
    cert = cubic_certificate()
    verdict = "only a²=k²=1" if cert.no_positive_root and unit < 1e-14 else "inconclusive"
    return CaseIIAnalysis(verdict, unit, mid, elim, tuple(float(c) for c in fit), fit_err, cert)


# ---------------------------------------------------------------------------
# the sweep


@dataclass(frozen=True)
class SweepRow:
    a: float
    k: float
    a1: float
    sup_tension: float
    sup_residual: float
    range_flag: bool
    verdict: str
    tension_excess: float
    residual_excess: float
    bridge_error: float


COLUMNS = tuple(SweepRow.__dataclass_fields__)


@dataclass(frozen=True)
class SweepReport:
    rows: tuple[SweepRow, ...]
    grid: GridSpec
    harmonic_tol: float = fields.HARMONIC_TOL
    biharmonic_tol: float = fields.BIHARMONIC_TOL

    def with_verdict(self, verdict: str) -> list[tuple[float, float, float]]:
        return [(r.a, r.k, r.a1) for r in self.rows if r.verdict == verdict]

    @property
    def max_bridge_error(self) -> float:
        return max((r.bridge_error for r in self.rows), default=0.0)

    def to_dict(self) -> dict:
        return {
            "grid": asdict(self.grid),
            "harmonic_tol": self.harmonic_tol,
            "biharmonic_tol": self.biharmonic_tol,
            "columns": list(COLUMNS),
            "rows": [[getattr(r, c) for c in COLUMNS] for r in self.rows],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1, allow_nan=True)

    @classmethod
    def from_dict(cls, d: dict) -> "SweepReport":
        cols = d["columns"]
        rows = tuple(SweepRow(**dict(zip(cols, row))) for row in d["rows"])
        return cls(rows, GridSpec(**d["grid"]), d["harmonic_tol"], d["biharmonic_tol"])

    @classmethod
    def from_json(cls, text: str) -> "SweepReport":
        return cls.from_dict(json.loads(text))


def _evaluate(a: float, k: float, a1: float, grid: GridSpec,
              harmonic_tol: float, biharmonic_tol: float) -> SweepRow:
    m = f_k_map(a, a1, k)
    rep = fields.field_data(m, grid.points)
    t_ex = fields.excess((rep.x, rep.y), (rep.x_mag, rep.y_mag))
    r_ex = fields.excess((rep.res1, rep.res2), (rep.res1_mag, rep.res2_mag))
    f0 = kernels.obstruction(a, k, a1, grid.points)[0]
    bridge = float(np.max(np.abs(rep.res1 * 2 * np.sin(grid.points) ** 4 - f0)))
    return SweepRow(
        a=float(a), k=float(k), a1=float(a1),
        sup_tension=fields._sup(rep.x, rep.y),
        sup_residual=fields._sup(rep.res1, rep.res2),
        range_flag=not m.in_target_range(grid.points),
        verdict=fields.verdict(t_ex, r_ex, harmonic_tol, biharmonic_tol),
        tension_excess=t_ex,
        residual_excess=r_ex,
        bridge_error=bridge,
    )


def classify_sweep(a_range=DEFAULT_A, k_range=DEFAULT_K, a1_range=DEFAULT_A1,
                   grid: GridSpec = DEFAULT_GRID,
                   harmonic_tol: float = fields.HARMONIC_TOL,
                   biharmonic_tol: float = fields.BIHARMONIC_TOL,
                   workers: int = 1) -> SweepReport:
    """Evaluate every tuple of the product grid and classify it.

    Rows are sorted by ``(a, k, a₁)`` so the report does not depend on the
    evaluation order; ``workers > 1`` evaluates tuples on a thread pool.
    """
    a_vals = [float(a) for a in a_range]
    if any(a == 0 for a in a_vals):
        raise ValueError("a = 0 is excluded from the linear family")
    tuples = sorted({(a, float(k), float(a1)) for a in a_vals for k in k_range for a1 in a1_range})

    def job(t):
        return _evaluate(*t, grid, harmonic_tol, biharmonic_tol)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(job, tuples))
    else:
        rows = [job(t) for t in tuples]
    rows.sort(key=lambda r: (r.a, r.k, r.a1))
    return SweepReport(tuple(rows), grid, harmonic_tol, biharmonic_tol)
