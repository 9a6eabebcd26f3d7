"""Scalar function bundles and the numeric substrate.

A :class:`SmoothFn` carries hand-coded derivatives up to order four, which is
what the fourth-order residual equations consume.  Finite differences,
adaptive Simpson quadrature and sign-change root bracketing live here as
well; they serve both as building blocks and as independent oracles for the
analytic derivative bundles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import (
    DerivativeOrderError,
    DomainError,
    GridError,
    QuadratureError,
    StencilOutsideDomain,
)

MAX_ORDER = 4
DEFAULT_TOL = 1e-10
DEFAULT_RTOL = 1e-13
MAX_DEPTH = 40
DEFAULT_EPS = 1e-3
SCAN_POINTS = 100_001

_INF = math.inf
_EPS = np.finfo(float).eps

Interval = tuple[float, float]


def _out(r, value):
    """Return python floats for scalar input, arrays otherwise."""
    if np.ndim(value) == 0:
        return float(value)
    return value


def _full(r, v):
    return np.full(np.shape(r), float(v))


# ---------------------------------------------------------------------------
# derivative bundles
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SmoothFn:
    """A real function of one variable with derivatives 1..4.

    ``parts[k]`` evaluates the k-th derivative; ``parts[0]`` is the function
    itself.  Every evaluation is checked against the open interval
    ``domain``; there is no extrapolation.

    Bundles combine with ``+``, ``-`` and ``*`` (scalars or other bundles,
    Leibniz rule) and with :func:`compose` (Faa di Bruno), so derivatives of
    composite profiles stay analytic.
    """

    parts: tuple[Callable, ...]
    domain: Interval = (-_INF, _INF)
    name: str = ""

    def __post_init__(self):
        lo, hi = self.domain
        if not lo < hi:
            raise DomainError(f"empty domain {self.domain} for {self.name!r}")

    @property
    def max_order(self) -> int:
        return len(self.parts) - 1

    def contains(self, r) -> bool:
        lo, hi = self.domain
        arr = np.asarray(r, dtype=float)
        return bool(np.all((arr > lo) & (arr < hi)))

    def _check(self, r):
        arr = np.asarray(r, dtype=float)
        if not self.contains(arr):
            lo, hi = self.domain
            bad = arr[~((arr > lo) & (arr < hi))] if arr.ndim else arr
            raise DomainError(
                f"{self.name or 'function'} evaluated at {np.ravel(bad)[:3]} "
                f"outside its domain ({lo}, {hi})"
            )
        return arr

    def deriv(self, k: int, r):
        if k < 0 or k > self.max_order:
            raise DerivativeOrderError(
                f"derivative of order {k} unavailable for {self.name!r} "
                f"(carries up to {self.max_order})"
            )
        arr = self._check(r)
        return _out(arr, np.asarray(self.parts[k](arr), dtype=float))

    def __call__(self, r):
        return self.deriv(0, r)

    def jet(self, r, order: int = MAX_ORDER) -> list:
        """Values of the function and its derivatives up to ``order``."""
        if order > self.max_order:
            raise DerivativeOrderError(
                f"{self.name!r} carries derivatives up to {self.max_order}, "
                f"{order} requested"
            )
        arr = self._check(r)
        return [
            _out(arr, np.asarray(self.parts[k](arr), dtype=float))
            for k in range(order + 1)
        ]

    # -- algebra ----------------------------------------------------------

    def __add__(self, other):
        if isinstance(other, SmoothFn):
            n = min(len(self.parts), len(other.parts))
            parts = tuple(
                (lambda r, f=f, g=g: f(r) + g(r))
                for f, g in zip(self.parts[:n], other.parts[:n])
            )
            return SmoothFn(parts, _intersect(self.domain, other.domain),
                            f"({self.name}+{other.name})")
        c = float(other)
        f0 = self.parts[0]
        parts = ((lambda r: f0(r) + c),) + self.parts[1:]
        return SmoothFn(parts, self.domain, f"({self.name}+{c:g})")

    __radd__ = __add__

    def __neg__(self):
        return self * -1.0

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, SmoothFn):
            return _product(self, other)
        c = float(other)
        parts = tuple((lambda r, f=f: c * f(r)) for f in self.parts)
        return SmoothFn(parts, self.domain, f"{c:g}*{self.name}")

    __rmul__ = __mul__


def _intersect(a: Interval, b: Interval) -> Interval:
    return (max(a[0], b[0]), min(a[1], b[1]))


def _product(f: SmoothFn, g: SmoothFn) -> SmoothFn:
    n = min(len(f.parts), len(g.parts))

    def make(order):
        coeffs = [math.comb(order, j) for j in range(order + 1)]

        def part(r):
            return sum(
                coeffs[j] * f.parts[j](r) * g.parts[order - j](r)
                for j in range(order + 1)
            )

        return part

    return SmoothFn(tuple(make(k) for k in range(n)),
                    _intersect(f.domain, g.domain), f"{f.name}*{g.name}")


def compose(outer: SmoothFn, inner: SmoothFn) -> SmoothFn:
    """``outer(inner(r))`` with derivatives by Faa di Bruno up to order 4.

    The result lives on ``inner.domain``; whether ``inner`` lands inside
    ``outer.domain`` is checked at evaluation time.
    """
    order = min(outer.max_order, inner.max_order, MAX_ORDER)

    def outer_jet(r):
        u = inner.parts[0](r)
        outer._check(u)
        return u, [outer.parts[k](u) for k in range(order + 1)]

    def part(k):
        def fn(r):
            u, F = outer_jet(r)
            if k == 0:
                return F[0]
            g = [inner.parts[j](r) for j in range(k + 1)]
            if k == 1:
                return F[1] * g[1]
            if k == 2:
                return F[2] * g[1] ** 2 + F[1] * g[2]
            if k == 3:
                return F[3] * g[1] ** 3 + 3 * F[2] * g[1] * g[2] + F[1] * g[3]
            return (F[4] * g[1] ** 4 + 6 * F[3] * g[1] ** 2 * g[2]
                    + F[2] * (3 * g[2] ** 2 + 4 * g[1] * g[3]) + F[1] * g[4])

        return fn

    return SmoothFn(tuple(part(k) for k in range(order + 1)), inner.domain,
                    f"{outer.name}∘{inner.name}")


# -- catalog -----------------------------------------------------------------


def constant(value: float, domain: Interval = (-_INF, _INF)) -> SmoothFn:
    v = float(value)
    zero = lambda r: _full(r, 0.0)  # noqa: E731
    return SmoothFn((lambda r: _full(r, v),) + (zero,) * 4, domain, f"{v:g}")


def linear(slope: float, offset: float = 0.0,
           domain: Interval = (-_INF, _INF)) -> SmoothFn:
    a, b = float(slope), float(offset)
    zero = lambda r: _full(r, 0.0)  # noqa: E731
    return SmoothFn(
        (lambda r: a * r + b, lambda r: _full(r, a), zero, zero, zero),
        domain, f"{a:g}r+{b:g}",
    )


def identity(domain: Interval = (-_INF, _INF)) -> SmoothFn:
    return linear(1.0, 0.0, domain)


def sine(domain: Interval = (-_INF, _INF)) -> SmoothFn:
    return SmoothFn(
        (np.sin, np.cos, lambda r: -np.sin(r), lambda r: -np.cos(r), np.sin),
        domain, "sin",
    )


def square() -> SmoothFn:
    zero = lambda r: _full(r, 0.0)  # noqa: E731
    return SmoothFn(
        (lambda u: u * u, lambda u: 2.0 * u, lambda u: _full(u, 2.0), zero, zero),
        name="u²",
    )


def log_tan_half() -> SmoothFn:
    """``ln tan(r/2)`` on (0, pi); its derivative is ``1/sin r``."""

    def d0(r):
        return np.log(np.tan(0.5 * r))

    def d1(r):
        return 1.0 / np.sin(r)

    def d2(r):
        return -np.cos(r) / np.sin(r) ** 2

    def d3(r):
        s, c = np.sin(r), np.cos(r)
        return (c * c + 1.0) / s ** 3

    def d4(r):
        s, c = np.sin(r), np.cos(r)
        csc, cot = 1.0 / s, c / s
        return -csc * cot ** 3 - 5.0 * csc ** 3 * cot

    return SmoothFn((d0, d1, d2, d3, d4), (0.0, math.pi), "ln tan(r/2)")


def neg_log_sin() -> SmoothFn:
    """``-ln sin r`` on (0, pi)."""

    def d2(r):
        return 1.0 / np.sin(r) ** 2

    def d3(r):
        s = np.sin(r)
        return -2.0 * np.cos(r) / s ** 3

    def d4(r):
        s, c = np.sin(r), np.cos(r)
        return 2.0 * (2.0 * c * c + 1.0) / s ** 4

    return SmoothFn(
        (lambda r: -np.log(np.sin(r)), lambda r: -np.cos(r) / np.sin(r), d2, d3, d4),
        (0.0, math.pi), "-ln sin r",
    )


def two_arctan_exp() -> SmoothFn:
    """``2 arctan(e^t)``, the inverse of ``t = ln tan(r/2)``."""

    def sech(t):
        return 1.0 / np.cosh(t)

    def d3(t):
        s, th = sech(t), np.tanh(t)
        return s * th * th - s ** 3

    def d4(t):
        s, th = sech(t), np.tanh(t)
        return -s * th ** 3 + 5.0 * s ** 3 * th

    return SmoothFn(
        (lambda t: 2.0 * np.arctan(np.exp(t)), sech,
         lambda t: -sech(t) * np.tanh(t), d3, d4),
        name="2 arctan(e^t)",
    )


def sqrt_quadratic(A: float, C0: float, C: float, domain: Interval) -> SmoothFn:
    """``sqrt(A u² + 2 C0 u + C)`` with derivatives from ``λλ' = A u + C0``."""
    A, C0, C = float(A), float(C0), float(C)

    def lam(u):
        return np.sqrt(A * u * u + 2.0 * C0 * u + C)

    def d1(u):
        return (A * u + C0) / lam(u)

    def d2(u):
        # A λ² - (A u + C0)² = A C - C0², so no cancellation near λ = 0
        return (A * C - C0 * C0) / lam(u) ** 3

    def d3(u):
        return -3.0 * d1(u) * d2(u) / lam(u)

    def d4(u):
        return -(3.0 * d2(u) ** 2 + 4.0 * d1(u) * d3(u)) / lam(u)

    return SmoothFn((lam, d1, d2, d3, d4), domain,
                    f"sqrt({A:g}u²+{2 * C0:g}u+{C:g})")


# ---------------------------------------------------------------------------
# grids and grid-valued profiles
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GridSpec:
    """``n`` equispaced points on ``[lo + eps, hi - eps]``."""

    lo: float
    hi: float
    n: int = 2001
    eps: float = DEFAULT_EPS

    def __post_init__(self):
        if not self.lo + self.eps < self.hi - self.eps:
            raise GridError(
                f"empty grid: lo+eps={self.lo + self.eps} >= hi-eps={self.hi - self.eps}"
            )
        if self.n < 9:
            raise GridError(f"grid needs at least 9 points, got {self.n}")
        if self.eps < 0:
            raise GridError("margin eps must be non-negative")

    @property
    def points(self) -> np.ndarray:
        return np.linspace(self.lo + self.eps, self.hi - self.eps, self.n)

    @property
    def step(self) -> float:
        return (self.hi - self.lo - 2 * self.eps) / (self.n - 1)


def fd_weights(offsets: Sequence[int], order: int) -> np.ndarray:
    """Finite-difference weights for unit spacing at integer ``offsets``."""
    o = np.asarray(offsets, dtype=float)
    m = len(o)
    if order >= m:
        raise DerivativeOrderError("stencil too short for the requested order")
    V = np.vander(o, m, increasing=True).T
    rhs = np.zeros(m)
    rhs[order] = math.factorial(order)
    return np.linalg.solve(V, rhs)


def grid_derivative(values: np.ndarray, step: float, order: int) -> np.ndarray:
    """Order-4 accurate derivative of equispaced samples.

    Central stencils (5 points for orders 1-2, 7 for 3-4) in the interior and
    one-sided ``order + 4`` point stencils near the ends.
    """
    if not 1 <= order <= MAX_ORDER:
        raise DerivativeOrderError(f"order must be 1..4, got {order}")
    v = np.asarray(values, dtype=float)
    n = v.size
    half = 2 if order <= 2 else 3
    width = order + 4
    if n < width:
        raise GridError(f"{n} samples are too few for an order {order} stencil")
    out = np.empty(n)
    offs = np.arange(-half, half + 1)
    w = fd_weights(offs, order)
    acc = np.zeros(n - 2 * half)
    for wj, oj in zip(w, offs):
        acc += wj * v[half + oj: n - half + oj]
    out[half: n - half] = acc
    for i in list(range(half)) + list(range(n - half, n)):
        start = min(max(i - width // 2, 0), n - width)
        o = np.arange(start, start + width) - i
        out[i] = fd_weights(o, order) @ v[start: start + width]
    return out / step ** order


@dataclass
class NumericProfile:
    """Samples of a function on a grid, with lazily computed derivatives.

    When built by :func:`antiderivative_on_grid` the profile keeps its
    integrand, and off-grid evaluation integrates exactly from the nearest
    node; that is what makes nested antiderivatives composable.
    """

    grid: GridSpec
    values: np.ndarray
    integrand: Callable | None = None
    tol: float = DEFAULT_TOL
    _derivs: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.grid.n,):
            raise GridError(
                f"profile has {self.values.size} values for a {self.grid.n}-point grid"
            )

    @property
    def points(self) -> np.ndarray:
        return self.grid.points

    def derivative(self, order: int) -> np.ndarray:
        if order == 0:
            return self.values
        if order not in self._derivs:
            self._derivs[order] = grid_derivative(self.values, self.grid.step, order)
        return self._derivs[order]

    def jet(self, order: int = MAX_ORDER) -> list[np.ndarray]:
        return [self.derivative(k) for k in range(order + 1)]

    def __call__(self, r):
        r_arr = np.asarray(r, dtype=float)
        pts = self.points
        lo, hi = pts[0], pts[-1]
        if np.any((r_arr < lo) | (r_arr > hi)):
            raise DomainError(f"profile evaluated outside [{lo}, {hi}]")
        j = np.clip(np.rint((r_arr - lo) / self.grid.step).astype(int), 0, self.grid.n - 1)
        if self.integrand is None:
            from scipy.interpolate import CubicSpline

            return _out(r_arr, CubicSpline(pts, self.values)(r_arr))
        node = pts[j]
        # one short integral per point, so it gets the whole budget; the grid
        # values already carry an accumulated error of about tol
        extra = integrate_many(self.integrand, node, r_arr, self.tol)
        return _out(r_arr, self.values[j] + extra)

    def shifted(self, c: float) -> "NumericProfile":
        return NumericProfile(self.grid, self.values + c, self.integrand, self.tol)


# ---------------------------------------------------------------------------
# finite differences
# ---------------------------------------------------------------------------

_STENCILS = {
    1: (np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0),
    2: (np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / 12.0),
    3: (np.array([-1.0, 2.0, 0.0, -2.0, 1.0]) / 2.0),
    4: (np.array([1.0, -4.0, 6.0, -4.0, 1.0])),
}
_STENCIL_ERROR_ORDER = {1: 4, 2: 4, 3: 2, 4: 2}


def default_step(f, order: int, at: float) -> float:
    lo, hi = getattr(f, "domain", (-_INF, _INF))
    width = hi - lo
    if not math.isfinite(width):
        width = max(1.0, abs(at))
    return width * (1e-3 if order <= 2 else 1e-2)


def fd_derivative(f: Callable, order: int, at: float, step: float | None = None) -> float:
    """Five-point central difference estimate of ``f^(order)(at)``.

    Error is O(step^4) for orders 1-2 and O(step^2) for orders 3-4.
    """
    if order not in _STENCILS:
        raise DerivativeOrderError(f"fd order must be 1..4, got {order}")
    h = default_step(f, order, at) if step is None else float(step)
    xs = at + h * np.arange(-2, 3)
    dom = getattr(f, "domain", None)
    if dom is not None and not (xs[0] > dom[0] and xs[-1] < dom[1]):
        raise StencilOutsideDomain(
            f"stencil [{xs[0]}, {xs[-1]}] leaves the domain {dom}"
        )
    try:
        vals = np.array([float(f(x)) for x in xs])
    except StencilOutsideDomain:
        raise
    except DomainError as exc:
        raise StencilOutsideDomain(str(exc)) from exc
    return float(_STENCILS[order] @ vals / h ** order)


def richardson(f: Callable, order: int, at: float, step: float | None = None,
               levels: int = 1) -> float:
    """Richardson extrapolation of :func:`fd_derivative` over steps h, h/2, ...

    Central stencils have even error expansions, so each level removes the
    next power pair: one level turns O(h^p) into O(h^(p+2)).
    """
    h = default_step(f, order, at) if step is None else float(step)
    p = _STENCIL_ERROR_ORDER[order]
    table = [fd_derivative(f, order, at, h / 2 ** j) for j in range(levels + 1)]
    for lvl in range(levels):
        q = 4.0 ** (lvl) * 2 ** p
        table = [(q * fine - coarse) / (q - 1) for coarse, fine in zip(table, table[1:])]
    return float(table[0])


# ---------------------------------------------------------------------------
# quadrature
# ---------------------------------------------------------------------------


def _vectorized(f: Callable) -> Callable:
    def g(x):
        try:
            y = np.asarray(f(x), dtype=float)
            if y.shape == x.shape:
                return y
        except (TypeError, ValueError):
            pass
        return np.array([float(f(xi)) for xi in x])

    return g


def integrate_many(f: Callable, a, b, tol: float = DEFAULT_TOL,
                   max_depth: int = MAX_DEPTH, rtol: float = DEFAULT_RTOL) -> np.ndarray:
    """Adaptive Simpson on many intervals at once.

    ``f`` must accept a 1-D array.  Every interval ``[a_i, b_i]`` (reversed
    or empty ones allowed) is bisected until the Richardson error estimate is
    below its share of ``tol`` or ``rtol`` times the local integral, or until
    roundoff in the partial sums makes further bisection meaningless.  The
    relative test matters for integrands that are themselves quadratures:
    their values carry noise far above machine epsilon.  Bisecting past ``max_depth`` levels means
    the integrand is not smooth there (typically a pole) and raises
    :class:`QuadratureError`.
    """
    a_arr, b_arr = np.broadcast_arrays(np.asarray(a, float), np.asarray(b, float))
    shape = a_arr.shape
    lo = a_arr.ravel().copy()
    hi = b_arr.ravel().copy()
    m = lo.size
    out = np.zeros(m)
    if m == 0:
        return out.reshape(shape)

    def ev(x):
        y = np.asarray(f(x), dtype=float)
        if y.shape != x.shape:
            y = np.broadcast_to(y, x.shape).astype(float)
        if not np.all(np.isfinite(y)):
            raise QuadratureError("integrand is not finite on the interval")
        return y

    mid = 0.5 * (lo + hi)
    fv = ev(np.concatenate([lo, mid, hi]))
    flo, fmid, fhi = fv[:m], fv[m:2 * m], fv[2 * m:]
    whole = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi)
    idx = np.arange(m)
    tols = np.full(m, float(tol))
    depth = 0
    while idx.size:
        lm = 0.5 * (lo + mid)
        rm = 0.5 * (mid + hi)
        k = idx.size
        fv = ev(np.concatenate([lm, rm]))
        flm, frm = fv[:k], fv[k:]
        # widths of the actual float children; (hi - lo)/2 can be off by an
        # ulp of the endpoints, which dwarfs the error estimate on short cells
        left = (mid - lo) / 6.0 * (flo + 4.0 * flm + fmid)
        right = (hi - mid) / 6.0 * (fmid + 4.0 * frm + fhi)
        delta = left + right - whole
        size = np.abs(left) + np.abs(right)
        floor = np.maximum(64.0 * _EPS, 15.0 * rtol) * size
        ok = np.abs(delta) <= np.maximum(15.0 * tols, floor)
        np.add.at(out, idx[ok], left[ok] + right[ok] + delta[ok] / 15.0)
        bad = ~ok
        if not bad.any():
            break
        depth += 1
        if depth > max_depth:
            worst = idx[bad][0]
            raise QuadratureError(
                f"max subdivision depth {max_depth} exceeded near "
                f"[{a_arr.ravel()[worst]}, {b_arr.ravel()[worst]}]"
            )
        idx = np.concatenate([idx[bad], idx[bad]])
        lo, mid, hi = (np.concatenate([lo[bad], mid[bad]]), np.concatenate([lm[bad], rm[bad]]),
                       np.concatenate([mid[bad], hi[bad]]))
        flo, fmid, fhi = (np.concatenate([flo[bad], fmid[bad]]), np.concatenate([flm[bad], frm[bad]]),
                          np.concatenate([fmid[bad], fhi[bad]]))
        whole = np.concatenate([left[bad], right[bad]])
        tols = np.concatenate([tols[bad], tols[bad]]) / 2.0
    return out.reshape(shape)


def integrate(f: Callable, a: float, b: float, tol: float = DEFAULT_TOL) -> float:
    """Adaptive Simpson estimate of the integral of ``f`` over ``[a, b]``."""
    return float(integrate_many(_vectorized(f), np.array([a]), np.array([b]), tol)[0])


def antiderivative_on_grid(f: Callable, grid: GridSpec, base: float = math.pi / 2,
                           tol: float = DEFAULT_TOL) -> NumericProfile:
    """Grid samples of ``F(r) = integral of f from base to r``.

    ``f`` is called with arrays.  The returned profile remembers ``f`` so it
    can itself appear inside the next integrand.
    """
    fv = _vectorized(f)
    pts = grid.points
    n = grid.n
    cell_tol = tol / n
    cells = integrate_many(fv, pts[:-1], pts[1:], cell_tol)
    j0 = int(np.argmin(np.abs(pts - base)))
    values = np.empty(n)
    values[j0] = integrate_many(fv, np.array([base]), np.array([pts[j0]]), cell_tol)[0]
    values[j0 + 1:] = values[j0] + np.cumsum(cells[j0:])
    values[:j0] = values[j0] - np.cumsum(cells[:j0][::-1])[::-1]
    return NumericProfile(grid, values, fv, tol)


# ---------------------------------------------------------------------------
# root bracketing
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RootBracket:
    lo: float
    hi: float

    @property
    def mid(self) -> float:
        return 0.5 * (self.lo + self.hi)


def bracket_positive_roots(coeffs: Sequence[float], lo: float, hi: float,
                           n_scan: int = SCAN_POINTS,
                           xtol: float = 1e-14) -> list[RootBracket]:
    """Sign-change brackets of a polynomial on ``[lo, hi]``.

    ``coeffs`` are highest degree first (``numpy.polyval`` order).  The
    interval is scanned at ``n_scan`` points and each sign change is narrowed
    by bisection.  An empty list certifies that no sign change exists at the
    scan resolution.
    """
    if not lo < hi:
        raise ValueError("need lo < hi")
    c = np.asarray(coeffs, dtype=float)
    t = np.linspace(lo, hi, n_scan)
    v = np.polyval(c, t)
    brackets = []
    zero = np.flatnonzero(v == 0.0)
    for i in zero:
        brackets.append(RootBracket(float(t[i]), float(t[i])))
    change = np.flatnonzero(v[:-1] * v[1:] < 0.0)
    for i in change:
        a, b = float(t[i]), float(t[i + 1])
        fa = float(np.polyval(c, a))
        while b - a > xtol * max(1.0, abs(a)):
            m = 0.5 * (a + b)
            fm = float(np.polyval(c, m))
            if fm == 0.0:
                a = b = m
                break
            if (fm < 0) == (fa < 0):
                a, fa = m, fm
            else:
                b = m
        brackets.append(RootBracket(a, b))
    return sorted(brackets, key=lambda br: br.lo)
