import math
import zlib

import numpy as np
import pytest
from hypothesis import given, strategies as st

from bitension import funckit, solutions
from bitension.errors import (
    DerivativeOrderError,
    DomainError,
    GridError,
    QuadratureError,
    StencilOutsideDomain,
)
from bitension.funckit import GridSpec, NumericProfile, SmoothFn

# ρ''(π/2) of the pb profile: ½(L'² + L L'') + csc² with L = ln tan(r/2)
PB_SECOND_DERIVATIVE_AT_HALF_PI = 1.5


def catalog_functions():
    """(name, bundle, sampling interval) for every built-in bundle."""
    return [
        ("sin", funckit.sine((0.0, math.pi)), (0.3, math.pi - 0.3)),
        ("constant", funckit.constant(2.5), (-2.0, 2.0)),
        ("linear", funckit.linear(2.0, 0.5), (-2.0, 2.0)),
        ("pb", solutions.pb_profile(), (0.4, math.pi - 0.4)),
        ("mv-example", solutions.mv_profile(C2=-1.0), (0.4, math.pi - 0.4)),
        ("mv-mixed", solutions.mv_profile(0.3, 0.5, -0.4, 0.2, 0.1), (0.4, math.pi - 0.4)),
        ("mv-wide", solutions.mv_profile(-1.5, 2.0, -2.0, 1.7, -1.9), (0.4, math.pi - 0.4)),
        ("ln-tan-half", funckit.log_tan_half(), (0.4, math.pi - 0.4)),
        ("sqrt-quadratic", funckit.sqrt_quadratic(1.0, 0.5, 2.0, (-10.0, 10.0)), (-3.0, 3.0)),
        ("two-arctan-exp", funckit.two_arctan_exp(), (-3.0, 3.0)),
    ]


def oracle(f: SmoothFn, k: int, at: float) -> float:
    """Richardson-extrapolated central differences scaled to the distance
    from the nearest domain end (derivative scales shrink there)."""
    lo, hi = f.domain
    d = min(at - lo, hi - at, 1.0)
    # order 4 needs the wider step to keep rounding (~eps/h⁴) below 1e-8
    return funckit.richardson(f, k, at, (0.2 if k == 4 else 0.1) * d, levels=3)


class TestFiniteDifferences:
    def test_quadratic_second_derivative_exact(self):
        assert funckit.fd_derivative(lambda x: x * x, 2, 1.0, 1e-2) == pytest.approx(2.0, abs=1e-10)

    def test_sine_slope_at_zero(self):
        h = 1e-2
        got = funckit.fd_derivative(np.sin, 1, 0.0, h)
        assert abs(got - 1.0) < 10 * h ** 4

    def test_error_orders(self):
        # halving h divides the error by 2^4 (orders 1-2) or 2^2 (orders 3-4)
        for order, rate in ((1, 16), (2, 16), (3, 4), (4, 4)):
            exact = [math.cos, lambda x: -math.sin(x), lambda x: -math.cos(x), math.sin][order - 1](0.7)
            e1 = abs(funckit.fd_derivative(np.sin, order, 0.7, 0.1) - exact)
            e2 = abs(funckit.fd_derivative(np.sin, order, 0.7, 0.05) - exact)
            assert e1 / e2 == pytest.approx(rate, rel=0.05)

    def test_pb_second_derivative_frozen(self):
        pb = solutions.pb_profile()
        coarse = funckit.richardson(pb, 2, math.pi / 2, 2e-2)
        fine = funckit.richardson(pb, 2, math.pi / 2, 1e-2)
        assert abs(coarse - fine) < 1e-9
        assert fine == pytest.approx(PB_SECOND_DERIVATIVE_AT_HALF_PI, abs=1e-9)
        assert pb.deriv(2, math.pi / 2) == pytest.approx(PB_SECOND_DERIVATIVE_AT_HALF_PI, abs=1e-14)

    def test_stencil_outside_domain(self):
        with pytest.raises(StencilOutsideDomain):
            funckit.fd_derivative(funckit.sine((0.0, math.pi)), 1, 0.01, 0.01)

    def test_unsupported_order(self):
        with pytest.raises(DerivativeOrderError):
            funckit.fd_derivative(np.sin, 5, 0.3)

    def test_default_steps(self):
        f = funckit.sine((0.0, math.pi))
        assert funckit.default_step(f, 1, 1.0) == pytest.approx(math.pi * 1e-3)
        assert funckit.default_step(f, 4, 1.0) == pytest.approx(math.pi * 1e-2)


class TestSmoothFn:
    def test_out_of_domain_is_an_error(self):
        f = funckit.log_tan_half()
        with pytest.raises(DomainError):
            f(0.0)
        with pytest.raises(DomainError):
            f(np.array([1.0, 4.0]))
        with pytest.raises(DomainError):
            f.deriv(3, -1.0)

    def test_missing_order(self):
        f = SmoothFn((np.sin, np.cos))
        with pytest.raises(DerivativeOrderError):
            f.deriv(2, 0.3)
        with pytest.raises(DerivativeOrderError):
            f.jet(0.3, 4)

    def test_empty_domain(self):
        with pytest.raises(DomainError):
            SmoothFn((np.sin,), (1.0, 1.0))

    def test_scalar_and_array_evaluation(self):
        f = funckit.sine()
        assert isinstance(f(0.5), float)
        assert f(np.array([0.5, 1.0])).shape == (2,)

    def test_algebra_matches_pointwise(self):
        s, lt = funckit.sine((0.0, math.pi)), funckit.log_tan_half()
        g = 2.0 * s * lt - lt + 3.0
        r = np.linspace(0.3, 2.8, 7)
        for k in range(5):
            ref = 2.0 * sum(math.comb(k, j) * s.deriv(j, r) * lt.deriv(k - j, r)
                            for j in range(k + 1)) - lt.deriv(k, r) + (3.0 if k == 0 else 0.0)
            np.testing.assert_allclose(g.deriv(k, r), ref, rtol=1e-13, atol=1e-13)

    def test_compose_inverts_t_substitution(self):
        ident = funckit.compose(funckit.log_tan_half(), funckit.two_arctan_exp())
        t = np.linspace(-3, 3, 13)
        np.testing.assert_allclose(ident(t), t, atol=1e-13)
        np.testing.assert_allclose(ident.deriv(1, t), 1.0, atol=1e-12)
        for k in (2, 3, 4):
            np.testing.assert_allclose(ident.deriv(k, t), 0.0, atol=1e-10)

    @pytest.mark.parametrize("name,f,interval", catalog_functions(),
                             ids=[c[0] for c in catalog_functions()])
    def test_bundle_matches_fd_oracle(self, name, f, interval):
        pts = np.random.default_rng(zlib.crc32(name.encode())).uniform(*interval, 50)
        for at in pts:
            for k in range(1, 5):
                ref = oracle(f, k, float(at))
                got = f.deriv(k, float(at))
                assert abs(got - ref) <= 1e-6 * abs(got) + 1e-8, (name, k, at, got, ref)

    @given(u=st.floats(0.0, 1.0), k=st.integers(1, 4), which=st.integers(0, 9))
    def test_bundle_matches_fd_oracle_property(self, u, k, which):
        _, f, (lo, hi) = catalog_functions()[which]
        at = lo + u * (hi - lo)
        got = f.deriv(k, at)
        assert abs(got - oracle(f, k, at)) <= 1e-6 * abs(got) + 1e-8


class TestGrids:
    def test_points_strictly_interior(self):
        g = GridSpec(0.0, math.pi, 101, 1e-3)
        assert g.points[0] == pytest.approx(1e-3)
        assert g.points[-1] == pytest.approx(math.pi - 1e-3)
        assert g.points.size == 101

    @pytest.mark.parametrize("kw", [dict(lo=0.0, hi=1.0, n=8), dict(lo=0.0, hi=1.0, n=50, eps=0.6),
                                    dict(lo=1.0, hi=0.0, n=50)])
    def test_invalid(self, kw):
        with pytest.raises(GridError):
            GridSpec(**kw)

    def test_profile_length_checked(self):
        with pytest.raises(GridError):
            NumericProfile(GridSpec(0.0, 1.0, 20, 0.0), np.zeros(19))

    def test_grid_derivatives_bit_reproducible(self):
        g = GridSpec(0.1, 3.0, 301, 0.0)
        vals = np.sin(g.points) * np.exp(g.points)
        a = NumericProfile(g, vals).jet()
        b = NumericProfile(g, vals.copy()).jet()
        for x, y in zip(a, b):
            assert np.array_equal(x, y)

    def test_grid_derivatives_are_fourth_order(self):
        errs = []
        for n in (201, 401):
            g = GridSpec(0.1, 3.0, n, 0.0)
            p = NumericProfile(g, np.sin(g.points))
            errs.append(np.max(np.abs(p.derivative(2) + np.sin(g.points))))
        assert errs[0] / errs[1] > 12


class TestQuadrature:
    def test_sine_integral(self):
        assert funckit.integrate(np.sin, 0.0, math.pi, 1e-10) == pytest.approx(2.0, abs=1e-10)

    def test_cosecant_integral_is_t_variable(self):
        got = funckit.integrate(lambda r: 1 / np.sin(r), math.pi / 4, math.pi / 2, 1e-10)
        assert got == pytest.approx(-math.log(math.sqrt(2) - 1), abs=1e-10)

    def test_cubic(self):
        assert funckit.integrate(lambda x: x ** 3, 0.0, 1.0) == pytest.approx(0.25, abs=1e-12)

    def test_reversed_interval(self):
        assert funckit.integrate(np.cos, 1.0, 0.0) == pytest.approx(-math.sin(1.0), abs=1e-10)

    def test_pole_raises(self):
        with pytest.raises(QuadratureError):
            funckit.integrate(lambda x: 1.0 / np.abs(x - 1 / math.e) ** 0.9, 0.0, 1.0)

    def test_infinite_integrand_raises(self):
        with pytest.raises(QuadratureError), np.errstate(divide="ignore"):
            funckit.integrate(lambda x: 1.0 / x, 0.0, 1.0)

    def test_max_depth_is_the_configured_cap(self):
        assert funckit.MAX_DEPTH == 40
        assert funckit.DEFAULT_TOL == 1e-10

    def test_short_cells_far_from_zero_converge(self):
        # cells of width 1e-5 near r = 3.13: child widths differ from half the
        # parent width by an ulp, which must not stall the bisection
        a = np.linspace(3.12, 3.14, 200)
        got = funckit.integrate_many(lambda r: 1 / np.sin(r), a, a + 1e-5, 1e-17)
        exact = np.log(np.tan((a + 1e-5) / 2)) - np.log(np.tan(a / 2))
        np.testing.assert_allclose(got, exact, rtol=1e-11)

    @given(a=st.floats(-2, 2), b=st.floats(-2, 2), c=st.floats(-2, 2),
           w=st.floats(0.2, 3.0), ph=st.floats(0, 6.3))
    def test_additive(self, a, b, c, w, ph):
        tol = 1e-10

        def f(x):
            return np.sin(w * x + ph) * np.exp(0.3 * x) + x * x

        total = funckit.integrate(f, a, b, tol) + funckit.integrate(f, b, c, tol)
        assert abs(total - funckit.integrate(f, a, c, tol)) <= 3 * tol


class TestAntiderivative:
    def test_cosine_from_left_end(self):
        g = GridSpec(0.1, 3.0, 301, 0.0)
        F = funckit.antiderivative_on_grid(np.cos, g, base=0.1)
        np.testing.assert_allclose(F.values, np.sin(g.points) - math.sin(0.1), atol=1e-10)

    def test_cosecant_gives_t_variable(self):
        g = GridSpec(0.0, math.pi, 501, 1e-2)
        F = funckit.antiderivative_on_grid(lambda r: 1 / np.sin(r), g)
        np.testing.assert_allclose(F.values, np.log(np.tan(g.points / 2)), atol=1e-10)

    def test_nested_layer(self):
        g = GridSpec(0.0, math.pi, 501, 1e-2)
        inv = funckit.antiderivative_on_grid(lambda r: 1 / np.sin(r), g)
        C1, C2 = 0.0, 1.0
        F = funckit.antiderivative_on_grid(
            lambda r: C1 * np.sin(r) * inv(r) + C2 * np.sin(r), g)
        np.testing.assert_allclose(F.values, -np.cos(g.points), atol=1e-10)

    def test_off_grid_evaluation(self):
        g = GridSpec(0.0, math.pi, 201, 1e-2)
        F = funckit.antiderivative_on_grid(lambda r: 1 / np.sin(r), g)
        r = np.linspace(0.05, 3.0, 37)
        np.testing.assert_allclose(F(r), np.log(np.tan(r / 2)), atol=1e-10)
        with pytest.raises(DomainError):
            F(3.14)

    def test_fd_recovers_integrand(self):
        g = GridSpec(0.0, math.pi, 1001, 1e-2)

        def f(r):
            return np.cos(3 * r) / (1.5 + np.sin(r))

        F = funckit.antiderivative_on_grid(f, g)
        interior = slice(5, -5)
        np.testing.assert_allclose(F.derivative(1)[interior], f(g.points)[interior], atol=1e-6)
        for at in np.linspace(0.3, 2.8, 9):
            assert funckit.fd_derivative(F, 1, at, 1e-3) == pytest.approx(f(at), abs=1e-6)


class TestRootBrackets:
    def test_cubic_has_no_positive_root(self):
        assert funckit.bracket_positive_roots([3, 13, -1, 1], 0.0, 100.0) == []

    def test_linear(self):
        (br,) = funckit.bracket_positive_roots([1, -1], 0.0, 2.0)
        assert br.lo <= 1.0 <= br.hi
        assert br.hi - br.lo < 1e-13

    def test_quadratic_in_a_squared(self):
        brs = funckit.bracket_positive_roots([12, -4, -1], 0.0, 10.0)
        assert len(brs) == 1
        assert brs[0].mid == pytest.approx(0.5, abs=1e-13)

    def test_root_on_scan_point(self):
        brs = funckit.bracket_positive_roots([1, -1], 0.0, 2.0, n_scan=3)
        assert [b.mid for b in brs] == [1.0]

    def test_bad_interval(self):
        with pytest.raises(ValueError):
            funckit.bracket_positive_roots([1, 0], 1.0, 1.0)

    @given(roots=st.lists(st.floats(0.05, 9.5), min_size=1, max_size=4, unique=True))
    def test_brackets_contain_simple_roots(self, roots):
        roots = sorted(roots)
        if min(np.diff(roots), default=1.0) < 1e-3:
            return
        coeffs = np.poly(roots)
        brs = funckit.bracket_positive_roots(coeffs, 0.0, 10.0)
        assert len(brs) == len(roots)
        for br, r in zip(brs, roots):
            assert br.lo - 1e-9 <= r <= br.hi + 1e-9

    def test_cubic_minimum_closed_form(self):
        t = (-13 + math.sqrt(178)) / 9
        phi = np.polyval([3, 13, -1, 1], t)
        closed = 4 / 243 * (1247 - 89 * math.sqrt(178))
        assert abs(phi - closed) < 1e-12
        assert phi == pytest.approx(0.98094, abs=5e-6)
