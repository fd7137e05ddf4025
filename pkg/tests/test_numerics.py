"""Grids, quadrature, finite differences, and jets."""

import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pdml.numerics import (
    Grid,
    GridMismatchError,
    Jet3,
    QuadratureError,
    SampledFunction,
    fd_derivative,
    inner_product,
    jet_cos,
    jet_cosh,
    jet_exp,
    jet_log,
    jet_pow,
    jet_sin,
    jet_sinh,
    jet_sqrt,
    l2_residual,
    quad_adaptive,
    quad_improper,
    sample,
)

SQRT_PI = math.sqrt(math.pi)


class TestGrid:
    def test_spacing(self):
        g = Grid(0.0, 1.0, 101)
        assert g.h == pytest.approx(0.01)
        assert len(g.points) == 101

    def test_too_few_points_rejected(self):
        with pytest.raises(ValueError):
            Grid(0.0, 1.0, 8)

    def test_inverted_bounds_rejected(self):
        with pytest.raises(ValueError):
            Grid(2.0, 1.0, 50)

    def test_sampled_function_length_checked(self):
        with pytest.raises(ValueError):
            SampledFunction(Grid(0, 1, 11), np.zeros(10))

    def test_sampled_function_rejects_nonfinite(self):
        vals = np.zeros(11, dtype=complex)
        vals[3] = np.inf
        with pytest.raises(ValueError):
            SampledFunction(Grid(0, 1, 11), vals)


class TestInnerProduct:
    def test_constant_exact(self):
        g = Grid(0.0, 1.0, 101)
        one = sample(g, lambda x: np.ones_like(x))
        assert inner_product(one, one) == pytest.approx(1.0, abs=1e-14)

    def test_antilinear_first_slot(self):
        g = Grid(0.0, 1.0, 101)
        one = sample(g, lambda x: np.ones_like(x))
        im = sample(g, lambda x: 1j * np.ones_like(x))
        assert inner_product(one, im) == pytest.approx(1j, abs=1e-14)
        assert inner_product(im, one) == pytest.approx(-1j, abs=1e-14)

    def test_normalized_gaussian(self):
        # oracle: int exp(-x^2) dx = sqrt(pi)
        g = Grid(-10.0, 10.0, 4001)
        f = sample(g, lambda x: np.exp(-x * x / 2.0) / math.pi ** 0.25)
        assert inner_product(f, f) == pytest.approx(1.0, abs=1e-10)

    def test_grid_mismatch(self):
        f = sample(Grid(0, 1, 11), lambda x: x)
        h = sample(Grid(0, 2, 11), lambda x: x)
        with pytest.raises(GridMismatchError):
            inner_product(f, h)

    @given(st.integers(0, 2 ** 31 - 1))
    @settings(max_examples=25, deadline=None)
    def test_conjugate_symmetry(self, seed):
        rng = np.random.default_rng(seed)
        g = Grid(-1.0, 1.0, 33)
        f = SampledFunction(g, rng.normal(size=33) + 1j * rng.normal(size=33))
        h = SampledFunction(g, rng.normal(size=33) + 1j * rng.normal(size=33))
        lhs = inner_product(f, h)
        rhs = inner_product(h, f)
        assert lhs == pytest.approx(rhs.conjugate(), rel=1e-12, abs=1e-12)


class TestQuadAdaptive:
    def test_unit_interval(self):
        val, err = quad_adaptive(lambda x: 1.0, 0.0, 1.0, 1e-12)
        assert val == pytest.approx(1.0, abs=1e-13)

    def test_complex_exponential(self):
        val, _ = quad_adaptive(lambda x: cmath.exp(1j * x), 0.0, 1.0, 1e-12)
        expected = math.sin(1.0) + 1j * (1.0 - math.cos(1.0))
        assert val == pytest.approx(expected, abs=1e-12)

    def test_gaussian_tail_bound(self):
        # tail beyond |x|=6 is below 1e-15, so the finite integral hits sqrt(pi)
        val, _ = quad_adaptive(lambda x: math.exp(-x * x), -6.0, 6.0, 1e-13)
        assert val == pytest.approx(SQRT_PI, abs=1e-12)

    def test_exhaustion_carries_best_value(self):
        with pytest.raises(QuadratureError) as info:
            quad_adaptive(lambda x: math.sin(50.0 / (x + 0.01)), 0.0, 1.0, 1e-14, max_intervals=8)
        assert info.value.value is not None
        assert math.isfinite(info.value.err_est) or info.value.err_est == math.inf

    @given(st.floats(-3, 3), st.floats(-3, 3))
    @settings(max_examples=25, deadline=None)
    def test_linearity(self, a, b):
        f = lambda x: math.exp(-x * x)
        h = lambda x: math.cos(x)
        lhs, e1 = quad_adaptive(lambda x: a * f(x) + b * h(x), 0.0, 2.0, 1e-11)
        vf, e2 = quad_adaptive(f, 0.0, 2.0, 1e-11)
        vh, e3 = quad_adaptive(h, 0.0, 2.0, 1e-11)
        assert lhs == pytest.approx(a * vf + b * vh, abs=10 * (e1 + e2 + e3) + 1e-12)


class TestQuadImproper:
    def test_full_line_gaussian(self):
        val, _ = quad_improper(lambda x: math.exp(-x * x), -math.inf, math.inf, 1e-12)
        assert val == pytest.approx(SQRT_PI, abs=1e-10)

    def test_half_line_exponential(self):
        val, _ = quad_improper(lambda x: math.exp(-x), 0.0, math.inf, 1e-12)
        assert val == pytest.approx(1.0, abs=1e-10)

    def test_complete_the_square(self):
        # int exp(-x^2/2 + ix) dx = sqrt(2 pi) exp(-1/2)
        val, _ = quad_improper(lambda x: cmath.exp(-x * x / 2.0 + 1j * x), -math.inf, math.inf, 1e-12)
        assert val == pytest.approx(math.sqrt(2.0 * math.pi) * math.exp(-0.5), abs=1e-9)

    def test_divergent_integrand_detected(self):
        with pytest.raises(QuadratureError):
            quad_improper(lambda x: math.exp(x), 0.0, math.inf, 1e-10)


class TestFdDerivative:
    def test_quadratic_second_derivative_exact(self):
        g = Grid(-1.0, 1.0, 101)
        f = sample(g, lambda x: x * x)
        d2 = fd_derivative(f, 2)
        assert np.max(np.abs(d2.values - 2.0)) < 1e-10

    def test_sine_first_derivative(self):
        g = Grid(-math.pi, math.pi, 2001)
        f = sample(g, np.sin)
        d1 = fd_derivative(f, 1)
        err = np.abs(d1.values - np.cos(g.points))[2:-2]
        assert np.max(err) < 1e-10

    def test_complex_exponential(self):
        g = Grid(-2.0, 2.0, 2001)
        f = sample(g, lambda x: np.exp(1j * x))
        d1 = fd_derivative(f, 1)
        err = np.abs(d1.values - 1j * np.exp(1j * g.points))[2:-2]
        assert np.max(err) < 1e-10

    def test_fourth_order_convergence(self):
        def max_err(n):
            g = Grid(-2.0, 2.0, n)
            d = fd_derivative(sample(g, np.sin), 1)
            return np.max(np.abs(d.values - np.cos(g.points))[2:-2])

        ratio = max_err(501) / max_err(1001)
        assert ratio > 8.0  # 2^3 with slack; exact order would give 16

    def test_band_grows(self):
        g = Grid(-1, 1, 64)
        f = sample(g, lambda x: np.exp(-x * x))
        assert fd_derivative(f, 1).band == 2
        assert fd_derivative(fd_derivative(f, 1), 1).band == 4

    def test_bad_order(self):
        g = Grid(-1, 1, 16)
        with pytest.raises(ValueError):
            fd_derivative(sample(g, lambda x: x), 3)


class TestL2Residual:
    def test_identical(self):
        g = Grid(-1, 1, 101)
        f = sample(g, lambda x: np.exp(-x * x))
        assert l2_residual(f, f) == 0.0

    def test_relative_scaling(self):
        g = Grid(-1, 1, 101)
        f = sample(g, lambda x: np.exp(-x * x))
        double = f.with_values(2.0 * f.values)
        assert l2_residual(double, f) == pytest.approx(1.0, rel=1e-12)

    def test_uniform_offset(self):
        # g normalized: ||f - g|| = eps * sqrt(width of the interior)
        g = Grid(-10.0, 10.0, 4001)
        base = sample(g, lambda x: np.exp(-x * x / 2.0) / math.pi ** 0.25)
        eps = 1e-6
        shifted = base.with_values(base.values + eps)
        assert l2_residual(shifted, base) == pytest.approx(eps * math.sqrt(20.0), rel=1e-2)


# random composites of jet-aware primitives, evaluated against central
# finite differences of the plain scalar evaluation

_UNARY = [
    (jet_exp, cmath.exp),
    (jet_log, cmath.log),
    (jet_sqrt, cmath.sqrt),
    (jet_sin, cmath.sin),
    (jet_cos, cmath.cos),
    (jet_sinh, cmath.sinh),
    (jet_cosh, cmath.cosh),
]


def _random_composite(rng, depth=3):
    """Returns (jet function, scalar function) built from the same ops."""
    if depth == 0:
        kind = rng.integers(0, 3)
        if kind == 0:
            return (lambda j: j), (lambda x: x)
        if kind == 1:
            c = complex(rng.uniform(0.3, 2.0), 0.0)
            return (lambda j, c=c: Jet3.const(c)), (lambda x, c=c: c)
        p = int(rng.integers(2, 4))
        return (lambda j, p=p: jet_pow(j, p)), (lambda x, p=p: x ** p)
    kind = rng.integers(0, 3)
    if kind == 0:
        jf, sf = _random_composite(rng, depth - 1)
        ju, su = _UNARY[rng.integers(0, len(_UNARY))]
        # keep log/sqrt arguments away from the branch cut
        return (lambda j: ju(jet_exp(jet_sin(jf(j))) + 1.5)), \
               (lambda x: su(cmath.exp(cmath.sin(sf(x))) + 1.5))
    j1, s1 = _random_composite(rng, depth - 1)
    j2, s2 = _random_composite(rng, depth - 1)
    if kind == 1:
        return (lambda j: j1(j) * j2(j)), (lambda x: s1(x) * s2(x))
    return (lambda j: j1(j) + j2(j) / (jet_cosh(j2(j)))), \
           (lambda x: s1(x) + s2(x) / cmath.cosh(s2(x)))


def _central_derivatives_once(fn, x, h):
    stencil = [fn(x + k * h) for k in (-3, -2, -1, 0, 1, 2, 3)]
    d1 = (-stencil[0] + 9 * stencil[1] - 45 * stencil[2] + 45 * stencil[4] - 9 * stencil[5] + stencil[6]) / (60 * h)
    d2 = (2 * stencil[0] - 27 * stencil[1] + 270 * stencil[2] - 490 * stencil[3]
          + 270 * stencil[4] - 27 * stencil[5] + 2 * stencil[6]) / (180 * h * h)
    d3 = (stencil[0] - 8 * stencil[1] + 13 * stencil[2] - 13 * stencil[4] + 8 * stencil[5] - stencil[6]) / (8 * h ** 3)
    return d1, d2, d3


def _central_derivatives(fn, x, h=1e-2):
    """Richardson-extrapolated stencils plus a self-estimate of the
    remaining oracle error from the last extrapolation step."""
    vals = [_central_derivatives_once(fn, x, h / 2 ** k) for k in range(3)]
    rich = [tuple((16.0 * f - c) / 15.0 for f, c in zip(fine, coarse))
            for coarse, fine in zip(vals, vals[1:])]
    err = tuple(abs(a - b) for a, b in zip(rich[0], rich[1]))
    return rich[1], err


def test_jet_arithmetic_matches_finite_differences():
    rng = np.random.default_rng(20240817)
    checked = 0
    while checked < 100:
        jf, sf = _random_composite(rng)
        x = rng.uniform(0.4, 1.6)
        try:
            jet = jf(Jet3.seed(x))
            (d1, d2, d3), (e1, e2, e3) = _central_derivatives(sf, x)
        except (ValueError, OverflowError, ZeroDivisionError):
            continue
        scale = max(abs(jet.v0), 1.0)
        if abs(jet.v1) > 1e4 * scale or abs(jet.v3) > 1e6 * scale:
            continue  # steep composites make the FD oracle itself unreliable
        h = 1e-2
        assert jet.v0 == pytest.approx(sf(x), rel=1e-12, abs=1e-12)
        # floors: the oracle's cancellation noise eps |f| / h^k plus its
        # self-estimated truncation from the last Richardson step
        assert jet.v1 == pytest.approx(d1, rel=1e-6, abs=8 * e1 + 64e-16 * scale / h)
        assert jet.v2 == pytest.approx(d2, rel=1e-6, abs=8 * e2 + 64e-16 * scale / h ** 2)
        assert jet.v3 == pytest.approx(d3, rel=1e-6, abs=8 * e3 + 64e-16 * scale / h ** 3)
        checked += 1


def test_jet_chain_rule_on_composed_elementary():
    # d/dx exp(sin x) and friends, where the analytic derivatives are known
    x = 0.7
    jet = jet_exp(jet_sin(Jet3.seed(x)))
    e, s, c = math.exp(math.sin(x)), math.sin(x), math.cos(x)
    assert jet.v0 == pytest.approx(e)
    assert jet.v1 == pytest.approx(e * c)
    assert jet.v2 == pytest.approx(e * (c * c - s))
    assert jet.v3 == pytest.approx(e * (c ** 3 - 3 * s * c - c))


def test_jet_integer_pow_negative_base():
    jet = jet_pow(Jet3.seed(-2.0), 3)
    assert jet.v0 == pytest.approx(-8.0)
    assert jet.v1 == pytest.approx(12.0)
    assert jet.v2 == pytest.approx(-12.0)
    assert jet.v3 == pytest.approx(6.0)
