import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.special import eval_hermite

from ultragabor import testfunctions as T
from ultragabor.errors import BoundaryMaximum, InvalidLatticeParameter, ZeroAtOrigin
from ultragabor.weights import power_weight


def gaussian_derivative(alpha, x):
    """d^alpha/dx^alpha exp(-pi x^2) through physicists' Hermite polynomials."""
    return (-1) ** alpha * math.pi ** (alpha / 2) * eval_hermite(alpha, math.sqrt(math.pi) * x) * np.exp(-math.pi * x * x)


def five_point(f, k, x, h=1e-3):
    """Derivative of order k from order k-1 by the fourth-order central stencil."""
    g = lambda y: f.derivative(k - 1, y)
    return (-g(x + 2 * h) + 8 * g(x + h) - 8 * g(x - h) + g(x - 2 * h)) / (12 * h)


@given(st.integers(0, 30), st.floats(-4, 4))
def test_gaussian_derivatives_match_hermite_formula(alpha, x):
    got = T.gaussian_window().derivative(alpha, np.array([x]))[0]
    ref = gaussian_derivative(alpha, x)
    assert abs(got - ref) <= 1e-9 * max(1.0, abs(ref)) * (1 + alpha) ** 2


@pytest.mark.parametrize("f", [T.gaussian_window(), T.hermite_window(2), T.christensen_window(),
                               T.modulate(T.translate(T.gaussian_window(), 0.4), 1.5),
                               T.dilate(T.hermite_window(1), 1.7)], ids=lambda f: f.label)
def test_derivatives_agree_with_finite_differences(f):
    x = np.linspace(-1.5, 2.5, 23) + 0.013
    for k in range(1, 6):
        fd = five_point(f, k, x)
        exact = f.derivative(k, x)
        scale = 1.0 + np.abs(f.derivatives(x, k + 4)).max()
        assert np.abs(fd - exact).max() <= 1e-6 * scale


def test_product_rule_against_dilation_identity():
    g = T.gaussian_window()
    prod = T.multiply(g, g)
    dil = T.dilate(g, math.sqrt(2.0))  # exp(-2 pi x^2)
    x = np.linspace(-2, 2, 41)
    a, b = prod.derivatives(x, 12), dil.derivatives(x, 12)
    assert np.abs(a - b).max() <= 1e-12 * np.abs(b).max()


def test_hermite_windows_are_hermite_functions():
    x = np.linspace(-3, 3, 31)
    for n in range(4):
        ref = eval_hermite(n, math.sqrt(2 * math.pi) * x) * np.exp(-math.pi * x * x)
        assert T.hermite_window(n)(x) == pytest.approx(ref, abs=1e-12)


def test_reflection_and_conjugation():
    h1 = T.hermite_window(1)
    x = np.linspace(-2, 2, 9)
    # hermite(1) is odd, so its reflection is its negative
    assert T.reflect(h1).derivatives(x, 5) == pytest.approx(-h1.derivatives(x, 5))
    m = T.modulate(T.gaussian_window(), 0.7)
    assert T.conjugate(m)(x) == pytest.approx(np.conj(m(x)))


def test_arithmetic_operators():
    g = T.gaussian_window()
    x = np.linspace(-1, 1, 5)
    assert (g + g)(x) == pytest.approx(2 * g(x))
    assert (g - g)(x) == pytest.approx(np.zeros(5))
    assert (3.0 * g)(x) == pytest.approx(3 * g(x))
    assert (g * T.polynomial([0, 1]))(x) == pytest.approx(x * g(x))


def test_derivative_order_limit():
    with pytest.raises(ValueError):
        T.gaussian_window(alpha_max=5).derivatives(np.zeros(1), 6)


def test_supports_compose():
    g = T.translate(T.gaussian_window(), 2.0)
    assert g.support.lo == 2.0 and g.support.kind == "gaussian"
    c = T.christensen_window()
    prod = T.multiply(c, T.translate(c, 1.0))
    assert (prod.support.lo, prod.support.hi) == (1.0, 2.0)
    assert T.polynomial([1, 2]).support.kind == "polynomial"
    with pytest.raises(ValueError):
        T.polynomial([1]).support.box()


def test_autocorrelation_needs_nonzero_origin():
    auto = T.autocorrelation_window(T.translate(T.gaussian_window(), 0.3))
    assert auto(np.array(0.0)) == pytest.approx(math.exp(-2 * math.pi * 0.09))
    with pytest.raises(ZeroAtOrigin):
        T.autocorrelation_window(T.hermite_window(1))


# -- bump and partition of unity ----------------------------------------------


def exact_bump_derivative(k, x):
    P = T.bump_prefactor(k)
    xf = Fraction(x)
    w = xf * (1 - xf)
    poly = sum(Fraction(c) * xf ** i for i, c in enumerate(P))
    return float(poly / w ** (2 * k)) * math.exp(-1.0 / float(w))


@given(st.integers(0, 14), st.fractions(Fraction(1, 20), Fraction(19, 20), max_denominator=64))
def test_bump_series_matches_exact_prefactors(k, x):
    got = T.bump_derivatives(np.array([float(x)]), k)[k, 0]
    ref = exact_bump_derivative(k, x)
    assert abs(got - ref) <= 1e-10 * max(1.0, abs(ref))


def test_bump_vanishes_outside_unit_interval():
    x = np.array([-1.0, 0.0, 1.0, 1.5])
    assert np.all(T.bump_derivatives(x, 10) == 0.0)


def test_bump_integral_against_adaptive_quadrature():
    from scipy.integrate import quad
    ref, _ = quad(lambda t: math.exp(-1.0 / (t * (1 - t))) if 0 < t < 1 else 0.0, 0, 1, epsabs=1e-16, epsrel=1e-14)
    assert T.bump_integral() == pytest.approx(ref, rel=1e-12)


@given(st.floats(0.0, 1.0))
def test_christensen_partition_of_unity(x):
    psi = T.christensen_window()
    xs = x + np.arange(-3, 3)
    assert abs(psi(xs).sum() - 1.0) <= 1e-12


def test_christensen_window_shape():
    psi = T.christensen_window()
    assert psi(np.array([0.0, 1.0, 2.0, -0.5, 2.5])) == pytest.approx([0, 1, 0, 0, 0], abs=1e-15)
    x = np.linspace(0.01, 1.99, 99)
    assert psi(x) == pytest.approx(psi(2.0 - x), abs=1e-13)  # symmetric about 1
    # smooth across the joins: derivatives of every order vanish at the endpoints
    assert np.abs(psi.derivatives(np.array([0.0, 1.0, 2.0]), 8)[1:]).max() < 1e-12


def test_christensen_dual_parameter_gate():
    assert T.christensen_dual(0.25).support.lo == -1.0
    for b in (0.0, 0.34, -0.1):
        with pytest.raises(InvalidLatticeParameter):
            T.christensen_dual(b)


# -- tensors and seminorms ----------------------------------------------------


def test_tensor_window_factorises():
    g, h = T.gaussian_window(), T.hermite_window(1)
    F = T.tensor_window([g, h])
    pts = np.array([[0.3, -0.2], [1.0, 0.5]])
    assert F(pts) == pytest.approx(g(pts[:, 0]) * h(pts[:, 1]))
    assert F.derivative((2, 1), pts) == pytest.approx(g.derivative(2, pts[:, 0]) * h.derivative(1, pts[:, 1]))
    with pytest.raises(ValueError):
        F.derivative((1,), pts)


def test_gaussian_seminorm_against_closed_forms():
    # omega(t) = t gives phi*(y) = y log y - y + 1 for y >= 1
    h = 1.0
    x = np.linspace(-6, 6, 12001)
    best = -np.inf
    for alpha in range(41):
        y = h * alpha
        phi_star = y * math.log(y) - y + 1 if y >= 1 else 0.0
        vals = np.abs(gaussian_derivative(alpha, x))
        best = max(best, math.log(vals.max()) - phi_star / h)
    got = T.gs_seminorm(T.gaussian_window(), T.SeminormParams(power_weight(1), h))
    assert got.interior
    assert got.log_value == pytest.approx(best, abs=1e-6)


def test_seminorm_weight_increases_value():
    g = T.gaussian_window()
    P0 = T.SeminormParams(power_weight(1), 1.0)
    P1 = T.SeminormParams(power_weight(1), 1.0, log_v=lambda x: np.abs(x))
    assert T.gs_seminorm(g, P1).log_value >= T.gs_seminorm(g, P0).log_value


def test_compact_window_is_outside_analytic_class():
    with pytest.raises(BoundaryMaximum):
        T.gs_seminorm(T.christensen_window(), T.SeminormParams(power_weight(1), 1.0, step=1e-2))


def test_seminorm_parameters_validated():
    with pytest.raises(ValueError):
        T.SeminormParams(power_weight(1), 0.0)
    with pytest.raises(ValueError):
        T.SeminormParams(power_weight(1), 1.0, alpha_max=0)
