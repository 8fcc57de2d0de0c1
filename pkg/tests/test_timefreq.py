import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ultragabor import testfunctions as T
from ultragabor import timefreq as F
from ultragabor.errors import InvalidLattice, TruncationTooTight, WindowsOrthogonal

G = T.gaussian_window()


def gaussian_stft(x, xi):
    return np.exp(-1j * math.pi * x * xi) * np.exp(-math.pi * (x * x + xi * xi) / 2) / math.sqrt(2)


@pytest.fixture(scope="module")
def christensen_pair():
    return T.christensen_window(), T.christensen_dual(1.0 / 3.0)


@pytest.fixture(scope="module")
def dual_half():
    return F.gaussian_dual(0.5, 0.5)


def test_inner_product_of_gaussians():
    assert F.inner(G, G) == pytest.approx(1 / math.sqrt(2), abs=1e-15)
    for n in range(4):
        # physicists' normalisation: squared norm 2^n n! / sqrt 2
        expected = 2 ** n * math.factorial(n) / math.sqrt(2)
        assert F.l2_norm(T.hermite_window(n)) ** 2 == pytest.approx(expected, rel=1e-12)


@given(st.floats(-3, 3), st.floats(-3, 3))
def test_gaussian_stft_closed_form(x, xi):
    assert abs(F.stft(G, G, x, xi) - gaussian_stft(x, xi)) < 1e-14


@given(st.floats(-1, 1), st.floats(-1, 1), st.floats(-2, 2), st.floats(-2, 2))
def test_stft_covariance(u, eta, x, xi):
    f = T.hermite_window(1)
    shifted = T.modulate(T.translate(f, u), eta)
    lhs = F.stft(shifted, G, x, xi)
    rhs = np.exp(-2j * math.pi * (xi - eta) * u) * F.stft(f, G, x - u, xi - eta)
    assert abs(lhs - rhs) < 1e-12


def test_stft_matrix_matches_pointwise_and_error_estimate():
    xs, xis = np.linspace(-1, 1, 5), np.linspace(-2, 2, 7)
    V, err = F.stft_matrix(G, G, xs, xis, with_error=True)
    X, XI = np.meshgrid(xs, xis, indexing="ij")
    assert np.abs(V - gaussian_stft(X, XI)).max() < 1e-14
    assert err < 1e-10


def test_multiplier_stft_with_polynomial_growth():
    t = T.polynomial([0, 1], "t")
    # V_g t (x, 0) = int t g(t - x) dt = x, since g has unit integral and is even
    assert F.stft_of_multiplier(t, G, 0.75, 0.0) == pytest.approx(0.75, abs=1e-12)


@pytest.mark.parametrize("pair", [(0, 0), (1, 0), (2, 1), (3, 2)])
def test_stft_isometry(pair):
    f, psi = T.hermite_window(pair[0]), T.hermite_window(pair[1])
    ratio = F.stft_l2_norm(f, psi) ** 2 / (F.l2_norm(f) ** 2 * F.l2_norm(psi) ** 2)
    assert ratio == pytest.approx(1.0, abs=1e-5)


def test_stft_l2_norm_rejects_small_box():
    with pytest.raises(TruncationTooTight):
        F.stft_l2_norm(G, G, radius=1.0)


def test_reconstruction_from_stft():
    grid = F.TimeFrequencyGrid()
    _, rep = F.reconstruct(G, G, G, grid)
    assert rep.passed(1e-6)
    _, rep2 = F.reconstruct(T.hermite_window(2), G, G, grid)
    assert rep2.residual <= 1e-5
    assert rep.details["grid"]["rule"] == "trapezoid"


def test_reconstruction_needs_nonorthogonal_windows():
    with pytest.raises(WindowsOrthogonal):
        F.reconstruct(G, G, T.hermite_window(1))


def test_adjoint_refuses_truncated_field():
    xs = np.linspace(-1, 1, 5)
    V = np.ones((5, 5))
    with pytest.raises(TruncationTooTight):
        F.adjoint_stft(V, xs, xs, G, np.zeros(1))
    assert F.adjoint_stft(np.zeros((5, 5)), xs, xs, G, np.zeros(3)) == pytest.approx(np.zeros(3))


def test_sampled_function_lookup():
    s = F.SampledFunction(-2, 0.5, [1, 2, 3, 4, 5])
    assert s(np.array([-1.0, 0.0, 1.0, 5.0])) == pytest.approx([1, 3, 5, 0])
    with pytest.raises(ValueError):
        s(np.array([0.25]))
    assert (s.support.lo, s.support.hi) == (-1.0, 1.0)


def test_lattice_coefficients_indexing():
    c = F.LatticeCoefficients.zeros(0.5, 0.25, 2, 3)
    c[1, -2] = 2 + 1j
    assert c[1, -2] == 2 + 1j
    assert c.energy() == pytest.approx(5.0)
    assert (c.k_max, c.n_max) == (2, 3)
    assert len(c.rows()) == 5 * 7


def test_fourier_transform_of_gaussian():
    hat = F.fourier_transform(G)
    xi = hat.t
    keep = np.abs(xi) < 4
    assert np.abs(hat.values[keep] - np.exp(-math.pi * xi[keep] ** 2)).max() < 1e-14


def test_christensen_biorthogonality(christensen_pair):
    psi, gamma = christensen_pair
    assert F.wexler_raz_check(psi, gamma, 1.0, 1.0 / 3.0, step=1 / 256).residual <= 1e-8
    assert F.fourier_pair_check(psi, gamma, 1.0, 1.0 / 3.0).residual <= 1e-5


def test_christensen_frame_round_trip(christensen_pair):
    psi, gamma = christensen_pair
    rep = F.frame_roundtrip(G, psi, gamma, 1.0, 1.0 / 3.0, step=1 / 256)
    assert rep.residual <= 1e-8
    assert rep.details["swapped"] <= 1e-8


def test_detuned_window_is_not_dual(christensen_pair):
    psi, _ = christensen_pair
    detuned = T._christensen_combo(0.4)
    assert F.wexler_raz_check(psi, detuned, 1.0, 1.0 / 3.0, step=1 / 256).residual > 1e-3


def test_inverse_identity_on_adjoint_lattice(christensen_pair):
    psi, gamma = christensen_pair
    a, b = 1.0, 1.0 / 3.0
    c = F.LatticeCoefficients.zeros(1 / b, 1 / a, 2, 2)
    c[0, 0], c[1, -1], c[-2, 2] = 1.0, 0.5j, -0.25
    assert F.wr_inverse_identity_check(psi, gamma, a, b, c).residual <= 1e-10
    with pytest.raises(ValueError):
        F.wr_inverse_identity_check(psi, gamma, a, b, F.LatticeCoefficients.zeros(a, b, 1, 1))


def test_gaussian_dual_by_conjugate_gradients(dual_half):
    assert dual_half.iterations < 100
    assert dual_half.wexler_raz.residual <= 1e-6
    v = dual_half.window.values
    assert np.abs(v - v[::-1]).max() < 1e-12  # the canonical dual of an even window is even
    rep = F.frame_roundtrip(G, G, dual_half.window, 0.5, 0.5)
    assert rep.residual <= 1e-6


def test_gaussian_dual_needs_dense_lattice():
    with pytest.raises(InvalidLattice):
        F.gaussian_dual(1.0, 1.0)
    with pytest.raises(ValueError):
        F.gaussian_dual(0.3, 0.5)  # a is not a multiple of the sampling step


def test_critical_lattice_round_trip_breaks():
    assert F.frame_roundtrip(G, G, G, 1.0, 1.0).residual > 1e-2


def test_frame_bounds_degrade_toward_critical_density():
    dense = F.frame_bounds_estimate(G, 0.5, 0.5)
    sparse = F.frame_bounds_estimate(G, 1.05, 1.05)
    assert 0 < dense.lower <= dense.upper
    assert dense.ratio > sparse.ratio
    # at a = b = 1/2 the gaussian frame is nearly tight with bound 1 / (ab sqrt 2)
    assert dense.upper == pytest.approx(4 / math.sqrt(2), rel=0.01)
