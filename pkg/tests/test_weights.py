import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.special import gammaln

from ultragabor import weights as W
from ultragabor.errors import NotNormalized, TabulationTooShort
from ultragabor.verdict import Status


def brute_associated(M, t, P=200):
    p = np.arange(P + 1)
    lm = M.log_M(p)
    return np.max(p[None, :] * np.log(np.asarray(t))[:, None] - lm[None, :] + lm[0], axis=1).clip(min=0.0)


# -- weight functions ---------------------------------------------------------


def test_power_weight_is_normalized():
    w = W.power_weight(1)
    assert w.is_normalized
    assert w(np.array([0.5, 1.0, 3.0])) == pytest.approx([0.0, 0.0, 2.0])


def test_conjugate_of_exponential_phi_closed_form():
    # phi(x) = e^x - 1 gives phi*(y) = y log y - y + 1 for y >= 1 and 0 below
    w = W.power_weight(1)
    y = np.array([0.5, 1.0, 2.0, 5.0, 40.0])
    expected = np.where(y >= 1, y * np.log(y) - y + 1, 0.0)
    assert W.young_conjugate(w, y) == pytest.approx(expected, abs=1e-9, rel=1e-9)


def test_conjugate_of_log_square():
    # phi(x) = x^2 for x >= 0, so phi*(y) = y^2 / 4
    w = W.log_power_weight(2)
    y = np.linspace(0.0, 20.0, 41)
    assert W.young_conjugate(w, y) == pytest.approx(y ** 2 / 4, abs=1e-9)


@given(st.floats(0.0, 6.0))
def test_biconjugate_recovers_phi(x):
    w = W.power_weight(2)
    assert W.biconjugate(w, np.array([x]))[0] == pytest.approx(float(w.phi(np.array([x]))[0]), abs=1e-6)


@given(st.floats(0.1, 30.0), st.floats(0.1, 30.0), st.floats(0.0, 1.0))
def test_conjugate_is_convex(y1, y2, lam):
    conj = W.power_weight(1).conjugate()
    mid = conj(lam * y1 + (1 - lam) * y2)
    assert mid <= lam * conj(y1) + (1 - lam) * conj(y2) + 1e-9


def test_unnormalized_function_rejected():
    w = W.WeightFunction(lambda t: t + 1.0, "shifted", normalize=False)
    with pytest.raises(NotNormalized):
        w.conjugate()


@pytest.mark.parametrize("factory", [lambda: W.power_weight(1), lambda: W.power_weight(2),
                                     lambda: W.log_power_weight(2)])
def test_growth_conditions_hold_for_battery(factory):
    assert all(v.holds for v in W.check_weight_function(factory()))


def test_growth_conditions_detect_bad_functions():
    _, gamma, _ = W.check_weight_function(W.log_weight())
    assert gamma.fails
    alpha, _, _ = W.check_weight_function(W.exponential_weight())
    assert alpha.fails


@pytest.mark.parametrize("h,k,l", [(1.0, 1.0, 1.0), (2.0, 1.0, 2.0), (0.5, 3.0, 0.0)])
def test_shift_constants_certify_inequality(h, k, l):
    w = W.power_weight(1)
    m, C = W.lemma21_find_constants(w, h, k, l)
    y = np.linspace(0.0, 30.0, 601)
    assert m <= h
    assert W.lemma21_residual_max(w, m, h, k, l, y) <= math.log(C) + 1e-9


def test_shift_constants_variant():
    w = W.power_weight(1)
    h, C = W.lemma21_variant(w, 1.0, 1.0, 1.0)
    assert h >= 1.0
    assert W.lemma21_residual_max(w, 1.0, h, 1.0, 1.0, np.linspace(0, 20, 401)) <= math.log(C) + 1e-9


def test_trivial_shift_needs_no_search():
    assert W.lemma21_find_constants(W.power_weight(1), 3.0, 0.0, 0.0) == (3.0, 1.0)


# -- weight sequences ---------------------------------------------------------


def test_associated_function_fixed_value():
    # the supremum of log(2.5^p / p!) is attained at p = 2: log(6.25 / 2)
    assert W.associated_function(W.gevrey(1), 2.5) == pytest.approx(math.log(3.125), abs=1e-12)


@given(st.floats(0.0, 1.0))
def test_associated_function_matches_brute_force(u):
    # below mu_150 the maximizing index is at most 150, inside the brute-force range
    for M in (W.gevrey(1), W.gevrey(2), W.log_power(1)):
        t = max(u * math.exp(M.log_mu(np.array([150]))[0]), 1e-3)
        fast = W.associated_function(M, np.array([t]))
        assert fast[0] == pytest.approx(brute_associated(M, [t])[0], abs=1e-10)


@given(st.floats(0.5, 50.0), st.floats(1.0, 4.0))
def test_associated_function_is_monotone(t, factor):
    M = W.gevrey(1.5)
    assert W.associated_function(M, t * factor) >= W.associated_function(M, t)


def test_counting_function_indexings():
    M = W.gevrey(1)
    assert W.counting_function(M, 2.5) == 2
    assert W.counting_function(M, 2.5, indexing="shifted") == 1
    with pytest.raises(ValueError):
        W.counting_function(M, 2.5, indexing="other")


@given(st.floats(0.25, 3.0), st.integers(1, 300))
def test_gevrey_quotients(s, p):
    M = W.gevrey(s)
    assert M.log_mu(np.array([p]))[0] == pytest.approx(s * math.log(p), rel=1e-12, abs=1e-12)
    assert M.log_M(np.array([p]))[0] == pytest.approx(s * gammaln(p + 1), rel=1e-12)


def test_log_power_quotient_matches_difference():
    M = W.log_power(2)
    p = np.arange(1, 400, dtype=float)
    direct = M.log_M(p) - M.log_M(p - 1)
    assert M.log_mu(p) == pytest.approx(direct, rel=1e-9, abs=1e-12)


def test_tabulated_sequence_bounds():
    M = W.tabulated(log_values=np.arange(51) ** 2.0, label="t")
    assert M.index_limit == 50
    with pytest.raises(TabulationTooShort):
        M.log_M(np.array([51]))
    with pytest.raises(TabulationTooShort):
        W.associated_function(M, 1e60)


def test_tabulated_requires_one_input():
    with pytest.raises(ValueError):
        W.tabulated()


@pytest.mark.parametrize("s", [0.5, 1.0, 2.0])
def test_gevrey_stability_conditions(s):
    M = W.gevrey(s)
    assert W.check_M2prime(M).holds
    assert W.check_M2(M).holds
    assert W.check_M2star(M).holds
    assert W.check_nonquasianalytic(M).holds == (s > 1)


def test_quasianalytic_verdict_is_a_failure_not_inconclusive():
    assert W.check_nonquasianalytic(W.gevrey(1)).status is Status.FAILS


def test_exp_square_fails_stability():
    M = W.exp_square()
    assert W.check_M2prime(M).holds
    assert W.check_M2(M).fails


def test_slowly_growing_sequence_quotient_condition():
    assert W.check_omega_seq(W.log_power(1)).holds
    assert W.check_omega_seq(W.gevrey(2)).fails
    assert W.check_M2star(W.log_power(1)).fails


def test_sequence_inclusions():
    assert W.relation_subset(W.gevrey(1), W.gevrey(2)).holds
    assert W.relation_subset(W.gevrey(2), W.gevrey(1)).fails
    assert W.relation_prec(W.gevrey(1), W.gevrey(2)).holds
    assert W.relation_prec(W.gevrey(1), W.gevrey(1)).fails


@pytest.mark.parametrize("variant,value", [("i", 2.0), ("ii", 2.0), ("iii", 2.0), ("iv", 2.0)])
def test_sequence_conjugate_bounds_are_certified(variant, value):
    M = W.gevrey(2)
    paired, C = W.lemma22_bounds(M, variant, value)
    assert W.lemma22_residual_max(M, variant, value, paired, C) <= 1e-9


def test_invariants_of_standard_sequences():
    for M in (W.gevrey(1), W.log_power(1), W.exp_square()):
        inv = M.check_invariants()
        assert inv["log_convex"] and inv["root_growth"]
