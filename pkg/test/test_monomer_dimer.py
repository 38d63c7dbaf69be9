# -*- coding: utf-8 -*-
import numpy as np
import pytest

from pystein import monomer_dimer as md
from pystein.limit_law import LimitLaw
from pystein.metrics import bound_terms
from pystein.util import ResourceLimitError, richardson_derivative


def test_closed_form_constants():
    assert np.isclose(md.J_C, 1.457107, atol=1e-6)
    assert np.isclose(md.H_C, -0.344120, atol=1e-6)
    assert np.isclose(md.M_C, 0.585786, atol=1e-6)


def test_g():
    x = np.linspace(-10, 10, 201)
    g = md.g_fn(x)
    assert np.all((g > 0) & (g < 1))
    assert np.all(np.diff(g) > 0)

    assert np.isclose(md.g_fn(1.0), md.g_naive(1.0), rtol=1e-14)
    x = np.linspace(-3, 3, 61)
    assert np.allclose(md.g_fn(x), md.g_naive(x), rtol=1e-10)

    # root of g**2 + e**(2x) g - e**(2x)
    x0 = 0.3
    g0 = md.g_fn(x0)
    assert np.isclose(g0**2 + np.exp(2 * x0) * g0 - np.exp(2 * x0), 0, atol=1e-14)

    # no overflow in either direction
    assert md.g_fn(800.0) == 1
    assert np.isclose(md.g_fn(-300.0), np.exp(-300.0), rtol=1e-12)


def test_g_prime():
    x = np.linspace(-3, 3, 13)
    h = 1e-6
    numeric = (md.g_fn(x + h) - md.g_fn(x - h)) / (2 * h)
    assert np.allclose(md.g_prime(x), numeric, rtol=1e-7)


def test_p_tilde():
    x = np.linspace(0.2, 0.9, 15)
    h = 1e-6
    numeric = (md.p_tilde(x + h) - md.p_tilde(x - h)) / (2 * h)
    assert np.allclose(md.p_tilde_prime(x), numeric, rtol=1e-6, atol=1e-9)

    assert np.isclose(md.tau_fn(0.5, 2.0, 0.1), 0.1)

    with pytest.raises(ValueError):
        md.p_tilde(1000.0)


def test_critical_point(critical):
    assert critical.m_c == md.M_C
    assert abs(md.g_fn(critical.tau_c) - critical.m_c) <= 1e-12
    for order in (1, 2, 3):
        assert abs(critical.derivatives[order]) <= 1e-6
    assert critical.derivatives[4] < 0
    assert critical.lambda_c > 0

    # closed form of -p_tilde'''' at m_c
    assert np.isclose(critical.lambda_c, 12 + 17 / np.sqrt(2), rtol=1e-5)

    law = critical.limit_law
    assert isinstance(law, LimitLaw)
    assert law.k == 2
    assert np.isclose(law.a, critical.lambda_c / 24)


def test_lambda_c_independent_steps(critical):
    value, _ = richardson_derivative(md.p_tilde, md.M_C, 4, steps=(2e-2, 1e-2, 5e-3))
    assert np.isclose(-value, critical.lambda_c, rtol=1e-4)


def test_matching_count_log():
    assert md.matching_count_log(0) == 0
    assert np.isclose(md.matching_count_log(4), np.log(3))
    assert np.isclose(md.matching_count_log(6), np.log(15))
    assert np.isclose(md.matching_count_log(10), np.log(945))
    assert md.matching_count_log(3) == -np.inf

    with pytest.raises(ValueError):
        md.matching_count_log(-2)


def test_magnetization_law_small():
    n = 4
    law = md.magnetization_law(n)
    t = np.array([0.0, 2.0, 4.0])
    assert np.array_equal(law.locations, t)

    m = t / n
    energy = n * (md.J_C * m**2 + (np.log(n) / 2 + md.H_C - md.J_C) * m)
    expected = np.array([1 * 3, 6 * 1, 1 * 1]) * np.exp(energy)
    assert np.allclose(law.probs, expected / expected.sum(), rtol=1e-13)


def test_parity():
    law = md.magnetization_law(7)
    assert np.array_equal(law.locations, [1, 3, 5, 7])
    assert law.is_normalized()


def test_magnetization_law_large():
    law = md.magnetization_law(1000)
    assert np.isclose(np.sum(law.probs), 1, atol=1e-12)

    n = 10**4
    law = md.magnetization_law(n)
    mode = law.locations[np.argmax(law.log_probs)] / n
    assert abs(mode - md.M_C) <= 0.02


def test_invalid_n():
    with pytest.raises(ValueError):
        md.magnetization_law(1)
    with pytest.raises(ResourceLimitError):
        md.magnetization_law(md.MAX_N + 2)


def test_w_law():
    n = 1000
    law = md.w_law(n)
    assert np.allclose(np.diff(law.locations), 2 * n**-0.75)
    assert law.locations[0] >= -(n**0.25) * md.M_C - 1e-12
    assert law.locations[-1] <= n**0.25 * (1 - md.M_C) + 1e-12

    assert abs(md.w_law(10**5).mean()) < abs(md.w_law(10**3).mean())


def test_pair_lambda():
    values = [md.pair_lambda(n) * n**1.5 for n in [1, 10, 1000, 10**5]]
    assert np.allclose(values, values[0], rtol=1e-14)
    assert md.pair_lambda(1) > 0
    assert np.isclose(values[0], 0.457527, atol=1e-6)


def test_pair_diagnostics():
    n = 50
    diag = md.pair_diagnostics(n)
    scale = n**-0.75

    assert np.allclose(diag.jump_sizes, [scale, 2 * scale])
    assert np.isclose(diag.delta_support_bound, 2 * scale)
    # a pair update keeps the parity of t
    assert np.all(diag.jump_probs[:, 0] == 0)
    assert np.all(diag.jump_probs.sum(axis=1) <= 1)

    assert np.allclose(diag.R, diag.lam * diag.psi_w - diag.E_delta, atol=0)
    lambda_c = md.critical_constants().lambda_c
    assert np.allclose(diag.psi_w, lambda_c * diag.w**3 / 6)
    bound = diag.delta_support_bound**2 * diag.E_delta2
    assert np.all(diag.E_delta4 <= bound * (1 + 1e-12))


@pytest.mark.parametrize("n", [3, 6, 10, 50, 500])
def test_detailed_balance(n):
    assert md.detailed_balance_error(n) < 1e-11


@pytest.mark.parametrize("n", [4, 10, 19, 26, 46, 400])
def test_support_bound_indicator(n):
    diag = md.pair_diagnostics(n)
    terms = bound_terms(diag, diag.law, 2 / n**0.75)
    assert terms.term_delta4 == 0
    assert terms.uniform_variant_delta2 == 0


def test_cond_var_near_zero():
    n = 10**5
    diag = md.pair_diagnostics(n)
    i = np.argmin(np.abs(diag.w))
    assert abs(diag.E_delta2[i] / (2 * diag.lam) - 1) < 0.2


def test_scaling_checks():
    ns = [100, 1000, 10000]
    cond_var = [md.verify_cond_var_scaling(n).empirical_constant for n in ns]
    remainder = [md.verify_remainder_scaling(n).empirical_constant for n in ns]

    for constants in (cond_var, remainder):
        assert np.all(np.isfinite(constants))
        assert min(constants) > 0
        assert max(constants) / min(constants) < 10


def test_tail_concentration():
    delta = 0.1
    v200, v400, v800 = [md.tail_concentration(n, delta) for n in [200, 400, 800]]
    assert v200 > v400 > v800 > 0
    # faster than any fixed power of n
    assert v800 / v400 < v400 / v200

    assert md.tail_concentration(400, 1.0) == 0

    with pytest.raises(ValueError):
        md.tail_concentration(400, 0)
