# -*- coding: utf-8 -*-
import logging

import numpy as np
import pytest

from pystein import curie_weiss, metrics
from pystein.discrete_law import DiscreteLaw
from pystein.metrics import (
    bound_terms,
    kolmogorov_distance,
    rate_fit,
    theorem_audit,
    weighted_distance,
)


@pytest.fixture
def cw_law():
    return curie_weiss.w_law(100)


def test_point_mass(normal):
    disc = DiscreteLaw([0.0], [0.0])
    profile = weighted_distance(disc, normal, 0)

    assert np.isclose(profile.supremum, 0.5, rtol=1e-12)
    assert profile.argsup == 0
    assert np.isclose(profile.at(0), 0.5)
    assert profile.z_cut > 0


def test_kolmogorov_equivalence(cw_law, quartic):
    profile = weighted_distance(cw_law, quartic, 0)
    expected = kolmogorov_distance(cw_law, quartic)
    assert np.isclose(profile.supremum, expected, rtol=1e-12)


@pytest.mark.parametrize("weight", ["power", "polynomial"])
def test_supremum_dominates_grid(cw_law, quartic, weight):
    p = 3
    profile = weighted_distance(cw_law, quartic, p, weight=weight)

    z = np.linspace(-5, 5, 20001)
    gap = np.abs(cw_law.cdf(z) - quartic.cdf(z))
    omega = (1 + np.abs(z)) ** p if weight == "power" else 1 + np.abs(z) ** p
    dense = np.max(omega * gap)

    assert profile.supremum >= dense - 1e-12
    # the grid is fine enough to come close
    assert profile.supremum - dense < 0.05 * profile.supremum


def test_refinement(cw_law, quartic):
    coarse = weighted_distance(cw_law, quartic, 3, refine=4)
    fine = weighted_distance(cw_law, quartic, 3, refine=8)
    assert abs(coarse.supremum - fine.supremum) < 1e-9


def test_weight_increases_distance(cw_law, quartic):
    d0 = weighted_distance(cw_law, quartic, 0).supremum
    d3 = weighted_distance(cw_law, quartic, 3).supremum
    assert d3 >= d0


def test_weighted_distance_input(cw_law, quartic):
    with pytest.raises(ValueError):
        weighted_distance(cw_law, quartic, -1)
    with pytest.raises(ValueError):
        weighted_distance(cw_law, quartic, np.nan)
    with pytest.raises(ValueError):
        weighted_distance(cw_law, quartic, 3, weight="exponential")
    with pytest.raises(ValueError):
        weighted_distance(cw_law, quartic, 3, refine=-1)
    with pytest.raises(TypeError):
        weighted_distance(cw_law.probs, quartic, 3)

    unnormalized = DiscreteLaw([0.0, 1.0], [0.0, 0.0], normalize=False)
    with pytest.raises(ValueError):
        weighted_distance(unnormalized, quartic, 3)


def test_rate_fit_power_law():
    ns = [100, 400, 1600, 6400]
    d = 7 * np.asarray(ns, dtype=float) ** -0.5
    fit = rate_fit(ns, d)

    assert np.isclose(fit.slope, -0.5, rtol=1e-12)
    assert np.isclose(fit.intercept, np.log(7), rtol=1e-12)
    assert np.isclose(fit.r_squared, 1)
    assert np.isclose(fit.rate, 0.5)
    assert np.isclose(fit.empirical_constant, 7, rtol=1e-12)

    x, y = fit.points
    assert np.allclose(y, fit.intercept + fit.slope * x)


def test_rate_fit_constant():
    fit = rate_fit([10, 20, 40], [0.3, 0.3, 0.3], rate=0.25)
    assert abs(fit.slope) < 1e-12
    assert np.isclose(fit.empirical_constant, 0.3 * 40**0.25)


def test_rate_fit_log_correction():
    ns = [10**3, 10**4, 10**5, 10**6]
    d = [n**-0.25 * (1 + 0.1 / np.log(n)) for n in ns]
    fit = rate_fit(ns, d, rate=0.25)
    assert abs(fit.slope + 0.25) < 0.05
    assert fit.r_squared > 0.99


def test_rate_fit_input():
    with pytest.raises(ValueError):
        rate_fit([10, 20], [0.1, 0.05])
    with pytest.raises(ValueError):
        rate_fit([10, 20, 40], [0.1, 0.05])
    with pytest.raises(ValueError):
        rate_fit([10, 20, 40], [0.1, 0.0, 0.01])
    with pytest.raises(ValueError):
        rate_fit([10, 20, 40], [0.1, np.inf, 0.01])
    with pytest.raises(ValueError):
        rate_fit([0, 20, 40], [0.1, 0.05, 0.01])


def test_bound_terms_no_large_jumps(cw_diag):
    n = 100
    a = cw_diag.delta_support_bound
    terms = bound_terms(cw_diag, cw_diag.law, a)

    assert np.isclose(a, 2 * n**-0.75, rtol=1e-14)
    # |Delta| <= a everywhere
    assert terms.term_delta4 == 0
    assert terms.uniform_variant_delta2 == 0
    assert np.isclose(terms.term_a, a)
    assert np.isclose(terms.term_a3, 8 * n**-0.75, rtol=1e-12)
    assert np.isclose(terms.bounded_a, 3 * a)
    assert terms.a_used == a

    assert np.isclose(
        terms.bracket,
        terms.term_condvar + terms.term_remainder + terms.term_a + terms.term_a3,
    )
    assert terms.bounded_bracket > 0
    data = terms.to_dict()
    assert data["bracket"] == terms.bracket
    assert "uniform_bracket" in data


def test_bound_terms_truncated(cw_diag):
    a = cw_diag.delta_support_bound / 2
    terms = bound_terms(cw_diag, cw_diag.law, a)

    expected = np.sqrt(cw_diag.law.expect(cw_diag.E_delta4)) / cw_diag.lam
    assert np.isclose(terms.term_delta4, expected, rtol=1e-12)
    expected = cw_diag.law.expect(cw_diag.E_delta2) / cw_diag.lam
    assert np.isclose(terms.uniform_variant_delta2, expected, rtol=1e-12)


def test_bound_terms_moments(cw_diag):
    terms = bound_terms(cw_diag, cw_diag.law, 0.1, k=2)
    assert np.isclose(terms.moment_2k_minus_1, cw_diag.law.abs_moment(3))
    assert np.isclose(
        terms.psi_second_moment, cw_diag.law.expect(cw_diag.law.locations**6 / 9)
    )


def test_bound_terms_decay():
    small = curie_weiss.pair_diagnostics(100)
    large = curie_weiss.pair_diagnostics(6400)
    t_small = bound_terms(small, small.law, small.delta_support_bound)
    t_large = bound_terms(large, large.law, large.delta_support_bound)

    # both terms are of order n**(-1/2)
    assert t_large.term_condvar < t_small.term_condvar / 4
    assert t_large.term_remainder < t_small.term_remainder / 4


def test_bound_terms_input(cw_diag):
    with pytest.raises(ValueError):
        bound_terms(cw_diag, curie_weiss.w_law(102), 0.1)
    with pytest.raises(ValueError):
        bound_terms(cw_diag, cw_diag.law, 0)
    with pytest.raises(TypeError):
        bound_terms(cw_diag.law, cw_diag.law, 0.1)


def test_model_setup(critical):
    law, diag, rate = metrics.model_setup("Curie-Weiss", 50)
    assert law == curie_weiss.CRITICAL_LAW
    assert rate == 0.5
    assert diag.law.size == 51

    law, diag, rate = metrics.model_setup("monomer_dimer", 50)
    assert law == critical.limit_law
    assert rate == 0.25

    with pytest.raises(ValueError):
        metrics.model_setup("ising", 50)


def test_audit_row():
    result = theorem_audit("curie_weiss", 400, 3)
    row = result.row()

    assert list(row) == [
        "model",
        "n",
        "p",
        "distance",
        "argsup_z",
        "term_condvar",
        "term_remainder",
        "term_a",
        "term_a3",
        "term_delta4",
        "implied_const_rate",
        "implied_const_papernorm",
    ]
    assert row["model"] == "curie_weiss"
    assert row["distance"] == result.lhs_profile.supremum
    assert np.isclose(row["implied_const_rate"], row["distance"] * 400**0.5)
    expected = row["implied_const_rate"] / 3**1.5
    assert np.isclose(row["implied_const_papernorm"], expected)
    assert result.implied_constant == row["implied_const_papernorm"]
    assert result.implied_const_full > 0


RATE_GRID = [100, 400, 1600, 6400, 25600]
# below n = 10**4 the n**(-1/2) correction of the monomer-dimer law dominates
MONOMER_DIMER_GRID = [1600, 6400, 25600, 102400, 409600]


@pytest.fixture(scope="module")
def monomer_dimer_audits():
    return [theorem_audit("monomer_dimer", n, 0) for n in MONOMER_DIMER_GRID]


def test_rate_curie_weiss():
    distances = [
        theorem_audit("curie_weiss", n, 0).lhs_profile.supremum for n in RATE_GRID
    ]
    fit = rate_fit(RATE_GRID, distances)
    assert -0.65 <= fit.slope <= -0.40


def test_rate_monomer_dimer(monomer_dimer_audits):
    distances = [r.lhs_profile.supremum for r in monomer_dimer_audits]
    fit = rate_fit(MONOMER_DIMER_GRID, distances)
    assert -0.40 <= fit.slope <= -0.15


def test_leading_constant_monomer_dimer(monomer_dimer_audits, critical):
    # first order correction of the density, 1 + (c1 x + c5 x**5) / n**(1/4),
    # from the Stirling prefactor and the fifth derivative of the free energy
    m = critical.m_c
    c1 = (1 / (1 - m) - 1 / m) / 2
    c5 = (6 / m**4 - 3 / (1 - m) ** 4) / 120
    law = critical.limit_law
    leading = abs(c1 * law.abs_moment(1) + c5 * law.abs_moment(5)) / 2

    consts = [r.implied_const_rate for r in monomer_dimer_audits]
    assert np.all(np.diff(consts) < 0)
    assert np.isclose(consts[-1], leading, rtol=0.05)


@pytest.mark.parametrize("p", [3, 5])
@pytest.mark.parametrize("model", ["curie_weiss", "monomer_dimer"])
def test_audit_stability(model, p):
    consts = [theorem_audit(model, n, p).implied_const_rate for n in RATE_GRID[-3:]]
    assert max(consts) / min(consts) < 2


def test_audit_monomer_dimer():
    result = theorem_audit("monomer_dimer", 400, 3)
    assert result.rate == 0.25
    assert result.lhs_profile.supremum > 0
    assert np.isfinite(result.implied_const_full)


def test_audit_small_p_warning(caplog):
    with caplog.at_level(logging.WARNING):
        theorem_audit("curie_weiss", 100, 1)
    assert "does not apply" in caplog.text

    caplog.clear()
    with caplog.at_level(logging.WARNING):
        theorem_audit("curie_weiss", 100, 0)
    assert "does not apply" not in caplog.text
