# -*- coding: utf-8 -*-
import numpy as np
import pytest

from pystein import curie_weiss, monomer_dimer, oracles
from pystein.discrete_law import DiscreteLaw
from pystein.metrics import bound_terms
from pystein.util import NumericConsistencyError, ResourceLimitError


def test_spin_suite():
    assert oracles.run_spin_suite(12) == 11
    assert oracles.run_spin_suite(2) == 1


def test_dimer_suite():
    assert oracles.run_dimer_suite(10) == 9


def test_spin_configurations():
    configs = oracles.spin_configurations(3)
    assert configs.shape == (8, 3)
    assert len({tuple(c) for c in configs}) == 8
    assert set(np.unique(configs)) == {-1.0, 1.0}


def test_spin_law_n2():
    law = oracles.enumerate_spin_law(2)
    assert np.allclose(law.locations, [-2, 0, 2])
    edge = 1 / (2 * (1 + np.exp(-1)))
    assert np.allclose(law.probs, [edge, 1 - 2 * edge, edge], rtol=1e-14)


def test_spin_diagnostics(small_n):
    diag = curie_weiss.pair_diagnostics(small_n)
    oracle = oracles.enumerate_spin_diagnostics(small_n)

    assert np.allclose(diag.w, oracle["w"], rtol=0, atol=1e-14)
    for field in ("prob", "E_delta", "E_delta2", "E_delta4", "R"):
        assert np.allclose(getattr(diag, field), oracle[field], rtol=1e-10, atol=1e-13)


def test_matchings():
    assert oracles.enumerate_matchings(1) == [()]
    assert len(oracles.enumerate_matchings(2)) == 2

    matchings = oracles.enumerate_matchings(4)
    assert len(matchings) == 10
    assert sum(len(m) == 2 for m in matchings) == 3
    # every vertex is covered at most once
    for m in matchings:
        covered = [v for edge in m for v in edge]
        assert len(covered) == len(set(covered))


def test_monomer_set_counts():
    counts = oracles.monomer_set_counts(4)
    assert counts[frozenset()] == 3
    assert counts[frozenset({0, 1})] == 1
    assert counts[frozenset(range(4))] == 1
    assert sum(counts.values()) == 10
    # no dimer configuration leaves a single vertex out of an even set
    assert frozenset({0}) not in counts

    for v, perfect in [(2, 1), (4, 3), (6, 15)]:
        assert oracles.monomer_set_counts(v)[frozenset()] == perfect
        assert np.isclose(np.exp(monomer_dimer.matching_count_log(v)), perfect)


def test_dimer_law_parity():
    law = oracles.enumerate_dimer_law(7)
    assert np.all(law.locations % 2 == 1)
    assert law.is_normalized()


def test_dimer_diagnostics():
    n = 6
    diag = monomer_dimer.pair_diagnostics(n)
    oracle = oracles.enumerate_dimer_diagnostics(n)
    for field in ("w", "prob", "E_delta", "E_delta2", "E_delta4", "R"):
        assert np.allclose(getattr(diag, field), oracle[field], rtol=1e-10, atol=1e-13)


def test_bound_terms_against_oracle():
    n = 6
    diag = curie_weiss.pair_diagnostics(n)
    oracle = oracles.enumerate_spin_diagnostics(n)
    terms = bound_terms(diag, diag.law, diag.delta_support_bound)

    lam = n**-1.5
    gap = 1 - oracle["E_delta2"] / (2 * lam)
    condvar = np.sqrt(np.sum(oracle["prob"] * gap**2))
    remainder = np.sqrt(np.sum(oracle["prob"] * oracle["R"] ** 2)) / lam
    assert np.isclose(terms.term_condvar, condvar, rtol=1e-10)
    assert np.isclose(terms.term_remainder, remainder, rtol=1e-10)


def test_compare():
    oracles.compare("same", [1.0, 2.0], [1.0, 2.0])
    oracles.compare("close", 1.0, 1.0 + 1e-14)
    oracles.compare("relative", 1e3, 1e3 * (1 + 5e-13))

    with pytest.raises(NumericConsistencyError, match="entry 1"):
        oracles.compare("values", [1.0, 2.0], [1.0, 2.1])
    with pytest.raises(NumericConsistencyError):
        oracles.compare("relative", 1e3, 1e3 * (1 + 1e-11))
    with pytest.raises(NumericConsistencyError, match="shape"):
        oracles.compare("shape", [1.0, 2.0], [1.0, 2.0, 3.0])


def test_suite_detects_error(monkeypatch):
    exact = curie_weiss.magnetization_law

    def perturbed(n, beta=1.0):
        law = exact(n, beta)
        log_probs = law.log_probs.copy()
        log_probs[0] += 1e-6
        return DiscreteLaw(law.locations, log_probs)

    monkeypatch.setattr(curie_weiss, "magnetization_law", perturbed)
    with pytest.raises(NumericConsistencyError):
        oracles.run_spin_suite(4)


def test_caps():
    with pytest.raises(ResourceLimitError):
        oracles.spin_configurations(oracles.MAX_SPINS + 1)
    with pytest.raises(ResourceLimitError):
        oracles.enumerate_matchings(oracles.MAX_DIMERS + 1)
    with pytest.raises(ResourceLimitError):
        oracles.run_spin_suite(15)
    with pytest.raises(ResourceLimitError):
        oracles.run_dimer_suite(11)
    with pytest.raises(ValueError):
        oracles.run_spin_suite(0)


def test_spin_bounds_by_enumeration():
    n = 6
    oracle = oracles.enumerate_spin_diagnostics(n)
    w = np.abs(oracle["w"])

    rhs = 2 * w**5 / (15 * n**2) + w / n**2 + n**-2.75
    assert np.all(np.abs(oracle["R"]) <= rhs)

    lhs = np.abs(2 * n**-1.5 - oracle["E_delta2"])
    assert np.all(lhs <= 2 * n**-2.5 + 2 * w**2 / n**2)


def test_concentration_by_enumeration():
    n, z, a_tr = 6, 0.5, 1.0
    oracle = oracles.enumerate_spin_diagnostics(n)
    window = np.abs(oracle["w"] - z) <= a_tr
    expected = np.sum(oracle["prob"][window] * oracle["E_delta2"][window])
    assert np.isclose(curie_weiss.concentration_lhs(n, z, a_tr), expected, rtol=1e-12)


def test_second_moment_by_enumeration():
    law = oracles.enumerate_spin_law(2).rescale(2**-0.75)
    assert np.isclose(curie_weiss.moment(2, 1), law.abs_moment(2), rtol=1e-12)
