# -*- coding: utf-8 -*-
import os

import numpy as np
import pytest

from pystein import util


def test_check_positive_integer():
    assert util.check_positive_integer(3, "n") == 3
    assert util.check_positive_integer(4.0, "n") == 4
    assert isinstance(util.check_positive_integer(np.int64(5), "n"), int)

    with pytest.raises(ValueError, match="k must be a positive integer, got 0"):
        util.check_positive_integer(0, "k")
    with pytest.raises(ValueError):
        util.check_positive_integer(2.5, "n")
    with pytest.raises(ValueError):
        util.check_positive_integer(True, "n")
    with pytest.raises(util.ResourceLimitError):
        util.check_positive_integer(20, "n", cap=14)


def test_check_positive_real():
    assert util.check_positive_real(0.5, "a") == 0.5

    for value in [0, -1, np.inf, np.nan]:
        with pytest.raises(ValueError, match="a must be"):
            util.check_positive_real(value, "a")


def test_exception_classes():
    # the exit code mapping relies on these bases
    assert issubclass(util.ResourceLimitError, ValueError)
    assert issubclass(util.NumericConsistencyError, ArithmeticError)
    assert issubclass(util.BoundViolation, AssertionError)


def test_power_gap():
    assert util.power_gap(3.0, 2.0, 2) == 65
    assert util.power_gap(2.0, 2.0, 3) == 0

    # no cancellation for close arguments
    gap = util.power_gap(1 + 1e-12, 1.0, 1)
    assert np.isclose(gap, 2e-12, rtol=1e-3)

    hi = np.array([1.0, 2.0, 5.0])
    lo = np.array([0.0, 1.0, 4.0])
    assert np.allclose(util.power_gap(hi, lo, 2), hi**4 - lo**4)


def test_signed_expectation():
    log_probs = np.log([0.5, 0.5])
    assert np.isclose(util.signed_expectation(log_probs, [-1.0, 3.0]), 1.0)
    assert np.isclose(util.signed_expectation(log_probs, [0.0, 2.0]), 1.0)
    assert np.isclose(util.signed_expectation(log_probs, [-2.0, -4.0]), -3.0)


def test_bisect():
    root = util.bisect(lambda x: 1 - x**2, 0.0, 2.0, xtol=1e-12)
    assert np.isclose(root, 1, atol=1e-11)

    roots = util.bisect(
        lambda x: np.array([2.0, 3.0]) - x, np.zeros(2), np.full(2, 10.0)
    )
    assert np.allclose(roots, [2, 3], atol=1e-9)


def test_central_difference():
    value = util.central_difference(np.sin, 0.3, 1, 1e-3)
    assert np.isclose(value, np.cos(0.3), atol=1e-6)

    value = util.central_difference(lambda x: x**3, 1.0, 3, 1e-2)
    assert np.isclose(value, 6, atol=1e-4)

    with pytest.raises(ValueError):
        util.central_difference(np.sin, 0, 5, 1e-3)


def test_richardson_table():
    # the error is a series in h**2, so one level removes it exactly
    steps = np.array([0.1, 0.05, 0.025])
    table = util.richardson_table(1 + steps**2, 2)

    assert len(table) == 3
    assert np.allclose(table[1], 1, atol=1e-14)
    assert np.isclose(table[-1][0], 1, atol=1e-14)

    with pytest.raises(ValueError):
        util.richardson_table([1.0], 2)


def test_richardson_derivative():
    value, estimates = util.richardson_derivative(lambda x: x**4, 1.0, 4)
    assert np.isclose(value, 24, atol=1e-2)
    assert estimates.size == 3

    value, _ = util.richardson_derivative(np.exp, 0.0, 2)
    assert np.isclose(value, 1, atol=1e-6)

    with pytest.raises(ValueError):
        util.richardson_derivative(np.exp, 0.0, 2, steps=(1e-2, 5e-3, 1e-3))


def test_start_logging(output_dir):
    log_file = os.path.join(output_dir, "logs", "pystein.log")
    util.start_logging(log_file)
    assert os.path.isdir(os.path.dirname(log_file))
