# -*- coding: utf-8 -*-
"""
Collection of various useful and/or reoccuring functions across pystein
"""

import logging
import os

import numpy as np
from scipy.special import logsumexp

from . import __version__

logger = logging.getLogger(__name__)


class ResourceLimitError(ValueError):
    """The requested system size is above the cap of the model"""


class NumericConsistencyError(ArithmeticError):
    """Two independent evaluations of the same quantity disagree"""


class BoundViolation(AssertionError):
    """An audited inequality does not hold"""


def log_version():
    """For Debug purposes"""
    logger.debug("----------------------")
    logger.debug("pystein version: %s", __version__)


def start_logging(log_file="log.log"):
    """Start logging to log file and command line

    Parameters
    ----------
    log_file : str, optional
        name of the logging file (default: "log.log")
    """

    log_dir = os.path.dirname(log_file)
    if log_dir != "":
        os.makedirs(log_dir, exist_ok=True)

    logging.basicConfig(
        filename=log_file,
        level=logging.DEBUG,
        format="%(asctime)-15s - %(levelname)s - %(name)-8s - %(message)s",
    )
    logging.captureWarnings(True)
    log_version()


def check_positive_integer(value, name, cap=None):
    if isinstance(value, (bool, np.bool_)) or int(value) != value:
        raise ValueError(f"{name} must be a positive integer, got {value}")
    value = int(value)
    if value < 1:
        raise ValueError(f"{name} must be a positive integer, got {value}")
    if cap is not None and value > cap:
        raise ResourceLimitError(f"{name} must be at most {cap}, got {value}")
    return value


def check_positive_real(value, name):
    value = float(value)
    if not np.isfinite(value) or value <= 0:
        raise ValueError(f"{name} must be a positive finite number, got {value}")
    return value


def power_gap(hi, lo, k):
    """
    Evaluate hi**(2k) - lo**(2k) for hi >= lo >= 0 without cancellation

    Uses the factorization (hi - lo) * sum_j hi**(2k-1-j) * lo**j,
    where every term of the sum is nonnegative.
    """
    hi = np.asarray(hi, dtype=float)
    lo = np.asarray(lo, dtype=float)
    total = np.zeros(np.broadcast(hi, lo).shape)
    for j in range(2 * k):
        total = total + hi ** (2 * k - 1 - j) * lo**j
    return (hi - lo) * total


def signed_expectation(log_probs, values):
    """
    E[values] under exp(log_probs), summed in log space with sign tracking

    Parameters
    ----------
    log_probs : array[n]
        log probabilities of the atoms
    values : array[n]
        value at each atom, may be negative or zero

    Returns
    -------
    expectation : float
    """
    values = np.asarray(values, dtype=float)
    if not np.any(values):
        return 0.0
    with np.errstate(divide="ignore"):
        log_abs = np.log(np.abs(values))
    log_abs[values == 0] = 0
    result, sign = logsumexp(
        log_probs + log_abs, b=np.sign(values), return_sign=True
    )
    return float(sign * np.exp(result))


def bisect(func, lo, hi, xtol=1e-10, maxiter=200):
    """
    Vectorized bisection for the sign change of func on [lo, hi]

    func must be positive at lo and negative at hi (elementwise),
    the returned points are within xtol of a root.
    """
    lo = np.array(lo, dtype=float)
    hi = np.array(hi, dtype=float)
    for _ in range(maxiter):
        width = np.max(hi - lo) if lo.size > 0 else 0
        if width <= xtol:
            break
        mid = 0.5 * (lo + hi)
        positive = func(mid) > 0
        lo = np.where(positive, mid, lo)
        hi = np.where(positive, hi, mid)
    return 0.5 * (lo + hi)


# Central difference stencils for derivatives 1 to 4, error O(h**2)
_stencils = {
    1: (np.array([-1, 1]), np.array([-0.5, 0.5])),
    2: (np.array([-1, 0, 1]), np.array([1.0, -2.0, 1.0])),
    3: (np.array([-2, -1, 1, 2]), np.array([-0.5, 1.0, -1.0, 0.5])),
    4: (np.array([-2, -1, 0, 1, 2]), np.array([1.0, -4.0, 6.0, -4.0, 1.0])),
}


def central_difference(func, x, order, h):
    """Central finite difference of func at x, with error of order h**2"""
    try:
        offsets, weights = _stencils[order]
    except KeyError:
        raise ValueError(f"derivative order must be between 1 and 4, got {order}")
    values = np.array([func(x + o * h) for o in offsets])
    return np.dot(weights, values) / h**order


def richardson_table(base_values, p, r=2.0):
    """
    Richardson extrapolation tableau

    Parameters
    ----------
    base_values : list(float)
        approximations at step sizes decreasing by a factor r
    p : int
        order of the leading error term (the error is a series in h**p)
    r : float, optional
        step size reduction factor (default: 2)

    Returns
    -------
    table : list(array)
        table[j] are the estimates after j levels of extrapolation,
        table[-1][0] is the final value
    """
    values = np.asarray(base_values, dtype=float)
    if values.size < 2:
        raise ValueError("Richardson extrapolation requires at least two values")

    table = [values]
    for j in range(1, values.size):
        factor = r ** (p * j)
        previous = table[-1]
        table.append((factor * previous[1:] - previous[:-1]) / (factor - 1.0))
    return table


def richardson_derivative(func, x, order, steps=(1e-2, 5e-3, 2.5e-3)):
    """
    Richardson extrapolated central difference

    Returns
    -------
    value : float
        the fully extrapolated derivative
    estimates : array
        the first level estimates followed by the final value
    """
    steps = np.asarray(steps, dtype=float)
    ratio = steps[0] / steps[1]
    if not np.allclose(steps[:-1] / steps[1:], ratio):
        raise ValueError("Richardson steps must decrease by a constant factor")

    base = [central_difference(func, x, order, h) for h in steps]
    table = richardson_table(base, 2, r=ratio)
    estimates = np.concatenate([table[1], table[-1]])
    return table[-1][0], estimates
