# -*- coding: utf-8 -*-
"""
Imitative monomer-dimer model on the complete graph K_n

A configuration is a set of monomer vertices sigma in {0, 1}**n together with
a perfect matching of the remaining vertices. Summing over the matchings,
the monomer indicators form a weighted Curie-Weiss model with weight
D(sigma) exp(n (J m**2 + (log(n)/2 + h - J) m)), where m = t / n is the
monomer density and D(sigma) = (n - t - 1)!! counts the dimer coverings.

At the critical point (J_c, h_c) the fluctuations W = n**(1/4) (m - m_c)
converge to the quartic law with density b * exp(-lambda_c x**4 / 24).
"""

import logging
from functools import lru_cache

import numpy as np
from scipy.special import gammaln, logsumexp

from .discrete_law import BoundCheck, DiscreteLaw, PairDiagnostics
from .limit_law import LimitLaw
from .stein_core import psi
from .util import (
    NumericConsistencyError,
    check_positive_integer,
    richardson_derivative,
)

logger = logging.getLogger(__name__)

#:int: largest supported number of vertices
MAX_N = 10**6
#:float: critical coupling
J_C = 1 / (4 * (3 - 2 * np.sqrt(2)))
#:float: critical external field
H_C = (np.log(12 - 8 * np.sqrt(2)) - 1) / 4
#:float: critical monomer density
M_C = 2 - np.sqrt(2)
#:tuple: step sizes of the Richardson extrapolated derivatives
RICHARDSON_STEPS = (1e-2, 5e-3, 2.5e-3)

# The law of the monomer count is a DiscreteLaw over t
MDLaw = DiscreteLaw


def g_fn(x):
    """
    Positive root g of g**2 + e**(2x) g - e**(2x) = 0, in the conjugate form

        g(x) = 2 / (1 + sqrt(1 + 4 e**(-2x)))

    which is free of cancellation for large x. For very negative x the
    equivalent e**x (sqrt(e**(2x) + 4) - e**x) / 2 avoids the overflow.
    """
    x = np.asarray(x, dtype=float)
    with np.errstate(over="ignore"):
        upper = 2 / (1 + np.sqrt(1 + 4 * np.exp(-2 * x)))
    ex = np.exp(np.minimum(x, 0))
    lower = ex * (np.sqrt(ex * ex + 4) - ex) / 2
    value = np.where(x >= 0, upper, lower)
    return float(value) if value.ndim == 0 else value


def g_naive(x):
    """g(x) = (sqrt(e**(4x) + 4 e**(2x)) - e**(2x)) / 2, as written"""
    x = np.asarray(x, dtype=float)
    e2 = np.exp(2 * x)
    value = (np.sqrt(e2 * e2 + 4 * e2) - e2) / 2
    return float(value) if value.ndim == 0 else value


def g_prime(x):
    """g'(x) = 2 g (1 - g) / (2 - g)"""
    g = np.asarray(g_fn(x))
    value = 2 * g * (1 - g) / (2 - g)
    return float(value) if value.ndim == 0 else value


def tau_fn(x, J=J_C, h=H_C):
    """tau(x) = (2x - 1) J + h"""
    return (2 * np.asarray(x, dtype=float) - 1) * J + h


def p_tilde(x, J=J_C, h=H_C):
    """
    Pressure functional -J x**2 - (1 - g(tau(x)) + log(1 - g(tau(x)))) / 2

    Raises
    ------
    ValueError
        if 1 - g(tau(x)) is not positive
    """
    x = np.asarray(x, dtype=float)
    rest = 1 - np.asarray(g_fn(tau_fn(x, J, h)))
    if np.any(rest <= 0):
        raise ValueError(f"p_tilde is undefined at x={x}, 1 - g(tau(x)) <= 0")
    value = -J * x * x - 0.5 * (rest + np.log(rest))
    return float(value) if value.ndim == 0 else value


def p_tilde_prime(x, J=J_C, h=H_C):
    """Closed form derivative of p_tilde, 2 J (g(tau(x)) - x)"""
    x = np.asarray(x, dtype=float)
    value = 2 * J * (g_fn(tau_fn(x, J, h)) - x)
    return float(value) if value.ndim == 0 else value


class CriticalPoint:
    """
    The critical point of the monomer-dimer model

    Attributes
    ----------
    J_c, h_c, m_c : float
        critical coupling, field and monomer density
    tau_c : float
        tau(m_c) at the critical point
    lambda_c : float
        -p_tilde''''(m_c) > 0
    derivatives : dict
        Richardson extrapolated derivatives of p_tilde at m_c, by order
    estimates : array
        the first level Richardson estimates of the fourth derivative,
        followed by the final value
    """

    def __init__(self, J_c, h_c, m_c, derivatives, estimates):
        self.J_c = float(J_c)
        self.h_c = float(h_c)
        self.m_c = float(m_c)
        self.tau_c = float(tau_fn(m_c, J_c, h_c))
        self.derivatives = dict(derivatives)
        self.estimates = np.asarray(estimates, dtype=float)
        self.lambda_c = -self.derivatives[4]

    def __repr__(self):
        return (
            f"CriticalPoint(J_c={self.J_c:.6f}, h_c={self.h_c:.6f}, "
            f"m_c={self.m_c:.6f}, lambda_c={self.lambda_c:.6f})"
        )

    @property
    def limit_law(self):
        """LimitLaw: the quartic law with a = lambda_c / 24"""
        return LimitLaw(2, self.lambda_c / 24)


@lru_cache(maxsize=1)
def critical_constants():
    """
    Closed form critical point and lambda_c from finite differences

    Returns
    -------
    critical : CriticalPoint

    Raises
    ------
    NumericConsistencyError
        if m_c is not a fixed point of g(tau(.)), if p_tilde is not
        stationary to third order at m_c, or if the Richardson estimates
        of the fourth derivative disagree by more than 1e-4
    """
    fixed = g_fn(tau_fn(M_C))
    if abs(fixed - M_C) > 1e-12:
        raise NumericConsistencyError(
            f"m_c={M_C!r} is not a fixed point of g(tau(.)), got {fixed!r}"
        )

    derivatives = {}
    estimates = None
    for order in range(1, 5):
        value, estimates = richardson_derivative(
            p_tilde, M_C, order, steps=RICHARDSON_STEPS
        )
        derivatives[order] = float(value)
        logger.debug(
            "p_tilde derivative %i at m_c: %.12g, estimates %s", order, value, estimates
        )

    for order in (1, 2, 3):
        if abs(derivatives[order]) > 1e-6:
            logger.error("p_tilde is not stationary at m_c to order %i", order)
            raise NumericConsistencyError(
                f"p_tilde derivative {order} at m_c is {derivatives[order]!r}"
            )

    fourth = derivatives[4]
    spread = np.max(np.abs(estimates - fourth)) / abs(fourth)
    if fourth >= 0 or spread > 1e-4:
        logger.error(
            "Richardson estimates of the fourth derivative disagree: %s", estimates
        )
        raise NumericConsistencyError(
            f"Fourth derivative of p_tilde is not resolved, estimates {estimates}"
        )

    critical = CriticalPoint(J_C, H_C, M_C, derivatives, estimates)
    logger.debug("Critical point: %s", critical)
    return critical


def matching_count_log(v):
    """
    log of the number of perfect matchings of K_v, log((v - 1)!!)

    -inf for odd v, 0 for v = 0
    """
    v = np.asarray(v)
    if np.any(v < 0):
        raise ValueError(f"vertex count must be >= 0, got {v}")
    vf = v.astype(float)
    with np.errstate(invalid="ignore"):
        value = gammaln(vf + 1) - vf / 2 * np.log(2) - gammaln(vf / 2 + 1)
    value = np.where(v % 2 == 0, value, -np.inf)
    return float(value) if value.ndim == 0 else value


def _check_n(n):
    n = check_positive_integer(n, "n", cap=MAX_N)
    if n < 2:
        raise ValueError(f"n must be at least 2, got {n}")
    return n


def _log_config_weight(n, c, J, h):
    # log(D exp(-H)) of a single configuration with c monomers
    c = np.asarray(c)
    valid = (c >= 0) & (c <= n) & ((n - c) % 2 == 0)
    m = np.clip(c, 0, n) / n
    energy = n * (J * m * m + (np.log(n) / 2 + h - J) * m)
    value = matching_count_log(np.clip(n - c, 0, n)) + energy
    return np.where(valid, value, -np.inf)


def _monomer_counts(n):
    return np.arange(n % 2, n + 1, 2)


def magnetization_law(n, J=J_C, h=H_C):
    """
    Exact law of the monomer count t, over the t with n - t even

    Parameters
    ----------
    n : int
        number of vertices, 2 <= n <= 10**6
    J, h : float, optional
        coupling and field (default: the critical point)

    Returns
    -------
    law : MDLaw
        law of t
    """
    n = _check_n(n)
    t = _monomer_counts(n)
    log_binom = gammaln(n + 1) - gammaln(t + 1) - gammaln(n - t + 1)
    log_weights = log_binom + _log_config_weight(n, t, J, h)
    return MDLaw(t.astype(float), log_weights)


def w_law(n):
    """Exact law of W = n**(1/4) (t / n - m_c) at the critical point"""
    law = magnetization_law(n)
    return law.rescale(float(n) ** -0.75, shift=n * M_C)


def pair_lambda(n):
    """
    The rate lambda of the pair update

        2 (1 - m_c) (m_c**2 + (1 - m_c) e**(2 tau_c)) / ((1 - m_c + e**(2 tau_c)) n**(3/2))
    """
    n = check_positive_integer(n, "n")
    e2 = np.exp(2 * tau_fn(M_C))
    q = 1 - M_C
    return float(2 * q * (M_C**2 + q * e2) / ((q + e2) * float(n) ** 1.5))


# pair classes (sigma_u, sigma_v) and outcomes (sigma'_u, sigma'_v)
_PAIRS = ((1, 1), (1, 0), (0, 1), (0, 0))


def _pair_statistics(n, J=J_C, h=H_C):
    # per monomer count t: class probabilities, conditional outcome laws and
    # the change of t, aggregated into E(t - t') and P(|t - t'| = 1, 2)
    t = _monomer_counts(n)
    pairs = n * (n - 1) / 2
    class_probs = {
        (1, 1): t * (t - 1) / 2 / pairs,
        (1, 0): t * (n - t) / 2 / pairs,
        (0, 1): t * (n - t) / 2 / pairs,
        (0, 0): (n - t) * (n - t - 1) / 2 / pairs,
    }

    drift = np.zeros(t.shape)
    jumps = np.zeros(t.shape + (2,))
    log_up = np.full(t.shape, -np.inf)
    log_down = np.full(t.shape, -np.inf)
    for old in _PAIRS:
        weight = class_probs[old]
        present = weight > 0
        if not np.any(present):
            continue
        counts = [t - sum(old) + sum(new) for new in _PAIRS]
        log_w = np.stack([_log_config_weight(n, c, J, h) for c in counts])
        with np.errstate(divide="ignore", invalid="ignore"):
            log_p = log_w - logsumexp(log_w, axis=0)
        log_p[:, ~present] = -np.inf
        probs = np.exp(log_p)
        for j, new in enumerate(_PAIRS):
            step = sum(old) - sum(new)
            drift += weight * probs[j] * step
            if step != 0:
                jumps[:, abs(step) - 1] += weight * probs[j]
            with np.errstate(divide="ignore"):
                log_move = np.log(weight) + log_p[j]
            if step == -2:
                log_up = np.logaddexp(log_up, log_move)
            elif step == 2:
                log_down = np.logaddexp(log_down, log_move)
    return t, drift, jumps, log_up, log_down


def pair_diagnostics(n):
    """
    Exact conditional statistics of Delta = W - W' for the pair update

    A pair {u, v} is drawn uniformly from the n (n - 1) / 2 vertex pairs and
    (sigma_u, sigma_v) is resampled from its conditional law given the rest.
    Delta = (sigma_u + sigma_v - sigma'_u - sigma'_v) / n**(3/4).

    Parameters
    ----------
    n : int
        number of vertices

    Returns
    -------
    diag : PairDiagnostics
        with jump sizes 1 / n**(3/4) and 2 / n**(3/4)
    """
    n = _check_n(n)
    critical = critical_constants()
    law = w_law(n)
    scale = float(n) ** -0.75
    _, drift, jumps, _, _ = _pair_statistics(n)
    diag = PairDiagnostics(
        law,
        pair_lambda(n),
        psi(critical.limit_law, law.locations),
        scale * drift,
        jump_sizes=[scale, 2 * scale],
        jump_probs=jumps,
    )
    logger.debug("Monomer-dimer pair diagnostics for n=%i", n)
    return diag


def transition_kernel(n):
    """
    Log transition probabilities of t under the pair update

    Returns
    -------
    log_up : array
        log K(t -> t + 2)
    log_down : array
        log K(t -> t - 2)
    """
    n = _check_n(n)
    _, _, _, log_up, log_down = _pair_statistics(n)
    return log_up, log_down


def detailed_balance_error(n):
    """max |pi(t) K(t, t+2) / (pi(t+2) K(t+2, t)) - 1| over all counts"""
    law = magnetization_law(n)
    log_up, log_down = transition_kernel(n)
    if law.size < 2:
        return 0.0
    forward = law.log_probs[:-1] + log_up[:-1]
    backward = law.log_probs[1:] + log_down[1:]
    return float(np.max(np.abs(np.expm1(forward - backward))))


def verify_cond_var_scaling(n):
    """
    sup over atoms of |E(Delta**2 | t) / (2 lambda) - 1| n**(1/4) / (|w| + 1)

    reported as the empirical constant of the check
    |E(Delta**2 | t) / (2 lambda) - 1| <= (|w| + 1) / n**(1/4)
    """
    diag = pair_diagnostics(n)
    lhs = np.abs(diag.E_delta2 / (2 * diag.lam) - 1)
    rhs = (np.abs(diag.w) + 1) / float(n) ** 0.25
    return BoundCheck("conditional variance scaling", n, lhs, rhs)


def verify_remainder_scaling(n):
    """sup over atoms of |R| n**(7/4) / (|w|**4 + 1), as an empirical constant"""
    diag = pair_diagnostics(n)
    rhs = (diag.w**4 + 1) / float(n) ** 1.75
    return BoundCheck("remainder scaling", n, np.abs(diag.R), rhs)


def tail_concentration(n, delta):
    """P(|W| > delta n**(1/4)) from the exact law"""
    delta = float(delta)
    if not np.isfinite(delta) or delta <= 0:
        raise ValueError(f"delta must be a positive number, got {delta}")
    law = w_law(n)
    outside = np.abs(law.locations) > delta * float(n) ** 0.25
    if not np.any(outside):
        return 0.0
    return float(np.exp(logsumexp(law.log_probs[outside])))
