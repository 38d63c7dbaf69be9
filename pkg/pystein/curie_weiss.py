# -*- coding: utf-8 -*-
"""
Exact finite-n law of the Curie-Weiss magnetization S_n = sum(sigma_i)
and the exchangeable pair of the Glauber single site update

The Gibbs weight of a configuration is exp(beta / n * sum_{i<j} sigma_i sigma_j)
and sum_{i<j} sigma_i sigma_j = (S_n**2 - n) / 2, so the law of S_n only
needs the binomial multiplicity of each level. At the critical point beta = 1,
W = S_n / n**(3/4) converges to the law with density b * exp(-x**4 / 12).

The pair (W, W') resamples one uniformly chosen site from its conditional law
given the others. Sites with the same spin are exchangeable given S_n, so all
conditional statistics are aggregated over the two site classes.
"""

import logging

import numpy as np
from scipy.special import expit, gammaln, log_expit

from .discrete_law import BoundCheck, DiscreteLaw, PairDiagnostics
from .limit_law import LimitLaw
from .stein_core import psi
from .util import check_positive_integer, check_positive_real

logger = logging.getLogger(__name__)

#:int: largest supported number of spins
MAX_N = 10**7
#:LimitLaw: limiting law of W at beta = 1
CRITICAL_LAW = LimitLaw(2, 1 / 12)


def _levels(n):
    # magnetization levels and the number of up and down spins at each level
    s = np.arange(-n, n + 1, 2)
    n_plus = (n + s) // 2
    n_minus = n - n_plus
    return s, n_plus, n_minus


def _check(n, beta):
    n = check_positive_integer(n, "n", cap=MAX_N)
    beta = check_positive_real(beta, "beta")
    return n, beta


def magnetization_law(n, beta=1.0):
    """
    Exact law of S_n over s in {-n, -n+2, ..., n}

    Parameters
    ----------
    n : int
        number of spins, 1 <= n <= 10**7
    beta : float, optional
        inverse temperature (default: 1, the critical point)

    Returns
    -------
    law : DiscreteLaw
        law of S_n, atoms at the integer levels s
    """
    n, beta = _check(n, beta)
    s, n_plus, _ = _levels(n)
    s = s.astype(float)
    log_binom = gammaln(n + 1) - gammaln(n_plus + 1) - gammaln(n - n_plus + 1)
    log_weights = log_binom + beta * (s * s - n) / (2 * n)
    return DiscreteLaw(s, log_weights)


def w_law(n, beta=1.0):
    """Exact law of W = S_n / n**(3/4)"""
    law = magnetization_law(n, beta)
    return law.rescale(float(n) ** -0.75)


def _flip_excess(n, beta, s, n_plus, n_minus):
    # mean flip probability - 1/2, with p_flip(+1) - 1/2 = -tanh(beta (s-1)/n)/2
    # and p_flip(-1) - 1/2 = tanh(beta (s+1)/n)/2
    down = -n_plus * np.tanh(beta * (s - 1) / n)
    up = n_minus * np.tanh(beta * (s + 1) / n)
    return (down + up) / (2 * n)


def flip_probabilities(n, beta=1.0):
    """
    Conditional probabilities that the resampled spin changes sign

    Returns
    -------
    p_down : array
        P(sigma' = -1 | sigma = +1, S_n = s) = expit(-2 beta (s-1)/n)
    p_up : array
        P(sigma' = +1 | sigma = -1, S_n = s) = expit(2 beta (s+1)/n)
    """
    n, beta = _check(n, beta)
    s, _, _ = _levels(n)
    return expit(-2 * beta * (s - 1) / n), expit(2 * beta * (s + 1) / n)


def pair_diagnostics(n, beta=1.0):
    """
    Exact conditional statistics of Delta = W - W' at every atom of W

    E(Delta | s) = n**(-7/4) sum over sites of (sigma_i - tanh(beta (s - sigma_i)/n)),
    |Delta| is 0 or 2 / n**(3/4), lambda = n**(-3/2) and psi(w) = w**3 / 3.

    Parameters
    ----------
    n : int
        number of spins
    beta : float, optional
        inverse temperature (default: 1)

    Returns
    -------
    diag : PairDiagnostics
    """
    n, beta = _check(n, beta)
    law = w_law(n, beta)
    s, n_plus, n_minus = _levels(n)
    s = s.astype(float)

    scale = float(n) ** -0.75
    # sum_i (sigma_i - tanh(beta (s - sigma_i) / n)), the terms are O(s)
    drift = (
        s
        - n_plus * np.tanh(beta * (s - 1) / n)
        - n_minus * np.tanh(beta * (s + 1) / n)
    )
    E_delta = scale * drift / n
    flip = 0.5 + _flip_excess(n, beta, s, n_plus, n_minus)

    lam = float(n) ** -1.5
    diag = PairDiagnostics(
        law,
        lam,
        psi(CRITICAL_LAW, law.locations),
        E_delta,
        jump_sizes=[2 * scale],
        jump_probs=flip[:, None],
    )
    logger.debug("Curie-Weiss pair diagnostics for n=%i, beta=%g", n, beta)
    return diag


def transition_kernel(n, beta=1.0):
    """
    Log transition probabilities of S_n under the Glauber pair

    Returns
    -------
    log_up : array
        log K(s -> s + 2), -inf at s = n
    log_down : array
        log K(s -> s - 2), -inf at s = -n
    """
    n, beta = _check(n, beta)
    s, n_plus, n_minus = _levels(n)
    with np.errstate(divide="ignore"):
        log_up = np.log(n_minus / n) + log_expit(2 * beta * (s + 1) / n)
        log_down = np.log(n_plus / n) + log_expit(-2 * beta * (s - 1) / n)
    return log_up, log_down


def detailed_balance_error(n, beta=1.0):
    """max |pi(s) K(s, s+2) / (pi(s+2) K(s+2, s)) - 1| over all levels"""
    law = magnetization_law(n, beta)
    log_up, log_down = transition_kernel(n, beta)
    if law.size < 2:
        return 0.0
    forward = law.log_probs[:-1] + log_up[:-1]
    backward = law.log_probs[1:] + log_down[1:]
    return float(np.max(np.abs(np.expm1(forward - backward))))


def verify_remainder_bound(n):
    """
    Check |R(s)| <= 2|w|**5 / (15 n**2) + |w| / n**2 + n**(-11/4) at beta = 1
    """
    diag = pair_diagnostics(n)
    w = np.abs(diag.w)
    rhs = 2 * w**5 / (15 * n**2) + w / n**2 + float(n) ** -2.75
    return BoundCheck("remainder", n, np.abs(diag.R), rhs)


def verify_cond_var_bound(n):
    """
    Check |2 n**(-3/2) - E(Delta**2 | s)| <= 2 n**(-5/2) + 2 n**(-2) w**2 at beta = 1
    """
    n, beta = _check(n, 1.0)
    s, n_plus, n_minus = _levels(n)
    law = w_law(n)
    # E(Delta**2 | s) = 4 n**(-3/2) (1/2 + excess)
    lhs = 4 * float(n) ** -1.5 * np.abs(_flip_excess(n, beta, s, n_plus, n_minus))
    rhs = 2 * float(n) ** -2.5 + 2 * law.locations**2 / float(n) ** 2
    return BoundCheck("conditional variance", n, lhs, rhs)


def moment(n, p):
    """E|W|**(2p) as an exact atom sum"""
    p = float(p)
    if p < 0:
        raise ValueError(f"p must be >= 0, got {p}")
    return w_law(n).abs_moment(2 * p)


def moment_bound(p):
    """20**(p/2) p**(p/2)"""
    return (20 * p) ** (p / 2)


def verify_moment_recursion(n, p):
    """Check E|W|**(2p) <= 20 (p - 1) E|W|**(2p - 4) for integer p >= 3"""
    p = check_positive_integer(p, "p")
    if p < 3:
        raise ValueError(f"p must be at least 3, got {p}")
    law = w_law(n)
    lhs = law.abs_moment(2 * p)
    rhs = 20 * (p - 1) * law.abs_moment(2 * p - 4)
    return BoundCheck("moment recursion", n, lhs, rhs)


def verify_drift_moment_bound(n, p):
    """
    Check |E (W' - W) W**(2p-3)| <= 2 (2p - 3) n**(-3/2) E|W|**(2p-4)

    for integer p >= 2, at beta = 1
    """
    p = check_positive_integer(p, "p")
    if p < 2:
        raise ValueError(f"p must be at least 2, got {p}")
    diag = pair_diagnostics(n)
    # E (W' - W) W**(2p-3) = -E[E(Delta | W) W**(2p-3)]
    lhs = abs(diag.law.expect(diag.E_delta * diag.w ** (2 * p - 3)))
    rhs = 2 * (2 * p - 3) * float(n) ** -1.5 * diag.law.abs_moment(2 * p - 4)
    return BoundCheck("drift moment", n, lhs, rhs)


def verify_cond_var_moment_bound(n):
    """Check E(1 - E(Delta**2 | W) / 2 lambda)**2 <= 2 (n**(-2) + n**(-1) E W**4)"""
    n, beta = _check(n, 1.0)
    s, n_plus, n_minus = _levels(n)
    law = w_law(n)
    # 1 - E(Delta**2 | W) / 2 lambda = -2 excess
    gap = 2 * _flip_excess(n, beta, s, n_plus, n_minus)
    lhs = law.expect(gap**2)
    rhs = 2 * (float(n) ** -2 + law.abs_moment(4) / n)
    return BoundCheck("conditional variance moment", n, lhs, rhs)


def first_valid_n(n_max):
    """
    Smallest n* such that the remainder bound holds for every n in [n*, n_max]

    Returns n_max + 1 if it fails at n_max itself.
    """
    n_max = check_positive_integer(n_max, "n_max", cap=MAX_N)
    for n in range(n_max, 0, -1):
        check = verify_remainder_bound(n)
        if not check.passed:
            logger.info(
                "Remainder bound fails at n=%i by %.3e", n, check.max_violation
            )
            return n + 1
    return 1


def concentration_lhs(n, z, a_tr):
    """
    E(Delta**2 1(|Delta| <= a_tr) 1(z - a_tr <= W <= z + a_tr)) at beta = 1

    Parameters
    ----------
    n : int
        number of spins
    z : float
        center of the window
    a_tr : float
        truncation level and half width of the window

    Returns
    -------
    value : float
    """
    a_tr = check_positive_real(a_tr, "a_tr")
    diag = pair_diagnostics(n)
    return _window_sum(diag, float(z), a_tr)


def _window_sum(diag, z, a_tr):
    window = (diag.w >= z - a_tr) & (diag.w <= z + a_tr)
    if not np.any(window):
        return 0.0
    values = np.where(window, diag.delta_moment(2, a_tr, tail=False), 0.0)
    return diag.law.expect(values)


def concentration_ratio(n, z, a_tr, p):
    """
    Empirical constant of the concentration inequality

        lhs (1 + z)**p / ((1 + E|W|**(2p)) a_tr (sqrt(E R**2) + lambda))

    Parameters
    ----------
    n : int
        number of spins
    z : float
        center of the window, z >= 0
    a_tr : float
        truncation level
    p : float
        weight exponent

    Returns
    -------
    ratio : float
    """
    a_tr = check_positive_real(a_tr, "a_tr")
    z = float(z)
    if z < 0:
        raise ValueError(f"z must be >= 0, got {z}")
    diag = pair_diagnostics(n)
    lhs = _window_sum(diag, z, a_tr)
    remainder = np.sqrt(diag.law.expect(diag.R**2))
    scale = (1 + diag.law.abs_moment(2 * p)) * a_tr * (remainder + diag.lam)
    return float(lhs * (1 + z) ** p / scale)
