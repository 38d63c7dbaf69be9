# -*- coding: utf-8 -*-
"""
Limiting laws with density b * exp(-a * x**(2k))

k = 1, a = 1/2 is the standard normal law, k = 2 gives the quartic laws
of the critical mean field models.

All tail quantities are evaluated on the small side, i.e. the complementary
CDF is computed directly and never as 1 - CDF.
"""

import logging
import math
from functools import lru_cache

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq
from scipy.special import gammaincc, gammaln

from .util import (
    NumericConsistencyError,
    bisect,
    check_positive_integer,
    check_positive_real,
)

logger = logging.getLogger(__name__)

#:float: exp(-LOG_UNDERFLOW) is below the smallest subnormal double
LOG_UNDERFLOW = 745.0
#:float: absolute tolerance of the quadratures, relative to the integral scale
QUAD_EPSABS = 1e-13
#:float: relative tolerance of the quadratures
QUAD_EPSREL = 1e-11
#:int: maximum number of subintervals in the adaptive quadrature
QUAD_LIMIT = 200


def _as_output(x, values):
    if np.ndim(x) == 0:
        return float(values)
    return values


@lru_cache(maxsize=65536)
def _scaled_tail(k, a, x):
    # H(x) = int_0^inf exp(-a * ((x + t)**2k - x**2k)) dt
    # the exponent is at least a * (2k x**(2k-1) t + t**2k)
    if x > 0:
        slope = 2 * k * a * x ** (2 * k - 1)
        scale = min(1 / slope, a ** (-1 / (2 * k)))
        upper = min(LOG_UNDERFLOW / slope, (LOG_UNDERFLOW / a) ** (1 / (2 * k)))
    else:
        scale = a ** (-1 / (2 * k))
        upper = (LOG_UNDERFLOW / a) ** (1 / (2 * k))

    powers = range(2 * k)

    def integrand(t):
        # (x + t)**2k - x**2k = t * sum_j (x + t)**(2k-1-j) x**j
        u = x + t
        gap = t * sum(u ** (2 * k - 1 - j) * x**j for j in powers)
        return math.exp(-a * gap)

    points = [p for p in (scale, 4 * scale, 16 * scale) if p < upper]
    value, error = quad(
        integrand,
        0,
        upper,
        points=points or None,
        epsabs=QUAD_EPSABS * scale,
        epsrel=QUAD_EPSREL,
        limit=QUAD_LIMIT,
    )
    return value


class LimitLaw:
    """
    The density p(x) = b * exp(-a * x**(2k)) on the real line

    Parameters
    ----------
    k : int
        half degree of the exponent, k >= 1
    a : float
        rate constant, a > 0
    """

    def __init__(self, k, a):
        #:int: half degree of the exponent
        self.k = check_positive_integer(k, "k")
        #:float: rate constant
        self.a = check_positive_real(a, "a")
        #:float: normalizing constant, from the closed form
        self.b = self._closed_form_normalizer()
        #:float: normalizing constant, from adaptive quadrature
        self.b_quadrature = self._quadrature_normalizer()

        if abs(self.b_quadrature / self.b - 1) > 1e-10:
            logger.error(
                "Normalizer of %s disagrees: closed form %.17g, quadrature %.17g",
                self,
                self.b,
                self.b_quadrature,
            )
            raise NumericConsistencyError(
                f"Normalizer quadrature {self.b_quadrature!r} does not match "
                f"the closed form {self.b!r} for k={self.k}, a={self.a}"
            )

    def __repr__(self):
        return f"LimitLaw(k={self.k}, a={self.a!r})"

    def __eq__(self, other):
        if not isinstance(other, LimitLaw):
            return NotImplemented
        return self.k == other.k and self.a == other.a

    def __hash__(self):
        return hash((self.k, self.a))

    @property
    def scale(self):
        """float: natural length scale a**(-1/(2k))"""
        return self.a ** (-1 / (2 * self.k))

    def _closed_form_normalizer(self):
        k, a = self.k, self.a
        return float(np.exp(np.log(k) + np.log(a) / (2 * k) - gammaln(1 / (2 * k))))

    def _quadrature_normalizer(self):
        k, a = self.k, self.a
        upper = (LOG_UNDERFLOW / a) ** (1 / (2 * k))
        half, _ = quad(
            lambda x: np.exp(-a * x ** (2 * k)),
            0,
            upper,
            points=[self.scale] if self.scale < upper else None,
            epsabs=QUAD_EPSABS * self.scale,
            epsrel=QUAD_EPSREL,
            limit=QUAD_LIMIT,
        )
        return 1 / (2 * half)

    def _power(self, x):
        # x**(2k) as a function of x**2, so that evaluation is exactly even
        x = np.asarray(x, dtype=float)
        return (x * x) ** self.k

    def density(self, x):
        """Probability density at x, flushes to 0 far in the tails"""
        return _as_output(x, self.b * np.exp(-self.a * self._power(x)))

    def _half_tail(self, x):
        # 1 - P(|x|), regularized upper incomplete gamma after t = u**(2k)
        return 0.5 * gammaincc(1 / (2 * self.k), self.a * self._power(x))

    def sf(self, x):
        """Complementary CDF 1 - P(x), with full relative precision for x > 0"""
        x = np.asarray(x, dtype=float)
        tail = self._half_tail(x)
        return _as_output(x, np.where(x >= 0, tail, 1 - tail))

    def cdf(self, z):
        """CDF P(z), with full relative precision for z < 0"""
        z = np.asarray(z, dtype=float)
        tail = self._half_tail(z)
        return _as_output(z, np.where(z <= 0, tail, 1 - tail))

    def log_sf(self, x):
        """
        Logarithm of the upper tail for x >= 0

        Stays finite beyond the underflow of sf, by switching to
        log(b) + log(H(x)) - a x**(2k)
        """
        x = np.asarray(x, dtype=float)
        if np.any(x < 0):
            raise ValueError("log_sf is only defined for x >= 0")
        tail = np.atleast_1d(self._half_tail(x)).astype(float)
        flat = np.atleast_1d(x)
        result = np.empty(flat.shape)
        small = tail < 1e-300
        with np.errstate(divide="ignore"):
            result[~small] = np.log(tail[~small])
        if np.any(small):
            result[small] = (
                np.log(self.b)
                + np.log(self.scaled_tail(flat[small]))
                - self.a * self._power(flat[small])
            )
        return _as_output(x, result.reshape(x.shape))

    def log_cdf(self, z):
        """Logarithm of P(z), see log_sf"""
        z = np.asarray(z, dtype=float)
        flat = np.atleast_1d(z)
        result = np.empty(flat.shape)
        lower = flat <= 0
        if np.any(lower):
            result[lower] = self.log_sf(-flat[lower])
        if np.any(~lower):
            result[~lower] = np.log1p(-self._half_tail(flat[~lower]))
        return _as_output(z, result.reshape(z.shape))

    def scaled_tail(self, x):
        """
        H(x) = int_x^inf exp(-a (u**2k - x**2k)) du for x >= 0

        The integrand is bounded by 1, so this never forms exp(a x**2k).
        b * H(x) * exp(-a x**2k) = 1 - P(x) and H(0) = 1 / (2b).

        Parameters
        ----------
        x : float, array
            nonnegative evaluation points

        Returns
        -------
        H : float, array
            the scaled tail

        Raises
        ------
        ValueError
            for negative x
        """
        x = np.asarray(x, dtype=float)
        if np.any(x < 0) or np.any(~np.isfinite(x)):
            raise ValueError(f"scaled_tail requires finite x >= 0, got {x}")
        values = np.array(
            [_scaled_tail(self.k, self.a, float(xi)) for xi in x.ravel()],
            dtype=float,
        )
        return _as_output(x, values.reshape(x.shape))

    def tail_bound(self, x):
        """Mills ratio type upper bound of 1 - P(x) for x > 0"""
        x = np.asarray(x, dtype=float)
        if np.any(x <= 0):
            raise ValueError(f"tail_bound requires x > 0, got {x}")
        k, a = self.k, self.a
        ratio = self.b / (2 * k * a * x ** (2 * k - 1))
        return _as_output(x, np.minimum(0.5, ratio) * np.exp(-a * self._power(x)))

    def lower_tail_bound(self, x):
        """Mirror of tail_bound, an upper bound of P(x) for x < 0"""
        x = np.asarray(x, dtype=float)
        if np.any(x >= 0):
            raise ValueError(f"lower_tail_bound requires x < 0, got {x}")
        return self.tail_bound(-x)

    def abs_moment(self, m):
        """
        E|Y|^m from the closed form, cross checked by quadrature

        Parameters
        ----------
        m : float
            order of the moment, m >= 0

        Returns
        -------
        moment : float
        """
        m = float(m)
        if not np.isfinite(m) or m < 0:
            raise ValueError(f"moment order must be >= 0, got {m}")
        k, a = self.k, self.a
        closed = np.exp(
            -m / (2 * k) * np.log(a) + gammaln((m + 1) / (2 * k)) - gammaln(1 / (2 * k))
        )

        upper = (2 * (LOG_UNDERFLOW + m**2) / a) ** (1 / (2 * k))
        peak = (max(m, 1) / (2 * k * a)) ** (1 / (2 * k))
        half, _ = quad(
            lambda x: x**m * np.exp(-a * x ** (2 * k)),
            0,
            upper,
            points=[peak] if peak < upper else None,
            epsabs=0,
            epsrel=1e-12,
            limit=QUAD_LIMIT,
        )
        numeric = 2 * self.b * half
        if abs(numeric / closed - 1) > 1e-9:
            raise NumericConsistencyError(
                f"Moment {m} of {self} disagrees: closed form {closed!r}, "
                f"quadrature {numeric!r}"
            )
        return float(closed)

    def quantile(self, q):
        """
        z with P(z) = q, by bracketing bisection

        Parameters
        ----------
        q : float, array
            probabilities in (0, 1)

        Returns
        -------
        z : float, array
            quantiles with |P(z) - q| <= 1e-12
        """
        q = np.asarray(q, dtype=float)
        if np.any(q <= 0) or np.any(q >= 1) or np.any(~np.isfinite(q)):
            raise ValueError(f"quantile requires 0 < q < 1, got {q}")

        flat = np.atleast_1d(q)
        # small side target of the half tail
        target = np.where(flat < 0.5, flat, 1 - flat)
        upper = np.full(flat.shape, self.scale)
        while True:
            short = self._half_tail(upper) > target
            if not np.any(short):
                break
            upper[short] *= 2

        def func(t):
            return self._half_tail(t) - target

        t = bisect(func, np.zeros(flat.shape), upper, xtol=1e-14, maxiter=400)
        z = np.where(flat < 0.5, -t, t)
        z[flat == 0.5] = 0
        return _as_output(q, z.reshape(q.shape))

    def exp_weight_constant(self, p):
        """
        Smallest C with exp(-a z**2k) <= C p**(p/k) / (1 + z)**(2p) for all z > 0

        Parameters
        ----------
        p : float
            weight exponent, p >= 0

        Returns
        -------
        C : float
        """
        p = float(p)
        if p < 0:
            raise ValueError(f"weight exponent must be >= 0, got {p}")
        if p == 0:
            return 1.0
        k, a = self.k, self.a

        def slope(z):
            return 2 * p / (1 + z) - 2 * k * a * z ** (2 * k - 1)

        upper = self.scale
        while slope(upper) > 0:
            upper *= 2
        zmax = brentq(slope, 0, upper, xtol=1e-14)
        log_value = -a * zmax ** (2 * k) + 2 * p * np.log1p(zmax)
        return float(np.exp(log_value - p / k * np.log(p)))
