# -*- coding: utf-8 -*-
"""
Solution of the Stein equation

    f'(x) - psi(x) f(x) = 1(x <= z) - P(z)

for the limiting laws p(x) = b exp(-a x**2k), with psi(x) = 2k a x**(2k-1).

The solution is evaluated in log space. Every product of the form
tail(x) * exp(a x**2k) / b is replaced by the scaled tail H of the law,
and where x and z have opposite roles the small tail factor at z is
folded into exp(-a (z**2k - x**2k)) before exponentiating.
"""

import logging

import numpy as np

from .limit_law import LimitLaw
from .util import power_gap

logger = logging.getLogger(__name__)


def psi(law, x):
    """psi(x) = 2k a x**(2k-1), the score of the limiting law"""
    x = np.asarray(x, dtype=float)
    value = 2 * law.k * law.a * x ** (2 * law.k - 1)
    return float(value) if value.ndim == 0 else value


def psi_prime(law, x):
    """psi'(x) = 2k (2k-1) a x**(2k-2)"""
    x = np.asarray(x, dtype=float)
    k = law.k
    value = 2 * k * (2 * k - 1) * law.a * x ** (2 * k - 2)
    return float(value) if value.ndim == 0 else value


class SteinSolution:
    """
    The solution f_z of the Stein equation for threshold z

    Parameters
    ----------
    law : LimitLaw
        the limiting law
    z : float
        threshold of the indicator test function
    """

    def __init__(self, law, z):
        if not isinstance(law, LimitLaw):
            raise TypeError(f"Expected a LimitLaw, got {type(law)}")
        z = float(z)
        if not np.isfinite(z):
            raise ValueError(f"threshold z must be finite, got {z}")
        #:LimitLaw: the limiting law
        self.law = law
        #:float: threshold
        self.z = z
        #:float: P(z)
        self.pz = law.cdf(z)
        #:float: 1 - P(z), on the small side
        self.qz = law.sf(z)
        #:float: log P(z), finite even when pz underflows
        self.log_pz = law.log_cdf(z)
        #:float: log(1 - P(z)), finite even when qz underflows
        self.log_qz = law.log_sf(z) if z >= 0 else float(np.log1p(-law.cdf(z)))
        #:float: H(|z|)
        self.hz = law.scaled_tail(abs(z))

    def __repr__(self):
        return f"SteinSolution({self.law!r}, z={self.z!r})"

    def _log_f_scalar(self, x):
        law, z = self.law, self.z
        k, a = law.k, law.a
        if x >= z:
            if x >= 0:
                # P(z) (1 - P(x)) e^{a x^2k} / b = P(z) H(x)
                return self.log_pz + np.log(law.scaled_tail(x))
            # z <= x < 0: P(z) = b H(-z) e^{-a z^2k}
            return (
                np.log(self.hz)
                + np.log1p(-law.sf(-x))
                - a * float(power_gap(-z, -x, k))
            )
        if x <= 0:
            # (1 - P(z)) P(x) e^{a x^2k} / b = (1 - P(z)) H(-x)
            return self.log_qz + np.log(law.scaled_tail(-x))
        # 0 < x < z: 1 - P(z) = b H(z) e^{-a z^2k}
        return (
            np.log(self.hz)
            + np.log1p(-law.sf(x))
            - a * float(power_gap(z, x, k))
        )

    def log_f(self, x):
        """log f_z(x), finite for every finite x"""
        x = np.asarray(x, dtype=float)
        values = np.array([self._log_f_scalar(float(xi)) for xi in x.ravel()])
        values = values.reshape(x.shape)
        return float(values) if values.ndim == 0 else values

    def f(self, x):
        """
        The solution f_z(x)

        Satisfies 0 < f_z(x) <= 1/(2b) mathematically, values below the
        smallest double flush to 0, see log_f.
        """
        return np.exp(self.log_f(x))

    def _jump(self, x):
        # 1 - P(z) for x < z, -P(z) for x >= z
        x = np.asarray(x, dtype=float)
        return np.where(x < self.z, self.qz, -self.pz)

    def f_prime(self, x):
        """
        Derivative of f_z

        (1 - P(z)) (1 + psi(x) P(x) e^{a x^2k} / b) for x < z and
        P(z) (psi(x) (1 - P(x)) e^{a x^2k} / b - 1) for x >= z, i.e.
        psi(x) f(x) + (1 - P(z)) or psi(x) f(x) - P(z).
        At x = z the x >= z branch is used.
        """
        value = psi(self.law, x) * self.f(x) + self._jump(x)
        return float(value) if np.ndim(value) == 0 else value

    def g(self, x):
        """
        g_z(x) = (psi f_z)'(x)

        For x < z the closed form
        (1 - P(z)) [P(x) e^{a x^2k} / b (psi'(x) + psi(x)**2) + psi(x)],
        for x > z the composition psi' f + psi f'.
        """
        x = np.asarray(x, dtype=float)
        law = self.law
        p, dp = psi(law, x), psi_prime(law, x)
        f = self.f(x)
        # (1 - P(z)) P(x) e^{a x^2k} / b is f itself on x < z
        closed = f * (dp + p * p) + self.qz * p
        value = np.where(x < self.z, closed, self.g_composed(x))
        return float(value) if value.ndim == 0 else value

    def g_composed(self, x):
        """g_z(x) = psi'(x) f(x) + psi(x) f'(x), valid for any x != z"""
        law = self.law
        value = psi_prime(law, x) * self.f(x) + psi(law, x) * self.f_prime(x)
        return float(value) if np.ndim(value) == 0 else value

    def residual(self, x):
        """
        Residual of the Stein equation, f' - psi f - (1(x <= z) - P(z))

        Vanishes for x != z, this is the self test of the solution.
        """
        x = np.asarray(x, dtype=float)
        indicator = (x <= self.z).astype(float)
        value = (
            self.f_prime(x) - psi(self.law, x) * self.f(x) - (indicator - self.pz)
        )
        return float(value) if np.ndim(value) == 0 else value

    def log_derivative_error(self, x, h=1e-4):
        """
        Central difference check of log_f against the Stein equation

            d/dx log f = psi(x) + (1(x <= z) - P(z)) / f(x)

        The right hand side is formed from log_f, log P(z) and log(1 - P(z)),
        so points where f underflows are checked as well. Points within 2h
        of z are skipped.

        Parameters
        ----------
        x : array
            evaluation points
        h : float, optional
            step of the central difference (default: 1e-4)

        Returns
        -------
        error : float
            max |difference| / (1 + |d/dx log f|), 0 if no point is left
        """
        x = np.asarray(x, dtype=float).ravel()
        x = x[np.abs(x - self.z) > 2 * h]
        if x.size == 0:
            return 0.0
        numeric = (self.log_f(x + h) - self.log_f(x - h)) / (2 * h)
        log_f = self.log_f(x)
        with np.errstate(over="ignore"):
            jump = np.where(
                x < self.z,
                np.exp(self.log_qz - log_f),
                -np.exp(self.log_pz - log_f),
            )
        expected = psi(self.law, x) + jump
        return float(np.max(np.abs(numeric - expected) / (1 + np.abs(expected))))
