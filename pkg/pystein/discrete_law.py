# -*- coding: utf-8 -*-
"""
Containers for exact finite-n laws and the statistics of exchangeable pairs
"""

import logging

import numpy as np
from scipy.special import logsumexp

from .util import signed_expectation

logger = logging.getLogger(__name__)

#:float: relative slack of the comparison |Delta| <= a
JUMP_RTOL = 8 * np.finfo(float).eps


class DiscreteLaw:
    """
    A probability law on finitely many atoms, stored as log probabilities

    Parameters
    ----------
    locations : array[n]
        strictly increasing atom locations
    log_weights : array[n]
        unnormalized log weights of the atoms
    normalize : bool, optional
        whether to normalize the weights with log-sum-exp (default: True)
    """

    def __init__(self, locations, log_weights, normalize=True):
        locations = np.asarray(locations, dtype=float)
        log_weights = np.asarray(log_weights, dtype=float)
        if locations.ndim != 1 or locations.shape != log_weights.shape:
            raise ValueError(
                "locations and log weights must be 1D arrays of the same length"
            )
        if locations.size == 0:
            raise ValueError("A discrete law needs at least one atom")
        if np.any(np.diff(locations) <= 0):
            raise ValueError("Atom locations must be strictly increasing")

        if normalize:
            log_weights = log_weights - logsumexp(log_weights)
        #:array: atom locations
        self.locations = locations
        #:array: log probabilities of the atoms
        self.log_probs = log_weights
        self._left = None
        self._right = None

    def __len__(self):
        return self.locations.size

    def __repr__(self):
        return (
            f"DiscreteLaw({self.size} atoms in "
            f"[{self.locations[0]:.6g}, {self.locations[-1]:.6g}])"
        )

    @property
    def size(self):
        """int: number of atoms"""
        return self.locations.size

    @property
    def probs(self):
        """array: probabilities of the atoms, tiny ones flush to 0"""
        return np.exp(self.log_probs)

    @property
    def normalization(self):
        """float: log of the total mass, 0 for a normalized law"""
        return float(logsumexp(self.log_probs))

    def is_normalized(self, tol=1e-12):
        return abs(self.normalization) <= tol

    @property
    def left_mass(self):
        """array: P(X <= x_i) at every atom"""
        if self._left is None:
            self._left = np.cumsum(self.probs)
        return self._left

    @property
    def right_mass(self):
        """array: P(X > x_i) at every atom, summed from the upper end"""
        if self._right is None:
            tail = np.cumsum(self.probs[::-1])[::-1]
            self._right = np.append(tail[1:], 0.0)
        return self._right

    def cdf(self, z):
        """Right continuous distribution function P(X <= z)"""
        z = np.asarray(z, dtype=float)
        idx = np.searchsorted(self.locations, z, side="right")
        mass = np.where(idx > 0, self.left_mass[np.maximum(idx - 1, 0)], 0.0)
        return float(mass) if mass.ndim == 0 else mass

    def sf(self, z):
        """P(X > z), summed on the small side"""
        z = np.asarray(z, dtype=float)
        idx = np.searchsorted(self.locations, z, side="right")
        upper = np.append(self.right_mass[0] + self.probs[0], self.right_mass)
        mass = upper[idx]
        return float(mass) if mass.ndim == 0 else mass

    def expect(self, values):
        """E[values], values given per atom, summed in log space with signs"""
        values = np.broadcast_to(np.asarray(values, dtype=float), self.locations.shape)
        return signed_expectation(self.log_probs, values)

    def abs_moment(self, m):
        """E|X|^m"""
        if m == 0:
            return 1.0
        if m < 0:
            raise ValueError(f"moment order must be >= 0, got {m}")
        with np.errstate(divide="ignore"):
            log_abs = m * np.log(np.abs(self.locations))
        return float(np.exp(logsumexp(self.log_probs + log_abs)))

    def mean(self):
        return self.expect(self.locations)

    def rescale(self, factor, shift=0.0):
        """The law of factor * (X - shift), factor > 0"""
        if factor <= 0:
            raise ValueError(f"rescale factor must be positive, got {factor}")
        locations = factor * (self.locations - shift)
        return DiscreteLaw(locations, self.log_probs.copy(), normalize=False)

    def same_atoms(self, other):
        return self.size == other.size and np.array_equal(
            self.locations, other.locations
        )


class PairDiagnostics:
    """
    Conditional statistics of an exchangeable pair (W, W'), per atom of W

    The difference Delta = W - W' takes values in {0, +-d_1, +-d_2, ...},
    the conditional probabilities of |Delta| = d_j are stored per atom,
    so that truncated moments E(Delta^m 1(|Delta| > a) | W) are exact.

    Parameters
    ----------
    law : DiscreteLaw
        law of W
    lam : float
        the rate lambda of the regression identity
    psi_w : array[n]
        psi evaluated at every atom
    E_delta : array[n]
        E(Delta | W = w)
    jump_sizes : array[m]
        the possible nonzero values of |Delta|
    jump_probs : array[n, m]
        P(|Delta| = jump_sizes[j] | W = w)
    """

    def __init__(self, law, lam, psi_w, E_delta, jump_sizes, jump_probs):
        #:DiscreteLaw: law of W
        self.law = law
        #:float: lambda in E(W'|W) = W - lambda psi(W) + R
        self.lam = float(lam)
        #:array: psi at the atoms
        self.psi_w = np.asarray(psi_w, dtype=float)
        #:array: E(Delta | w)
        self.E_delta = np.asarray(E_delta, dtype=float)
        #:array: nonzero values of |Delta|
        self.jump_sizes = np.atleast_1d(np.asarray(jump_sizes, dtype=float))
        #:array: conditional probabilities of each jump size
        self.jump_probs = np.asarray(jump_probs, dtype=float).reshape(
            law.size, self.jump_sizes.size
        )

        if self.lam <= 0:
            raise ValueError(f"lambda must be positive, got {lam}")
        if self.psi_w.shape != law.locations.shape:
            raise ValueError("psi must be given at every atom")
        if self.E_delta.shape != law.locations.shape:
            raise ValueError("E(Delta|W) must be given at every atom")

        #:array: E(Delta^2 | w)
        self.E_delta2 = self.delta_moment(2)
        #:array: E(Delta^4 | w)
        self.E_delta4 = self.delta_moment(4)

    @property
    def w(self):
        """array: atoms of W"""
        return self.law.locations

    @property
    def prob(self):
        """array: probabilities of the atoms"""
        return self.law.probs

    @property
    def R(self):
        """array: remainder R = lambda psi(w) - E(Delta | w)"""
        return self.lam * self.psi_w - self.E_delta

    @property
    def delta_support_bound(self):
        """float: max |Delta|"""
        return float(self.jump_sizes.max())

    def delta_moment(self, m, a=None, tail=True):
        """
        E(|Delta|^m 1(...) | w) per atom

        Parameters
        ----------
        m : float
            order of the moment
        a : float, optional
            truncation level, if None no truncation
        tail : bool, optional
            if True use the indicator 1(|Delta| > a), otherwise 1(|Delta| <= a).
            Jumps within JUMP_RTOL of a count as |Delta| <= a, so a = 2 / n**0.75
            matches the stored jump 2 * n**-0.75 whatever the rounding.

        Returns
        -------
        moment : array[n]
        """
        levels = self.jump_sizes**m
        if a is not None:
            inside = self.jump_sizes <= a * (1 + JUMP_RTOL)
            keep = ~inside if tail else inside
            levels = np.where(keep, levels, 0.0)
        return self.jump_probs @ levels


class BoundCheck:
    """
    Result of checking lhs <= rhs at every atom

    Parameters
    ----------
    name : str
        which inequality was checked
    n : int
        system size
    lhs, rhs : array
        both sides at every atom
    """

    def __init__(self, name, n, lhs, rhs):
        lhs = np.atleast_1d(np.asarray(lhs, dtype=float))
        rhs = np.atleast_1d(np.asarray(rhs, dtype=float))
        self.name = name
        self.n = n
        #:float: max(lhs - rhs), <= 0 when the inequality holds
        self.max_violation = float(np.max(lhs - rhs))
        #:float: max(lhs / rhs), the smallest constant that makes it hold
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(rhs > 0, lhs / rhs, np.where(lhs > 0, np.inf, 0.0))
        self.empirical_constant = float(np.max(ratio))

    def __repr__(self):
        return (
            f"BoundCheck({self.name}, n={self.n}, "
            f"max_violation={self.max_violation:.3e}, "
            f"empirical_constant={self.empirical_constant:.6g})"
        )

    @property
    def passed(self):
        return self.max_violation <= 0

    def to_dict(self):
        return {
            "name": self.name,
            "n": self.n,
            "max_violation": self.max_violation,
            "empirical_constant": self.empirical_constant,
        }
