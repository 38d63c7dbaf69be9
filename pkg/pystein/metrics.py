# -*- coding: utf-8 -*-
"""
Weighted Kolmogorov distances between exact discrete laws and limiting laws,
fits of the convergence rate, and the right hand sides of the Berry-Esseen
bounds for exchangeable pairs
"""

import logging

import numpy as np

from . import curie_weiss, monomer_dimer
from .discrete_law import DiscreteLaw, PairDiagnostics
from .util import bisect, check_positive_integer, check_positive_real

logger = logging.getLogger(__name__)

#:float: weighted gaps below this are treated as zero beyond the search cutoff
CUTOFF_TOLERANCE = 1e-16
#:float: resolution of the interior maximizers
BISECTION_XTOL = 1e-10

WEIGHTS = ("power", "polynomial")


def _weight(z, p, weight):
    # the weight omega(z) and its derivative
    az = np.abs(z)
    if weight == "power":
        value = (1 + az) ** p
        slope = p * (1 + az) ** (p - 1) * np.sign(z)
    elif weight == "polynomial":
        value = 1 + az**p
        with np.errstate(divide="ignore", invalid="ignore"):
            slope = np.where(az > 0, p * az ** (p - 1), 0.0) * np.sign(z)
    else:
        raise ValueError(f"weight must be one of {WEIGHTS}, got {weight}")
    return value, slope


class DistanceProfile:
    """
    The weighted gap omega(z) |F_n(z) - F(z)| at every candidate maximizer

    Attributes
    ----------
    p : float
        weight exponent
    weight : str
        "power" for (1 + |z|)**p, "polynomial" for 1 + |z|**p
    z : array
        candidate locations
    gap : array
        |F_n(z) - F(z)|, with the one sided limit of F_n that is larger
    weighted : array
        omega(z) * gap
    z_cut : float
        beyond +-z_cut the weighted gap is below 1e-16
    supremum : float
        max of weighted
    argsup : float
        location of the supremum
    """

    def __init__(self, p, weight, z, gap, weighted, z_cut):
        order = np.argsort(z, kind="stable")
        self.p = float(p)
        self.weight = weight
        self.z = np.asarray(z, dtype=float)[order]
        self.gap = np.asarray(gap, dtype=float)[order]
        self.weighted = np.asarray(weighted, dtype=float)[order]
        self.z_cut = float(z_cut)
        i = int(np.argmax(self.weighted))
        self.supremum = float(self.weighted[i])
        self.argsup = float(self.z[i])

    def __repr__(self):
        return (
            f"DistanceProfile(p={self.p}, weight={self.weight}, "
            f"supremum={self.supremum:.6e}, argsup={self.argsup:.6g})"
        )

    def at(self, z0):
        """weighted gap at the candidate closest to z0"""
        return float(self.weighted[np.argmin(np.abs(self.z - z0))])


def _search_cutoff(disc, law, p, weight):
    """
    Smallest z_cut on a doubling grid with omega(z) |F_n(z) - F(z)| < tol
    for all |z| >= z_cut
    """
    k, a = law.k, law.a
    left_tail = disc.left_mass - disc.probs
    right_tail = disc.right_mass + disc.probs
    w_atoms, _ = _weight(disc.locations, p, weight)

    z = law.scale
    for _ in range(200):
        omega, slope = _weight(z, p, weight)
        # omega * tail_bound is decreasing beyond z
        decreasing = slope / omega < 2 * k * a * z ** (2 * k - 1)
        small = omega * law.tail_bound(z) < CUTOFF_TOLERANCE
        if decreasing and small:
            # worst case of omega(z) P(X > z) is at the next atom
            upper = disc.locations > z
            lower = disc.locations < -z
            disc_right = np.max(w_atoms[upper] * right_tail[upper], initial=0)
            disc_left = np.max(w_atoms[lower] * left_tail[lower], initial=0)
            if max(disc_right, disc_left) < CUTOFF_TOLERANCE:
                return z
        z *= 2
    raise ValueError("No cutoff found for the weighted distance search")


def weighted_distance(disc, law, p, weight="power", refine=4):
    """
    sup_z omega(z) |F_n(z) - F(z)| for a discrete law F_n and a limiting law F

    The candidates are both one sided limits at every atom within the cutoff,
    the points 0 and +-z_cut, and the interior stationary points of each
    interval between them, where F_n is a constant c. On such an interval
    the sign of the derivative of s * omega(z) (c - F(z)), s = +-1, is

        s * (omega'(z) (c - F(z)) - omega(z) F'(z))

    and the maximizers are found by bisection of the sign change, on a grid
    of refine + 1 sub intervals per interval.

    Parameters
    ----------
    disc : DiscreteLaw
        the exact law
    law : LimitLaw
        the limiting law
    p : float
        weight exponent, p >= 0
    weight : {"power", "polynomial"}, optional
        (1 + |z|)**p or 1 + |z|**p (default: "power")
    refine : int, optional
        number of interior grid points of every interval (default: 4)

    Returns
    -------
    profile : DistanceProfile

    Raises
    ------
    ValueError
        if disc is not normalized within 1e-9 or p < 0
    """
    if not isinstance(disc, DiscreteLaw):
        raise TypeError(f"Expected a DiscreteLaw, got {type(disc)}")
    if not disc.is_normalized(1e-9):
        logger.error("Discrete law is not normalized: %.3e", disc.normalization)
        raise ValueError(
            f"Discrete law must be normalized, log total mass {disc.normalization}"
        )
    p = float(p)
    if not np.isfinite(p) or p < 0:
        raise ValueError(f"p must be a nonnegative number, got {p}")
    if weight not in WEIGHTS:
        raise ValueError(f"weight must be one of {WEIGHTS}, got {weight}")
    refine = int(refine)
    if refine < 0:
        raise ValueError(f"refine must be >= 0, got {refine}")

    z_cut = _search_cutoff(disc, law, p, weight)
    logger.debug("Weighted distance search cutoff z_cut=%g", z_cut)

    inside = np.abs(disc.locations) <= z_cut
    atoms = disc.locations[inside]
    # F_n at the atom and just below it, on the small side
    below = (disc.left_mass - disc.probs)[inside]
    at = disc.left_mass[inside]
    right_at = disc.right_mass[inside]
    right_below = right_at + disc.probs[inside]

    def gaps(z, cdf_value, right_value):
        # |F_n - F| with the small side of both laws
        return np.where(
            z <= 0,
            np.abs(cdf_value - law.cdf(z)),
            np.abs(law.sf(z) - right_value),
        )

    cand_z = [atoms, atoms]
    cand_gap = [gaps(atoms, at, right_at), gaps(atoms, below, right_below)]

    # points where F_n is continuous
    fixed = np.array([-z_cut, 0.0, z_cut])
    fixed = fixed[~np.isin(fixed, atoms)]
    fixed_cdf = disc.cdf(fixed)
    fixed_right = disc.sf(fixed)
    cand_z.append(fixed)
    cand_gap.append(gaps(fixed, fixed_cdf, fixed_right))

    # interior stationary points
    points = np.union1d(atoms, [-z_cut, 0.0, z_cut])
    lo, hi = points[:-1], points[1:]
    cdf_piece = disc.cdf(lo)
    right_piece = disc.sf(lo)
    frac = np.linspace(0, 1, refine + 2)
    sub_lo = (lo[:, None] + frac[None, :-1] * (hi - lo)[:, None]).ravel()
    sub_hi = (lo[:, None] + frac[None, 1:] * (hi - lo)[:, None]).ravel()
    c = np.repeat(cdf_piece, refine + 1)
    r = np.repeat(right_piece, refine + 1)

    def difference(z, c, r):
        # F_n - F on a piece, on the small side
        return np.where(z <= 0, c - law.cdf(z), law.sf(z) - r)

    if p > 0:
        for s in (1.0, -1.0):

            def slope(z, c=c, r=r, s=s, mask=None):
                if mask is not None:
                    c, r = c[mask], r[mask]
                omega, domega = _weight(z, p, weight)
                return s * (domega * difference(z, c, r) - omega * law.density(z))

            rising = (slope(sub_lo) > 0) & (slope(sub_hi) < 0)
            if not np.any(rising):
                continue
            z_star = bisect(
                lambda z, m=rising: slope(z, mask=m),
                sub_lo[rising],
                sub_hi[rising],
                xtol=BISECTION_XTOL,
            )
            cand_z.append(z_star)
            cand_gap.append(
                np.abs(difference(z_star, c[rising], r[rising]))
            )
            logger.debug("%i interior maximizers for sign %+g", z_star.size, s)

    z = np.concatenate(cand_z)
    gap = np.concatenate(cand_gap)
    omega, _ = _weight(z, p, weight)
    return DistanceProfile(p, weight, z, gap, omega * gap, z_cut)


def kolmogorov_distance(disc, law):
    """sup |F_n - F| from the one sided limits at the atoms only"""
    at = np.abs(disc.left_mass - law.cdf(disc.locations))
    below = np.abs(disc.left_mass - disc.probs - law.cdf(disc.locations))
    return float(max(at.max(), below.max()))


class RateFit:
    """
    Least squares fit of log D = intercept + slope * log n

    Attributes
    ----------
    ns, distances : array
        the fitted points
    slope, intercept : float
        the fit
    r_squared : float
        coefficient of determination, 1 for exact power laws
    rate : float
        the rate used for the empirical constant, -slope if not given
    empirical_constant : float
        max over n of D(n) n**rate
    """

    def __init__(self, ns, distances, slope, intercept, r_squared, rate):
        self.ns = np.asarray(ns)
        self.distances = np.asarray(distances, dtype=float)
        self.slope = float(slope)
        self.intercept = float(intercept)
        self.r_squared = float(r_squared)
        self.rate = float(rate)
        self.empirical_constant = float(
            np.max(self.distances * self.ns.astype(float) ** self.rate)
        )

    def __repr__(self):
        return (
            f"RateFit(slope={self.slope:.6g}, intercept={self.intercept:.6g}, "
            f"r_squared={self.r_squared:.6g})"
        )

    @property
    def points(self):
        return np.log(self.ns.astype(float)), np.log(self.distances)


def rate_fit(ns, distances, rate=None):
    """
    Fit the convergence rate D(n) ~ C n**slope

    Parameters
    ----------
    ns : list(int)
        system sizes, at least 3
    distances : list(float)
        positive distances
    rate : float, optional
        target rate for the empirical constant max D(n) n**rate

    Returns
    -------
    fit : RateFit
    """
    ns = [check_positive_integer(n, "n") for n in ns]
    distances = np.asarray(distances, dtype=float)
    if len(ns) != distances.size:
        raise ValueError(
            f"Got {len(ns)} system sizes but {distances.size} distances"
        )
    if len(ns) < 3:
        raise ValueError(f"A rate fit needs at least 3 points, got {len(ns)}")
    if np.any(~np.isfinite(distances)) or np.any(distances <= 0):
        raise ValueError(f"distances must be positive, got {distances}")

    x = np.log(np.asarray(ns, dtype=float))
    y = np.log(distances)
    slope, intercept = np.polyfit(x, y, 1)
    ss_res = np.sum((y - (intercept + slope * x)) ** 2)
    ss_tot = np.sum((y - y.mean()) ** 2)
    if ss_tot == 0:
        r_squared = 1.0
    else:
        r_squared = float(np.clip(1 - ss_res / ss_tot, 0, 1))
    if rate is None:
        rate = -slope
    logger.debug("Rate fit slope %.6g, r2 %.6g", slope, r_squared)
    return RateFit(ns, distances, slope, intercept, r_squared, rate)


class BoundReport:
    """
    The bracketed terms of the Berry-Esseen bounds, each an exact atom sum

    Attributes
    ----------
    term_condvar : float
        sqrt(E(1 - E(Delta**2 | W) / 2 lambda)**2)
    term_remainder : float
        sqrt(E R**2) / lambda
    term_a : float
        the truncation level a
    term_a3 : float
        a**3 / lambda
    term_delta4 : float
        sqrt(E Delta**4 1(|Delta| > a)) / lambda
    uniform_variant_delta2 : float
        E Delta**2 1(|Delta| > a) / lambda, of the uniform bound
    bounded_condvar, bounded_remainder, bounded_a : float
        |E(1 - E(Delta**2 | W) / 2 lambda)|, E|R| / lambda and 3a,
        of the bound for pairs with |Delta| <= a
    moment_2k_minus_1 : float
        E|W|**(2k - 1), prefactor of the uniform bound
    psi_second_moment : float
        E|psi(W)|**2, which enters the constant of the bounded pair bound
    a_used : float
        the truncation level
    """

    def __init__(self, **terms):
        for key, value in terms.items():
            setattr(self, key, float(value))

    @property
    def bracket(self):
        """Sum of the five terms of the non-uniform bound"""
        return (
            self.term_condvar
            + self.term_remainder
            + self.term_a
            + self.term_a3
            + self.term_delta4
        )

    @property
    def uniform_bracket(self):
        return (
            self.term_condvar
            + self.term_remainder
            + self.term_a
            + self.term_a3
            + self.uniform_variant_delta2
        )

    @property
    def bounded_bracket(self):
        return self.bounded_condvar + self.bounded_remainder + self.bounded_a

    def to_dict(self):
        data = dict(vars(self))
        data["bracket"] = self.bracket
        data["uniform_bracket"] = self.uniform_bracket
        data["bounded_bracket"] = self.bounded_bracket
        return data


def bound_terms(diag, law_of_w, a, k=2):
    """
    Evaluate the right hand side terms of the bounds for a pair

    Parameters
    ----------
    diag : PairDiagnostics
        statistics of the pair
    law_of_w : DiscreteLaw
        law of W, must have the same atoms as diag
    a : float
        truncation level
    k : int, optional
        half degree of the limiting law (default: 2)

    Returns
    -------
    report : BoundReport

    Raises
    ------
    ValueError
        if the atoms of diag and law_of_w differ
    """
    if not isinstance(diag, PairDiagnostics):
        raise TypeError(f"Expected PairDiagnostics, got {type(diag)}")
    if not diag.law.same_atoms(law_of_w):
        logger.error("Atom sets of the diagnostics and the law differ")
        raise ValueError("The pair diagnostics and the law of W have different atoms")
    a = check_positive_real(a, "a")
    k = check_positive_integer(k, "k")

    lam = diag.lam
    expect = law_of_w.expect
    condvar = 1 - diag.E_delta2 / (2 * lam)
    R = diag.R
    delta4 = expect(diag.delta_moment(4, a, tail=True))
    delta2 = expect(diag.delta_moment(2, a, tail=True))

    report = BoundReport(
        term_condvar=np.sqrt(expect(condvar**2)),
        term_remainder=np.sqrt(expect(R**2)) / lam,
        term_a=a,
        term_a3=a**3 / lam,
        term_delta4=np.sqrt(delta4) / lam,
        uniform_variant_delta2=delta2 / lam,
        bounded_condvar=abs(expect(condvar)),
        bounded_remainder=expect(np.abs(R)) / lam,
        bounded_a=3 * a,
        moment_2k_minus_1=law_of_w.abs_moment(2 * k - 1),
        psi_second_moment=expect(diag.psi_w**2),
        a_used=a,
    )
    return report


class AuditResult:
    """
    The weighted distance of a model next to the terms of its bound

    Attributes
    ----------
    model : str
    n : int
    p : float
    lhs_profile : DistanceProfile
    rhs_terms : BoundReport
    rate : float
        proved rate, 1/2 for Curie-Weiss and 1/4 for monomer-dimer
    implied_const_rate : float
        supremum * n**rate
    implied_const_papernorm : float
        supremum * n**rate / p**(p/2), the implied constant
    implied_const_full : float
        supremum / ((p**(p/k) + E|W|**(2p)) * bracket)
    """

    def __init__(self, model, n, p, law, lhs_profile, rhs_terms, rate, moment_2p):
        self.model = model
        self.n = n
        self.p = p
        self.law = law
        self.lhs_profile = lhs_profile
        self.rhs_terms = rhs_terms
        self.rate = rate
        sup = lhs_profile.supremum
        self.implied_const_rate = sup * n**rate
        self.implied_const_papernorm = self.implied_const_rate / p ** (p / 2)
        prefactor = p ** (p / law.k) + moment_2p
        self.implied_const_full = sup / (prefactor * rhs_terms.bracket)

    @property
    def implied_constant(self):
        return self.implied_const_papernorm

    def row(self):
        """The fixed audit columns"""
        terms = self.rhs_terms
        return {
            "model": self.model,
            "n": self.n,
            "p": self.p,
            "distance": self.lhs_profile.supremum,
            "argsup_z": self.lhs_profile.argsup,
            "term_condvar": terms.term_condvar,
            "term_remainder": terms.term_remainder,
            "term_a": terms.term_a,
            "term_a3": terms.term_a3,
            "term_delta4": terms.term_delta4,
            "implied_const_rate": self.implied_const_rate,
            "implied_const_papernorm": self.implied_const_papernorm,
        }


MODELS = ("curie_weiss", "monomer_dimer")


def model_setup(model, n):
    """
    Limiting law, pair diagnostics and proved rate of a model

    Returns
    -------
    law : LimitLaw
    diag : PairDiagnostics
    rate : float
    """
    model = str(model).replace("-", "_").lower()
    if model == "curie_weiss":
        return curie_weiss.CRITICAL_LAW, curie_weiss.pair_diagnostics(n), 0.5
    if model == "monomer_dimer":
        law = monomer_dimer.critical_constants().limit_law
        return law, monomer_dimer.pair_diagnostics(n), 0.25
    raise ValueError(f"model must be one of {MODELS}, got {model}")


def theorem_audit(model, n, p, a=None, weight="power", refine=4):
    """
    Compare the exact weighted distance of a model with its bound

    Parameters
    ----------
    model : {"curie_weiss", "monomer_dimer"}
        the model
    n : int
        system size
    p : float
        weight exponent
    a : float, optional
        truncation level, by default the support bound of Delta
    weight : str, optional
        weight of the distance (default: "power")
    refine : int, optional
        interior grid of the supremum search (default: 4)

    Returns
    -------
    result : AuditResult
    """
    law, diag, rate = model_setup(model, n)
    model = str(model).replace("-", "_").lower()
    p = float(p)
    if 0 < p < 2 * law.k - 1:
        logger.warning(
            "p=%g is below 2k-1=%i, the non-uniform bound does not apply",
            p,
            2 * law.k - 1,
        )
    if a is None:
        a = diag.delta_support_bound

    profile = weighted_distance(diag.law, law, p, weight=weight, refine=refine)
    terms = bound_terms(diag, diag.law, a, k=law.k)
    result = AuditResult(
        model, n, p, law, profile, terms, rate, diag.law.abs_moment(2 * p)
    )
    logger.info(
        "%s n=%i p=%g: distance %.6e at z=%.4g, implied constant %.6g",
        model,
        n,
        p,
        profile.supremum,
        profile.argsup,
        result.implied_const_papernorm,
    )
    logger.debug(
        "Full prefactor normalization of %s n=%i p=%g: %.6g",
        model,
        n,
        p,
        result.implied_const_full,
    )
    return result
