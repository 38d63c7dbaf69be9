# -*- coding: utf-8 -*-
"""
Brute force enumeration of small systems

These do not use any of the closed forms of the model modules, energies come
from explicit pair sums and dimer counts from enumerated matchings of K_n.
They serve as the reference for the exact laws and pair diagnostics.
"""

import logging
from collections import Counter
from itertools import combinations, product

import numpy as np
from scipy.special import logsumexp

from . import curie_weiss, monomer_dimer
from .discrete_law import DiscreteLaw
from .stein_core import psi
from .util import NumericConsistencyError, check_positive_integer

logger = logging.getLogger(__name__)

#:int: largest spin system that is enumerated
MAX_SPINS = 14
#:int: largest complete graph whose matchings are enumerated
MAX_DIMERS = 10


def spin_configurations(n):
    """All 2**n configurations in {-1, 1}**n, as rows"""
    n = check_positive_integer(n, "n", cap=MAX_SPINS)
    return np.array(list(product((-1, 1), repeat=n)), dtype=float)


def _pair_sum(configs):
    # sum_{i<j} sigma_i sigma_j for every row
    n = configs.shape[1]
    upper = np.triu(np.ones((n, n)), k=1)
    return np.sum((configs @ upper) * configs, axis=1)


def _spin_log_weights(configs, beta):
    n = configs.shape[1]
    return beta * _pair_sum(configs) / n


def _group(keys, log_weights, values=()):
    # law of keys and the conditional means of values given each key
    levels = np.unique(keys)
    log_probs = np.array([logsumexp(log_weights[keys == k]) for k in levels])
    total = logsumexp(log_probs)
    means = []
    for v in values:
        means.append(
            np.array(
                [
                    np.sum(np.exp(log_weights[keys == k] - lp) * v[keys == k])
                    for k, lp in zip(levels, log_probs)
                ]
            )
        )
    return levels, log_probs - total, means


def enumerate_spin_law(n, beta=1.0):
    """Law of S_n by summing the Gibbs weights of all configurations"""
    configs = spin_configurations(n)
    s, log_probs, _ = _group(configs.sum(axis=1), _spin_log_weights(configs, beta))
    return DiscreteLaw(s, log_probs)


def enumerate_spin_diagnostics(n, beta=1.0):
    """
    Pair statistics of the Glauber update by enumeration

    For every configuration and every site, the resampling law of the site
    is obtained from the full energies of the two completed configurations.

    Returns
    -------
    diag : dict
        arrays w, prob, E_delta, E_delta2, E_delta4, R per level of S_n
    """
    configs = spin_configurations(n)
    log_w = _spin_log_weights(configs, beta)
    scale = float(n) ** -0.75

    delta = np.zeros((3, configs.shape[0]))
    for i in range(n):
        completed = []
        for value in (-1.0, 1.0):
            modified = configs.copy()
            modified[:, i] = value
            completed.append(_spin_log_weights(modified, beta))
        log_norm = np.logaddexp(completed[0], completed[1])
        for value, log_c in zip((-1.0, 1.0), completed):
            prob = np.exp(log_c - log_norm)
            step = (configs[:, i] - value) * scale
            delta += prob * np.stack([step, step**2, step**4]) / n

    s, log_probs, means = _group(configs.sum(axis=1), log_w, delta)
    w = s * scale
    lam = float(n) ** -1.5
    return {
        "w": w,
        "prob": np.exp(log_probs),
        "E_delta": means[0],
        "E_delta2": means[1],
        "E_delta4": means[2],
        "R": lam * psi(curie_weiss.CRITICAL_LAW, w) - means[0],
    }


def enumerate_matchings(n):
    """
    All matchings of the complete graph K_n, as tuples of edges

    The empty matching is included, unmatched vertices are monomers.
    """
    n = check_positive_integer(n, "n", cap=MAX_DIMERS)

    def recurse(vertices):
        if len(vertices) == 0:
            yield ()
            return
        first, rest = vertices[0], vertices[1:]
        # first is a monomer
        yield from recurse(rest)
        # first is covered by a dimer
        for j, partner in enumerate(rest):
            remaining = rest[:j] + rest[j + 1 :]
            for matching in recurse(remaining):
                yield ((first, partner),) + matching

    return list(recurse(tuple(range(n))))


def monomer_set_counts(n):
    """Number of dimer configurations for every set of monomer vertices"""
    counts = Counter()
    for matching in enumerate_matchings(n):
        covered = {v for edge in matching for v in edge}
        counts[frozenset(range(n)) - covered] += 1
    return counts


def _dimer_log_weight(n, t, J, h):
    m = t / n
    return n * (J * m * m + (np.log(n) / 2 + h - J) * m)


def enumerate_dimer_law(n, J=monomer_dimer.J_C, h=monomer_dimer.H_C):
    """Law of the monomer count by summing over all dimer configurations"""
    counts = monomer_set_counts(n)
    t = np.array([len(monomers) for monomers in counts], dtype=float)
    log_w = np.log(np.array(list(counts.values()), dtype=float))
    log_w = log_w + _dimer_log_weight(n, t, J, h)
    levels, log_probs, _ = _group(t, log_w)
    return DiscreteLaw(levels, log_probs)


def enumerate_dimer_diagnostics(n):
    """
    Pair statistics of the pair update at the critical point by enumeration

    Every unordered pair {u, v} is chosen with probability 1 / C(n, 2) and
    (sigma_u, sigma_v) is resampled proportional to the configuration weight
    D(sigma) exp(-H(sigma)), with D the enumerated dimer counts.

    Returns
    -------
    diag : dict
        arrays w, prob, E_delta, E_delta2, E_delta4, R per monomer count
    """
    J, h = monomer_dimer.J_C, monomer_dimer.H_C
    counts = monomer_set_counts(n)
    scale = float(n) ** -0.75

    def log_weight(monomers):
        count = counts.get(frozenset(monomers), 0)
        if count == 0:
            return -np.inf
        return np.log(count) + _dimer_log_weight(n, len(monomers), J, h)

    pairs = list(combinations(range(n), 2))
    keys, log_ws, stats = [], [], []
    for monomers in counts:
        keys.append(len(monomers))
        log_ws.append(log_weight(monomers))
        moments = np.zeros(3)
        for u, v in pairs:
            others = set(monomers) - {u, v}
            old = (u in monomers) + (v in monomers)
            outcomes = []
            for su, sv in product((0, 1), repeat=2):
                new = others | ({u} if su else set()) | ({v} if sv else set())
                outcomes.append((old - su - sv, log_weight(new)))
            log_norm = logsumexp([lw for _, lw in outcomes])
            for step, lw in outcomes:
                if lw == -np.inf:
                    continue
                d = step * scale
                moments += np.exp(lw - log_norm) * np.array([d, d**2, d**4])
        stats.append(moments / len(pairs))

    stats = np.array(stats).T
    t, log_probs, means = _group(np.array(keys, dtype=float), np.array(log_ws), stats)
    critical = monomer_dimer.critical_constants()
    w = (t - n * monomer_dimer.M_C) * scale
    lam = monomer_dimer.pair_lambda(n)
    return {
        "w": w,
        "prob": np.exp(log_probs),
        "E_delta": means[0],
        "E_delta2": means[1],
        "E_delta4": means[2],
        "R": lam * psi(critical.limit_law, w) - means[0],
    }


def compare(name, ours, oracle, atol=1e-12, rtol=1e-12):
    """
    Raise NumericConsistencyError naming the first entry where ours and
    oracle differ by more than atol + rtol * |oracle|
    """
    ours = np.atleast_1d(np.asarray(ours, dtype=float))
    oracle = np.atleast_1d(np.asarray(oracle, dtype=float))
    if ours.shape != oracle.shape:
        logger.error("%s: shapes differ, %s vs %s", name, ours.shape, oracle.shape)
        raise NumericConsistencyError(
            f"{name}: shape {ours.shape} does not match the oracle {oracle.shape}"
        )
    bad = np.abs(ours - oracle) > atol + rtol * np.abs(oracle)
    if np.any(bad):
        i = int(np.argmax(bad))
        logger.error(
            "%s differs from the oracle at index %i: %.17g vs %.17g",
            name,
            i,
            ours[i],
            oracle[i],
        )
        raise NumericConsistencyError(
            f"{name}: entry {i} is {ours[i]!r}, the oracle gives {oracle[i]!r}"
        )


def _compare_diagnostics(label, diag, oracle):
    compare(f"{label} atoms", diag.w, oracle["w"])
    compare(f"{label} probabilities", diag.prob, oracle["prob"])
    for field in ("E_delta", "E_delta2", "E_delta4", "R"):
        compare(f"{label} {field}", getattr(diag, field), oracle[field])


def run_spin_suite(max_n):
    """Compare the Curie-Weiss law and diagnostics with enumeration, 2 <= n <= max_n"""
    max_n = check_positive_integer(max_n, "max_n", cap=MAX_SPINS)
    checked = 0
    for n in range(2, max_n + 1):
        law = curie_weiss.magnetization_law(n)
        oracle_law = enumerate_spin_law(n)
        compare(f"Curie-Weiss n={n} levels", law.locations, oracle_law.locations)
        compare(f"Curie-Weiss n={n} law", law.probs, oracle_law.probs)
        _compare_diagnostics(
            f"Curie-Weiss n={n}",
            curie_weiss.pair_diagnostics(n),
            enumerate_spin_diagnostics(n),
        )
        checked += 1
        logger.debug("Curie-Weiss oracle passed for n=%i", n)
    return checked


def run_dimer_suite(max_n):
    """Compare monomer-dimer laws, dimer counts and diagnostics, 2 <= n <= max_n"""
    max_n = check_positive_integer(max_n, "max_n", cap=MAX_DIMERS)
    checked = 0
    for n in range(2, max_n + 1):
        for monomers, count in monomer_set_counts(n).items():
            expected = np.exp(monomer_dimer.matching_count_log(n - len(monomers)))
            if count != int(round(expected)):
                raise NumericConsistencyError(
                    f"n={n}: {count} dimer configurations on {sorted(monomers)}, "
                    f"expected {expected}"
                )
        law = monomer_dimer.magnetization_law(n)
        oracle_law = enumerate_dimer_law(n)
        compare(f"monomer-dimer n={n} counts", law.locations, oracle_law.locations)
        compare(f"monomer-dimer n={n} law", law.probs, oracle_law.probs)
        _compare_diagnostics(
            f"monomer-dimer n={n}",
            monomer_dimer.pair_diagnostics(n),
            enumerate_dimer_diagnostics(n),
        )
        checked += 1
        logger.debug("Monomer-dimer oracle passed for n=%i", n)
    return checked
