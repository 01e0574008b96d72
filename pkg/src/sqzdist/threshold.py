"""Click / no-click probabilities by inclusion-exclusion over vacuum projections.

A detector of efficiency ``e_k`` that registers nothing contributes the
generating-function argument ``eta_k = e_k``; an unobserved mode contributes
``eta_k = 0``. With ideal detectors these are the familiar ``1`` and ``0``.
"""

from __future__ import annotations

import math
from itertools import combinations

import numpy as np

from .errors import TooManyClicks
from .generating import evaluate_generating_function
from .model import Scenario

MAX_CLICKS = 20
NEGATIVE_TOL = 1e-10


def _check_mode(scenario: Scenario, k: int) -> int:
    k = int(k)
    if not 0 <= k < scenario.M:
        raise IndexError(f"mode {k} outside 0..{scenario.M - 1}")
    return k


def no_click_probability(scenario: Scenario, k: int) -> float:
    """Marginal probability that detector ``k`` stays silent."""
    k = _check_mode(scenario, k)
    eta = np.zeros(scenario.M)
    eta[k] = scenario.eta[k]
    return evaluate_generating_function(scenario, eta)


def click_probability_single(scenario: Scenario, k: int) -> float:
    """Marginal probability that detector ``k`` clicks."""
    k = _check_mode(scenario, k)
    p = evaluate_generating_function(scenario, np.zeros(scenario.M)) - no_click_probability(scenario, k)
    return min(1.0, max(0.0, p))


def click_pattern_probability(scenario: Scenario, clicked) -> float:
    """Probability that exactly the modes in ``clicked`` fire.

    Sums ``(-1)^|S| G(eta')`` over subsets ``S`` of the clicked set, with
    ``eta'`` pinned to the detector efficiency on ``S`` and on every
    unclicked mode, and to 0 on the remaining clicked modes.
    """
    L = sorted({int(k) for k in clicked})
    if len(L) > MAX_CLICKS:
        raise TooManyClicks(f"{len(L)} clicked modes exceeds {MAX_CLICKS}")
    L = [_check_mode(scenario, k) for k in L]
    terms = []
    for size in range(len(L) + 1):
        for S in combinations(L, size):
            eta = scenario.eta.copy()
            for k in set(L) - set(S):
                eta[k] = 0.0
            terms.append((-1) ** size * evaluate_generating_function(scenario, eta))
    p = math.fsum(terms)
    if p < -NEGATIVE_TOL:
        raise ArithmeticError(f"click probability {p:.3e} is negative beyond tolerance")
    return min(1.0, max(0.0, p))


def all_click_patterns(M: int):
    """Every click pattern as a tuple of 0/1 flags, in lexicographic order."""
    for bits in range(2**M):
        yield tuple((bits >> (M - 1 - i)) & 1 for i in range(M))


def click_table(scenario: Scenario, patterns=None) -> dict:
    """``{flags: probability}`` for the given 0/1 flag tuples (default: all ``2^M``)."""
    patterns = list(all_click_patterns(scenario.M)) if patterns is None else [tuple(p) for p in patterns]
    out = {}
    for flags in patterns:
        if len(flags) != scenario.M:
            raise ValueError(f"click pattern {flags} has wrong length")
        out[flags] = click_pattern_probability(scenario, [k for k, f in enumerate(flags) if f])
    return out
