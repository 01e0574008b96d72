"""Photon-number-resolving probabilities and the hafnian cross-check."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import CapacityExceeded, TooLarge
from .generating import expand_generating_function
from .model import Scenario, vacuum_coefficient
from .series import TruncatedSeries, box_indices

log = logging.getLogger(__name__)

DEFAULT_MAX_TOTAL = 16
HAFNIAN_MAX_DIM = 12
NEGATIVE_TOL = 1e-12
IMAG_TOL = 1e-10


@dataclass
class ProbabilityTable:
    """Outcome pattern -> probability, in lexicographic pattern order.

    ``residual`` is ``1 - sum(probabilities)``: the mass outside the stored
    patterns. ``tail_bound`` is an upper bound on the truncation error of each
    stored entry when the table comes from a truncated computation (zero for
    exact series coefficients).
    """

    probabilities: dict
    caps: tuple
    max_total: int | None = None
    tail_bound: float = 0.0
    meta: dict = field(default_factory=dict)

    def __getitem__(self, pattern) -> float:
        return self.probabilities.get(tuple(int(n) for n in pattern), 0.0)

    def __iter__(self):
        return iter(self.probabilities.items())

    def __len__(self):
        return len(self.probabilities)

    @property
    def total(self) -> float:
        return math.fsum(self.probabilities.values())

    @property
    def residual(self) -> float:
        return 1.0 - self.total

    def by_total(self) -> dict:
        """Probability of each total photon number present in the table."""
        out: dict = {}
        for n, p in self.probabilities.items():
            out.setdefault(sum(n), []).append(p)
        return {k: math.fsum(v) for k, v in sorted(out.items())}


def _real_probability(coeff: complex, pattern) -> float:
    if abs(coeff.imag) > IMAG_TOL:
        raise ArithmeticError(f"probability of {pattern} has imaginary part {coeff.imag:.3e}")
    p = coeff.real
    if p < 0:
        if p < -NEGATIVE_TOL:
            raise ArithmeticError(f"probability of {pattern} is negative ({p:.3e})")
        log.debug("clamping %.3e to 0 for pattern %s", p, pattern)
        p = 0.0
    return p


def _check_pattern(scenario: Scenario, n, limit: int) -> tuple:
    n = tuple(int(k) for k in n)
    if len(n) != scenario.M:
        raise ValueError(f"pattern {n} has {len(n)} entries, scenario has {scenario.M} modes")
    if any(k < 0 for k in n):
        raise ValueError(f"pattern {n} has negative counts")
    if sum(n) > limit:
        raise CapacityExceeded(f"|n| = {sum(n)} exceeds the limit {limit}")
    return n


def probability(scenario: Scenario, n, max_total: int = DEFAULT_MAX_TOTAL) -> float:
    """Probability of detecting ``n[l]`` photons in output ``l``."""
    n = _check_pattern(scenario, n, max_total)
    series = expand_generating_function(scenario, n, sum(n))
    return _real_probability(series[n], n)


def table_from_series(series: TruncatedSeries, patterns) -> dict:
    return {tuple(p): _real_probability(series[p], p) for p in patterns}


def distribution(scenario: Scenario, max_total: int, limit: int = DEFAULT_MAX_TOTAL) -> ProbabilityTable:
    """All patterns with ``|n| <= max_total`` from one shared expansion."""
    if max_total < 0:
        raise ValueError("max_total must be non-negative")
    if max_total > limit:
        raise CapacityExceeded(f"max_total {max_total} exceeds the limit {limit}")
    caps = (max_total,) * scenario.M
    series = expand_generating_function(scenario, caps, max_total)
    probs = table_from_series(series, box_indices(caps, max_total))
    return ProbabilityTable(probs, caps, max_total)


def patterns_table(scenario: Scenario, patterns, limit: int = DEFAULT_MAX_TOTAL) -> ProbabilityTable:
    """Probabilities of an explicit pattern list, sharing one expansion."""
    patterns = sorted({_check_pattern(scenario, n, limit) for n in patterns})
    if not patterns:
        return ProbabilityTable({}, (0,) * scenario.M)
    caps = tuple(max(col) for col in zip(*patterns))
    total = max(sum(n) for n in patterns)
    series = expand_generating_function(scenario, caps, total)
    return ProbabilityTable(table_from_series(series, patterns), caps, total)


def hafnian(B) -> complex:
    """Sum over perfect matchings of ``prod B[i, j]`` (brute force).

    The empty matrix has hafnian 1; odd dimensions give 0.
    """
    B = np.asarray(B, dtype=complex)
    dim = B.shape[0]
    if dim > HAFNIAN_MAX_DIM:
        raise TooLarge(f"brute-force hafnian limited to dimension {HAFNIAN_MAX_DIM}, got {dim}")
    if dim % 2:
        return 0j

    def rec(idx: tuple) -> complex:
        if not idx:
            return 1.0 + 0j
        first, rest = idx[0], idx[1:]
        acc = 0j
        for pos, j in enumerate(rest):
            if B[first, j] != 0:
                acc += B[first, j] * rec(rest[:pos] + rest[pos + 1 :])
        return acc

    return rec(tuple(range(dim)))


def repeat_rows_cols(B, n) -> np.ndarray:
    """Repeat row and column ``l`` of ``B`` ``n[l]`` times."""
    B = np.asarray(B)
    idx = np.repeat(np.arange(B.shape[0]), np.asarray(n, dtype=int))
    return B[np.ix_(idx, idx)]


def indistinguishable_probability(scenario: Scenario, n) -> float:
    """``c_r |haf(B_n)|^2 / prod n_l!`` with ``B = U^T D_r U``.

    Valid for identical internal states and ideal detectors only.
    """
    if not np.allclose(scenario.V, 1, atol=1e-12):
        raise ValueError("hafnian formula requires an all-ones overlap matrix")
    if not np.all(scenario.eta == 1):
        raise ValueError("hafnian formula requires unit detector efficiencies")
    n = tuple(int(k) for k in n)
    if sum(n) % 2:
        return 0.0
    if sum(n) > HAFNIAN_MAX_DIM:
        raise TooLarge(f"|n| = {sum(n)} exceeds the hafnian limit {HAFNIAN_MAX_DIM}")
    U = scenario.U
    B = U.T @ np.diag(scenario.S) @ U
    h = hafnian(repeat_rows_cols(B, n))
    return vacuum_coefficient(scenario.squeeze) * abs(h) ** 2 / math.prod(math.factorial(k) for k in n)
