"""Overlap-matrix models and the classical/quantum split of the homogeneous model."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .generating import gaussian_factor, hr_series
from .model import OverlapMatrix, Scenario, build_Mr, vacuum_coefficient
from .pnr import _check_pattern, patterns_table
from .series import (
    SeriesMatrix,
    TruncatedSeries,
    box_indices,
    exp_series,
    logdet_series,
    multinomial,
    neumann_inverse,
)

IMAG_TOL = 1e-10


@dataclass(frozen=True)
class HomogeneousModel:
    """Each photon is ``sqrt(1-eps)|common> + sqrt(eps)|private_k>``."""

    epsilon: float
    N: int
    M: int
    r: float

    def __post_init__(self):
        if not 0 <= self.epsilon <= 1:
            raise ValueError("epsilon must lie in [0, 1]")
        if not 0 <= self.N <= self.M:
            raise ValueError("need 0 <= N <= M")
        if self.r < 0:
            raise ValueError("r must be non-negative")

    @property
    def squeezing(self) -> np.ndarray:
        return np.array([self.r] * self.N + [0.0] * (self.M - self.N))

    def overlap(self) -> np.ndarray:
        return homogeneous_overlap(self.epsilon, self.M)


@dataclass(frozen=True)
class GaussianPulseModel:
    """Gaussian temporal wave packets with delays ``T_k``, width ``sigma_t`` and carrier ``omega0``."""

    delays: tuple
    sigma_t: float = 1.0
    omega0: float = 0.0

    def __post_init__(self):
        if not self.sigma_t > 0:
            raise ValueError("sigma_t must be positive")
        object.__setattr__(self, "delays", tuple(float(t) for t in self.delays))


def homogeneous_overlap(epsilon: float, M: int) -> np.ndarray:
    """``V_ij = (1 - eps) + eps * delta_ij``."""
    if not 0 <= epsilon <= 1:
        raise ValueError(f"epsilon must lie in [0, 1], got {epsilon}")
    return OverlapMatrix((1 - epsilon) * np.ones((M, M)) + epsilon * np.eye(M)).V


def gaussian_overlap(model: GaussianPulseModel) -> np.ndarray:
    """``V_kj = exp(-((T_k - T_j) / (2 sigma_t))^2 + i omega0 (T_k - T_j))``."""
    T = np.asarray(model.delays)
    dT = T[:, None] - T[None, :]
    return OverlapMatrix(np.exp(-((dT / (2 * model.sigma_t)) ** 2) + 1j * model.omega0 * dT)).V


def equally_spaced_delays(M: int, delta: float) -> tuple:
    """Delays with ``T_k - T_{k+1} = delta`` and ``T_1 = 0``."""
    return tuple(-k * delta for k in range(M))


def convex_split(scenario: Scenario, epsilon: float, eta=None):
    """Block matrices ``(M0_r, Mperp_r)`` for all-ones and identity overlaps.

    For a scenario with homogeneous overlap ``eps`` its own ``M_r`` equals
    ``(1 - eps) M0_r + eps Mperp_r``.
    """
    M = scenario.M
    M0 = build_Mr(scenario.with_overlap(np.ones((M, M))), eta)
    Mperp = build_Mr(scenario.with_overlap(np.eye(M)), eta)
    return M0, Mperp


def _block(Hr: SeriesMatrix) -> SeriesMatrix:
    Z = SeriesMatrix.zeros(Hr.n, Hr.caps, Hr.total)
    return SeriesMatrix.block([[Z, Hr], [Hr.conj(), Z]])


def _real(c: complex, what: str) -> float:
    if abs(c.imag) > IMAG_TOL:
        raise ArithmeticError(f"{what} has imaginary part {c.imag:.3e}")
    return c.real


@dataclass(frozen=True)
class DecompositionTerm:
    """One ``m`` term of ``P(n) = c_r sum_m weight(m) * quantum(n - m)``.

    ``weight`` is the coefficient of ``det(I - eps Mperp_r)^(-1/2)``; at unit
    efficiency it equals ``eps**|m| * classical``, where ``classical`` is the
    coefficient of ``det(I - Mperp_r)^(-1/2)``.
    """

    m: tuple
    weight: float
    classical: float
    quantum: float
    value: float


@dataclass(frozen=True)
class DecompositionRecord:
    n: tuple
    epsilon: float
    vacuum_coefficient: float
    terms: tuple

    @property
    def total(self) -> float:
        return math.fsum(t.value for t in self.terms)

    def nonzero_terms(self) -> tuple:
        return tuple(t for t in self.terms if t.weight != 0)


def homogeneous_decomposition(scenario: Scenario, epsilon: float, n) -> DecompositionRecord:
    """Split ``P(n)`` into classical and noisy-quantum factors.

    Uses ``G = c_r det(I - eps Mperp)^(-1/2) det(I - (1-eps) M0~)^(-1/2)`` with
    ``M0~ = (I - eps Mperp)^(-1) M0``, all as series in the detected-count
    variables, and collects the Cauchy product term by term.
    """
    M = scenario.M
    if not np.allclose(scenario.V, homogeneous_overlap(epsilon, M), atol=1e-12, rtol=0):
        raise ValueError("scenario overlap is not the homogeneous overlap for this epsilon")
    n = _check_pattern(scenario, n, 10**6)
    caps, total = n, sum(n)
    M0 = _block(hr_series(scenario, caps, total, np.ones((M, M))))
    Mperp = _block(hr_series(scenario, caps, total, np.eye(M)))
    weight = gaussian_factor(epsilon * Mperp)
    classical = gaussian_factor(Mperp)
    tilde = neumann_inverse(epsilon * Mperp) @ M0
    quantum = gaussian_factor((1 - epsilon) * tilde)
    c = vacuum_coefficient(scenario.squeeze)
    terms = []
    for m in box_indices(caps, total):
        rest = tuple(a - b for a, b in zip(n, m))
        w = _real(weight[m], f"weight{m}")
        q = _real(quantum[rest], f"quantum{rest}")
        terms.append(DecompositionTerm(m, w, _real(classical[m], f"classical{m}"), q, c * w * q))
    return DecompositionRecord(n, float(epsilon), c, tuple(terms))


def classical_probability(m, N: int, M: int, r: float) -> float:
    """Distinguishable-photon probability for a uniform multiport.

    Coefficient of ``prod lam_l**m_l`` in ``(1 - tanh(r)^2 (sum lam / M)^2)^(-N/2)``:
    zero for odd ``|m|``, otherwise
    ``(N/2)_k (tanh r / M)^(2k) (2k)! / (k! prod m_l!)`` with ``|m| = 2k``.
    """
    m = tuple(int(x) for x in m)
    total = sum(m)
    if total % 2:
        return 0.0
    k = total // 2
    rising = math.prod(N / 2 + j for j in range(k))
    return rising * (math.tanh(r) / M) ** (2 * k) / math.factorial(k) * multinomial(m)


def classical_series(N: int, M: int, r: float, caps, total=None) -> TruncatedSeries:
    """``(1 - tanh(r)^2 (sum lam / M)^2)^(-N/2)`` expanded with the series engine."""
    caps = tuple(caps)
    x = TruncatedSeries.zeros(caps, total)
    for l in range(M):
        x = x + TruncatedSeries.variable(l, caps, total) / M
    inner = SeriesMatrix((math.tanh(r) ** 2 * (x * x)).coeffs[None, None], x.total)
    return exp_series(-0.5 * N * logdet_series(inner))


def delay_scan(scenario: Scenario, grid, omega0s, patterns, sigma_t: float = 1.0) -> list:
    """Pattern probabilities along a grid of relative delays.

    ``grid`` holds ``Delta T / sigma_t`` and ``omega0s`` holds ``omega0 * sigma_t``;
    inputs are delayed by equal steps, ``T_k - T_{k+1} = Delta T``. Returns
    rows ``(delta_t_over_sigma, omega0, pattern, probability)`` grouped by
    ``omega0`` then grid order.
    """
    rows = []
    for w in omega0s:
        for x in grid:
            delays = equally_spaced_delays(scenario.M, x * sigma_t)
            V = gaussian_overlap(GaussianPulseModel(delays, sigma_t, w / sigma_t))
            table = patterns_table(scenario.with_overlap(V), patterns)
            for pattern, p in table:
                rows.append((float(x), float(w), pattern, p))
    return rows


def effective_thermal_occupation(epsilon: float, r: float) -> float:
    """Mean thermal photon number ``sinh(rt)^2`` with ``tanh(rt) = sqrt(eps) tanh(r)``."""
    if not 0 <= epsilon <= 1 or r < 0:
        raise ValueError("need 0 <= epsilon <= 1 and r >= 0")
    y2 = epsilon * math.tanh(r) ** 2
    return y2 / (1 - y2)
