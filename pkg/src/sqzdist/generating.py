"""Expansion and evaluation of the squeezed-state generating function.

The series variable ``lam_l`` is the detected-count variable of output ``l``:
the coefficient of ``prod_l lam_l**n_l`` is the probability of registering
``n`` photons. Detector efficiencies ``e_l`` of the scenario enter through
``1 - eta_l = (1 - e_l) + e_l * lam_l``; at unit efficiency this is the usual
``lam = 1 - eta`` expansion around ``eta = 1``.
"""

from __future__ import annotations

import numpy as np

from .errors import NonPositiveDeterminant
from .model import Scenario, build_Hr, vacuum_coefficient
from .series import SeriesMatrix, TruncatedSeries, exp_series, logdet_series

DET_IMAG_TOL = 1e-10


def _projector_terms(scenario: Scenario, V=None) -> list[np.ndarray]:
    """``D^(1/2) ((u_l u_l^dag) o V) conj(D)^(1/2)`` for each output column ``u_l``."""
    U = scenario.U
    V = scenario.V if V is None else V
    s = scenario.squeeze.sqrt_S
    scale = s[:, None] * s.conj()[None, :]
    return [np.outer(U[:, l], U[:, l].conj()) * V * scale for l in range(scenario.M)]


def hr_series(scenario: Scenario, caps, total=None, V=None) -> SeriesMatrix:
    """``H_r`` as a series matrix in the detected-count variables."""
    terms = _projector_terms(scenario, V)
    e = scenario.eta
    constant = sum((1 - e[l]) * terms[l] for l in range(scenario.M))
    linear = [e[l] * terms[l] for l in range(scenario.M)]
    return SeriesMatrix.from_terms(constant, linear, caps, total)


def mr_series(scenario: Scenario, caps, total=None, V=None) -> SeriesMatrix:
    """The ``2M x 2M`` block series ``[[0, H_r], [conj(H_r), 0]]``."""
    Hr = hr_series(scenario, caps, total, V)
    Z = SeriesMatrix.zeros(Hr.n, Hr.caps, Hr.total)
    return SeriesMatrix.block([[Z, Hr], [Hr.conj(), Z]])


def gaussian_factor(Ms: SeriesMatrix) -> TruncatedSeries:
    """``det(I - Ms)^(-1/2)`` as a series."""
    return exp_series(-0.5 * logdet_series(Ms))


def expand_generating_function(scenario: Scenario, caps, total: int | None = None) -> TruncatedSeries:
    """Series of ``G_r`` whose coefficients are the outcome probabilities.

    ``caps[l]`` bounds the photon count kept for output ``l``; ``total``
    optionally bounds the total count (defaults to ``sum(caps)``). Uses
    ``det(I_2M - M_r) = det(I_M - H_r conj(H_r))`` so the trace-log runs
    over ``M x M`` matrices.
    """
    caps = tuple(int(c) for c in caps)
    if len(caps) != scenario.M:
        raise ValueError(f"expected {scenario.M} caps, got {len(caps)}")
    Hr = hr_series(scenario, caps, total)
    return vacuum_coefficient(scenario.squeeze) * gaussian_factor(Hr @ Hr.conj())


def reduced_determinant(scenario: Scenario, eta) -> complex:
    Hr = build_Hr(scenario, eta)
    return complex(np.linalg.det(np.eye(scenario.M) - Hr @ Hr.conj()))


def evaluate_generating_function(scenario: Scenario, eta) -> float:
    """``c_r * det(I - H_r conj(H_r))^(-1/2)`` at the efficiency point ``eta``.

    ``eta`` here is the generating-function argument, not the scenario's
    detector efficiencies.
    """
    eta = np.broadcast_to(np.asarray(eta, dtype=float), (scenario.M,))
    if np.any(eta < 0) or np.any(eta > 1):
        raise ValueError("generating-function argument must lie in [0, 1]^M")
    det = reduced_determinant(scenario, eta)
    if det.real <= 0 or abs(det.imag) > DET_IMAG_TOL * max(1.0, abs(det.real)):
        raise NonPositiveDeterminant(f"det(I - H_r conj(H_r)) = {det}")
    return vacuum_coefficient(scenario.squeeze) / np.sqrt(det.real)
