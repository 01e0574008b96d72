"""Scenario inputs and the matrices feeding the generating function.

Conventions used throughout the package:

* input creation operators map as ``a_k^dag = sum_l U[k, l] b_l^dag``;
* the squeezed input in mode ``k`` is ``exp(S_k / 2 * a_k^dag**2) |0>`` with
  ``S_k = tanh(r_k) * exp(1j * theta_k)``;
* the overlap matrix satisfies ``V = phi @ phi.conj().T`` where row ``k`` of
  ``phi`` holds the internal-state amplitudes of the photons in input ``k``.

Mode indices are 0-based in the Python API.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import BadEfficiency, CapacityExceeded, DimensionMismatch, NonGram, NonUnitary

UNITARY_TOL = 1e-10
HERMITIAN_TOL = 1e-12
PSD_TOL = 1e-10
MAX_MODES = 16
WARN_MODES = 10


def _frozen(a, dtype) -> np.ndarray:
    out = np.array(a, dtype=dtype, copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class Interferometer:
    matrix: np.ndarray

    def __post_init__(self):
        U = _frozen(self.matrix, complex)
        if U.ndim != 2 or U.shape[0] != U.shape[1] or U.shape[0] < 1:
            raise DimensionMismatch(f"interferometer must be a non-empty square matrix, got shape {U.shape}")
        err = np.max(np.abs(U.conj().T @ U - np.eye(U.shape[0])))
        if err > UNITARY_TOL:
            raise NonUnitary(f"max |U^dag U - I| = {err:.3e} exceeds {UNITARY_TOL:g}")
        object.__setattr__(self, "matrix", U)

    @property
    def mode_count(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class SqueezeParams:
    r: np.ndarray
    theta: np.ndarray = None

    def __post_init__(self):
        r = _frozen(np.atleast_1d(self.r), float)
        theta = np.zeros_like(r) if self.theta is None else np.atleast_1d(np.asarray(self.theta, dtype=float))
        if r.ndim != 1 or theta.shape != r.shape:
            raise DimensionMismatch("squeezing magnitudes and phases must be vectors of equal length")
        if np.any(r < 0) or not np.all(np.isfinite(r)):
            raise ValueError("squeezing magnitudes must be finite and non-negative")
        theta = np.mod(theta, 2 * np.pi)
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "theta", _frozen(theta, float))
        if np.any(np.abs(self.S) >= 1):
            raise ValueError("|S_k| must stay below 1; squeezing too large for double precision")

    @property
    def S(self) -> np.ndarray:
        return np.tanh(self.r) * np.exp(1j * self.theta)

    @property
    def D(self) -> np.ndarray:
        return np.diag(self.S)

    @property
    def sqrt_S(self) -> np.ndarray:
        # principal branch: phase theta/2
        return np.sqrt(np.tanh(self.r)) * np.exp(0.5j * self.theta)


@dataclass(frozen=True)
class Efficiencies:
    eta: np.ndarray

    def __post_init__(self):
        eta = _frozen(np.atleast_1d(self.eta), float)
        if eta.ndim != 1:
            raise DimensionMismatch("efficiencies must be a vector")
        if np.any(~np.isfinite(eta)) or np.any(eta < 0) or np.any(eta > 1):
            raise BadEfficiency(f"efficiencies must lie in [0, 1], got {eta.tolist()}")
        object.__setattr__(self, "eta", eta)

    @property
    def Lambda(self) -> np.ndarray:
        return np.diag(1.0 - self.eta)


def check_overlap(V) -> np.ndarray:
    """Return ``V`` as a complex array after checking the Gram-matrix conditions."""
    V = np.asarray(V, dtype=complex)
    if V.ndim != 2 or V.shape[0] != V.shape[1]:
        raise DimensionMismatch(f"overlap matrix must be square, got shape {V.shape}")
    herm = np.max(np.abs(V - V.conj().T), initial=0.0)
    if herm > HERMITIAN_TOL:
        raise NonGram(f"overlap matrix not Hermitian (max deviation {herm:.3e})")
    diag = np.max(np.abs(np.diag(V) - 1), initial=0.0)
    if diag > HERMITIAN_TOL:
        raise NonGram(f"overlap matrix diagonal differs from 1 by {diag:.3e}")
    if np.max(np.abs(V), initial=0.0) > 1 + HERMITIAN_TOL:
        raise NonGram("overlap entries must have modulus at most 1")
    lo = np.min(np.linalg.eigvalsh(0.5 * (V + V.conj().T)), initial=0.0)
    if lo < -PSD_TOL:
        raise NonGram(f"overlap matrix not positive semidefinite (min eigenvalue {lo:.3e})")
    return V


@dataclass(frozen=True)
class OverlapMatrix:
    V: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "V", _frozen(check_overlap(self.V), complex))


@dataclass(frozen=True)
class Scenario:
    interferometer: Interferometer
    squeeze: SqueezeParams
    overlap: OverlapMatrix
    efficiencies: Efficiencies = field(default=None)

    def __post_init__(self):
        M = self.interferometer.mode_count
        if self.efficiencies is None:
            object.__setattr__(self, "efficiencies", Efficiencies(np.ones(M)))
        dims = {
            "squeezing": self.squeeze.r.shape[0],
            "overlap": self.overlap.V.shape[0],
            "efficiencies": self.efficiencies.eta.shape[0],
        }
        bad = {k: v for k, v in dims.items() if v != M}
        if bad:
            raise DimensionMismatch(f"interferometer has {M} modes but {bad}")
        if M > MAX_MODES:
            raise CapacityExceeded(f"{M} modes exceeds the limit of {MAX_MODES}")
        if M > WARN_MODES:
            warnings.warn(f"{M} modes: coefficient extraction cost grows combinatorially", stacklevel=3)

    @property
    def M(self) -> int:
        return self.interferometer.mode_count

    @property
    def U(self) -> np.ndarray:
        return self.interferometer.matrix

    @property
    def S(self) -> np.ndarray:
        return self.squeeze.S

    @property
    def V(self) -> np.ndarray:
        return self.overlap.V

    @property
    def eta(self) -> np.ndarray:
        return self.efficiencies.eta

    def with_overlap(self, V) -> "Scenario":
        return Scenario(self.interferometer, self.squeeze, OverlapMatrix(V), self.efficiencies)

    def with_efficiencies(self, eta) -> "Scenario":
        return Scenario(self.interferometer, self.squeeze, self.overlap, Efficiencies(eta))


def validate_scenario(U, r, theta=None, V=None, eta=None) -> Scenario:
    """Build a :class:`Scenario` from raw arrays, checking every invariant.

    ``V`` defaults to the all-ones matrix (indistinguishable photons) and
    ``eta`` to unit efficiency in every mode.
    """
    interferometer = Interferometer(U)
    M = interferometer.mode_count
    squeeze = SqueezeParams(r, theta)
    overlap = OverlapMatrix(np.ones((M, M)) if V is None else V)
    efficiencies = Efficiencies(np.ones(M) if eta is None else eta)
    return Scenario(interferometer, squeeze, overlap, efficiencies)


def build_H(scenario: Scenario, eta=None) -> np.ndarray:
    """``H = (U Lambda U^dag) o V`` with ``Lambda = diag(1 - eta)``.

    ``eta`` defaults to the scenario's detector efficiencies.
    """
    eta = scenario.eta if eta is None else np.asarray(eta, dtype=float)
    U = scenario.U
    return ((U * (1.0 - eta)) @ U.conj().T) * scenario.V


def build_Hr(scenario: Scenario, eta=None) -> np.ndarray:
    """``H_r = D^(1/2) H conj(D)^(1/2)`` using the principal root of each ``S_k``."""
    s = scenario.squeeze.sqrt_S
    return s[:, None] * build_H(scenario, eta) * s.conj()[None, :]


def build_Mr(scenario: Scenario, eta=None) -> np.ndarray:
    """The ``2M x 2M`` block matrix ``[[0, H_r], [conj(H_r), 0]]``."""
    Hr = build_Hr(scenario, eta)
    Z = np.zeros_like(Hr)
    return np.block([[Z, Hr], [Hr.conj(), Z]])


def vacuum_coefficient(squeeze: SqueezeParams) -> float:
    """``c_r = prod_k sqrt(1 - |S_k|^2)``, the all-vacuum probability at unit efficiency."""
    return float(np.prod(1.0 / np.cosh(squeeze.r)))


def beamsplitter_unitary() -> np.ndarray:
    """Balanced beamsplitter with reflection phase pi/2."""
    return np.array([[1, 1j], [1j, 1]]) / np.sqrt(2)


def tritter_unitary() -> np.ndarray:
    """Balanced three-port (tritter) with phases 0 and +-2pi/3."""
    w = np.exp(2j * np.pi / 3)
    return np.array([[1, 1, 1], [1, w, w.conjugate()], [1, w.conjugate(), w]]) / np.sqrt(3)


def haar_random_unitary(M: int, seed: int) -> np.ndarray:
    """Haar-distributed ``M x M`` unitary from QR of a complex Ginibre matrix.

    The phases of ``diag(R)`` are divided out so the result is Haar rather
    than biased by the QR sign convention. Deterministic for a fixed seed.
    """
    if M < 1:
        raise DimensionMismatch("M must be at least 1")
    rng = np.random.default_rng(seed)
    Z = (rng.standard_normal((M, M)) + 1j * rng.standard_normal((M, M))) / np.sqrt(2)
    Q, R = np.linalg.qr(Z)
    d = np.diag(R)
    return Q * (d / np.abs(d))
