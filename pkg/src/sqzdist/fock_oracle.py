"""Brute-force Fock-space simulation used to check the generating-function engine.

The output state is built literally: every input factor
``exp(S_k/2 (a_k^dag)^2)`` is expanded as a polynomial in the output
creation operators ``b_{l,s}^dag`` (spatial mode ``l``, internal basis state
``s``), using ``a_k^dag = sum_{l,s} U[k,l] phi[k,s] b_{l,s}^dag``. Photon
counts are then summed over internal states because detectors do not resolve
them.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from itertools import product

import numpy as np

from .errors import CutoffTooLarge
from .model import Scenario, check_overlap, vacuum_coefficient
from .pnr import ProbabilityTable
from .series import box_indices

MAX_CUTOFF = 10
RANK_TOL = 1e-10


def gram_amplitudes(V) -> np.ndarray:
    """Factor ``V = phi @ phi^dag`` by pivoted Cholesky.

    Columns whose residual pivot falls below ``1e-10`` are dropped, so a
    rank-deficient ``V`` gives ``phi`` with fewer columns than rows.
    """
    V = check_overlap(V)
    M = V.shape[0]
    A = V.copy()
    perm = np.arange(M)
    L = np.zeros((M, M), dtype=complex)
    rank = 0
    for j in range(M):
        diag = np.real(np.diag(A))[j:]
        p = j + int(np.argmax(diag))
        if diag[p - j] <= RANK_TOL:
            break
        if p != j:
            A[[j, p]] = A[[p, j]]
            A[:, [j, p]] = A[:, [p, j]]
            L[[j, p]] = L[[p, j]]
            perm[[j, p]] = perm[[p, j]]
        pivot = np.sqrt(A[j, j].real)
        L[j, j] = pivot
        L[j + 1 :, j] = A[j + 1 :, j] / pivot
        A[j + 1 :, j + 1 :] -= np.outer(L[j + 1 :, j], L[j + 1 :, j].conj())
        rank += 1
    phi = np.empty((M, rank), dtype=complex)
    phi[perm] = L[:, :rank]
    return phi


# polynomials in creation operators: list indexed by degree of {exponent tuple: coefficient}


def _mul_linear(grade: dict, w: list, nvars: int) -> dict:
    out: dict = defaultdict(complex)
    for key, c in grade.items():
        for var, wv in w:
            k = list(key)
            k[var] += 1
            out[tuple(k)] += c * wv
    return out


def _apply_squeezer(poly: list, S: complex, w: list, nvars: int, cutoff: int) -> list:
    """Multiply by ``exp(S/2 L^2)`` with ``L = sum w_var x_var``, dropping degree > cutoff."""
    out = [defaultdict(complex, g) for g in poly]
    term = poly
    j = 0
    while True:
        j += 1
        nxt = [dict() for _ in range(cutoff + 1)]
        any_left = False
        for d in range(cutoff - 1):
            if not term[d]:
                continue
            twice = _mul_linear(_mul_linear(term[d], w, nvars), w, nvars)
            scale = S / (2 * j)
            nxt[d + 2] = {k: v * scale for k, v in twice.items()}
            any_left = True
        if not any_left:
            break
        for d, g in enumerate(nxt):
            for k, v in g.items():
                out[d][k] += v
        term = nxt
    return out


@dataclass
class FockState:
    """Amplitudes over occupations of the ``M * D`` output modes ``(l, s)``.

    Occupation tuples are ordered ``l * D + s``. Only total photon numbers up
    to ``cutoff`` are represented; those components are exact.
    """

    amplitudes: dict
    mode_count: int
    internal_dim: int
    cutoff: int

    @property
    def norm2(self) -> float:
        return math.fsum(abs(a) ** 2 for a in self.amplitudes.values())

    def spatial_counts(self, occupation) -> tuple:
        D = self.internal_dim
        return tuple(sum(occupation[l * D : (l + 1) * D]) for l in range(self.mode_count))


def oracle_state(scenario: Scenario, cutoff: int, amplitudes=None) -> FockState:
    """Output state of the interferometer truncated to ``cutoff`` total photons."""
    if cutoff > MAX_CUTOFF:
        raise CutoffTooLarge(f"cutoff {cutoff} exceeds {MAX_CUTOFF}")
    if cutoff < 0:
        raise ValueError("cutoff must be non-negative")
    phi = gram_amplitudes(scenario.V) if amplitudes is None else np.asarray(amplitudes, dtype=complex)
    if not np.allclose(phi @ phi.conj().T, scenario.V, atol=1e-10):
        raise ValueError("internal amplitudes do not reproduce the overlap matrix")
    M, D = phi.shape
    nvars = M * D
    U = scenario.U
    poly = [dict() for _ in range(cutoff + 1)]
    poly[0] = {(0,) * nvars: 1.0 + 0j}
    for k, S in enumerate(scenario.S):
        if S == 0:
            continue
        w = [(l * D + s, U[k, l] * phi[k, s]) for l in range(M) for s in range(D) if U[k, l] * phi[k, s] != 0]
        poly = _apply_squeezer(poly, S, w, nvars, cutoff)
    root_c = np.sqrt(vacuum_coefficient(scenario.squeeze))
    amps = {}
    for grade in poly:
        for key, c in grade.items():
            amps[key] = root_c * c * math.sqrt(math.prod(math.factorial(n) for n in key))
    return FockState(amps, M, D, cutoff)


def squeezed_vacuum_distribution(r: float, nmax: int) -> np.ndarray:
    """Single-mode squeezed-vacuum photon-number probabilities ``P(0..nmax)``."""
    t = np.tanh(r)
    out = np.zeros(nmax + 1)
    for j in range(nmax // 2 + 1):
        out[2 * j] = math.comb(2 * j, j) / 4**j * t ** (2 * j) / np.cosh(r)
    return out


def total_photon_tail(r, cutoff: int) -> float:
    """``P(total photons > cutoff)`` for independent squeezed vacua ``r``.

    Lossless linear optics conserves the total photon number, so this is the
    exact probability mass dropped by a truncation at ``cutoff``.
    """
    dist = np.array([1.0])
    for rk in np.atleast_1d(r):
        dist = np.convolve(dist, squeezed_vacuum_distribution(rk, cutoff))[: cutoff + 1]
    return max(0.0, 1.0 - math.fsum(dist))


def thin(probs: dict, eta, cutoff: int) -> dict:
    """Binomial thinning of a pattern distribution by detector efficiencies."""
    eta = np.asarray(eta, dtype=float)
    if np.all(eta == 1):
        return dict(probs)
    out: dict = defaultdict(float)
    for m, p in probs.items():
        if p == 0:
            continue
        for n in product(*[range(k + 1) for k in m]):
            w = 1.0
            for ml, nl, el in zip(m, n, eta):
                w *= math.comb(ml, nl) * el**nl * (1 - el) ** (ml - nl)
            out[n] += p * w
    return {n: out.get(n, 0.0) for n in box_indices((cutoff,) * len(eta), cutoff)}


def oracle_distribution(scenario: Scenario, cutoff: int = 8, amplitudes=None) -> ProbabilityTable:
    """Pattern probabilities for ``|n| <= cutoff`` by direct Fock-space expansion.

    At unit efficiency every stored entry is exact. With losses each entry may
    miss at most ``tail_bound`` from photons above the cutoff.
    """
    state = oracle_state(scenario, cutoff, amplitudes)
    probs: dict = defaultdict(float)
    for occ, amp in state.amplitudes.items():
        probs[state.spatial_counts(occ)] += abs(amp) ** 2
    full = {n: probs.get(n, 0.0) for n in box_indices((cutoff,) * scenario.M, cutoff)}
    tail = total_photon_tail(scenario.squeeze.r, cutoff)
    thinned = thin(full, scenario.eta, cutoff)
    bound = 0.0 if np.all(scenario.eta == 1) else tail
    return ProbabilityTable(thinned, (cutoff,) * scenario.M, cutoff, bound, {"total_tail": tail})


@dataclass(frozen=True)
class MonteCarloEstimate:
    mean: float
    stderr: float
    samples: int

    def within(self, value: float, sigmas: float = 3.0, extra: float = 0.0) -> bool:
        return abs(self.mean - value) <= sigmas * self.stderr + extra


def _orthogonal_count_distribution(U: np.ndarray, j: tuple, eta_perp) -> dict:
    """Distribution of private-mode photon counts per output for ``j[k]`` photons from input ``k``.

    Photons in mutually orthogonal private internal states do not interfere,
    so each one independently lands in output ``l`` with ``|U[k, l]|^2`` and
    is then kept with probability ``eta_perp[l]``.
    """
    M = U.shape[0]
    single = np.abs(U) ** 2 * np.asarray(eta_perp)[None, :]
    dist = {(0,) * M: 1.0}
    for k, jk in enumerate(j):
        for _ in range(jk):
            nxt: dict = defaultdict(float)
            lost = 1.0 - single[k].sum()
            for key, p in dist.items():
                if lost > 0:
                    nxt[key] += p * lost
                for l in range(M):
                    if single[k, l] > 0:
                        kk = list(key)
                        kk[l] += 1
                        nxt[tuple(kk)] += p * single[k, l]
            dist = nxt
    return dist


def _displaced_terms(scenario, epsilon, n, orthogonal_efficiency, cutoff, rescale_common):
    M = scenario.M
    if not 0 <= epsilon <= 1:
        raise ValueError("epsilon must lie in [0, 1]")
    V = (1 - epsilon) * np.ones((M, M)) + epsilon * np.eye(M)
    if not np.allclose(scenario.V, V, atol=1e-12):
        raise ValueError("displaced-state average needs the homogeneous overlap for this epsilon")
    n = tuple(int(k) for k in n)
    if len(n) != M or min(n) < 0:
        raise ValueError(f"bad pattern {n}")
    eta = scenario.eta
    if orthogonal_efficiency is None:
        eta_perp = eta
    else:
        eta_perp = np.broadcast_to(np.asarray(orthogonal_efficiency, dtype=float), (M,))
    lossless = bool(np.all(eta == 1))
    if cutoff is None:
        cutoff = sum(n) if lossless else min(MAX_CUTOFF, sum(n) + 6)
    if cutoff > MAX_CUTOFF:
        raise CutoffTooLarge(f"cutoff {cutoff} exceeds {MAX_CUTOFF}")
    U = scenario.U
    common_scale = (1 - epsilon) if rescale_common else 1.0
    S = scenario.S * common_scale
    squeezed = [k for k in range(M) if S[k] != 0]
    w = [[(l, U[k, l]) for l in range(M) if U[k, l] != 0] for k in range(M)]

    base = [dict() for _ in range(cutoff + 1)]
    base[0] = {(0,) * M: 1.0 + 0j}
    for k in squeezed:
        base = _apply_squeezer(base, S[k], w[k], M, cutoff)
    c = vacuum_coefficient(scenario.squeeze)

    js, F = [], []
    for jsq in box_indices((cutoff,) * len(squeezed), cutoff):
        j = [0] * M
        for k, v in zip(squeezed, jsq):
            j[k] = v
        poly = base
        for k in range(M):
            for _ in range(j[k]):
                poly = [dict()] + [_mul_linear(g, w[k], M) for g in poly[:-1]]
        scale = 1.0 / math.prod(math.factorial(v) for v in j) ** 2
        common: dict = defaultdict(float)
        for grade in poly:
            for key, coef in grade.items():
                common[key] += c * scale * abs(coef) ** 2 * math.prod(math.factorial(v) for v in key)
        perp = _orthogonal_count_distribution(U, tuple(j), eta_perp)
        acc = []
        for n0, p0 in common.items():
            if any(a > b for a, b in zip(n0, n)) and lossless:
                continue
            thinned = {n0: p0} if lossless else thin({n0: p0}, eta, sum(n0))
            for a, pa in thinned.items():
                need = tuple(x - y for x, y in zip(n, a))
                if min(need) >= 0:
                    acc.append(pa * perp.get(need, 0.0))
        js.append(jsq)
        F.append(math.fsum(acc))
    var = epsilon * np.abs(scenario.S[squeezed]) ** 2
    return np.array(js, dtype=float).reshape(len(js), len(squeezed)), np.array(F), var


def displaced_average_expectation(
    scenario: Scenario, epsilon: float, n, orthogonal_efficiency=None, cutoff=None, rescale_common: bool = True
) -> float:
    """Exact mean of :func:`displaced_average_probability` over the displacements.

    Uses ``E|beta|^(2j) = j! var^j`` for a circular complex Gaussian.
    """
    js, F, var = _displaced_terms(scenario, epsilon, n, orthogonal_efficiency, cutoff, rescale_common)
    moments = np.array([math.prod(math.factorial(int(v)) * s**v for v, s in zip(j, var)) for j in js])
    return math.fsum(moments * F)


def displaced_average_probability(
    scenario: Scenario,
    epsilon: float,
    n,
    sample_count: int,
    seed: int,
    orthogonal_efficiency=None,
    cutoff: int | None = None,
    rescale_common: bool = True,
) -> MonteCarloEstimate:
    """Monte-Carlo estimate of ``P(n)`` from the low-noise displaced-state picture.

    Pair terms ``(a_perp^dag)^2`` of the private components are dropped.
    Photons in the common internal mode see squeezers ``S (1 - eps)``
    followed by a random displacement ``exp(beta^T a^dag)`` with ``beta_k``
    circular complex Gaussian of variance ``eps |S_k|^2``.
    ``rescale_common=False`` keeps the bare ``S`` on the common mode, which
    overshoots coincidence probabilities by about ``2 eps`` relative.

    Each sample weights the ``j``-photon-added components by
    ``prod_k |beta_k|^(2 j_k)``; the phase of ``beta`` is averaged
    analytically. The ``j_k`` partner photons in private modes are
    counted classically with ``orthogonal_efficiency`` (defaults to the
    scenario's detector efficiencies; zeros leave them undetected).

    Sampling uses the counter-based Philox generator keyed by ``seed``.
    """
    if sample_count < 1:
        raise ValueError("sample_count must be positive")
    js, F, var = _displaced_terms(scenario, epsilon, n, orthogonal_efficiency, cutoff, rescale_common)
    rng = np.random.Generator(np.random.Philox(key=seed))
    shape = (sample_count, len(var))
    z2 = (rng.standard_normal(shape) ** 2 + rng.standard_normal(shape) ** 2) / 2
    beta2 = z2 * var[None, :]
    est = np.prod(beta2[:, None, :] ** js[None, :, :], axis=2) @ F
    stderr = float(est.std(ddof=1) / np.sqrt(sample_count)) if sample_count > 1 else float("inf")
    return MonteCarloEstimate(float(math.fsum(est) / sample_count), stderr, sample_count)


def squeezed_thermal_distribution(S: complex, nbar: float, nmax: int, prefactor: float = 1.0) -> np.ndarray:
    """Photon-number distribution of ``T rho_th(nbar) T^dag`` with ``T = exp(S/2 a^dag^2)``.

    ``T`` is not normalized, so callers pass the matching constant in
    ``prefactor``. Returns ``P(0..nmax)``.
    """
    x = nbar / (nbar + 1)
    out = np.zeros(nmax + 1)
    for j in range(nmax + 1):
        pj = (1 - x) * x**j
        # T|j> / sqrt(j!) = sum_k (S/2)^k / k! a^dag^(2k) |j>
        for k in range((nmax - j) // 2 + 1):
            m = j + 2 * k
            amp = (S / 2) ** k / math.factorial(k) * math.sqrt(math.factorial(m) / math.factorial(j))
            out[m] += pj * abs(amp) ** 2
    return prefactor * out
