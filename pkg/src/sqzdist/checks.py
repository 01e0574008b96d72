"""Self-validation suite behind ``sqzdist validate``.

Each check compares two independent routes to the same numbers and reports
the largest discrepancy against a tolerance.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from .distinguishability import (
    classical_probability,
    classical_series,
    homogeneous_decomposition,
    homogeneous_overlap,
)
from .fock_oracle import oracle_distribution, total_photon_tail
from .model import Scenario, beamsplitter_unitary, haar_random_unitary, tritter_unitary, validate_scenario
from .pnr import distribution, indistinguishable_probability
from .series import box_indices

DEFAULT_TOLERANCES = {
    "hafnian": 1e-9,
    "oracle": 1e-6,
    "zero_events": 1e-10,
    "normalization": 1e-9,
    "decomposition": 1e-9,
    "closed_form": 1e-12,
}

CLOSED_FORM_NOTE = (
    "classical factor for N equal squeezers on a uniform M-port: "
    "(N/2)_k (tanh r / M)^(2k) (2k)! / (k! prod m_l!) for |m| = 2k; "
    "the printed prefactor omits 1/prod m_l!, without which the terms do not "
    "match the series coefficients of (1 - tanh(r)^2 (sum lam / M)^2)^(-N/2)"
)


@dataclass
class CheckResult:
    name: str
    max_error: float
    tolerance: float
    cases: int
    detail: str = ""

    @property
    def passed(self) -> bool:
        return bool(self.max_error <= self.tolerance)

    def as_dict(self) -> dict:
        return {**asdict(self), "passed": self.passed}


@dataclass
class ValidationReport:
    checks: list = field(default_factory=list)
    notes: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def as_dict(self) -> dict:
        return {"passed": self.passed, "checks": [c.as_dict() for c in self.checks], "notes": self.notes}


def random_overlap(M: int, rng: np.random.Generator) -> np.ndarray:
    """Gram matrix of random unit vectors in ``C^M``."""
    phi = rng.standard_normal((M, M)) + 1j * rng.standard_normal((M, M))
    phi /= np.linalg.norm(phi, axis=1, keepdims=True)
    V = phi @ phi.conj().T
    np.fill_diagonal(V, 1.0)
    return V


def check_hafnian(tol: float, seed: int = 0, count: int = 4, max_total: int = 4) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst, cases = 0.0, 0
    for i in range(count):
        M = 2 + i % 2
        sc = validate_scenario(haar_random_unitary(M, seed + i), rng.uniform(0.1, 1.0, M), rng.uniform(0, 2 * np.pi, M))
        table = distribution(sc, max_total)
        for n, p in table:
            worst = max(worst, abs(p - indistinguishable_probability(sc, n)))
            cases += 1
    return CheckResult("hafnian", worst, tol, cases, f"{count} Haar unitaries, |n| <= {max_total}")


def oracle_gap(sc: Scenario, max_total: int = 4, cutoff: int = 8) -> tuple[float, float, int]:
    """Largest engine/oracle gap, and the oracle's tail bound, over ``|n| <= max_total``."""
    engine = distribution(sc, max_total)
    oracle = oracle_distribution(sc, cutoff)
    gap = max(abs(p - oracle[n]) for n, p in engine)
    return gap, oracle.tail_bound, len(engine)


def check_oracle(tol: float, seed: int = 0, count: int = 4, scenarios=()) -> CheckResult:
    rng = np.random.default_rng(seed + 1)
    pool = list(scenarios)
    for i in range(count):
        M = 1 + i % 3
        pool.append(
            validate_scenario(
                haar_random_unitary(M, seed + 100 + i),
                rng.uniform(0, 0.75, M),
                rng.uniform(0, 2 * np.pi, M),
                random_overlap(M, rng),
            )
        )
    worst, cases = 0.0, 0
    for sc in pool:
        gap, bound, k = oracle_gap(sc)
        # lossy oracles may miss up to the tail bound per entry
        worst = max(worst, max(0.0, gap - bound))
        cases += k
    return CheckResult("oracle", worst, tol, cases, f"{len(pool)} scenarios, |n| <= 4, cutoff 8")


def check_zero_events(tol: float) -> CheckResult:
    worst, cases = 0.0, 0
    bs = validate_scenario(beamsplitter_unitary(), [1.0, 1.0])
    for n, p in distribution(bs, 8):
        if n[0] != n[1]:
            worst, cases = max(worst, p), cases + 1
    tr = validate_scenario(tritter_unitary(), [1.0, 1.0, 1.0])
    for n, p in distribution(tr, 6):
        if n[0] % 2 or n[1] != n[2]:
            worst, cases = max(worst, p), cases + 1
    return CheckResult("zero_events", worst, tol, cases, "beamsplitter |n| <= 8, tritter |n| <= 6")


def check_normalization(tol: float, scenarios=()) -> CheckResult:
    """At unit efficiency the table misses exactly the total-photon tail."""
    pool = [
        validate_scenario(haar_random_unitary(3, 7), [1.0, 0.8, 0.5], V=homogeneous_overlap(0.4, 3)),
        validate_scenario(beamsplitter_unitary(), [1.0, 1.0], V=np.eye(2)),
    ]
    pool += [sc for sc in scenarios if np.all(sc.eta == 1) and sc.M <= 3]
    worst = 0.0
    for sc in pool:
        table = distribution(sc, 10)
        worst = max(worst, abs(table.residual - total_photon_tail(sc.squeeze.r, 10)))
    return CheckResult("normalization", worst, tol, len(pool), "sum over |n| <= 10 vs exact tail")


def check_decomposition(tol: float) -> CheckResult:
    worst, cases = 0.0, 0
    U = tritter_unitary()
    for eps in (0.0, 0.3, 1.0):
        sc = validate_scenario(U, [0.8, 0.8, 0.0], V=homogeneous_overlap(eps, 3))
        direct = distribution(sc, 4)
        for n, p in direct:
            rec = homogeneous_decomposition(sc, eps, n)
            worst = max(worst, abs(rec.total - p))
            cases += 1
    return CheckResult("decomposition", worst, tol, cases, "tritter N=2, eps in {0, 0.3, 1}, |n| <= 4")


def check_closed_form(tol: float, max_order: int = 6) -> CheckResult:
    worst, cases = 0.0, 0
    r = 0.7
    for M in (2, 3):
        for N in range(1, M + 1):
            caps = (max_order,) * M
            series = classical_series(N, M, r, caps, max_order)
            for m in box_indices(caps, max_order):
                worst = max(worst, abs(series[m] - classical_probability(m, N, M, r)))
                cases += 1
    return CheckResult("closed_form", worst, tol, cases, f"M in {{2, 3}}, N <= M, |m| <= {max_order}")


def run_validation(tolerances=None, seed: int = 0, randomized: int = 4, scenarios=()) -> ValidationReport:
    """Run every check; ``scenarios`` are user scenarios folded into the oracle and normalization checks."""
    tol = {**DEFAULT_TOLERANCES, **(tolerances or {})}
    scenarios = [sc for sc in scenarios if sc.M <= 3]
    report = ValidationReport()
    report.checks.append(check_hafnian(tol["hafnian"], seed, max(1, randomized)))
    report.checks.append(check_oracle(tol["oracle"], seed, randomized, scenarios))
    report.checks.append(check_zero_events(tol["zero_events"]))
    report.checks.append(check_normalization(tol["normalization"], scenarios))
    report.checks.append(check_decomposition(tol["decomposition"]))
    report.checks.append(check_closed_form(tol["closed_form"]))
    report.notes["classical_prefactor"] = CLOSED_FORM_NOTE
    report.notes["seed"] = seed
    return report

