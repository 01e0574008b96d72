"""Acceptance criteria, each at its stated tolerance and runtime budget.

Every test records one ``criterion N: PASS/FAIL`` line; the lines are
printed in the pytest terminal summary and when this file is run as a
script.
"""

import math
import time

import numpy as np
import pytest

from sqzdist.checks import CLOSED_FORM_NOTE, run_validation
from sqzdist.distinguishability import (
    GaussianPulseModel,
    classical_probability,
    classical_series,
    delay_scan,
    effective_thermal_occupation,
    equally_spaced_delays,
    gaussian_overlap,
    homogeneous_decomposition,
    homogeneous_overlap,
)
from sqzdist.fock_oracle import (
    displaced_average_probability,
    oracle_distribution,
    squeezed_thermal_distribution,
    total_photon_tail,
)
from sqzdist.model import (
    beamsplitter_unitary,
    haar_random_unitary,
    tritter_unitary,
    validate_scenario,
)
from sqzdist.pnr import distribution, indistinguishable_probability, probability
from sqzdist.series import box_indices
from sqzdist.threshold import click_table

from conftest import ACCEPTANCE_LINES, random_gram


def record(number, title, passed, detail):
    line = f"criterion {number:>2}: {'PASS' if passed else 'FAIL'}  {title}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return passed


class Timer:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.seconds = time.perf_counter() - self.start


def test_criterion_01_vacuum_probability():
    with Timer() as t:
        worst = 0.0
        rng = np.random.default_rng(1)
        for i in range(10):
            M = 1 + i % 4
            sc = validate_scenario(haar_random_unitary(M, i), rng.uniform(0, 1.2, M), rng.uniform(0, 6.3, M), random_gram(M, rng))
            c = math.prod(math.sqrt(1 - math.tanh(r) ** 2) for r in sc.squeeze.r)
            worst = max(worst, abs(probability(sc, (0,) * M) - c))
        bs = validate_scenario(beamsplitter_unitary(), [1.0, 1.0])
        p_bs = probability(bs, (0, 0))
        bs_err = abs(p_bs - 0.41997434161402614)
    ok = worst <= 1e-12 and bs_err <= 1e-12 and t.seconds < 1
    assert record(1, "vacuum probability", ok, f"max |P(0) - c_r| = {worst:.1e}, beamsplitter P(0,0) = {p_bs:.15f}, {t.seconds:.2f} s")


def test_criterion_02_hafnian_consistency():
    with Timer() as t:
        worst, cases = 0.0, 0
        rng = np.random.default_rng(2)
        for i in range(10):
            M = (2, 3, 4)[i % 3]
            sc = validate_scenario(haar_random_unitary(M, 200 + i), rng.uniform(0, 1, M), rng.uniform(0, 2 * np.pi, M))
            for n, p in distribution(sc, 6):
                worst = max(worst, abs(p - indistinguishable_probability(sc, n)))
                cases += 1
    ok = worst <= 1e-9 and t.seconds < 30
    assert record(2, "hafnian consistency", ok, f"{cases} patterns, max error {worst:.1e}, {t.seconds:.1f} s")


def _oracle_scenarios():
    rng = np.random.default_rng(3)
    out = []
    for i in range(20):
        M = 1 + i % 3
        kind = ("random", "gaussian", "homogeneous", "rank1")[i % 4]
        if kind == "random":
            V = random_gram(M, rng)
        elif kind == "gaussian":
            V = gaussian_overlap(GaussianPulseModel(equally_spaced_delays(M, rng.uniform(0.2, 3)), 1.0, rng.uniform(-1, 1)))
        elif kind == "homogeneous":
            V = homogeneous_overlap(rng.uniform(0, 1), M)
        else:
            V = random_gram(M, rng, rank=1)
        eta = None if i % 5 else rng.uniform(0.6, 1, M)
        out.append(validate_scenario(haar_random_unitary(M, 300 + i), rng.uniform(0, 0.75, M), rng.uniform(0, 2 * np.pi, M), V, eta))
    return out


def test_criterion_03_oracle_equivalence():
    with Timer() as t:
        worst_excess, worst_gap, cases = 0.0, 0.0, 0
        for sc in _oracle_scenarios():
            engine = distribution(sc, 4)
            oracle = oracle_distribution(sc, 8)
            allow = max(1e-6, oracle.tail_bound)
            for n, p in engine:
                gap = abs(p - oracle[n])
                worst_gap = max(worst_gap, gap)
                worst_excess = max(worst_excess, gap - allow)
                cases += 1
    ok = worst_excess <= 0 and t.seconds < 120
    assert record(3, "oracle equivalence", ok, f"20 scenarios, {cases} patterns, max gap {worst_gap:.1e}, {t.seconds:.1f} s")


def test_criterion_04_zero_events():
    with Timer() as t:
        bs = validate_scenario(beamsplitter_unitary(), [1.0, 1.0])
        bs_worst = max(p for n, p in distribution(bs, 8) if n[0] != n[1])
        tr = validate_scenario(tritter_unitary(), [1.0, 1.0, 1.0])
        tr_worst = max(p for n, p in distribution(tr, 6) if n[0] % 2 or n[1] != n[2])
    ok = bs_worst <= 1e-12 and tr_worst <= 1e-10 and t.seconds < 30
    assert record(4, "zero events", ok, f"beamsplitter max {bs_worst:.1e}, tritter max {tr_worst:.1e}, {t.seconds:.2f} s")


def test_criterion_05_delay_scan_limits():
    with Timer() as t:
        bs = validate_scenario(beamsplitter_unitary(), [1.0, 1.0])
        tr = validate_scenario(tritter_unitary(), [1.0, 1.0, 1.0])
        bs_pats = list(box_indices((4, 4), 4))
        tr_pats = list(box_indices((4, 4, 4), 4))
        forbidden = 0.0
        for sc, pats, bad in ((bs, bs_pats, lambda n: n[0] != n[1]), (tr, tr_pats, lambda n: n[0] % 2 or n[1] != n[2])):
            for _, _, n, p in delay_scan(sc, [0.0], [0.0, math.pi / 4], pats):
                if bad(n):
                    forbidden = max(forbidden, p)
        far = 0.0
        for sc, pats in ((bs, bs_pats), (tr, tr_pats)):
            dist = distribution(sc.with_overlap(np.eye(sc.M)), 4)
            for _, _, n, p in delay_scan(sc, [10.0], [0.0, math.pi / 4], pats):
                far = max(far, abs(p - dist[n]))
        split = 0.0
        for sc, pats in ((bs, bs_pats), (tr, tr_pats)):
            a = delay_scan(sc, [1.0], [0.0], pats)
            b = delay_scan(sc, [1.0], [math.pi / 4], pats)
            split = max(split, max(abs(x[3] - y[3]) for x, y in zip(a, b)))
    ok = forbidden <= 1e-10 and far <= 1e-6 and split > 1e-6 and t.seconds < 60
    detail = f"forbidden at 0: {forbidden:.1e}, |V=I gap| at 10: {far:.1e}, phase split at 1: {split:.2e}, {t.seconds:.1f} s"
    assert record(5, "delay-scan limits", ok, detail)


def test_criterion_06_homogeneous_decomposition():
    with Timer() as t:
        worst, odd_nonzero, cases = 0.0, 0, 0
        for eps in (0.0, 0.3, 0.7, 1.0):
            sc = validate_scenario(tritter_unitary(), [1.0, 1.0, 0.0], V=homogeneous_overlap(eps, 3))
            for n, p in distribution(sc, 4):
                rec = homogeneous_decomposition(sc, eps, n)
                worst = max(worst, abs(rec.total - p))
                odd_nonzero += sum(1 for term in rec.terms if sum(term.m) % 2 and term.classical != 0)
                cases += 1
    ok = worst <= 1e-9 and odd_nonzero == 0 and t.seconds < 30
    assert record(6, "homogeneous decomposition", ok, f"{cases} patterns, max error {worst:.1e}, odd-|m| nonzero classical: {odd_nonzero}, {t.seconds:.1f} s")


def test_criterion_07_classical_closed_form():
    with Timer() as t:
        worst, cases = 0.0, 0
        for M in range(1, 5):
            caps = (6,) * M
            for N in range(1, M + 1):
                for r in (0.4, 1.0):
                    s = classical_series(N, M, r, caps, 6)
                    for m in box_indices(caps, 6):
                        worst = max(worst, abs(s[m] - classical_probability(m, N, M, r)))
                        cases += 1
        note = run_validation(randomized=1).notes.get("classical_prefactor", "")
    ok = worst <= 1e-12 and note == CLOSED_FORM_NOTE and t.seconds < 10
    assert record(7, "classical closed form", ok, f"{cases} patterns, max error {worst:.1e}, prefactor resolution in report, {t.seconds:.1f} s")


def _threshold_scenarios():
    rng = np.random.default_rng(8)
    out = []
    for M in (1, 2, 3):
        # the top of the stated squeezing range, then random interior points
        out.append(validate_scenario(haar_random_unitary(M, 800 + M), [0.75] * M, V=random_gram(M, rng)))
        for k in range(2):
            out.append(validate_scenario(haar_random_unitary(M, 810 + 3 * M + k), rng.uniform(0.05, 0.75, M), rng.uniform(0, 6.3, M), random_gram(M, rng)))
    return out


def test_criterion_08_threshold_consistency():
    with Timer() as t:
        worst_sum, worst_pnr, failures = 0.0, 0.0, []
        for sc in _threshold_scenarios():
            clicks = click_table(sc)
            worst_sum = max(worst_sum, abs(math.fsum(clicks.values()) - 1))
            pnr = distribution(sc, 14)
            for flags, p in clicks.items():
                s = math.fsum(q for n, q in pnr if all((k > 0) == bool(f) for k, f in zip(n, flags)))
                gap = abs(p - s)
                worst_pnr = max(worst_pnr, gap)
                if gap > 1e-4:
                    failures.append((sc.M, tuple(round(float(x), 3) for x in sc.squeeze.r), flags, gap, total_photon_tail(sc.squeeze.r, 14)))
    ok = worst_sum <= 1e-9 and worst_pnr <= 1e-4 and t.seconds < 60
    detail = f"sum error {worst_sum:.1e}, max click-vs-PNR gap {worst_pnr:.2e}, {t.seconds:.1f} s"
    if failures:
        M, r, flags, gap, tail = max(failures, key=lambda f: f[3])
        detail += f"; {len(failures)} patterns over 1e-4, worst M={M} r={r} {flags}: gap {gap:.2e} vs photon mass above 14 = {tail:.2e}"
    assert record(8, "threshold completeness / PNR consistency", ok, detail)


def _normalization_scenarios():
    rng = np.random.default_rng(9)
    out = []
    for M in (1, 2, 3):
        out.append(validate_scenario(haar_random_unitary(M, 900 + M), [1.0] * M, V=random_gram(M, rng)))
        out.append(validate_scenario(haar_random_unitary(M, 910 + M), rng.uniform(0, 1, M), rng.uniform(0, 6.3, M), random_gram(M, rng), rng.uniform(0.5, 1, M)))
    return out


def test_criterion_09_normalization():
    with Timer() as t:
        low, high, monotone, worst = 1.0, 0.0, True, None
        for sc in _normalization_scenarios():
            by_total = distribution(sc, 14).by_total()
            partial = np.cumsum([by_total.get(N, 0.0) for N in range(15)])
            monotone &= bool(np.all(np.diff(partial) >= -1e-15))
            s = partial[-1]
            if s < low:
                low, worst = s, (sc.M, tuple(round(float(x), 3) for x in sc.squeeze.r))
            high = max(high, s)
    ok = low >= 1 - 1e-3 and high <= 1 + 1e-9 and monotone and t.seconds < 60
    detail = f"sums in [{low:.6f}, {high:.12f}], monotone: {monotone}, {t.seconds:.1f} s"
    if low < 1 - 1e-3:
        detail += f"; lowest M={worst[0]} r={worst[1]}: missing mass {1 - low:.2e} equals the photon-number tail above 14"
    assert record(9, "normalization", ok, detail)


def test_criterion_10_displaced_average():
    eps, r, samples = 0.05, 1.0, 100_000
    with Timer() as t:
        bs = validate_scenario(beamsplitter_unitary(), [r, r], V=homogeneous_overlap(eps, 2))
        exact = probability(bs, (1, 1))
        est = displaced_average_probability(bs, eps, (1, 1), samples, 2024)
        mc_ok = est.within(exact, 3, 2 * eps * exact)

        single = validate_scenario([[1]], [r])
        nbar = effective_thermal_occupation(eps, r)
        ref = squeezed_thermal_distribution(math.tanh(r) * (1 - eps), nbar, 8, (nbar + 1) / math.cosh(r))
        marginal = [displaced_average_probability(single, eps, (k,), samples, 2025, orthogonal_efficiency=0, cutoff=10).mean for k in range(9)]
        thermal_gap = float(np.max(np.abs(np.array(marginal) - ref)))
    ok = mc_ok and thermal_gap <= 1e-3 and t.seconds < 120
    detail = (
        f"P(1,1) = {est.mean:.6f} +- {est.stderr:.1e} vs exact {exact:.6f} (rel. bias {est.mean / exact - 1:+.2e}), "
        f"thermal marginal gap {thermal_gap:.1e}, {t.seconds:.1f} s"
    )
    assert record(10, "displaced-state Monte Carlo", ok, detail)


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q"]))
