"""Acceptance criteria, one PASS/FAIL line each (see the terminal summary)."""

import math
import random
import time

import numpy as np
import pytest

from hoqmc.experiments import ExperimentConfig, converge
from hoqmc.kernel import KernelParams, Weights, gram_matrix, worst_case_error
from hoqmc.nets import faure_matrices, generate_points, interlace, interlaced_t_bound, sobol_matrices
from hoqmc.quality import exact_t_value, interpolation_holds, min_dick_metric
from hoqmc.shifts import (apply_shift, default_depth, mse_upper_bound_bd, rms_wce_mc,
                          sample_shift, theoretical_bound)
from oracles import three_term_e2

ORDER_NETS = ([(5, 2, 2, m) for m in (2, 3, 4)] + [(2, 1, 2, m) for m in range(2, 7)])


def _order_net(b, s, alpha, m):
    Q = faure_matrices(b, alpha * s, m) if b > 2 else faure_matrices(2, 2, m)
    return interlace(Q, alpha)


@pytest.fixture(scope="module")
def order_results():
    start = time.perf_counter()
    rows = []
    for b, s, alpha, m in ORDER_NETS:
        G = _order_net(b, s, alpha, m)
        t = exact_t_value(G, alpha)
        rows.append((b, s, alpha, m, G, t, interlaced_t_bound(0, alpha, s, m)))
    return rows, time.perf_counter() - start


@pytest.fixture(scope="module")
def sweep_s1():
    cfg = ExperimentConfig(b=2, alpha=2, beta=4, s=1, m_min=4, m_max=12, R=32, seed=7,
                           generator="sobol", fit_from=4)
    start = time.perf_counter()
    res = converge(cfg)
    return cfg, res, time.perf_counter() - start


@pytest.fixture(scope="module")
def sweep_s2():
    cfg = ExperimentConfig(b=2, alpha=2, beta=4, s=2, m_min=4, m_max=10, R=16, seed=7,
                           generator="sobol", fit_from=4)
    start = time.perf_counter()
    res = converge(cfg)
    return cfg, res, time.perf_counter() - start


def test_criterion_1_order_verification(order_results, acceptance_report):
    rows, elapsed = order_results
    ok = all(t <= bound for *_, t, bound in rows) and elapsed < 120
    detail = ", ".join(f"b={b} s={s} m={m}: t={t}<={bd}" for b, s, _, m, _, t, bd in rows)
    assert acceptance_report(1, ok, f"{detail}; {elapsed:.1f}s < 120s")


def test_criterion_2_delta_consistency(order_results, acceptance_report):
    rows, _ = order_results
    parts, ok = [], True
    for b, s, alpha, m, G, t, _ in rows:
        d = min_dick_metric(G, alpha)
        ok &= d.value > alpha * m - t
        parts.append(f"{d.value}{'*' if d.truncated else ''}>{alpha * m - t}")
    assert acceptance_report(2, ok, "delta > alpha*m - t: " + " ".join(parts)
                             + " (* = cap n+1)")


def test_criterion_3_interpolation_fuzz(acceptance_report):
    rng = random.Random(20240601)
    violations = 0
    for _ in range(100_000):
        alpha = rng.randint(2, 8)
        beta = rng.randint(alpha, 8)
        b = rng.choice((2, 3, 5))
        if not interpolation_holds(rng.randrange(2 ** 40), alpha, beta, b):
            violations += 1
    assert acceptance_report(3, violations == 0, f"{violations} violations in 10^5 cases")


def test_criterion_4_kernel_identity(acceptance_report):
    rng = np.random.default_rng(4)
    start = time.perf_counter()
    worst = 0.0
    for alpha in (1, 2, 3):
        p = KernelParams(alpha, Weights.uniform(1))
        for _ in range(20):
            pts = rng.random(8)
            e = worst_case_error(p, pts[:, None])
            ref = math.sqrt(max(three_term_e2(alpha, pts), 0.0))
            worst = max(worst, abs(e - ref) / ref)
    elapsed = time.perf_counter() - start
    ok = worst < 1e-6 and elapsed < 60
    assert acceptance_report(4, ok, f"max relative error {worst:.2e} < 1e-6; {elapsed:.1f}s < 60s")


def test_criterion_5_rate_s1(sweep_s1, acceptance_report):
    cfg, res, elapsed = sweep_s1
    slope = res.fit.slope
    ok = -2.4 <= slope <= -1.85 and elapsed <= 600
    assert acceptance_report(5, ok, f"slope {slope:.3f} in [-2.4, -1.85] over m=4..12, "
                                    f"R=32; {elapsed:.0f}s")


def test_criterion_6_rate_s2(sweep_s2, acceptance_report):
    cfg, res, elapsed = sweep_s2
    slope = res.fit_corrected.slope
    ok = slope <= -1.8 and elapsed <= 600
    from hoqmc.experiments import fit_rate, log_corrected
    later = fit_rate(log_corrected([(r.N, r.rms) for r in res.records if r.m >= 5], 2)).slope
    assert acceptance_report(6, ok, f"log-corrected slope {slope:.3f} <= -1.8 over m=4..10, "
                                    f"R=16; {elapsed:.0f}s (m>=5 only: {later:.3f})")


def test_criterion_7_bound_domination(sweep_s1, sweep_s2, acceptance_report):
    ok, literal_ok = True, True
    for cfg, res, _ in (sweep_s1, sweep_s2):
        w = cfg.weights()
        for r in res.records:
            ok &= r.bound >= r.rms
            lit = theoretical_bound(cfg.alpha, cfg.beta, cfg.b, r.t, r.m, w, literal=True)
            literal_ok &= lit >= r.rms
    detail = (f"bound >= rms at every m (sin(pi/b) reading): {ok}; "
              f"literal sin(tau/b) reading dominates: {literal_ok}")
    assert acceptance_report(7, ok, detail)


MSE_NETS = [(1, 2, 1, 6), (1, 4, 2, 6), (2, 2, 2, 5), (2, 4, 2, 4), (1, 2, 3, 5),
            (2, 1, 2, 6), (2, 2, 3, 3), (1, 3, 3, 6)]


def test_criterion_8_mse_domination(acceptance_report):
    parts, ok = [], True
    for s, inter, alpha, m in MSE_NETS:
        G = interlace(sobol_matrices(inter * s, m), inter)
        P = generate_points(G)
        p = KernelParams(alpha, Weights.uniform(s))
        ms = rms_wce_mc(p, P, 64, 8).mean_square
        budget = min(G.n, 12) if s == 1 else min(G.n, 7)
        value, tail = mse_upper_bound_bd(p, G, budget)
        ok &= ms <= value + tail
        parts.append(f"s={s} a={alpha} m={m}: {ms:.2e}<={value + tail:.2e}")
    assert acceptance_report(8, ok, "; ".join(parts))


def test_criterion_9_gram_psd(acceptance_report):
    rng = np.random.default_rng(9)
    low = math.inf
    for s in (1, 2, 3):
        for alpha in (1, 2, 3):
            G = gram_matrix(KernelParams(alpha, Weights.uniform(s)), rng.random((64, s)))
            low = min(low, float(np.linalg.eigvalsh(G).min()))
    assert acceptance_report(9, low >= -1e-9, f"min eigenvalue {low:.3e} >= -1e-9")


def test_criterion_10_shift_unbiasedness(acceptance_report):
    parts, ok = [], True
    for s in (1, 2, 3):
        P = generate_points(sobol_matrices(s, 6))
        d = default_depth(P.n, 2)
        est = np.array([np.mean(np.prod(apply_shift(P, sample_shift(10, 2, s, d, r)).values() ** 2,
                                        axis=1)) for r in range(1000)])
        se = est.std(ddof=1) / math.sqrt(est.size)
        z = abs(est.mean() - 3.0 ** -s) / se
        ok &= z <= 4
        parts.append(f"s={s}: {z:.2f} se")
    assert acceptance_report(10, ok, "|mean - 3^-s| within 4 se: " + ", ".join(parts))
