"""Acceptance criteria, one test each.

Every test records a one-line verdict that is repeated in the terminal
summary.  Criteria 4 and 5 are expected to fail; the reason is recorded
in the project's decision notes.
"""

import math
import time

import numpy as np
from energycoop import ResourceAllocation, SystemParams
from energycoop.analysis import make_report, solve_chain, state_probabilities
from energycoop.baseline import max_service_rate, noncoop_optimize, noncoop_service_rate
from energycoop.channel import LinkSpec, min_bandwidth_time_product, mrc_decode_failure, outage_probability
from energycoop.optimizer import OptimizerConfig, optimize
from energycoop.simulator import queue_drift, run

FULL = OptimizerConfig()  # 200 points per axis


def test_criterion_1_chain_normalization(verdict):
    rng = np.random.default_rng(1)
    t0 = time.perf_counter()
    worst_agg = worst_k = 0.0
    n = 0
    K = 10_000
    k = np.arange(2, K + 1)
    while n < 1000:
        lam, a, g = rng.uniform(0.001, 0.999), rng.uniform(0, 1), rng.uniform(0.001, 1)
        c = solve_chain(SystemParams(lambda_p=lam), a, g)
        if not c.stable:
            continue
        n += 1
        worst_agg = max(worst_agg, abs(c.pi0 + c.sum_pi + c.sum_eps - 1.0))
        pi, eps = state_probabilities(c, K)
        # exact remainder of the geometric series beyond K
        r = c.ratio
        rem = r ** (K - 1) / (1 - r) * (lam / c.psi) ** 2 * c.pi0 * (1 - a)
        worst_k = max(
            worst_k,
            abs(pi.sum() + lam * rem - c.sum_pi),
            abs(eps.sum() + (1 - lam) * rem - c.sum_eps),
        )
    elapsed = time.perf_counter() - t0
    ok = worst_agg <= 1e-12 and worst_k <= 1e-10 and elapsed < 1.0
    verdict(1, ok, f"max |sum-1| = {worst_agg:.1e}, per-k vs aggregate {worst_k:.1e}, {elapsed:.2f} s")
    assert ok


def _random_stable_configs(n, seed=20240):
    base = SystemParams()
    E = min_bandwidth_time_product(base)
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < n:
        lam = rng.uniform(0.05, 0.9)
        wp = rng.uniform(E / base.T, base.W)
        tpf = rng.uniform(max(E / wp, base.tau), base.T)
        tpr = rng.uniform(0, base.T)
        p = base.with_(lambda_p=lam)
        a = ResourceAllocation(wp, tpf, tpr)
        rep = make_report(p, a)
        if rep.chain.stable:
            out.append((p, a, rep))
    return out


def test_criterion_2_simulator_matches_analysis(verdict):
    worst_z = worst_mu = slowest = 0.0
    for i, (p, a, rep) in enumerate(_random_stable_configs(10), start=1):
        t0 = time.perf_counter()
        st = run(p, a, 10**6, seed=i, warmup=10**4, keep_trace=False)
        slowest = max(slowest, time.perf_counter() - t0)
        c = rep.chain
        for est, ref in ((st.pi0_hat, c.pi0), (st.sum_pi_hat, c.sum_pi), (st.sum_eps_hat, c.sum_eps)):
            worst_z = max(worst_z, abs(est - ref) / math.sqrt(ref * (1 - ref) / st.slots))
        worst_mu = max(worst_mu, abs(st.mu_s_hat - rep.mu_s) / rep.mu_s)
    ok = worst_z <= 3 and worst_mu <= 0.01 and slowest < 30
    verdict(2, ok, f"max |z| = {worst_z:.2f}, max mu_s rel err = {worst_mu:.4f}, slowest run {slowest:.1f} s")
    assert ok


def test_criterion_3_baseline(verdict):
    p = SystemParams()
    mu = max_service_rate(p)
    rep = noncoop_optimize(p.with_(lambda_p=0.5))
    tight = abs(noncoop_service_rate(p, rep.W_opt) - 0.5)
    ok = abs(mu - 0.81292) <= 1e-4 and tight <= 1e-9
    verdict(3, ok, f"mu_max = {mu:.6f}, |mu(W_opt) - 0.5| = {tight:.1e}")
    assert ok


def test_criterion_4_crossover(verdict):
    p = SystemParams(M=6, Ps=5e-11)
    lams = np.round(np.arange(0.005, 1.0, 0.005), 3)
    feasible = [lam for lam in lams if optimize(p.with_(lambda_p=float(lam)), FULL).feasible]
    top = max(feasible) if feasible else math.nan
    ok = abs(top - 0.475) <= 0.02
    verdict(4, ok, f"largest feasible lambda_p = {top:.3f} (target 0.475 +/- 0.02)")
    assert ok


def test_criterion_5_energy_gain(verdict):
    p = SystemParams(lambda_p=0.7)
    opt = optimize(p, FULL)
    ratio = opt.report.B_pc / opt.B_nc if opt.feasible else math.nan
    ok = abs(ratio / 8.65 - 1) <= 0.10
    verdict(5, ok, f"B_pc / B_nc = {ratio:.3f} (target 8.65 +/- 10%)")
    assert ok


def test_criterion_6_antenna_threshold(verdict):
    p = SystemParams(Ps=5e-11)
    WT = p.W * p.T
    E5, E6 = (min_bandwidth_time_product(p.with_(M=m)) for m in (5, 6))
    cfg = OptimizerConfig(51, 51, 51)
    lams = (0.1, 0.3, 0.5, 0.7, 0.9)
    none_below = not any(optimize(p.with_(M=m, lambda_p=l), cfg).feasible for m in range(1, 6) for l in lams)
    some_at_6 = any(optimize(p.with_(M=6, lambda_p=l), cfg).feasible for l in lams)
    ok = E5 > WT and E6 <= WT and none_below and some_at_6
    verdict(6, ok, f"E(5) = {E5:.1f} > {WT:.0f} >= E(6) = {E6:.1f}; M<6 infeasible: {none_below}; M=6 feasible: {some_at_6}")
    assert ok


def _mu_opt(params, cfg):
    opt = optimize(params, cfg)
    return opt.mu_s if opt.feasible else 0.0


def test_criterion_7_monotonicity(verdict):
    sweeps = {
        "M": [6, 7, 8, 10],
        "sigma_s_sd": [0.05, 0.1, 0.2, 0.5],
        "sigma_s_pd": [0.25, 0.5, 1.0, 2.0],
        "Ps": [2.5e-11, 5e-11, 1e-10, 2e-10],
    }
    coarse = OptimizerConfig(26, 26, 26)
    bad = []
    for lam in (0.3, 0.5):
        base = SystemParams(lambda_p=lam)
        for cfg in (coarse, coarse.refined()):
            for name, values in sweeps.items():
                mus = [_mu_opt(base.with_(**{name: v}), cfg) for v in values]
                if any(b < a for a, b in zip(mus, mus[1:])):
                    bad.append(f"{name} (lambda_p={lam}, grid {cfg.grid_wp})")
    ok = not bad
    verdict(7, ok, "optimal mu_s nondecreasing in M, sigma_s_sd, sigma_s_pd, Ps" + (f"; violations: {bad}" if bad else ""))
    assert ok


def test_criterion_8_mrc_oracle(verdict):
    rng = np.random.default_rng(8)
    n = 10**6
    worst = 0.0
    checked = 0
    while checked < 20:
        M = int(rng.integers(1, 11))
        p = SystemParams(M=M, sigma_p_s=float(rng.uniform(0.2, 3.0)))
        a = ResourceAllocation(float(rng.uniform(2e5, p.W)), float(rng.uniform(p.tau, p.T)), 0.0)
        q = mrc_decode_failure(p, a)
        if not 1e-3 < q < 1 - 1e-3:
            continue  # too rare for a 1e6-sample check
        checked += 1
        thr = 2 ** (p.b / (a.TpF * a.Wp)) - 1
        s = rng.exponential(p.sigma_p_s * p.gamma_p, (n, M)).sum(axis=1)
        hit = np.mean(s < thr)
        worst = max(worst, abs(hit - q) / math.sqrt(q * (1 - q) / n))
    single = 0.0
    for wp, tpf in [(1e6, 2e-4), (4e6, 1e-4), (9e6, 4e-4)]:
        p = SystemParams(M=1)
        a = ResourceAllocation(wp, tpf, 0.0)
        link = LinkSpec(rate=p.b / tpf, bandwidth=wp, snr=p.gamma_p, gain=p.sigma_p_s)
        single = max(single, abs(mrc_decode_failure(p, a) - outage_probability(link)))
    ok = worst <= 3 and single <= 1e-12
    verdict(8, ok, f"max |z| over 20 points = {worst:.2f}, M=1 deviation {single:.1e}")
    assert ok


def test_criterion_9_instability(verdict):
    p = SystemParams(lambda_p=0.95)
    # TpF = TpR makes alpha = Gamma, so the saturated service rate is eta
    alloc = ResourceAllocation(7e6, 4e-4, 4e-4)
    rep = make_report(p, alloc)
    target = p.lambda_p - rep.chain.eta
    st = run(p, alloc, 10**6, seed=9, warmup=0)
    drift = queue_drift(st)
    ok = (not rep.chain.stable) and abs(drift / target - 1) <= 0.10
    verdict(9, ok, f"eta = {rep.chain.eta:.4f}, drift = {drift:.4f} vs lambda_p - eta = {target:.4f}")
    assert ok
