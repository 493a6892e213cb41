import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from energycoop import DomainError, PrimaryState, ResourceAllocation, SystemParams
from energycoop.analysis import (
    energy_normalized_throughput,
    make_report,
    primary_packets_per_joule,
    saturated_service_rate,
    secondary_throughput,
    solve_chain,
    state_probabilities,
    state_probability,
    success_probabilities,
)
from energycoop.channel import outage


def truncated_chain(lam, a, g, K=400):
    """Stationary vector of the PU chain cut at K packets, by eigen-solve.

    Index 0 is idle, 2k-1 is (F, k), 2k is (R, k).  A new arrival lands
    after the slot's transmission.
    """
    n = 2 * K + 1

    def idx(k, s):
        return 0 if k == 0 else (2 * k - 1 if s == "F" else 2 * k)

    P = np.zeros((n, n))
    P[0, idx(1, "F")] += lam
    P[0, 0] += 1 - lam
    for k in range(1, K + 1):
        for s, p in (("F", a), ("R", g)):
            i = idx(k, s)
            for arr, pa in ((1, lam), (0, 1 - lam)):
                P[i, idx(min(k - 1 + arr, K), "F")] += p * pa
                P[i, idx(min(k + arr, K), "R")] += (1 - p) * pa
    w, v = np.linalg.eig(P.T)
    x = np.real(v[:, np.argmin(abs(w - 1))])
    x = x / x.sum()
    return x[0], x[1::2], x[2::2]


@pytest.mark.parametrize("lam,a,g", [(0.3, 0.7, 0.8), (0.5, 0.9, 0.6), (0.1, 0.2, 0.95), (0.6, 0.95, 0.9)])
def test_chain_matches_eigen_oracle(lam, a, g):
    chain = solve_chain(SystemParams(lambda_p=lam), a, g)
    assert chain.stable
    x0, xF, xR = truncated_chain(lam, a, g)
    assert chain.pi0 == pytest.approx(x0, abs=1e-9)
    assert chain.sum_pi == pytest.approx(xF.sum(), abs=1e-9)
    assert chain.sum_eps == pytest.approx(xR.sum(), abs=1e-9)
    pi, eps = state_probabilities(chain, 20)
    np.testing.assert_allclose(pi, xF[:20], atol=1e-10)
    np.testing.assert_allclose(eps, xR[:20], atol=1e-10)


def test_perfect_links():
    c = solve_chain(SystemParams(lambda_p=0.4), 1.0, 1.0)
    assert c.eta == 1.0 and c.sum_eps == 0.0
    assert c.pi0 == pytest.approx(0.6)
    pi, eps = state_probabilities(c, 5)
    assert pi[0] == pytest.approx(0.4) and np.all(pi[1:] == 0) and np.all(eps == 0)


def test_zero_load():
    c = solve_chain(SystemParams(lambda_p=0.0), 0.3, 0.4)
    assert c.pi0 == 1.0 and c.sum_pi == 0.0 and c.sum_eps == 0.0 and c.stable


def test_unstable_and_absorbing():
    c = solve_chain(SystemParams(lambda_p=0.7), 0.5, 0.5)
    assert not c.stable
    with pytest.raises(DomainError):
        state_probabilities(c, 3)
    with pytest.raises(DomainError):
        solve_chain(SystemParams(lambda_p=0.2), 0.5, 0.0)


@given(lam=st.floats(0.001, 0.999), a=st.floats(0.0, 1.0), g=st.floats(0.001, 1.0))
def test_normalization(lam, a, g):
    c = solve_chain(SystemParams(lambda_p=lam), a, g)
    if not c.stable:
        return
    assert c.pi0 + c.sum_pi + c.sum_eps == pytest.approx(1.0, abs=1e-12)
    assert c.sum_pi == lam
    assert c.sum_eps == pytest.approx(lam * (1 - a) / g, abs=1e-12)


def test_normalization_random_thousand():
    rng = np.random.default_rng(7)
    n = 0
    while n < 1000:
        lam, a, g = rng.uniform(0.01, 0.99), rng.uniform(0, 1), rng.uniform(0.01, 1)
        c = solve_chain(SystemParams(lambda_p=lam), a, g)
        if not c.stable:
            continue
        n += 1
        assert abs(c.pi0 + c.sum_pi + c.sum_eps - 1) < 1e-12
        if c.ratio < 0.999:
            K = 10_000
            pi, eps = state_probabilities(c, K)
            # geometric tail beyond K bounded in closed form
            tail = (pi[-1] + eps[-1]) * c.ratio / (1 - c.ratio)
            assert abs(pi.sum() - c.sum_pi) <= 1e-9 + tail
            assert abs(eps.sum() - c.sum_eps) <= 1e-9 + tail


def test_state_probability_api():
    c = solve_chain(SystemParams(lambda_p=0.3), 0.7, 0.8)
    pi, eps = state_probabilities(c, 4)
    assert state_probability(c, PrimaryState.FORWARD, 4) == pi[3]
    assert state_probability(c, PrimaryState.RETRANSMISSION, 1) == eps[0]
    with pytest.raises(ValueError):
        state_probability(c, PrimaryState.IDLE, 1)
    with pytest.raises(ValueError):
        state_probability(c, PrimaryState.FORWARD, 0)


def test_saturated_rate_is_drift_target():
    # when alpha == Gamma, the chain's service rate reduces to eta at lambda = 1
    assert saturated_service_rate(0.6, 0.6) == pytest.approx(0.6)
    assert saturated_service_rate(1.0, 0.3) == 1.0
    assert saturated_service_rate(0.0, 0.5) == pytest.approx(1 / 3)


def test_success_probabilities_direct(common):
    alloc = ResourceAllocation(4e6, 3e-4, 2e-4)
    a, g = success_probabilities(common, alloc)
    gp, gs = common.gamma_p, common.gamma_s
    exp_a = 1 - outage(2000 / 3e-4, 4e6, gp, 0.2) * outage(2000 / 1e-4, 4e6, gs, 0.5)
    exp_g = 1 - outage(2000 / 2e-4, 4e6, gp, 0.2) * outage(2000 / 2e-4, 4e6, gs, 0.5)
    assert a == pytest.approx(exp_a, abs=1e-15)
    assert g == pytest.approx(exp_g, abs=1e-15)


def test_degenerate_airtimes(common):
    # TpR = 0: the retransmission succeeds only through the relay on the full slot
    a, g = success_probabilities(common, ResourceAllocation(4e6, 3e-4, 0.0))
    assert g == pytest.approx(1 - outage(2000 / 4e-4, 4e6, common.gamma_s, 0.5))
    # TpF = T: the relay gets no forward airtime
    a, g = success_probabilities(common, ResourceAllocation(4e6, common.T, 1e-4))
    assert a == pytest.approx(1 - outage(2000 / 4e-4, 4e6, common.gamma_p, 0.2))
    with pytest.raises(DomainError):
        success_probabilities(common, ResourceAllocation(4e6, 0.0, 1e-4))


def test_mu_s_bounds_and_zero_load(common):
    p = common.with_(lambda_p=0.0)
    alloc = ResourceAllocation(3e6, 2e-4, 1e-4)
    rep = make_report(p, alloc)
    idle = 1 - outage(2000 / (common.T - common.tau), common.W, common.gamma_s, 0.1)
    assert rep.mu_s == pytest.approx(idle, abs=1e-15)
    rng = np.random.default_rng(3)
    for _ in range(200):
        alloc = ResourceAllocation(rng.uniform(1e5, 1e7), rng.uniform(common.tau, common.T), rng.uniform(0, common.T))
        rep = make_report(common, alloc)
        if rep.chain.stable:
            assert 0 <= rep.mu_s <= 1


def test_mu_s_nondecreasing_in_own_link_gain(common):
    alloc = ResourceAllocation(6e6, 3e-4, 2e-4)
    mus = [make_report(common.with_(sigma_s_sd=s), alloc).mu_s for s in (0.02, 0.05, 0.1, 0.3, 1.0)]
    assert all(a <= b for a, b in zip(mus, mus[1:]))


def test_no_released_band(common):
    alloc = ResourceAllocation(common.W, 3e-4, 2e-4)
    rep = make_report(common, alloc)
    idle = 1 - outage(2000 / (common.T - common.tau), common.W, common.gamma_s, 0.1)
    assert rep.mu_s == pytest.approx(rep.chain.pi0 * idle, abs=1e-15)


@given(lam=st.floats(0.0, 1.0), a=st.floats(0.0, 1.0), g=st.floats(0.001, 1.0))
def test_eta_is_convex_combination(lam, a, g):
    c = solve_chain(SystemParams(lambda_p=lam), a, g)
    assert min(a, g) - 1e-15 <= c.eta <= max(a, g) + 1e-15


def test_B_pc_branches(common):
    c = solve_chain(common, 1.0, 1.0)
    a1 = primary_packets_per_joule(common, ResourceAllocation(4e6, 3e-4, 0.0), c)
    a2 = primary_packets_per_joule(common, ResourceAllocation(4e6, 3e-4, 1e-4), c)
    assert a1 == a2 == pytest.approx(0.5 / (1e-10 * 4e6 * 3e-4))
    with pytest.raises(DomainError):
        primary_packets_per_joule(common, ResourceAllocation(0.0, 3e-4, 0.0), c)


def test_energy_normalized_throughput(common):
    alloc = ResourceAllocation(8e6, 3e-4, 2e-4)
    a, g = success_probabilities(common, alloc)
    c = solve_chain(common, a, g)
    assert c.stable
    expected = 0.5 / (1e-10 * 8e6 * (0.5 * 3e-4 + c.sum_eps * 2e-4))
    assert energy_normalized_throughput(common, alloc, c) == pytest.approx(expected, rel=1e-12)


def test_report_flags(common):
    rep = make_report(common, ResourceAllocation(9e6, 4e-4, 0.0))
    assert rep.decode_ok and rep.decode_failure <= common.Q_target
    assert not rep.extended_baseline
    bad = make_report(common.with_(lambda_p=0.95), ResourceAllocation(1e5, 1e-4, 0.0))
    assert bad.chain.Gamma_p == 0.0 and not bad.chain.stable and math.isnan(bad.mu_s) and not bad.coop_beneficial
    assert bad.extended_baseline


def test_secondary_throughput_requires_stability(common):
    c = solve_chain(common.with_(lambda_p=0.9), 0.5, 0.5)
    with pytest.raises(DomainError):
        secondary_throughput(common, ResourceAllocation(1e6, 2e-4, 0.0), c)


def test_success_probabilities_monte_carlo(common):
    alloc = ResourceAllocation(4e6, 0.5 * common.T, 0.5 * common.T)
    a, g = success_probabilities(common, alloc)
    n = 10**6
    rng = np.random.default_rng(2024)
    thr = 2 ** (2000 / (0.5 * common.T * 4e6)) - 1
    pu = rng.exponential(common.sigma_p_pd, n) * common.gamma_p >= thr
    su = rng.exponential(common.sigma_s_pd, n) * common.gamma_s >= thr
    hit = np.mean(pu | su)
    assert a == g
    assert abs(hit - a) < 3 * math.sqrt(a * (1 - a) / n)
