"""Cooperative-mode analytics: success probabilities, the PU Markov chain,
secondary service rate and primary packets per joule.

The ``*_array`` helpers broadcast over numpy arrays of (Wp, TpF, TpR) and are
shared by the scalar API below and by the grid search.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .baseline import extended_baseline, noncoop_optimize
from .channel import min_bandwidth_time_product, mrc_decode_failure, outage, secondary_rate
from .params import DomainError, PrimaryState, ResourceAllocation, SystemParams


def _rate(b, duration):
    duration = np.asarray(duration, dtype=float)
    with np.errstate(divide="ignore"):
        return np.where(duration > 0, b / np.where(duration > 0, duration, 1.0), np.inf)


def success_probabilities_array(params: SystemParams, Wp, TpF, TpR):
    """(alpha_p, Gamma_p): one minus the chance that both PU and relay legs fail.

    A leg with zero airtime is in outage with probability one.
    """
    b, T = params.b, params.T
    gp, gs = params.gamma_p, params.gamma_s
    p_pd_F = outage(_rate(b, TpF), Wp, gp, params.sigma_p_pd)
    s_pd_F = outage(_rate(b, T - np.asarray(TpF)), Wp, gs, params.sigma_s_pd)
    p_pd_R = outage(_rate(b, TpR), Wp, gp, params.sigma_p_pd)
    s_pd_R = outage(_rate(b, T - np.asarray(TpR)), Wp, gs, params.sigma_s_pd)
    return 1.0 - p_pd_F * s_pd_F, 1.0 - p_pd_R * s_pd_R


def own_data_success_array(params: SystemParams, Wp):
    """SU own-data success probabilities in the idle, forward and retransmission states."""
    gs, sig = params.gamma_s, params.sigma_s_sd
    Ws = params.W - np.asarray(Wp, dtype=float)
    r_sensed = secondary_rate(PrimaryState.FORWARD, params)
    r_unsensed = secondary_rate(PrimaryState.RETRANSMISSION, params)
    s_idle = 1.0 - outage(r_sensed, params.W, gs, sig)
    s_F = 1.0 - outage(r_sensed, Ws, gs, sig)
    s_R = 1.0 - outage(r_unsensed, Ws, gs, sig)
    return s_idle, s_F, s_R


def chain_aggregates_array(lambda_p, alpha, Gamma):
    """(eta, pi0, sum_pi, sum_eps) of the PU chain; only meaningful where lambda_p < eta."""
    alpha = np.asarray(alpha, dtype=float)
    Gamma = np.asarray(Gamma, dtype=float)
    eta = lambda_p * alpha + (1.0 - lambda_p) * Gamma
    with np.errstate(divide="ignore", invalid="ignore"):
        sum_eps = np.where(Gamma > 0, lambda_p * (1.0 - alpha) / Gamma, np.inf)
        pi0 = np.where(Gamma > 0, (eta - lambda_p) / Gamma, 0.0)
    if lambda_p == 0:
        sum_eps = np.zeros_like(eta)
        pi0 = np.ones_like(eta)
    sum_pi = np.full_like(eta, lambda_p)
    return eta, pi0, sum_pi, sum_eps


def packets_per_joule_array(params: SystemParams, Wp, TpF, TpR, alpha):
    """Primary packets per joule, summed over forward and retransmission states.

    TpR = 0 means the PU spends nothing on retransmissions, so only the
    forward-state term remains.
    """
    lam = params.lambda_p
    Wp = np.asarray(Wp, dtype=float)
    TpR = np.asarray(TpR, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        fwd = alpha / TpF
        ret = np.where(TpR > 0, (1.0 - alpha) / np.where(TpR > 0, TpR, 1.0), 0.0)
        B = (fwd + ret) * lam / (Wp * params.Pp)
    if lam == 0:
        B = np.zeros_like(B)
    return B


@dataclass(frozen=True)
class ChainSolution:
    lambda_p: float
    alpha_p: float
    Gamma_p: float
    eta: float
    psi: float
    pi0: float
    sum_pi: float
    sum_eps: float
    stable: bool

    @property
    def ratio(self) -> float:
        """Geometric decay lambda_p (1 - eta) / psi of the per-k probabilities."""
        if self.lambda_p == 0:
            return 0.0
        return self.lambda_p * (1.0 - self.eta) / self.psi


@dataclass(frozen=True)
class CoopReport:
    chain: ChainSolution
    mu_s: float
    B_pc: float
    B_nc: float  # comparison value for the energy constraint
    extended_baseline: bool
    coop_beneficial: bool
    decode_ok: bool
    decode_failure: float


def success_probabilities(params: SystemParams, alloc: ResourceAllocation) -> tuple[float, float]:
    if alloc.TpF <= 0:
        raise DomainError("TpF must be positive")
    a, g = success_probabilities_array(params, alloc.Wp, alloc.TpF, alloc.TpR)
    return float(a), float(g)


def solve_chain(params: SystemParams, alpha_p: float, Gamma_p: float) -> ChainSolution:
    """Closed-form stationary aggregates of the PU queue under cooperation."""
    lam = params.lambda_p
    if Gamma_p <= 0 and lam > 0:
        raise DomainError("Gamma_p = 0: the chain absorbs in retransmission")
    eta, pi0, sum_pi, sum_eps = (float(x) for x in chain_aggregates_array(lam, alpha_p, Gamma_p))
    return ChainSolution(
        lambda_p=lam,
        alpha_p=alpha_p,
        Gamma_p=Gamma_p,
        eta=eta,
        psi=(1.0 - lam) * eta,
        pi0=pi0,
        sum_pi=sum_pi,
        sum_eps=sum_eps,
        stable=lam < eta,
    )


def _require_stable(chain: ChainSolution):
    if not chain.stable:
        raise DomainError(f"primary queue unstable (lambda_p={chain.lambda_p} >= eta={chain.eta})")


def state_probability(chain: ChainSolution, state: PrimaryState, k: int) -> float:
    """Stationary probability of holding ``k`` packets in the given active state."""
    _require_stable(chain)
    if k < 1:
        raise ValueError("k must be >= 1")
    pi, eps = state_probabilities(chain, k)
    if state is PrimaryState.FORWARD:
        return float(pi[-1])
    if state is PrimaryState.RETRANSMISSION:
        return float(eps[-1])
    raise ValueError("state must be FORWARD or RETRANSMISSION")


def state_probabilities(chain: ChainSolution, kmax: int) -> tuple[np.ndarray, np.ndarray]:
    """Arrays (pi_k, eps_k) for k = 1..kmax."""
    _require_stable(chain)
    lam, a, g = chain.lambda_p, chain.alpha_p, chain.Gamma_p
    pi = np.zeros(kmax)
    eps = np.zeros(kmax)
    if lam == 0 or kmax < 1:
        return pi, eps
    eta, psi, pi0 = chain.eta, chain.psi, chain.pi0
    pi[0] = pi0 * lam / psi * (lam + (1.0 - lam) * g)
    eps[0] = pi0 * lam * (1.0 - a) / eta
    if kmax >= 2:
        # pi0 lam abar / etabar^2 * r^k written to avoid dividing by etabar
        j = np.arange(kmax - 1, dtype=float)
        r = chain.ratio
        # exp/log instead of pow: pow is very slow once terms go subnormal
        with np.errstate(under="ignore"):
            powers = np.exp(j * math.log(r)) if r > 0 else (j == 0).astype(float)
        tail = powers * (lam / psi) ** 2
        pi[1:] = pi0 * lam * (1.0 - a) * tail
        eps[1:] = pi0 * (1.0 - lam) * (1.0 - a) * tail
    return pi, eps


def saturated_service_rate(alpha_p: float, Gamma_p: float) -> float:
    """Departure rate of a never-empty primary queue: one forward slot plus
    geometric retransmissions per packet."""
    return Gamma_p / (1.0 - alpha_p + Gamma_p)


def secondary_throughput(params: SystemParams, alloc: ResourceAllocation, chain: ChainSolution) -> float:
    _require_stable(chain)
    s_idle, s_F, s_R = own_data_success_array(params, alloc.Wp)
    mu = chain.pi0 * s_idle + chain.sum_pi * s_F + chain.sum_eps * s_R
    return float(min(max(mu, 0.0), 1.0))


def primary_packets_per_joule(params: SystemParams, alloc: ResourceAllocation, chain: ChainSolution) -> float:
    _require_stable(chain)
    if alloc.Wp <= 0:
        raise DomainError("Wp = 0: no primary transmission, energy ratio undefined")
    if alloc.TpF <= 0:
        raise DomainError("TpF must be positive")
    return float(packets_per_joule_array(params, alloc.Wp, alloc.TpF, alloc.TpR, chain.alpha_p))


def primary_energy_per_slot(params: SystemParams, alloc: ResourceAllocation, chain: ChainSolution) -> float:
    """Mean primary transmit energy per slot (J)."""
    return params.Pp * alloc.Wp * (chain.sum_pi * alloc.TpF + chain.sum_eps * alloc.TpR)


def energy_normalized_throughput(params: SystemParams, alloc: ResourceAllocation, chain: ChainSolution) -> float:
    """Delivered primary packets divided by primary energy, as a long run average.

    This is what a simulator measures as ACKs per joule; it differs from
    :func:`primary_packets_per_joule`, which sums per-state ratios.
    """
    _require_stable(chain)
    e = primary_energy_per_slot(params, alloc, chain)
    if params.lambda_p == 0:
        return 0.0
    return params.lambda_p / e if e > 0 else math.inf


def make_report(
    params: SystemParams,
    alloc: ResourceAllocation,
    B_nc: float | None = None,
    extended: bool = False,
    alpha: float | None = None,
    Gamma: float | None = None,
) -> CoopReport:
    """Full cooperative report for one allocation.

    ``B_nc`` defaults to the baseline optimum, or the saturated full-band
    value when the lone PU cannot be stable.  ``alpha``/``Gamma`` override
    the success probabilities (used by the disconnected-link solver).
    """
    if B_nc is None:
        base = noncoop_optimize(params)
        if base.feasible:
            B_nc, extended = base.B_max, False
        else:
            B_nc, extended = extended_baseline(params), True
    if alpha is None or Gamma is None:
        alpha, Gamma = success_probabilities(params, alloc)
    if Gamma <= 0 and params.lambda_p > 0:
        # absorbing retransmission state: report as unstable rather than raise
        lam = params.lambda_p
        eta = lam * alpha
        chain = ChainSolution(lam, alpha, Gamma, eta, (1.0 - lam) * eta, math.nan, lam, math.inf, False)
    else:
        chain = solve_chain(params, alpha, Gamma)
    if chain.stable:
        mu_s = secondary_throughput(params, alloc, chain)
        B_pc = primary_packets_per_joule(params, alloc, chain) if alloc.Wp > 0 else 0.0
    else:
        mu_s, B_pc = math.nan, math.nan
    decode_ok = alloc.Wp * alloc.TpF >= min_bandwidth_time_product(params)
    failure = mrc_decode_failure(params, alloc) if alloc.Wp > 0 else 1.0
    return CoopReport(
        chain=chain,
        mu_s=mu_s,
        B_pc=B_pc,
        B_nc=B_nc,
        extended_baseline=extended,
        coop_beneficial=bool(chain.stable and B_pc > B_nc),
        decode_ok=decode_ok,
        decode_failure=failure,
    )


evaluate = make_report
