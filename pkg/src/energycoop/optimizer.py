"""Grid search for the resource split maximizing the secondary service rate.

Feasible points satisfy primary stability (lambda_p < eta), a strict energy
gain over the lone PU, and the decode constraint Wp * TpF >= E.  Ties in
mu_s go to the smallest Wp, then TpF, then TpR.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .analysis import (
    CoopReport,
    chain_aggregates_array,
    make_report,
    own_data_success_array,
    packets_per_joule_array,
    success_probabilities_array,
)
from .baseline import extended_baseline, noncoop_optimize
from .channel import min_bandwidth_time_product, outage
from .params import ResourceAllocation, SystemParams


@dataclass(frozen=True)
class OptimizerConfig:
    grid_wp: int = 200
    grid_tpf: int = 200
    grid_tpr: int = 200
    strictness_eps: float = 1e-9
    fix_tpr: float | None = None  # pin TpR instead of searching it

    def __post_init__(self):
        for name in ("grid_wp", "grid_tpf", "grid_tpr"):
            if getattr(self, name) < 2:
                raise ValueError(f"{name} must be >= 2")
        if self.strictness_eps < 0:
            raise ValueError("strictness_eps must be >= 0")

    def refined(self) -> "OptimizerConfig":
        """Grid with every old point kept and one new point between each pair."""
        return replace(
            self,
            grid_wp=2 * self.grid_wp - 1,
            grid_tpf=2 * self.grid_tpf - 1,
            grid_tpr=2 * self.grid_tpr - 1,
        )


@dataclass(frozen=True)
class OptimumReport:
    feasible: bool
    alloc: ResourceAllocation | None = None
    mu_s: float = math.nan
    report: CoopReport | None = None
    B_nc: float = math.nan
    extended_baseline: bool = False
    constraint_slacks: dict = field(default_factory=dict)


def grid(lo: float, hi: float, n: int) -> np.ndarray:
    """Evenly spaced points; the (2n-1)-point grid contains this one exactly."""
    g = lo + (hi - lo) * (np.arange(n) / (n - 1))
    g[-1] = hi
    return g


def comparison_baseline(params: SystemParams) -> tuple[float, bool]:
    """(B_nc, extended): the lone-PU packets per joule the cooperation must beat."""
    base = noncoop_optimize(params)
    if base.feasible:
        return base.B_max, False
    return extended_baseline(params), True


def _slacks(params, alloc, report, B_nc, eps, E):
    return {
        "stability": report.chain.eta - params.lambda_p,
        "energy": report.B_pc - B_nc * (1.0 + eps),
        "decode": alloc.Wp * alloc.TpF - E,
    }


def optimize(params: SystemParams, cfg: OptimizerConfig | None = None) -> OptimumReport:
    cfg = cfg or OptimizerConfig()
    lam = params.lambda_p
    B_nc, extended = comparison_baseline(params)
    B_req = B_nc * (1.0 + cfg.strictness_eps)
    E = min_bandwidth_time_product(params)

    wps = grid(0.0, params.W, cfg.grid_wp)
    tpfs = grid(params.tau, params.T, cfg.grid_tpf)[:, None]
    if cfg.fix_tpr is None:
        tprs = grid(0.0, params.T, cfg.grid_tpr)[None, :]
    else:
        tprs = np.array([[float(cfg.fix_tpr)]])

    best = (-math.inf, None)
    for wp in wps:
        if wp * params.T < E:
            continue  # no TpF can satisfy the decode constraint
        alpha, Gamma = success_probabilities_array(params, wp, tpfs, tprs)
        eta, pi0, sum_pi, sum_eps = chain_aggregates_array(lam, alpha, Gamma)
        s_idle, s_F, s_R = own_data_success_array(params, wp)
        mu = pi0 * s_idle + sum_pi * s_F + sum_eps * s_R
        B = packets_per_joule_array(params, wp, tpfs, tprs, alpha)
        with np.errstate(invalid="ignore"):
            ok = (lam < eta) & (B >= B_req) & (wp * tpfs >= E)
        if not ok.any():
            continue
        masked = np.where(ok, mu, -np.inf)
        i, j = np.unravel_index(np.argmax(masked), masked.shape)
        if masked[i, j] > best[0]:
            best = (masked[i, j], (wp, tpfs[i, 0], tprs[0, j]))

    if best[1] is None:
        return OptimumReport(feasible=False, B_nc=B_nc, extended_baseline=extended)
    alloc = ResourceAllocation(*(float(x) for x in best[1]))
    report = make_report(params, alloc, B_nc=B_nc, extended=extended)
    return OptimumReport(
        feasible=True,
        alloc=alloc,
        mu_s=report.mu_s,
        report=report,
        B_nc=B_nc,
        extended_baseline=extended,
        constraint_slacks=_slacks(params, alloc, report, B_nc, cfg.strictness_eps, E),
    )


def disconnected_success_probabilities(params: SystemParams, Wp):
    """Relay-only (alpha_p, Gamma_p) with TpF = max(E/Wp, tau) and TpR = 0.

    Returns also the TpF used; entries where TpF would exceed T are nan.
    """
    Wp = np.asarray(Wp, dtype=float)
    E = min_bandwidth_time_product(params)
    with np.errstate(divide="ignore"):
        TpF = np.maximum(np.where(Wp > 0, E / np.where(Wp > 0, Wp, 1.0), np.inf), params.tau)
    TsF = params.T - TpF
    with np.errstate(divide="ignore", invalid="ignore"):
        r_F = np.where(TsF > 0, params.b / np.where(TsF > 0, TsF, 1.0), np.inf)
    gs = params.gamma_s
    alpha = 1.0 - outage(r_F, Wp, gs, params.sigma_s_pd)
    Gamma = 1.0 - outage(params.b / params.T, Wp, gs, params.sigma_s_pd)
    TpF = np.where(TpF <= params.T, TpF, np.nan)
    return alpha, Gamma, TpF


def optimize_disconnected(params: SystemParams, cfg: OptimizerConfig | None = None) -> OptimumReport:
    """Single-variable search over Wp for a PU whose direct link is lost.

    The PU only keeps the airtime the SU needs to decode, never retransmits,
    and the single constraint is primary stability.
    """
    cfg = cfg or OptimizerConfig()
    lam = params.lambda_p
    wps = grid(0.0, params.W, cfg.grid_wp)
    alpha, Gamma, TpF = disconnected_success_probabilities(params, wps)
    # lambda/(1-lambda) < Gamma/(1-alpha), cross-multiplied to survive lambda -> 1
    with np.errstate(invalid="ignore"):
        ok = (lam * (1.0 - alpha) < (1.0 - lam) * Gamma) & np.isfinite(TpF)
    if not ok.any():
        B_nc, extended = comparison_baseline(params)
        return OptimumReport(feasible=False, B_nc=B_nc, extended_baseline=extended)
    _, pi0, sum_pi, sum_eps = chain_aggregates_array(lam, alpha, Gamma)
    s_idle, s_F, s_R = own_data_success_array(params, wps)
    mu = np.where(ok, pi0 * s_idle + sum_pi * s_F + sum_eps * s_R, -np.inf)
    k = int(np.argmax(mu))
    alloc = ResourceAllocation(float(wps[k]), float(TpF[k]), 0.0)
    B_nc, extended = comparison_baseline(params)
    report = make_report(
        params, alloc, B_nc=B_nc, extended=extended, alpha=float(alpha[k]), Gamma=float(Gamma[k])
    )
    E = min_bandwidth_time_product(params)
    return OptimumReport(
        feasible=True,
        alloc=alloc,
        mu_s=report.mu_s,
        report=report,
        B_nc=B_nc,
        extended_baseline=extended,
        constraint_slacks={
            "stability": report.chain.eta - lam,
            "decode": alloc.Wp * alloc.TpF - E,
        },
    )
