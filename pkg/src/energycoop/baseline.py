"""Non-cooperative benchmark: the PU transmits alone over the whole slot."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .channel import outage
from .params import SystemParams


@dataclass(frozen=True)
class BaselineReport:
    W_opt: float  # optimal transmission bandwidth (Hz)
    mu_p_nc: float  # service rate at W_opt (packets/slot)
    B_max: float  # packets per joule at W_opt
    feasible: bool
    mu_max: float  # service rate at the full band


def noncoop_service_rate(params: SystemParams, Wb: float) -> float:
    """Probability that a lone primary transmission over ``Wb`` Hz succeeds."""
    if Wb <= 0:
        return 0.0
    return 1.0 - outage(params.b / params.T, Wb, params.gamma_p, params.sigma_p_pd)


def max_service_rate(params: SystemParams) -> float:
    return noncoop_service_rate(params, params.W)


def min_bandwidth(params: SystemParams, lambda_p: float | None = None) -> float:
    """Smallest bandwidth whose service rate equals ``lambda_p``."""
    lam = params.lambda_p if lambda_p is None else lambda_p
    if lam <= 0:
        return 0.0
    mean = params.gamma_p * params.sigma_p_pd
    if lam >= 1 or mean <= 0:
        return math.inf
    return params.b / (params.T * math.log2(1.0 - mean * math.log(lam)))


def noncoop_optimize(params: SystemParams) -> BaselineReport:
    """Bandwidth minimizing primary energy subject to queue stability.

    Maximizing lambda_p / (Pp T W) over W subject to lambda_p <= mu(W) is the
    same as taking the smallest W meeting the stability constraint.
    """
    lam = params.lambda_p
    mu_max = max_service_rate(params)
    if lam > mu_max:
        return BaselineReport(math.nan, mu_max, 0.0, False, mu_max)
    if lam == 0:
        return BaselineReport(0.0, 0.0, 0.0, True, mu_max)
    W_opt = min(min_bandwidth(params, lam), params.W)
    B = lam / (params.Pp * params.T * W_opt)
    return BaselineReport(W_opt, noncoop_service_rate(params, W_opt), B, True, mu_max)


def extended_baseline(params: SystemParams) -> float:
    """Packets per joule of a saturated lone PU on the full band.

    Used as the comparison point when the lone PU cannot be stable.
    """
    return max_service_rate(params) / (params.Pp * params.T * params.W)
