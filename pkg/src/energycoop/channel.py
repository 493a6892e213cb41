"""Rayleigh block-fading link closed forms.

A link j -> rho is in outage when its rate exceeds W log2(1 + beta) with
beta = gamma * g and g exponential with mean sigma.  All functions here
are pure; ``outage`` broadcasts over numpy arrays so the optimizer can
evaluate whole grid slices at once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .params import DomainError, PrimaryState, ResourceAllocation, SystemParams
from .special import gammainc_lower

LN2 = math.log(2.0)
MAX_SPECTRAL_EFFICIENCY = 1024.0  # 2**x overflows a double beyond this


@dataclass(frozen=True)
class LinkSpec:
    rate: float  # bit/s
    bandwidth: float  # Hz
    snr: float  # P/N0 at unit gain
    gain: float  # expected channel gain

    def __post_init__(self):
        if not self.rate > 0:
            raise ValueError("rate must be positive")
        if self.bandwidth < 0 or self.gain < 0 or self.snr < 0:
            raise ValueError("bandwidth, snr and gain must be nonnegative")


def snr_threshold(rate, bandwidth):
    """Smallest instantaneous SNR supporting ``rate`` over ``bandwidth``: 2^(r/W) - 1.

    Returns inf where the link cannot carry the rate at all.
    """
    rate = np.asarray(rate, dtype=float)
    bandwidth = np.asarray(bandwidth, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        x = rate / bandwidth
        dead = (bandwidth <= 0) | ~np.isfinite(x) | (x > MAX_SPECTRAL_EFFICIENCY)
        thr = np.expm1(LN2 * np.where(dead, 0.0, x))
    thr = np.where(dead, np.inf, thr)
    return thr if thr.ndim else float(thr)


def outage(rate, bandwidth, snr, gain):
    """Outage probability 1 - exp(-(2^(rate/bandwidth) - 1) / (gain * snr)).

    Zero bandwidth, zero mean SNR, infinite rate or a spectral efficiency
    above 1024 bit/s/Hz all give exactly 1.
    """
    thr = np.asarray(snr_threshold(rate, bandwidth))
    mean_snr = np.asarray(gain, dtype=float) * np.asarray(snr, dtype=float)
    thr, mean_snr = np.broadcast_arrays(thr, mean_snr)
    dead = ~np.isfinite(thr) | (mean_snr <= 0)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        p = -np.expm1(-np.where(dead, 0.0, thr) / np.where(dead, 1.0, mean_snr))
    p = np.where(dead, 1.0, np.clip(p, 0.0, 1.0))
    return p if p.ndim else float(p)


def outage_probability(link: LinkSpec) -> float:
    return outage(link.rate, link.bandwidth, link.snr, link.gain)


def secondary_rate(state: PrimaryState, params: SystemParams) -> float:
    """SU own-data rate: b/(T - tau) after sensing, b/T when no sensing is needed."""
    if state is PrimaryState.RETRANSMISSION:
        return params.b / params.T
    if not params.tau < params.T:
        raise DomainError("tau must be smaller than T")
    return params.b / (params.T - params.tau)


def decode_threshold(params: SystemParams, alloc: ResourceAllocation) -> float:
    if alloc.Wp <= 0 or alloc.TpF <= 0:
        raise DomainError("primary forward transmission has zero bandwidth-time")
    return snr_threshold(params.b / alloc.TpF, alloc.Wp)


def separate_decoding_bound(params: SystemParams, alloc: ResourceAllocation) -> float:
    """[1 - exp(-x / (sigma gamma))]^M: failure when each antenna decodes on its own."""
    x = decode_threshold(params, alloc)
    mean = params.sigma_p_s * params.gamma_p
    if not math.isfinite(x) or mean <= 0:
        return 1.0
    return (-math.expm1(-x / mean)) ** params.M


def mrc_decode_failure(params: SystemParams, alloc: ResourceAllocation, method: str = "exact") -> float:
    """Probability that the SU fails to decode the primary packet after MRC.

    With equal per-antenna gains the combined SNR is Erlang-M, so the
    failure probability is the regularized lower incomplete gamma
    P(M, x / (sigma_p_s gamma_p)).  ``method="bound"`` returns the
    separate-decoding upper bound instead.
    """
    if method == "bound":
        return separate_decoding_bound(params, alloc)
    if method != "exact":
        raise ValueError(f"unknown method {method!r}")
    x = decode_threshold(params, alloc)
    mean = params.sigma_p_s * params.gamma_p
    if not math.isfinite(x) or mean <= 0:
        return 1.0
    return gammainc_lower(float(params.M), x / mean)


def min_bandwidth_time_product(params: SystemParams) -> float:
    """Minimum Wp*TpF (Hz s) keeping separate-decoding failure at the SU below Q_target."""
    mean = params.sigma_p_s * params.gamma_p
    if not 0 < params.Q_target < 1 or mean <= 0:
        raise DomainError("need 0 < Q_target < 1 and positive p->s mean SNR")
    q = params.Q_target ** (1.0 / params.M)
    # log2(1 - mean * ln(1 - q)), with ln(1 - q) via log1p for tiny q
    return params.b / math.log2(1.0 - mean * math.log1p(-q))
