"""Slot-level Monte Carlo of the cooperation protocol.

Every slot consumes one row of ``5 + M`` uniforms from a numpy ``Generator``
(PCG64 via ``numpy.random.default_rng``), in this order:

    arrival_p, arrival_s, g_p_pd, g_s_pd, g_s_sd, g_p_s[0..M-1]

Gains are exponential by inversion, g = -sigma * log(1 - u).  A fixed row
layout keeps :func:`run` and repeated :func:`step` calls on the same
generator bit-identical.

The SU decodes the primary packet by summing the M per-antenna SNRs and
comparing against 2^(b/(TpF Wp)) - 1, so decode failures occur at their
physical rate rather than being forced to zero.  ``ideal_decode=True``
restores the always-decode idealization.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .channel import secondary_rate, snr_threshold
from .params import Feedback, PrimaryState, ResourceAllocation, SystemParams

IDLE, FWD, RET = 0, 1, 2
NO_FB, ACK, NACK = 0, 1, 2
_STATES = (PrimaryState.IDLE, PrimaryState.FORWARD, PrimaryState.RETRANSMISSION)
_FEEDBACK = (None, Feedback.ACK, Feedback.NACK)
_FB_CODE = {None: NO_FB, Feedback.ACK: ACK, Feedback.NACK: NACK}
TAIL_LEVELS = (0, 1, 2, 5, 10, 20, 50, 100, 200, 500, 1000)
BLOCK = 1 << 16


@dataclass
class NodeQueues:
    Qp: int = 0
    Qs: int = 0
    Qps: int = 0


@dataclass(frozen=True)
class SlotOutcome:
    state: PrimaryState
    primary_success: bool
    secondary_success: bool
    relay_decode: bool
    energy_p: float
    energy_s: float
    feedback: Feedback | None


@dataclass(frozen=True)
class _Setup:
    """Per-run constants: SNR thresholds per link and energies per slot."""

    thr: tuple  # ppd_F, spd_F, ppd_R, spd_R, ssd_idle, ssd_F, ssd_R, decode
    gains: tuple  # sigma for g_p_pd, g_s_pd, g_s_sd, g_p_s
    snrs: tuple  # gamma for the same four links
    e_pF: float
    e_pR: float
    e_relayF: float
    e_relayR: float
    e_own: tuple  # SU own-data energy in idle, F, R
    M: int


def _setup(params: SystemParams, alloc: ResourceAllocation) -> _Setup:
    b, T, W = params.b, params.T, params.W
    Wp, TpF, TpR = alloc.Wp, alloc.TpF, alloc.TpR
    Ws, TsF, TsR = alloc.Ws(params), alloc.TsF(params), alloc.TsR(params)

    def thr(duration, bandwidth, rate=None):
        if rate is None:
            if duration <= 0:
                return math.inf
            rate = b / duration
        return snr_threshold(rate, bandwidth)

    r_sensed = secondary_rate(PrimaryState.FORWARD, params)
    r_unsensed = secondary_rate(PrimaryState.RETRANSMISSION, params)
    thresholds = (
        thr(TpF, Wp),
        thr(TsF, Wp),
        thr(TpR, Wp),
        thr(TsR, Wp),
        thr(None, W, r_sensed),
        thr(None, Ws, r_sensed),
        thr(None, Ws, r_unsensed),
        thr(TpF, Wp),
    )
    Pp, Ps = params.Pp, params.Ps
    return _Setup(
        thr=thresholds,
        gains=(params.sigma_p_pd, params.sigma_s_pd, params.sigma_s_sd, params.sigma_p_s),
        snrs=(params.gamma_p, params.gamma_s, params.gamma_s, params.gamma_p),
        e_pF=Pp * Wp * TpF,
        e_pR=Pp * Wp * TpR,
        e_relayF=Ps * Wp * TsF,
        e_relayR=Ps * Wp * TsR,
        e_own=(Ps * W * (T - params.tau), Ps * Ws * (T - params.tau), Ps * Ws * T),
        M=params.M,
    )


def _flags(setup: _Setup, u: np.ndarray) -> list:
    """Per-slot link success flags from a (n, 5 + M) block of uniforms.

    Returns [arr_p_u, arr_s_u, ppd_F, spd_F, ppd_R, spd_R, ssd_0, ssd_F, ssd_R, dec]
    as Python lists.
    """
    with np.errstate(divide="ignore"):
        e = -np.log1p(-u[:, 2:])
    s_ppd, s_spd, s_ssd, s_ps = setup.gains
    y_ppd, y_spd, y_ssd, y_ps = setup.snrs
    beta_ppd = y_ppd * s_ppd * e[:, 0]
    beta_spd = y_spd * s_spd * e[:, 1]
    beta_ssd = y_ssd * s_ssd * e[:, 2]
    beta_ps = y_ps * s_ps * e[:, 3 : 3 + setup.M].sum(axis=1)
    t = setup.thr
    return [
        u[:, 0].tolist(),
        u[:, 1].tolist(),
        (beta_ppd >= t[0]).tolist(),
        (beta_spd >= t[1]).tolist(),
        (beta_ppd >= t[2]).tolist(),
        (beta_spd >= t[3]).tolist(),
        (beta_ssd >= t[4]).tolist(),
        (beta_ssd >= t[5]).tolist(),
        (beta_ssd >= t[6]).tolist(),
        (beta_ps >= t[7]).tolist(),
    ]


def _advance(Qp, Qs, Qps, fb, arr_p, arr_s, f, setup, ideal_decode):
    """One slot of protocol logic on plain ints.

    ``f`` is (ppd_F, spd_F, ppd_R, spd_R, ssd_0, ssd_F, ssd_R, dec).
    Returns (Qp, Qs, Qps, fb, state, p_ok, s_ok, dec, e_p, e_s).
    """
    if Qp == 0:
        state = IDLE
    elif fb == NACK:
        state = RET
    else:
        state = FWD

    p_ok = False
    dec = False
    e_p = 0.0
    e_s = 0.0
    if state == FWD:
        e_p = setup.e_pF
        dec = ideal_decode or f[7]
        Qps = 1 if dec else 0
        relay = Qps == 1 and setup.e_relayF > 0
        p_ok = f[0] or (relay and f[1])
        if relay:
            e_s += setup.e_relayF
    elif state == RET:
        e_p = setup.e_pR
        relay = Qps == 1 and setup.e_relayR > 0
        p_ok = f[2] or (relay and f[3])
        if relay:
            e_s += setup.e_relayR

    s_ok = False
    if Qs > 0:
        s_ok = f[4 + state]
        e_s += setup.e_own[state]
        if s_ok:
            Qs -= 1

    if state == IDLE:
        fb = NO_FB
    elif p_ok:
        Qp -= 1
        Qps = 0
        fb = ACK
    else:
        fb = NACK

    # late arrivals: admitted after this slot's departures
    Qp += arr_p
    Qs += arr_s
    return Qp, Qs, Qps, fb, state, p_ok, s_ok, dec, e_p, e_s


def step(
    queues: NodeQueues,
    params: SystemParams,
    alloc: ResourceAllocation,
    prev_feedback: Feedback | None,
    rng: np.random.Generator,
    ideal_decode: bool = False,
) -> tuple[NodeQueues, SlotOutcome]:
    setup = _setup(params, alloc)
    u = rng.random((1, 5 + params.M))
    col = _flags(setup, u)
    arr_p = int(col[0][0] < params.lambda_p)
    arr_s = int(col[1][0] < params.lambda_s)
    f = tuple(c[0] for c in col[2:])
    Qp, Qs, Qps, fb, state, p_ok, s_ok, dec, e_p, e_s = _advance(
        queues.Qp, queues.Qs, queues.Qps, _FB_CODE[prev_feedback], arr_p, arr_s, f, setup, ideal_decode
    )
    out = SlotOutcome(
        state=_STATES[state],
        primary_success=bool(p_ok),
        secondary_success=bool(s_ok),
        relay_decode=bool(dec),
        energy_p=e_p,
        energy_s=e_s,
        feedback=_FEEDBACK[fb],
    )
    return NodeQueues(Qp, Qs, Qps), out


@dataclass
class SimStats:
    """Counts accumulated over the measured (post warm-up) slots.

    Rates and frequencies are derived properties, so merging runs is a plain
    sum of counts.
    """

    slots: int
    rng_seed: int | None
    state_counts: dict = field(default_factory=dict)  # (state value, k) -> count
    acks_p: list = field(default_factory=lambda: [0, 0, 0])  # per state code
    acks_s: int = 0
    energy_p: float = 0.0
    energy_s: float = 0.0
    tail_counts: dict = field(default_factory=dict)  # y -> #slots with Qp > y
    params: SystemParams | None = None
    alloc: ResourceAllocation | None = None
    qp_trace: np.ndarray | None = None
    state_trace: np.ndarray | None = None
    final_queues: NodeQueues | None = None

    @property
    def occupancy(self) -> dict:
        n = self.slots
        return {key: c / n for key, c in sorted(self.state_counts.items(), key=lambda kv: (kv[0][0], kv[0][1]))}

    def _state_total(self, state: PrimaryState) -> int:
        return sum(c for (s, _), c in self.state_counts.items() if s == state.value)

    @property
    def pi0_hat(self) -> float:
        return self._state_total(PrimaryState.IDLE) / self.slots

    @property
    def sum_pi_hat(self) -> float:
        return self._state_total(PrimaryState.FORWARD) / self.slots

    @property
    def sum_eps_hat(self) -> float:
        return self._state_total(PrimaryState.RETRANSMISSION) / self.slots

    @property
    def mu_s_hat(self) -> float:
        return self.acks_s / self.slots

    @property
    def mu_p_hat(self) -> float:
        return sum(self.acks_p) / self.slots

    @property
    def B_pc_hat(self) -> float:
        """Primary ACKs per joule of primary transmit energy."""
        if self.energy_p == 0:
            return 0.0 if sum(self.acks_p) == 0 else math.inf
        return sum(self.acks_p) / self.energy_p

    @property
    def B_pc_by_state_hat(self) -> float:
        """Per-state ACK rates each divided by that state's energy per slot, summed."""
        p, a = self.params, self.alloc
        total = 0.0
        for code, dur in ((FWD, a.TpF), (RET, a.TpR)):
            if dur > 0 and self.acks_p[code]:
                total += self.acks_p[code] / self.slots / (p.Pp * a.Wp * dur)
        return total

    @property
    def queue_tail(self) -> dict:
        return {y: c / self.slots for y, c in sorted(self.tail_counts.items())}

    def merge(self, other: "SimStats") -> "SimStats":
        """Count-weighted combination of two runs of the same configuration."""
        counts = dict(self.state_counts)
        for k, c in other.state_counts.items():
            counts[k] = counts.get(k, 0) + c
        tails = {y: self.tail_counts.get(y, 0) + other.tail_counts.get(y, 0) for y in self.tail_counts}
        return SimStats(
            slots=self.slots + other.slots,
            rng_seed=None,
            state_counts=counts,
            acks_p=[x + y for x, y in zip(self.acks_p, other.acks_p)],
            acks_s=self.acks_s + other.acks_s,
            energy_p=self.energy_p + other.energy_p,
            energy_s=self.energy_s + other.energy_s,
            tail_counts=tails,
            params=self.params,
            alloc=self.alloc,
        )


def run(
    params: SystemParams,
    alloc: ResourceAllocation,
    slots: int,
    seed: int | None = 0,
    warmup: int = 10_000,
    ideal_decode: bool = False,
    keep_trace: bool = True,
) -> SimStats:
    """Simulate ``warmup + slots`` slots from empty queues; measure the last ``slots``."""
    if slots < 1:
        raise ValueError("slots must be >= 1")
    if warmup < 0:
        raise ValueError("warmup must be >= 0")
    setup = _setup(params, alloc)
    rng = np.random.default_rng(seed)
    total = warmup + slots
    lam_p, lam_s = params.lambda_p, params.lambda_s

    qp_trace = np.empty(slots, dtype=np.int64)
    st_trace = np.empty(slots, dtype=np.int8)
    acks_p = [0, 0, 0]
    acks_s = 0
    energy_p = 0.0
    energy_s = 0.0
    Qp = Qs = Qps = 0
    fb = NO_FB
    t = 0
    advance = _advance
    while t < total:
        n = min(BLOCK, total - t)
        col = _flags(setup, rng.random((n, 5 + setup.M)))
        up, us = col[0], col[1]
        rows = list(zip(*col[2:]))
        for i in range(n):
            Qp0 = Qp
            Qp, Qs, Qps, fb, state, p_ok, s_ok, _, e_p, e_s = advance(
                Qp, Qs, Qps, fb, up[i] < lam_p, us[i] < lam_s, rows[i], setup, ideal_decode
            )
            if t >= warmup:
                j = t - warmup
                qp_trace[j] = Qp0
                st_trace[j] = state
                if p_ok:
                    acks_p[state] += 1
                if s_ok:
                    acks_s += 1
                energy_p += e_p
                energy_s += e_s
            t += 1

    keys, counts = np.unique(st_trace.astype(np.int64) * (1 << 40) + qp_trace, return_counts=True)
    state_counts = {(_STATES[int(k >> 40)].value, int(k & ((1 << 40) - 1))): int(c) for k, c in zip(keys, counts)}
    tail_counts = {y: int(np.count_nonzero(qp_trace > y)) for y in TAIL_LEVELS}
    return SimStats(
        slots=slots,
        rng_seed=seed,
        state_counts=state_counts,
        acks_p=acks_p,
        acks_s=acks_s,
        energy_p=energy_p,
        energy_s=energy_s,
        tail_counts=tail_counts,
        params=params,
        alloc=alloc,
        qp_trace=qp_trace if keep_trace else None,
        state_trace=st_trace if keep_trace else None,
        final_queues=NodeQueues(Qp, Qs, Qps),
    )


def queue_drift(stats: SimStats) -> float:
    """Least-squares slope of the primary queue length per slot."""
    if stats.qp_trace is None:
        raise ValueError("run with keep_trace=True to estimate drift")
    y = stats.qp_trace.astype(float)
    x = np.arange(y.size, dtype=float)
    return float(np.polyfit(x, y, 1)[0])
