"""Shared domain types: system constants, resource split, PU state.

Units are fixed: bits, Hz, seconds, W/Hz. Arrival rates are Bernoulli
means in packets per slot.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, fields, replace


class DomainError(ValueError):
    """Raised when a formula is evaluated outside its domain."""


class PrimaryState(enum.Enum):
    IDLE = "idle"
    FORWARD = "F"
    RETRANSMISSION = "R"


class Feedback(enum.Enum):
    ACK = "ACK"
    NACK = "NACK"


@dataclass(frozen=True)
class SystemParams:
    """Physical and traffic constants of one PU/SU band.

    Only the best SU antenna gains enter any formula, so ``sigma_s_sd`` and
    ``sigma_s_pd`` hold the maximum expected gain over the array.
    Defaults are the common numerical-study values with ``M = 7`` and
    ``Ps = 1e-10``.
    """

    b: float = 2000.0
    W: float = 10e6
    T: float = 4e-4
    tau: float = 0.2 * 4e-4
    N0: float = 1e-11
    Pp: float = 1e-10
    Ps: float = 1e-10
    M: int = 7
    Q_target: float = 1e-8
    sigma_p_pd: float = 0.2
    sigma_s_sd: float = 0.1
    sigma_s_pd: float = 0.5
    sigma_p_s: float = 1.0
    lambda_p: float = 0.5
    lambda_s: float = 1.0

    @property
    def gamma_p(self) -> float:
        """Received SNR at unit gain for primary transmissions."""
        return self.Pp / self.N0

    @property
    def gamma_s(self) -> float:
        """Received SNR at unit gain for any SU antenna."""
        return self.Ps / self.N0

    def with_(self, **changes) -> "SystemParams":
        return replace(self, **changes)

    @classmethod
    def field_names(cls) -> list[str]:
        return [f.name for f in fields(cls)]


@dataclass(frozen=True)
class ResourceAllocation:
    """The decision triple: primary sub-band and primary airtime per state."""

    Wp: float
    TpF: float
    TpR: float

    def Ws(self, params: SystemParams) -> float:
        return params.W - self.Wp

    def TsF(self, params: SystemParams) -> float:
        return params.T - self.TpF

    def TsR(self, params: SystemParams) -> float:
        return params.T - self.TpR

    def violations(self, params: SystemParams) -> list[str]:
        out = []
        if not 0 <= self.Wp <= params.W:
            out.append("Wp in [0, W]")
        if not params.tau <= self.TpF <= params.T:
            out.append("TpF in [tau, T]")
        if not 0 <= self.TpR <= params.T:
            out.append("TpR in [0, T]")
        return out


@dataclass
class ValidationResult:
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok

    def bad_fields(self) -> set[str]:
        return {v.split()[0] for v in self.violations}


def _finite(x) -> bool:
    try:
        return math.isfinite(x)
    except TypeError:
        return False


def validate(params: SystemParams) -> ValidationResult:
    """Check every invariant of ``params``; never raises.

    Each violation is reported as ``"<field> <constraint>"``.
    """
    v = []
    for name in ("b", "W", "T", "N0", "Pp", "Ps"):
        x = getattr(params, name)
        if not (_finite(x) and x > 0):
            v.append(f"{name} > 0")
    M = params.M
    if isinstance(M, bool) or not isinstance(M, int) or M < 1:
        v.append("M >= 1 (integer)")
    tau, T = params.tau, params.T
    if not _finite(tau) or tau < 0:
        v.append("tau >= 0")
    elif _finite(T) and not tau < T:
        v.append("tau < T")
    if not (_finite(params.Q_target) and 0 < params.Q_target < 1):
        v.append("Q_target in (0,1)")
    for name in ("sigma_p_pd", "sigma_s_sd", "sigma_s_pd", "sigma_p_s"):
        x = getattr(params, name)
        if not (_finite(x) and x >= 0):
            v.append(f"{name} >= 0")
    for name in ("lambda_p", "lambda_s"):
        x = getattr(params, name)
        if not (_finite(x) and 0 <= x <= 1):
            v.append(f"{name} in [0,1]")
    return ValidationResult(v)
