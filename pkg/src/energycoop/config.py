"""Flat ``key = value`` run configuration.

One key per line, ``#`` starts a comment, blank lines are ignored.  Missing
keys fall back to the defaults of :class:`SystemParams`; ``tau`` defaults
to ``0.2 * T`` so overriding ``T`` alone keeps the sensing fraction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from .optimizer import OptimizerConfig
from .params import ResourceAllocation, SystemParams, validate


class ParseError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class ValidationError(ValueError):
    def __init__(self, violations: list[str]):
        self.violations = list(violations)
        super().__init__("invalid configuration: " + "; ".join(self.violations))


@dataclass(frozen=True)
class SweepSpec:
    var: str
    start: float
    stop: float
    step: float

    def values(self) -> list:
        n = int(math.floor((self.stop - self.start) / self.step + 1e-9)) + 1
        vals = [self.start + i * self.step for i in range(max(n, 0))]
        if self.var == "M":
            return [int(round(v)) for v in vals]
        # trim representation noise such as 0.30000000000000004
        return [float(f"{v:.12g}") for v in vals]


@dataclass(frozen=True)
class SimConfig:
    slots: int = 100_000
    seed: int = 0
    warmup: int = 10_000
    ideal_decode: bool = False


@dataclass(frozen=True)
class RunConfig:
    params: SystemParams = field(default_factory=SystemParams)
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)
    sweep: SweepSpec | None = None
    sim: SimConfig = field(default_factory=SimConfig)
    simulate: bool = False
    alloc: ResourceAllocation | None = None
    output: str | None = None


_PARAM_KEYS = set(SystemParams.field_names())
_GAIN_LISTS = {"sigma_s_sd_list": "sigma_s_sd", "sigma_s_pd_list": "sigma_s_pd"}
_OPT_KEYS = {"grid_wp", "grid_tpf", "grid_tpr", "grid", "strictness_eps"}
_SWEEP_KEYS = {"sweep_var", "sweep_start", "sweep_stop", "sweep_step"}
_SIM_KEYS = {"sim_slots", "sim_seed", "sim_warmup", "ideal_decode", "simulate"}
_ALLOC_KEYS = {"Wp", "TpF", "TpR"}
KNOWN_KEYS = _PARAM_KEYS | set(_GAIN_LISTS) | _OPT_KEYS | _SWEEP_KEYS | _SIM_KEYS | _ALLOC_KEYS | {"output"}


def _float(text, line):
    try:
        return float(text)
    except ValueError:
        raise ParseError(f"expected a number, got {text!r}", line) from None


def _int(text, line):
    try:
        v = float(text)
    except ValueError:
        raise ParseError(f"expected an integer, got {text!r}", line) from None
    if not v.is_integer():
        raise ParseError(f"expected an integer, got {text!r}", line)
    return int(v)


def _bool(text, line):
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ParseError(f"expected a boolean, got {text!r}", line)


def _tokens(text: str):
    seen = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ParseError(f"expected 'key = value', got {body!r}", lineno)
        key, value = (s.strip() for s in body.split("=", 1))
        if key not in KNOWN_KEYS:
            raise ParseError(f"unknown key {key!r}", lineno)
        if not value:
            raise ParseError(f"missing value for {key!r}", lineno)
        if key in seen:
            raise ParseError(f"duplicate key {key!r} (first on line {seen[key][0]})", lineno)
        seen[key] = (lineno, value)
    return seen


def parse_config(text: str) -> RunConfig:
    """Parse a run configuration; raises ParseError or ValidationError."""
    kv = _tokens(text)

    pvals = {}
    for key, (line, value) in kv.items():
        if key == "M":
            pvals["M"] = _int(value, line)
        elif key in _PARAM_KEYS:
            pvals[key] = _float(value, line)
        elif key in _GAIN_LISTS:
            target = _GAIN_LISTS[key]
            if target in kv:
                raise ParseError(f"{key} and {target} are mutually exclusive", line)
            gains = [_float(g, line) for g in value.split(",") if g.strip()]
            if not gains:
                raise ParseError(f"empty gain list for {key!r}", line)
            pvals[target] = max(gains)
    if "tau" not in pvals:
        pvals["tau"] = 0.2 * pvals.get("T", SystemParams.T)
    params = SystemParams(**pvals)
    res = validate(params)
    if not res:
        raise ValidationError(res.violations)

    opt_kw = {}
    if "grid" in kv:
        line, value = kv["grid"]
        n = _int(value, line)
        opt_kw.update(grid_wp=n, grid_tpf=n, grid_tpr=n)
    for key in ("grid_wp", "grid_tpf", "grid_tpr"):
        if key in kv:
            opt_kw[key] = _int(kv[key][1], kv[key][0])
    if "strictness_eps" in kv:
        opt_kw["strictness_eps"] = _float(kv["strictness_eps"][1], kv["strictness_eps"][0])
    try:
        optimizer = OptimizerConfig(**opt_kw)
    except ValueError as exc:
        raise ValidationError([str(exc)]) from None

    sweep = None
    present = _SWEEP_KEYS & kv.keys()
    if present:
        missing = _SWEEP_KEYS - present
        if missing:
            raise ParseError(f"sweep needs {', '.join(sorted(missing))}")
        line, var = kv["sweep_var"]
        if var not in _PARAM_KEYS:
            raise ParseError(f"sweep_var must name a system parameter, got {var!r}", line)
        sweep = SweepSpec(
            var=var,
            start=_float(kv["sweep_start"][1], kv["sweep_start"][0]),
            stop=_float(kv["sweep_stop"][1], kv["sweep_stop"][0]),
            step=_float(kv["sweep_step"][1], kv["sweep_step"][0]),
        )
        if not sweep.step > 0 or sweep.stop < sweep.start:
            raise ValidationError(["sweep needs step > 0 and stop >= start"])
        bad = []
        for v in sweep.values():
            r = validate(replace(params, **{var: v}))
            bad += [f"{var}={v}: {msg}" for msg in r.violations]
        if bad:
            raise ValidationError(bad)

    sim_kw = {}
    for key, name in (("sim_slots", "slots"), ("sim_seed", "seed"), ("sim_warmup", "warmup")):
        if key in kv:
            sim_kw[name] = _int(kv[key][1], kv[key][0])
    if "ideal_decode" in kv:
        sim_kw["ideal_decode"] = _bool(kv["ideal_decode"][1], kv["ideal_decode"][0])
    sim = SimConfig(**sim_kw)
    if sim.slots < 1 or sim.warmup < 0:
        raise ValidationError(["sim_slots >= 1 and sim_warmup >= 0 required"])
    simulate = _bool(kv["simulate"][1], kv["simulate"][0]) if "simulate" in kv else False

    alloc = None
    present = _ALLOC_KEYS & kv.keys()
    if present:
        if present != _ALLOC_KEYS:
            raise ParseError("Wp, TpF and TpR must be given together")
        alloc = ResourceAllocation(*(_float(kv[k][1], kv[k][0]) for k in ("Wp", "TpF", "TpR")))
        bad = alloc.violations(params)
        if bad:
            raise ValidationError(bad)

    output = kv["output"][1] if "output" in kv else None
    return RunConfig(
        params=params,
        optimizer=optimizer,
        sweep=sweep,
        sim=sim,
        simulate=simulate,
        alloc=alloc,
        output=output,
    )
