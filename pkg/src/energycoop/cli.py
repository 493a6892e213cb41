"""Command line front end: ``baseline``, ``optimize``, ``simulate``, ``sweep``.

All commands write CSV (UTF-8, header first, one row per line).  Floats are
printed with 10 significant digits.  Exit codes: 0 success, 1 invalid
configuration, 2 I/O failure.
"""

from __future__ import annotations

import argparse
import io
import math
import sys
from dataclasses import replace

from .analysis import make_report
from .baseline import noncoop_optimize
from .config import ParseError, RunConfig, ValidationError, parse_config
from .optimizer import optimize
from . import simulator

SWEEP_HEADER = (
    "sweep_value",
    "B_nc_max",
    "W_opt",
    "feasible",
    "Wp",
    "TpF",
    "TpR",
    "mu_s",
    "B_pc",
    "mu_s_hat",
    "B_pc_hat",
    "seed",
)
BASELINE_HEADER = ("lambda_p", "B_nc_max", "W_opt", "mu_p_nc", "mu_max", "feasible")
OPTIMIZE_HEADER = (
    "lambda_p",
    "B_nc_max",
    "W_opt",
    "feasible",
    "extended_baseline",
    "Wp",
    "TpF",
    "TpR",
    "mu_s",
    "B_pc",
    "eta",
    "alpha_p",
    "Gamma_p",
)
SIMULATE_HEADER = (
    "Wp",
    "TpF",
    "TpR",
    "slots",
    "seed",
    "pi0",
    "pi0_hat",
    "sum_pi",
    "sum_pi_hat",
    "sum_eps",
    "sum_eps_hat",
    "mu_s",
    "mu_s_hat",
    "mu_p_hat",
    "B_pc_hat",
    "energy_p",
    "energy_s",
)


def fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, int):
        return str(x)
    x = float(x)
    if math.isnan(x):
        return "nan"
    return f"{x:.10g}"


def to_csv(header, rows) -> str:
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(fmt(row[h]) for h in header) + "\n")
    return buf.getvalue()


def sweep_row(cfg: RunConfig, value) -> dict:
    """Analytical (and optionally simulated) results for one sweep value."""
    params = replace(cfg.params, **{cfg.sweep.var: value}) if cfg.sweep else cfg.params
    base = noncoop_optimize(params)
    opt = optimize(params, cfg.optimizer)
    nan = math.nan
    row = {
        "sweep_value": value,
        "B_nc_max": base.B_max,
        "W_opt": base.W_opt,
        "feasible": opt.feasible,
        "Wp": opt.alloc.Wp if opt.feasible else nan,
        "TpF": opt.alloc.TpF if opt.feasible else nan,
        "TpR": opt.alloc.TpR if opt.feasible else nan,
        "mu_s": opt.mu_s if opt.feasible else nan,
        "B_pc": opt.report.B_pc if opt.feasible else nan,
        "mu_s_hat": None,
        "B_pc_hat": None,
        "seed": cfg.sim.seed,
    }
    if cfg.simulate and opt.feasible:
        st = simulator.run(
            params,
            opt.alloc,
            cfg.sim.slots,
            seed=cfg.sim.seed,
            warmup=cfg.sim.warmup,
            ideal_decode=cfg.sim.ideal_decode,
            keep_trace=False,
        )
        row["mu_s_hat"] = st.mu_s_hat
        row["B_pc_hat"] = st.B_pc_hat
    return row


def run_sweep(cfg: RunConfig) -> list[dict]:
    if cfg.sweep is None:
        raise ValueError("configuration has no sweep")
    return [sweep_row(cfg, v) for v in cfg.sweep.values()]


def baseline_rows(cfg: RunConfig) -> list[dict]:
    p = cfg.params
    base = noncoop_optimize(p)
    return [
        {
            "lambda_p": p.lambda_p,
            "B_nc_max": base.B_max,
            "W_opt": base.W_opt,
            "mu_p_nc": base.mu_p_nc,
            "mu_max": base.mu_max,
            "feasible": base.feasible,
        }
    ]


def optimize_rows(cfg: RunConfig) -> list[dict]:
    p = cfg.params
    base = noncoop_optimize(p)
    opt = optimize(p, cfg.optimizer)
    nan = math.nan
    rep = opt.report
    return [
        {
            "lambda_p": p.lambda_p,
            "B_nc_max": base.B_max,
            "W_opt": base.W_opt,
            "feasible": opt.feasible,
            "extended_baseline": opt.extended_baseline,
            "Wp": opt.alloc.Wp if opt.feasible else nan,
            "TpF": opt.alloc.TpF if opt.feasible else nan,
            "TpR": opt.alloc.TpR if opt.feasible else nan,
            "mu_s": opt.mu_s,
            "B_pc": rep.B_pc if rep else nan,
            "eta": rep.chain.eta if rep else nan,
            "alpha_p": rep.chain.alpha_p if rep else nan,
            "Gamma_p": rep.chain.Gamma_p if rep else nan,
        }
    ]


def simulate_rows(cfg: RunConfig) -> list[dict]:
    """Simulate at the configured allocation, or at the optimizer's choice."""
    p = cfg.params
    alloc = cfg.alloc
    if alloc is None:
        opt = optimize(p, cfg.optimizer)
        if not opt.feasible:
            raise ValidationError(["no feasible allocation to simulate; give Wp, TpF, TpR"])
        alloc = opt.alloc
    rep = make_report(p, alloc)
    st = simulator.run(
        p, alloc, cfg.sim.slots, seed=cfg.sim.seed, warmup=cfg.sim.warmup,
        ideal_decode=cfg.sim.ideal_decode, keep_trace=False,
    )
    c = rep.chain
    return [
        {
            "Wp": alloc.Wp,
            "TpF": alloc.TpF,
            "TpR": alloc.TpR,
            "slots": st.slots,
            "seed": cfg.sim.seed,
            "pi0": c.pi0 if c.stable else math.nan,
            "pi0_hat": st.pi0_hat,
            "sum_pi": c.sum_pi if c.stable else math.nan,
            "sum_pi_hat": st.sum_pi_hat,
            "sum_eps": c.sum_eps if c.stable else math.nan,
            "sum_eps_hat": st.sum_eps_hat,
            "mu_s": rep.mu_s,
            "mu_s_hat": st.mu_s_hat,
            "mu_p_hat": st.mu_p_hat,
            "B_pc_hat": st.B_pc_hat,
            "energy_p": st.energy_p,
            "energy_s": st.energy_s,
        }
    ]


COMMANDS = {
    "baseline": (BASELINE_HEADER, baseline_rows),
    "optimize": (OPTIMIZE_HEADER, optimize_rows),
    "simulate": (SIMULATE_HEADER, simulate_rows),
    "sweep": (SWEEP_HEADER, run_sweep),
}


def _apply_overrides(cfg: RunConfig, args) -> RunConfig:
    sim, opt = cfg.sim, cfg.optimizer
    if getattr(args, "seed", None) is not None:
        sim = replace(sim, seed=args.seed)
    if getattr(args, "slots", None) is not None:
        sim = replace(sim, slots=args.slots)
    if getattr(args, "grid", None) is not None:
        try:
            opt = replace(opt, grid_wp=args.grid, grid_tpf=args.grid, grid_tpr=args.grid)
        except ValueError as exc:
            raise ValidationError([str(exc)]) from None
    if sim.slots < 1:
        raise ValidationError(["slots must be >= 1"])
    out = getattr(args, "output", None) or cfg.output
    return replace(cfg, sim=sim, optimizer=opt, output=out, simulate=cfg.simulate or getattr(args, "simulate", False))


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-c", "--config", default=argparse.SUPPRESS, help="key = value config file")
    common.add_argument("-o", "--output", default=argparse.SUPPRESS, help="CSV output path (default stdout)")
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    common.add_argument("--grid", type=int, default=argparse.SUPPRESS, help="grid points per dimension")
    common.add_argument("--slots", type=int, default=argparse.SUPPRESS, help="measured simulation slots")
    parser = argparse.ArgumentParser(prog="energycoop", description=__doc__.splitlines()[0], parents=[common])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name, parents=[common])
        if name == "sweep":
            sp.add_argument("--simulate", action="store_true", default=argparse.SUPPRESS,
                            help="also simulate each feasible optimum")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        text = ""
        if getattr(args, "config", None):
            with open(args.config, encoding="utf-8") as fh:
                text = fh.read()
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        cfg = _apply_overrides(parse_config(text), args)
        header, producer = COMMANDS[args.command]
        if args.command == "sweep" and cfg.sweep is None:
            raise ValidationError(["sweep needs sweep_var, sweep_start, sweep_stop, sweep_step"])
        csv_text = to_csv(header, producer(cfg))
    except (ParseError, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    try:
        if cfg.output:
            with open(cfg.output, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(csv_text)
        else:
            sys.stdout.write(csv_text)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
