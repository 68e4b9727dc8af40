"""Command-line entry point: ``tcfsim <command> [options]``.

Every command writes comma-separated rows preceded by a ``#`` comment that
carries the tool version and a hash of the resolved configuration.
Exit status: 0 success, 1 analysis error, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import io
import logging
import sys

from . import __version__, oracles
from .analysis import (
    design_tcf,
    l1_sensitivity,
    modal_analysis,
    optimize_ratio,
    ratio_evaluator,
    ratio_sweep,
)
from .config import parse_config
from .errors import ConfigurationError, DomainError, TcfsimError
from .layout import build_frame_layout
from .materials import material_at_temperature

DEFAULT_RATIOS = (530 / 560, 540 / 560, 550 / 560)
UM = 1e6


def fmt(x) -> str:
    if isinstance(x, str):
        return x
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, int):
        return str(x)
    return format(float(x), ".10g")


class Table:
    def __init__(self, command, cfg, columns):
        self.buf = io.StringIO()
        self.buf.write(f"# tcfsim {__version__} command={command} config={cfg.digest}\n")
        self.buf.write(",".join(columns) + "\n")

    def row(self, *values):
        self.buf.write(",".join(fmt(v) for v in values) + "\n")

    def trailer(self, **values):
        self.buf.write("# " + ",".join(f"{k}={fmt(v)}" for k, v in values.items()) + "\n")

    def getvalue(self):
        return self.buf.getvalue()


def cmd_modal(cfg, args):
    T = cfg.material.t_ref if args.temperature is None else args.temperature
    model = build_frame_layout(cfg.design, cfg.material, cfg.analysis.elements_per_beam)
    rep = modal_analysis(model, cfg.material, T, cfg.design.anchor_model, cfg.analysis.n_modes)
    t = Table("modal", cfg, ["mode", "f_hz", "resonator_ke_fraction", "resonator_mode"])
    for i, f in enumerate(rep.modes.frequencies):
        t.row(i, f, rep.fractions[i], i == rep.index)
    sep = rep.separation
    t.trailer(
        temperature_c=T,
        resonator_index=rep.index,
        f_resonator_hz=rep.frequency,
        separation_hz="nan" if sep is None else sep,
    )
    return t


def cmd_tcf(cfg, args):
    a = cfg.analysis
    rep = design_tcf(cfg.design, cfg.material, a.t_range, a.n_temperatures, a.elements_per_beam, a.n_modes)
    t = Table("tcf", cfg, ["T_c", "f_hz"])
    for T, f in rep.samples:
        t.row(T, f)
    t.trailer(slope_ppm_per_c=rep.slope, max_residual_ppm=rep.max_fit_residual,
              f_ref_hz=rep.f_ref, mode_jump=rep.mode_jump)
    return t


def cmd_sweep(cfg, args):
    a = cfg.analysis
    ratios = args.ratios if args.ratios else DEFAULT_RATIOS
    res = ratio_sweep(cfg.design, cfg.material, ratios, a.t_range, a.n_temperatures,
                      a.elements_per_beam, a.n_modes, workers=args.workers)
    t = Table("sweep", cfg, ["ratio", "f_at_tref_hz", "tcf_ppm_per_c"])
    for r in res.rows:
        t.row(r.ratio, r.f_at_tref, r.tcf)
    lo, hi = res.bracket if res.bracket else ("nan", "nan")
    t.trailer(direction=res.direction, zero_bracket_lo=lo, zero_bracket_hi=hi)
    return t


def cmd_optimize(cfg, args):
    a, o = cfg.analysis, cfg.optimize
    ev = ratio_evaluator(cfg.design, cfg.material, a.t_range, a.n_temperatures, a.elements_per_beam, a.n_modes)
    res = optimize_ratio(ev, (o.ratio_min, o.ratio_max), o.tol_ratio, o.tol_tcf)
    t = Table("optimize", cfg,
              ["ratio_star", "tcf_star_ppm", "evaluations", "bracket_lo", "bracket_hi", "sign_change"])
    t.row(res.ratio, res.tcf, res.evaluations, res.bracket_lo, res.bracket_hi, res.sign_change)
    t.trailer(l1_star_um=res.ratio * cfg.design.l2 * UM, converged=res.converged)
    return t


def cmd_oracle(cfg, args):
    d, m = cfg.design, cfg.material
    T = cfg.analysis.t_max if args.temperature is None else args.temperature
    E, _ = material_at_temperature(m, T)
    I = d.thickness * d.w_res**3 / 12
    f1 = oracles.cc_beam_frequency(d.l2, d.w_res, d.thickness, m.e_ref, m.rho)
    f2 = oracles.cc_beam_frequency(d.l2, d.w_res, d.thickness, m.e_ref, m.rho, oracles.LAMBDA2)
    t = Table("oracle", cfg, ["quantity", "value", "unit"])
    t.row("cc_beam_frequency", f1, "Hz")
    t.row("cc_beam_second_frequency", f2, "Hz")
    t.row("euler_critical_load", oracles.euler_critical_load(m.e_ref, I, d.l2), "N")
    t.row("uncompensated_tcf", oracles.uncompensated_tcf(m.tce), "ppm/degC")
    t.row("constrained_bar_force", oracles.constrained_bar_force(E, d.w_res * d.thickness, m.cte, T - m.t_ref), "N")
    t.row("resonator_length", d.l2 * UM, "um")
    t.trailer(temperature_c=T)
    return t


def cmd_sensitivity(cfg, args):
    a = cfg.analysis
    s = l1_sensitivity(cfg.design, cfg.material, a.t_range, a.n_temperatures, a.elements_per_beam,
                       a.n_modes, step=args.step_um / UM)
    t = Table("sensitivity", cfg, ["l1_um", "tcf_ppm_per_c", "dtcf_ppm_per_c_per_10um"])
    t.row(s.l1 * UM, s.tcf, s.dtcf_dl1 * 10e-6)
    return t


COMMANDS = {
    "modal": (cmd_modal, "frequencies and resonator-mode classification at one temperature"),
    "tcf": (cmd_tcf, "frequency versus temperature and fitted TCF"),
    "sweep": (cmd_sweep, "TCF versus compensating/resonator length ratio"),
    "optimize": (cmd_optimize, "length ratio that nulls the TCF"),
    "oracle": (cmd_oracle, "closed-form reference values"),
    "sensitivity": (cmd_sensitivity, "finite-difference dTCF/dl1 per 10 um"),
}


def _ratios(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad ratio list {text!r}") from None


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-c", "--config", help="TOML configuration file")
    common.add_argument("-o", "--output", help="write the table here instead of stdout")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="tcfsim", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"tcfsim {__version__}")
    sub = p.add_subparsers(dest="command", required=True, metavar="command")
    parsers = {name: sub.add_parser(name, parents=[common], help=h) for name, (_, h) in COMMANDS.items()}
    parsers["modal"].add_argument("-T", "--temperature", type=float, help="degC (default t_ref)")
    parsers["oracle"].add_argument("-T", "--temperature", type=float,
                                   help="degC for the constrained-bar force (default t_max)")
    parsers["sweep"].add_argument("--ratios", type=_ratios, help="comma-separated l1/l2 values")
    parsers["sweep"].add_argument("-j", "--workers", type=int, default=1)
    parsers["sensitivity"].add_argument("--step-um", type=float, default=1.0)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = parse_config(args.config)
    except ConfigurationError as exc:
        print(f"tcfsim: {exc}", file=sys.stderr)
        return 2
    if getattr(args, "workers", 1) < 1:
        print("tcfsim: --workers must be >= 1", file=sys.stderr)
        return 2
    func, _ = COMMANDS[args.command]
    try:
        table = func(cfg, args)
    except (ConfigurationError, DomainError) as exc:
        print(f"tcfsim: {exc}", file=sys.stderr)
        return 2
    except TcfsimError as exc:
        print(f"tcfsim: analysis failed: {exc}", file=sys.stderr)
        return 1
    text = table.getvalue()
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
