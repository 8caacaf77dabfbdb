"""Command line entry point.

    cavityz2 levels            --preset fig2
    cavityz2 analytic steady   --preset fig1c --format csv
    cavityz2 analytic sweep    --preset fig1d --jobs 4 --out fig1d.json
    cavityz2 analytic exponents
    cavityz2 mf integrate      --config run.json
    cavityz2 mf protocol       --preset fig3b
    cavityz2 mf threshold      --preset fig2
    cavityz2 mf phasemap       --preset fig3d --jobs 4
    cavityz2 oracle compare    --config oracle.json

``--config`` is overlaid on ``--preset`` when both are given.  Exit codes:
0 success, 2 configuration error, 3 numerical failure, 4 inconclusive
classification.
"""
from __future__ import annotations

import argparse
import sys
from fractions import Fraction

import numpy as np

from . import __version__
from .analysis import (
    RELAXED,
    critical_point,
    field_exponent,
    fit_exponent,
    locate_threshold,
    order_parameter_exponent,
    relaxation_exponent,
    relaxation_scan,
    steady_map,
)
from .analytic import SystemParams, derive_two_level, imbalance_steady, phase_diagram, steady_states
from .config import SCHEMA_VERSION, ConfigError, merge, preset_document, preset_names, read_document, validate
from .errors import CavityError, InconclusiveError
from .meanfield import MeanFieldState, ProtocolConfig, integrate, run_protocol
from .oracle import compare_with_meanfield
from .output import FORMATS, Record, emit, sweep_in_MHz, trajectory_in_ms

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_INCONCLUSIVE = 0, 2, 3, 4


def _resolve(args):
    """Preset document overlaid with the config file, validated."""
    doc = None
    if args.preset:
        if args.preset not in preset_names():
            raise ConfigError(f"unknown preset '{args.preset}' (available: {', '.join(preset_names())})",
                              field="preset")
        doc = preset_document(args.preset)
    if args.config:
        user = read_document(args.config)
        doc = user if doc is None else merge(doc, user)
    if doc is None:
        doc = {"schema_version": SCHEMA_VERSION}
    if args.preset:
        doc["preset"] = args.preset
    return validate(doc)


def _mhz(cfg):
    return cfg.units == "MHz" and cfg.kappa_MHz is not None


def _report_trajectory(tr, cfg):
    if cfg.kappa_MHz is not None and cfg.raw.get("integrate", {}).get("time_unit") == "ms":
        return trajectory_in_ms(tr, cfg.kappa_MHz)
    return tr


# -- handlers ---------------------------------------------------------------------

def cmd_levels(cfg, args):
    cfg.require("scheme")
    s = cfg.scheme
    rows = {"m": [], "mp": [], "q": [], "cg_sq": [], "cg_sq_exact": [], "branching": [],
            "branching_exact": []}
    for (m, mp), c2 in sorted(s.coupling_sq.items()):
        b = s.branching_exact.get((m, mp), Fraction(0))
        rows["m"].append(str(m))
        rows["mp"].append(str(mp))
        rows["q"].append(str(mp - m))
        rows["cg_sq"].append(float(c2))
        rows["cg_sq_exact"].append(str(c2))
        rows["branching"].append(float(b))
        rows["branching_exact"].append(str(b))
    fields = {"F": str(s.F), "Fp": str(s.Fp), "n_ground": s.n_ground, "n_excited": s.n_excited,
              "ground_levels": [str(m) for m in s.ground_levels],
              "excited_levels": [str(m) for m in s.excited_levels]}
    return Record("levels", fields, rows)


def cmd_analytic_steady(cfg, args):
    if "alpha" in cfg.axes:
        alphas = cfg.axes["alpha"]
        beta_nl = 0.0
    else:
        cfg.require("params")
        d = derive_two_level(cfg.params)
        alphas, beta_nl = np.array([d.alpha]), d.beta_nl
    rows = {"alpha": [], "P_mid": [], "P_upper": [], "P_lower": [], "Ip": [], "stability_mid": [],
            "stability_upper": []}
    for a in alphas:
        roots = steady_states(float(a), beta_nl)
        rows["alpha"].append(float(a))
        rows["P_mid"].append(float(np.real(roots[0].P)))
        if len(roots) == 3 and roots[1].is_real:
            rows["P_upper"].append(float(np.real(roots[1].P)))
            rows["P_lower"].append(float(np.real(roots[2].P)))
            rows["stability_upper"].append(roots[1].stability)
        else:
            rows["P_upper"].append(float("nan"))
            rows["P_lower"].append(float("nan"))
            rows["stability_upper"].append(roots[1].stability if len(roots) == 3 else "none")
        rows["stability_mid"].append(roots[0].stability)
        rows["Ip"].append(float(max(imbalance_steady(float(a)))))
    return Record("analytic_steady", {"beta_nl": beta_nl, "n": len(alphas)}, rows)


def cmd_analytic_sweep(cfg, args):
    for k in ("delta_p", "g"):
        if k not in cfg.axes:
            raise ConfigError(f"analytic sweep needs sweep.{k}", field=f"sweep.{k}")
    template = cfg.params if cfg.params is not None else SystemParams(g0=1.0, N=1.0)
    res = phase_diagram(cfg.axes["delta_p"], cfg.axes["g"], template, jobs=args.jobs)
    return sweep_in_MHz(res, cfg.kappa_MHz) if _mhz(cfg) else res


def cmd_analytic_exponents(cfg, args):
    template = cfg.params if cfg.params is not None else SystemParams(g0=1.0, N=1.0)
    if not template.eta_plus > 0:
        template = template.replace(eta_plus=1.0, eta_minus=1.0)
    g = float(cfg.axes["g"][0]) if "g" in cfg.axes else 6.0
    p = critical_point(g, template)
    fields = {"g": g, "delta_p_critical": p.delta_p}
    for rep in (order_parameter_exponent(), relaxation_exponent(p), field_exponent(p)):
        fields[rep.name] = {"exponent": rep.fit.exponent, "stderr": rep.fit.stderr, "r2": rep.fit.r2,
                            "prefactor": rep.fit.prefactor, "n": rep.fit.n, "expected": rep.expected,
                            **rep.detail}
    return Record("exponents", fields)


def cmd_mf_integrate(cfg, args):
    cfg.require("scheme", "params", "populations", "t_end")
    state = MeanFieldState.from_populations(cfg.scheme, cfg.populations)
    tr = integrate(state, cfg.params, cfg.scheme, cfg.loss, cfg.t_end, cfg.options,
                   n_samples=cfg.n_samples, t_start=cfg.start_time, keep_rho=False)
    return _report_trajectory(tr, cfg)


def cmd_mf_protocol(cfg, args):
    cfg.require("scheme", "params", "populations", "t_end", "prepump_mode")
    pc = ProtocolConfig(cfg.params, cfg.scheme, cfg.populations, cfg.prepump_mode,
                        cfg.prepump_duration, cfg.t_end, loss=cfg.loss, options=cfg.options,
                        n_samples=cfg.n_samples, start_time=cfg.start_time)
    return _report_trajectory(run_protocol(pc), cfg)


def cmd_mf_threshold(cfg, args):
    cfg.require("scheme", "params", "bracket")
    r = locate_threshold(cfg.params, cfg.scheme, cfg.bracket, cfg.resolution, cfg.t_end,
                         cfg.threshold, cfg.options, cfg.populations)
    fields = {"delta_th": r.delta_th, "bracket": list(r.bracket), "resolution": r.resolution,
              "t_end": r.t_end, "evaluations": r.evaluations, "relaxing_side": r.relaxing_side,
              "monotone": r.monotone, "units": "kappa"}
    if cfg.kappa_MHz is not None:
        fields["delta_th_MHz"] = r.delta_th * cfg.kappa_MHz
    table = None
    if "delta_p" in cfg.axes:
        deltas = cfg.axes["delta_p"]
        scan = relaxation_scan(cfg.params, cfg.scheme, deltas, cfg.t_end, cfg.threshold,
                               cfg.options, jobs=args.jobs)
        table = {"delta_p": [float(d) for d in deltas],
                 "distance": [float(r.delta_th - d) for d in deltas],
                 "status": [s.status for s in scan],
                 "tau": [float(s.tau) if s.tau is not None else float("nan") for s in scan]}
        x = np.array(table["distance"])
        y = np.array(table["tau"])
        ok = np.array([s.status == RELAXED for s in scan]) & (x > 0) & np.isfinite(y) & (y > 0)
        if cfg.fit_window is not None:
            fit = fit_exponent(x[ok], y[ok], cfg.fit_window)
            fields["tau_fit"] = {"exponent": -fit.exponent, "stderr": fit.stderr, "r2": fit.r2,
                                 "n": fit.n, "window": list(cfg.fit_window)}
    return Record("threshold", fields, table)


def cmd_mf_phasemap(cfg, args):
    cfg.require("scheme", "params")
    for k in ("delta_p", "s"):
        if k not in cfg.axes:
            raise ConfigError(f"mf phasemap needs sweep.{k}", field=f"sweep.{k}")
    res = steady_map(cfg.params, cfg.scheme, cfg.axes["delta_p"], cfg.axes["s"], cfg.t_end,
                     cfg.options, jobs=args.jobs)
    return sweep_in_MHz(res, cfg.kappa_MHz) if _mhz(cfg) else res


def cmd_oracle_compare(cfg, args):
    cfg.require("scheme", "params", "populations")
    o = cfg.oracle or validate(merge(cfg.raw, {"oracle": {}})).oracle
    if o["n_atoms"] != 1:
        raise ConfigError("oracle compare runs one atom; set oracle.n_atoms to 1", field="oracle.n_atoms")
    out = compare_with_meanfield(cfg.scheme, cfg.params, cfg.populations, o["t_end"], o["n_samples"],
                                 o["photon_cutoff"])
    ex, mf = out["exact"], out["meanfield"]
    table = {"t": ex.times.tolist()}
    for i, m in enumerate(cfg.scheme.ground_levels):
        table[f"P_{m}_exact"] = ex.populations[:, i].tolist()
        table[f"P_{m}_mf"] = mf.populations[:, i].tolist()
    table["aP2_exact"] = ex.n_plus.tolist()
    table["aP2_mf"] = (np.abs(mf.a_plus) ** 2).tolist()
    table["aM2_exact"] = ex.n_minus.tolist()
    table["aM2_mf"] = (np.abs(mf.a_minus) ** 2).tolist()
    return Record("oracle_compare", {"deviations": out["deviations"], "photon_cutoff": o["photon_cutoff"],
                                     "t_end": o["t_end"]}, table)


COMMANDS = {
    ("levels", None): cmd_levels,
    ("analytic", "steady"): cmd_analytic_steady,
    ("analytic", "sweep"): cmd_analytic_sweep,
    ("analytic", "exponents"): cmd_analytic_exponents,
    ("mf", "integrate"): cmd_mf_integrate,
    ("mf", "protocol"): cmd_mf_protocol,
    ("mf", "threshold"): cmd_mf_threshold,
    ("mf", "phasemap"): cmd_mf_phasemap,
    ("oracle", "compare"): cmd_oracle_compare,
}


def _common(p):
    p.add_argument("--config", metavar="PATH", help="JSON run configuration")
    p.add_argument("--preset", metavar="NAME", help="built-in configuration (see 'presets')")
    p.add_argument("--out", metavar="PATH", help="output file (default: stdout)")
    p.add_argument("--format", choices=FORMATS, default="json")
    p.add_argument("--jobs", type=int, default=1, metavar="N", help="worker processes for sweeps")


def build_parser():
    parser = argparse.ArgumentParser(prog="cavityz2", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"cavityz2 {__version__}")
    sub = parser.add_subparsers(dest="group", required=True)
    _common(sub.add_parser("levels", help="Clebsch-Gordan and branching tables"))
    sub.add_parser("presets", help="list built-in configurations")
    for group, actions in (("analytic", ("steady", "sweep", "exponents")),
                           ("mf", ("integrate", "protocol", "threshold", "phasemap")),
                           ("oracle", ("compare",))):
        g = sub.add_parser(group)
        gs = g.add_subparsers(dest="action", required=True)
        for a in actions:
            _common(gs.add_parser(a))
    return parser


def _write(data: bytes, path):
    if path:
        with open(path, "wb") as fh:
            fh.write(data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.group == "presets":
        for name in preset_names():
            print(f"{name:20s} {preset_document(name).get('description', '')}")
        return EXIT_OK
    try:
        if args.jobs < 1:
            raise ConfigError("--jobs must be at least 1", field="--jobs")
        cfg = _resolve(args)
        handler = COMMANDS[(args.group, getattr(args, "action", None))]
        result = handler(cfg, args)
        _write(emit(result, args.format, cfg.raw), args.out)
    except ConfigError as e:
        print(f"cavityz2: configuration error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except InconclusiveError as e:
        print(f"cavityz2: inconclusive: {e}", file=sys.stderr)
        return EXIT_INCONCLUSIVE
    except (CavityError, ArithmeticError) as e:
        print(f"cavityz2: numerical failure: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
