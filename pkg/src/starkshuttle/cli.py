"""Command-line front end.

Settings are resolved as built-in defaults, then the ``--config`` TOML file,
then command-line flags; later sources win.  Every report is deterministic
JSON (or CSV) with SI unit tags on each number.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import __version__
from .errors import ConvergenceError, StarkError, ValidationError
from .motion import coherent_evolution, field_profile, fock_oracle
from .stark import (
    DEFAULT_BUDGET,
    decoherence_error,
    decoherence_report,
    dephasing,
    min_phase,
    qubit_preset,
    threshold_time,
)
from .trajectory import (
    ion_from_well,
    make_optimal_trajectory,
    make_quintic_trajectory,
    make_ramped_trajectory,
    optimal_well,
    rowe_well,
    zeta,
)

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERICAL = 0, 2, 3

DEFAULTS = {
    "qubit": "ca40-sd",
    "polarization": "transverse",
    "L": 100e-6,
    "T": 10e-9,
    "omega": 2 * math.pi * 2.9e6,
    "budget": DEFAULT_BUDGET,
    "traj": "cubic",
    "tau": None,
    "rtol": 1e-9,
    "format": None,
    "out": None,
    "data_dir": None,
    # optimize
    "omegaT": [5.0, 10.0, 20.0, 50.0],
    "samples": 201,
    # simulate
    "widths": None,
    "dim": 64,
    "dt": None,
    # sweep
    "var": "T",
    "start": None,
    "stop": None,
    "num": 21,
    "log": False,
    "workers": 4,
    "sweep_command": "phase",
}

SWEEP_VARS = ("T", "L", "omega", "tau")


def tag(value, unit):
    if value is None:
        return {"value": None, "unit": unit}
    if isinstance(value, complex):
        return {"real": float(value.real), "imag": float(value.imag), "unit": unit}
    value = float(value)
    if not math.isfinite(value):
        return {"value": "inf" if value > 0 else ("-inf" if value < 0 else "nan"), "unit": unit}
    return {"value": value, "unit": unit}


# configuration


def load_config(path):
    p = Path(path)
    if not p.is_file():
        raise ValidationError(f"config file not found: {p}")
    try:
        data = tomllib.loads(p.read_text())
    except tomllib.TOMLDecodeError as exc:
        raise ValidationError(f"cannot parse config {p}: {exc}") from None
    unknown = set(data) - set(DEFAULTS)
    if unknown:
        raise ValidationError(f"unknown config keys: {sorted(unknown)}")
    return data


def resolve(args):
    cfg = dict(DEFAULTS)
    if args.config:
        cfg.update(load_config(args.config))
    for key in DEFAULTS:
        v = getattr(args, key, None)
        if v is not None and v is not False:
            cfg[key] = v
    for key in ("L", "T", "omega", "budget", "rtol"):
        if not (isinstance(cfg[key], (int, float)) and cfg[key] > 0 and math.isfinite(cfg[key])):
            raise ValidationError(f"{key} must be a positive number, got {cfg[key]!r}")
    if cfg["traj"] not in ("cubic", "quintic", "ramped", "rowe"):
        raise ValidationError(f"unknown trajectory {cfg['traj']!r}")
    if cfg["data_dir"] is not None and not Path(cfg["data_dir"]).is_dir():
        raise ValidationError(f"data directory not found: {cfg['data_dir']}")
    return cfg


def build_qubit(cfg):
    return qubit_preset(cfg["qubit"], polarization=cfg["polarization"], directory=cfg["data_dir"])


def build_trajectory(cfg):
    L, T, kind = cfg["L"], cfg["T"], cfg["traj"]
    if kind == "cubic":
        return make_optimal_trajectory(L, T)
    if kind == "quintic":
        return make_quintic_trajectory(L, T)
    if kind == "ramped":
        tau = cfg["tau"] if cfg["tau"] is not None else 0.05 * T
        return make_ramped_trajectory(L, T, tau)
    return ion_from_well(rowe_well(L, T, cfg["omega"]))


# commands; each returns (report dict, optional series rows)


def _inputs(cfg, keys):
    units = {"L": "m", "T": "s", "omega": "rad/s", "budget": "rad", "tau": "s", "rtol": "1"}
    out = {}
    for k in keys:
        if k in units:
            out[k] = tag(cfg[k], units[k])
        else:
            out[k] = cfg[k]
    return out


def _zeta_block(traj, cfg):
    z = zeta(traj, rtol=cfg["rtol"])
    return {
        "zeta": tag(z.zeta, "m^2/s^3"),
        "zeta_normalized": tag(z.normalized, "1"),
        "zeta_error_estimate": tag(z.quadrature_error_estimate, "m^2/s^3"),
    }


def cmd_zeta(cfg):
    traj = build_trajectory(cfg)
    return {"inputs": _inputs(cfg, ["traj", "L", "T", "omega", "tau"]), "results": _zeta_block(traj, cfg)}, None


def cmd_optimize(cfg):
    L, T, n = cfg["L"], cfg["T"], int(cfg["samples"])
    if n < 2:
        raise ValidationError("samples must be at least 2")
    t = np.linspace(0.0, T, n)
    q0 = make_optimal_trajectory(L, T).q(t)
    rows = []
    cols = ["t_s", "q0_m"]
    curves = []
    for wT in cfg["omegaT"]:
        if not wT > 0:
            raise ValidationError("omegaT values must be positive")
        curves.append(optimal_well(L, T, wT / T).s(t))
        cols.append(f"s0_m[omegaT={wT:g}]")
    for k in range(n):
        rows.append([t[k], q0[k]] + [c[k] for c in curves])
    report = {
        "inputs": _inputs(cfg, ["L", "T"]) | {"omegaT": [tag(w, "1") for w in cfg["omegaT"]]},
        "results": {"columns": cols, "units": ["s", "m"] + ["m"] * len(curves), "rows": len(rows)},
    }
    return report, (cols, rows)


def _phase_scalars(cfg):
    qubit = build_qubit(cfg)
    traj = build_trajectory(cfg)
    d = dephasing(traj, qubit, rtol=cfg["rtol"])
    z = zeta(traj, rtol=cfg["rtol"])
    mp = min_phase(qubit, cfg["L"], cfg["T"])
    return qubit, traj, d, z, mp


def cmd_phase(cfg):
    qubit, traj, d, z, mp = _phase_scalars(cfg)
    fp = field_profile(traj, qubit.species)
    res = {
        "phi": tag(d.phi, "rad"),
        "min_phase": tag(mp, "rad"),
        "phi_over_min_phase": tag(d.phi / mp if mp else None, "1"),
        "delta_chi": tag(d.delta_chi, "m^2/J"),
        "chi_i": tag(d.chi_i, "m^2/J"),
        "chi_f": tag(d.chi_f, "m^2/J"),
        "zeta": tag(d.zeta_used, "m^2/s^3"),
        "zeta_normalized": tag(z.normalized, "1"),
        "threshold_time": tag(threshold_time(qubit, cfg["L"], cfg["budget"]), "s"),
        "peak_field": tag(fp.peak, "V/m"),
        "mass": tag(qubit.species.mass, "kg"),
    }
    inputs = _inputs(cfg, ["qubit", "polarization", "traj", "L", "T", "omega", "tau", "budget"])
    return {"inputs": inputs, "results": res, "checksums": qubit.model.checksums}, None


def cmd_threshold(cfg):
    qubit = build_qubit(cfg)
    t_min = threshold_time(qubit, cfg["L"], cfg["budget"])
    res = {"threshold_time": tag(t_min, "s")}
    if math.isfinite(t_min):
        res["min_phase_at_threshold"] = tag(min_phase(qubit, cfg["L"], t_min), "rad")
    inputs = _inputs(cfg, ["qubit", "polarization", "L", "budget"])
    return {"inputs": inputs, "results": res, "checksums": qubit.model.checksums}, None


def cmd_decoherence(cfg):
    qubit = build_qubit(cfg)
    traj = build_trajectory(cfg)
    r = decoherence_report(traj, qubit, rtol=cfg["rtol"])
    channels = [
        {
            "source": c.source,
            "level": c.level,
            "M": str(c.M),
            "mi": None if c.mi is None else str(c.mi),
            "coupling": tag(c.coupling, "C m"),
            "omega": tag(c.omega, "rad/s"),
            "boundary_amplitude": tag(abs(c.amplitude.boundary), "1"),
            "full_amplitude": tag(abs(c.amplitude.full), "1"),
        }
        for c in r.channels
    ]
    res = {
        "first_order_amplitude": tag(r.first_order_amplitude, "1"),
        "first_order_total": tag(r.first_order_total, "1"),
        "second_order_amplitude": tag(r.second_order_amplitude, "1"),
        "ratio": tag(r.ratio, "1"),
        "ratio_total": tag(r.ratio_total, "1"),
        "compact_estimate": tag(r.compact_estimate, "1"),
        "compact_estimate_note": "hbar e T / (10 m |V_rn| L); the ion mass is needed for a dimensionless ratio",
        "phi": tag(r.phi, "rad"),
        "error_estimate": tag(r.error_estimate, "1"),
        "phi_squared_error": tag(decoherence_error(r.phi), "1"),
        "channels": channels,
    }
    inputs = _inputs(cfg, ["qubit", "polarization", "traj", "L", "T", "omega", "tau"])
    return {"inputs": inputs, "results": res, "checksums": qubit.model.checksums}, None


def cmd_simulate(cfg):
    qubit = build_qubit(cfg)
    species = qubit.species
    w, T = cfg["omega"], cfg["T"]
    L = cfg["L"]
    if cfg["widths"] is not None:
        L = cfg["widths"] * species.ground_state_width(w)
    well = optimal_well(L, T, w)
    cm = coherent_evolution(well, species)
    fr = fock_oracle(well, species, dim=int(cfg["dim"]), dt=cfg["dt"])
    res = {
        "fidelity": tag(fr.fidelity, "1"),
        "infidelity": tag(1.0 - fr.fidelity, "1"),
        "truncation_leakage": tag(fr.leakage, "1"),
        "max_norm_error": tag(fr.max_norm_error, "1"),
        "alpha_final": tag(fr.alpha_predicted, "1"),
        "residual_quanta": tag(cm.residual_quanta, "1"),
        "mean_x_max_deviation": tag(float(np.max(np.abs(fr.mean_x - ion_from_well(well).q(fr.t)))), "m"),
        "L_used": tag(L, "m"),
        "omegaT": tag(w * T, "1"),
        "dim": fr.dim,
    }
    inputs = _inputs(cfg, ["qubit", "L", "T", "omega"]) | {"widths": cfg["widths"], "dim": int(cfg["dim"])}
    return {"inputs": inputs, "results": res}, None


def _sweep_point(cfg, var, value):
    point = dict(cfg)
    point[var] = value
    if point["sweep_command"] == "zeta":
        rep, _ = cmd_zeta(point)
    else:
        rep, _ = cmd_phase(point)
    return {k: v["value"] for k, v in rep["results"].items() if isinstance(v, dict) and "value" in v}


def cmd_sweep(cfg):
    var = cfg["var"]
    if var not in SWEEP_VARS:
        raise ValidationError(f"sweep variable must be one of {SWEEP_VARS}")
    if cfg["sweep_command"] not in ("zeta", "phase"):
        raise ValidationError("sweep command must be 'zeta' or 'phase'")
    start, stop, num = cfg["start"], cfg["stop"], int(cfg["num"])
    if start is None or stop is None or num < 1 or not start > 0 or not stop > 0:
        raise ValidationError("sweep needs positive --start, --stop and --num >= 1")
    values = np.geomspace(start, stop, num) if cfg["log"] else np.linspace(start, stop, num)
    with ThreadPoolExecutor(max_workers=max(1, int(cfg["workers"]))) as pool:
        results = list(pool.map(lambda v: _sweep_point(cfg, var, float(v)), values))
    keys = list(results[0])
    cols = [var] + keys
    rows = [[float(v)] + [r[k] for k in keys] for v, r in zip(values, results)]
    inputs = _inputs(cfg, ["qubit", "traj", "L", "T", "omega", "tau"]) | {
        "var": var,
        "sweep_command": cfg["sweep_command"],
    }
    return {"inputs": inputs, "results": {"columns": cols, "rows": len(rows)}}, (cols, rows)


COMMANDS = {
    "zeta": cmd_zeta,
    "optimize": cmd_optimize,
    "phase": cmd_phase,
    "threshold": cmd_threshold,
    "decoherence": cmd_decoherence,
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
}
SERIES_COMMANDS = ("optimize", "sweep")


# output


def render(command, report, series, fmt):
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        if series is not None:
            cols, rows = series
            w.writerow(cols)
            for row in rows:
                w.writerow([_csv_cell(x) for x in row])
        else:
            w.writerow(["quantity", "value", "unit"])
            for k, v in report["results"].items():
                if isinstance(v, dict) and "value" in v:
                    w.writerow([k, _csv_cell(v["value"]), v["unit"]])
        return buf.getvalue()
    payload = {"command": command, "version": __version__} | report
    if series is not None:
        cols, rows = series
        payload["series"] = {"columns": cols, "data": [[_json_cell(x) for x in r] for r in rows]}
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _csv_cell(x):
    if x is None:
        return ""
    return repr(float(x)) if isinstance(x, (float, np.floating)) else str(x)


def _json_cell(x):
    x = float(x)
    return x if math.isfinite(x) else str(x)


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="TOML file with settings (flags override it)")
    common.add_argument("--format", choices=["json", "csv"])
    common.add_argument("--out", help="write output here instead of stdout")
    common.add_argument("--qubit", help="qubit preset: ca40-sd or be9-hyperfine")
    common.add_argument("--polarization", choices=["transverse", "parallel"])
    common.add_argument("--L", type=float, help="transport distance (m)")
    common.add_argument("--T", type=float, help="time of flight (s)")
    common.add_argument("--omega", type=float, help="trap angular frequency (rad/s)")
    common.add_argument("--budget", type=float, help="phase budget (rad)")
    common.add_argument("--traj", choices=["cubic", "quintic", "ramped", "rowe"])
    common.add_argument("--tau", type=float, help="ramp time for the ramped trajectory (s)")
    common.add_argument("--rtol", type=float, help="relative quadrature tolerance")
    common.add_argument("--data-dir", dest="data_dir", help="atomic data directory")

    parser = argparse.ArgumentParser(prog="starkshuttle", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("zeta", "phase", "threshold", "decoherence"):
        sub.add_parser(name, parents=[common])
    p = sub.add_parser("optimize", parents=[common])
    p.add_argument("--omegaT", type=float, nargs="+", help="dimensionless omega*T values")
    p.add_argument("--samples", type=int)
    p = sub.add_parser("simulate", parents=[common])
    p.add_argument("--widths", type=float, help="L in ground-state widths (overrides --L)")
    p.add_argument("--dim", type=int, help="Fock basis size")
    p.add_argument("--dt", type=float, help="time step (s)")
    p = sub.add_parser("sweep", parents=[common])
    p.add_argument("--var", choices=SWEEP_VARS)
    p.add_argument("--start", type=float)
    p.add_argument("--stop", type=float)
    p.add_argument("--num", type=int)
    p.add_argument("--log", action="store_true", help="geometric spacing")
    p.add_argument("--workers", type=int)
    p.add_argument("--of", dest="sweep_command", choices=["zeta", "phase"], help="report to sweep")
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve(args)
        report, series = COMMANDS[args.command](cfg)
        fmt = cfg["format"] or ("csv" if args.command in SERIES_COMMANDS else "json")
        text = render(args.command, report, series, fmt)
    except ValidationError as exc:
        print(f"error[validation]: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except ConvergenceError as exc:
        print(f"error[numerical]: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except StarkError as exc:
        print(f"error[validation]: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    if cfg["out"]:
        Path(cfg["out"]).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
