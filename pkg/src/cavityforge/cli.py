"""Command-line front end: dispersion maps, coupling reports, data fits,
design sweeps and synthetic-data generation.

Exit codes: 0 success, 2 input error, 3 physics-domain failure,
4 fit non-convergence (result still written).  All output is
deterministic: fixed inputs give byte-identical files (floats at
9 significant digits, '.' decimal separator, UTF-8, Unix newlines).
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from typing import Optional

import numpy as np

from . import design as design_mod
from . import synthetic
from .config import ConfigError, RunConfig, load_config, paper_baseline_dict, parse_config
from .cqed import RatesMeasurement, coupling_report
from .fits import DecayHistogram, FitError, XYSeries, fit_gaussian, fit_lifetime, \
    fit_lorentzian, fit_voigt, g2_pulse_areas
from .gaussian import beam_waist, effective_area, transverse_offsets, vacuum_field
from .stack import GeometryError, emitter_rates
from .tmm import ResonanceError, dispersion_map, field_profile

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_PHYSICS = 3
EXIT_NOCONV = 4

_UNIT_SUFFIXES = ("_pm", "_nm", "_um", "_mm", "_ns", "_us", "_ms", "_s",
                  "_per_s", "_hz", "_mhz", "_ghz")
_UNITLESS_COLUMNS = {"counts", "coincidences"}


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    f = float(v)
    if np.isnan(f):
        return "nan"
    return format(f, ".9g")


def _open_out(path: Optional[str]):
    if path is None or path == "-":
        return sys.stdout, False
    return open(path, "w", encoding="utf-8", newline="\n"), True


def _write_json(doc: dict, path: Optional[str]):
    fh, close = _open_out(path)
    try:
        json.dump(doc, fh, indent=2, sort_keys=True, allow_nan=True)
        fh.write("\n")
    finally:
        if close:
            fh.close()


def _set_threads(n: Optional[int]):
    if n is None:
        env = os.environ.get("CAVITYFORGE_THREADS")
        n = int(env) if env else (os.cpu_count() or 1)
    if n < 1:
        raise ConfigError(f"threads must be >= 1, got {n}")
    for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        os.environ.setdefault(var, str(n))
    return n


def _load_run_config(args) -> RunConfig:
    if args.paper_baseline and args.config:
        raise ConfigError("give either --config or --paper-baseline, not both")
    if args.paper_baseline:
        return parse_config(paper_baseline_dict())
    if not args.config:
        raise ConfigError("a config is required: --config FILE or --paper-baseline")
    return load_config(args.config)


# ---------------------------------------------------------------- dispersion

def cmd_dispersion(args) -> int:
    cfg = _load_run_config(args)
    L_values = np.arange(args.l_min_um * 1e3, args.l_max_um * 1e3 + args.l_step_nm / 2,
                         args.l_step_nm)
    if L_values.size < 2:
        raise ConfigError("L range must contain at least two samples")
    branches = dispersion_map(cfg.cavity, L_values,
                              (args.lambda_min_nm, args.lambda_max_nm),
                              scan_step=args.scan_step_nm)
    if not branches:
        print("no resonance found in the requested window", file=sys.stderr)
        return EXIT_PHYSICS

    rows = []
    for bid, br in enumerate(branches):
        for s in br.samples:
            rows.append((s.L, bid, s.lambda_res, s.slope, br.character, 0))
        if args.max_transverse_order > 0:
            # higher lateral modes: resonance reached after extra mirror
            # travel set by the Gouy phase, so at fixed L the line sits at
            # lambda_0 - slope * delta_L_k
            for k in range(1, args.max_transverse_order + 1):
                for s in br.samples:
                    dL = transverse_offsets(cfg.cavity.curvature_radius_um,
                                            (s.L + cfg.cavity.t_d) * 1e-3,
                                            s.lambda_res, k)[k]
                    rows.append((s.L, bid, s.lambda_res - s.slope * dL,
                                 s.slope, br.character, k))
    rows.sort(key=lambda r: (r[0], r[1], r[5]))

    fh, close = _open_out(args.output)
    try:
        fh.write("L_nm,branch_id,lambda_nm,dlambda_dL,character,transverse_order\n")
        for L, bid, lam, slope, char, order in rows:
            fh.write(f"{_fmt(L)},{bid},{_fmt(lam)},{_fmt(slope)},{char},{order}\n")
    finally:
        if close:
            fh.close()
    return EXIT_OK


# -------------------------------------------------------------------- report

def cmd_report(args) -> int:
    cfg = _load_run_config(args)
    e = cfg.emitter
    lam = e.zpl_wavelength
    asm = design_mod._tune_air_gap(
        cfg.cavity.bottom_mirror, cfg.cavity.top_mirror, cfg.cavity.t_d,
        cfg.cavity.L, cfg.cavity.curvature_radius_um, lam,
        waist_fwhm_um=cfg.cavity.transverse_waist_fwhm_um)
    prof = field_profile(asm, lam)
    mode = beam_waist(asm.curvature_radius_um, asm.geometric_length_um(), lam,
                      asm.transverse_waist_fwhm_um)
    vol = vacuum_field(prof, effective_area(mode))

    m = cfg.measured
    rates = None
    if "gamma_on_per_s" in m and "gamma_off_per_s" in m:
        rates = RatesMeasurement(float(m["gamma_on_per_s"]), float(m["gamma_off_per_s"]),
                                 emitter_rates(e)["gamma_bulk"],
                                 float(m.get("dw_assumed", e.debye_waller)))
    rep = coupling_report(
        gamma_bulk=emitter_rates(e)["gamma_bulk"],
        lam_nm=lam,
        n_host=e.host_index,
        E_vac=vol.E_vac_max_diamond,
        Gamma_L_pm=float(m.get("Gamma_L_pm", 60.6)),
        dlambda_dL=float(m.get("dlambda_dL", 0.18)),
        xi=e.dipole_orientation_factor,
        rates=rates,
    )
    doc = rep.as_dict()
    doc["cavity"] = {
        "L_tuned_nm": asm.L,
        "t_d_nm": asm.t_d,
        "lambda_res_nm": lam,
        "waist_um": mode.waist_um,
        "waist_intensity_fwhm_um": mode.intensity_fwhm_um,
        "waist_source": ("override" if asm.transverse_waist_fwhm_um is not None
                         else "formula"),
        "A_eff_um2": vol.A_eff_um2,
        "V_eff_um3": vol.V_eff_um3,
        "E_vac_max_diamond_V_per_m": vol.E_vac_max_diamond,
        "E_vac_global_max_V_per_m": vol.E_vac_global_max,
        "z_max_diamond_nm": vol.z_max_diamond_nm,
        "z_max_global_nm": vol.z_max_global_nm,
    }
    _write_json(doc, args.output)
    return EXIT_OK


# ----------------------------------------------------------------------- fit

def _read_csv(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            reader = csv.reader(fh)
            rows = [r for r in reader if r and any(c.strip() for c in r)]
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    if len(rows) < 3:
        raise ConfigError(f"{path}: need a header and at least two data rows")
    header = [c.strip() for c in rows[0]]
    if len(header) != 2:
        raise ConfigError(f"{path}: expected exactly two columns, got {len(header)}")
    for name in header:
        ok = name in _UNITLESS_COLUMNS or name.endswith(_UNIT_SUFFIXES)
        try:
            float(name)
            ok = False  # numeric header means the unit row is missing
        except ValueError:
            pass
        if not ok:
            raise ConfigError(
                f"{path}: column {name!r} does not declare a unit "
                f"(suffixes {', '.join(_UNIT_SUFFIXES)} or {sorted(_UNITLESS_COLUMNS)})")
    try:
        data = np.array([[float(c) for c in r] for r in rows[1:]], dtype=float)
    except ValueError as exc:
        raise ConfigError(f"{path}: non-numeric data row: {exc}") from exc
    return header, data[:, 0], data[:, 1]


def cmd_fit(args) -> int:
    header, x, y = _read_csv(args.data)
    if args.kind in ("voigt", "lorentzian", "gaussian"):
        series = XYSeries(x, y, x_unit=header[0], y_unit=header[1])
        fit = {"voigt": fit_voigt, "lorentzian": fit_lorentzian,
               "gaussian": fit_gaussian}[args.kind]
        result = fit(series)
        doc = result.as_dict()
        doc["kind"] = args.kind
        doc["x_unit"], doc["y_unit"] = header
        _write_json(doc, args.output)
        return EXIT_OK if result.converged else EXIT_NOCONV
    if args.kind == "lifetime":
        h = DecayHistogram(x, y, irf_sigma_ns=args.irf_sigma_ns,
                           fit_window_start_ns=args.window_start_ns)
        result = fit_lifetime(h)
        doc = result.as_dict()
        doc["kind"] = "lifetime"
        doc["x_unit"], doc["y_unit"] = header
        doc["irf_sigma_ns"] = args.irf_sigma_ns
        doc["fit_window_start_ns"] = args.window_start_ns
        _write_json(doc, args.output)
        return EXIT_OK if result.converged else EXIT_NOCONV
    # g2: peak-area normalization, no iterative solve
    series = XYSeries(x, y, x_unit=header[0], y_unit=header[1])
    out = g2_pulse_areas(series, args.period_ns, args.window_ns,
                         args.norm_delay_ns)
    doc = {
        "kind": "g2",
        "x_unit": header[0],
        "y_unit": header[1],
        "g2_zero": out["g2_zero"],
        "normalization_area": out["normalization_area"],
        "pulse_period_ns": args.period_ns,
        "window_ns": args.window_ns,
        "areas": {str(k): v for k, v in sorted(out["areas"].items())},
    }
    _write_json(doc, args.output)
    return EXIT_OK


# -------------------------------------------------------------------- design

_DESIGN_COLUMNS = (
    "t_d_nm", "L_nm", "termination", "valid", "reason", "L_tuned_nm",
    "lambda_res_nm", "E_vac_diamond_V_per_m", "E_vac_global_V_per_m",
    "g_rad_per_s", "kappa_per_s", "F_P_zpl", "Q_required", "eta_zpl",
    "transform_limit_hz", "termination_consistent", "interface_field_ratio",
)


def _design_row(p) -> list:
    return [
        _fmt(p.t_d_nm), _fmt(p.L_nm), p.termination, _fmt(p.valid), p.reason,
        _fmt(p.L_tuned_nm), _fmt(p.lambda_res_nm), _fmt(p.E_vac_diamond),
        _fmt(p.E_vac_global), _fmt(p.g_rad_s), _fmt(p.kappa_applied_s),
        _fmt(p.F_P_zpl), _fmt(p.Q_required), _fmt(p.eta_zpl),
        _fmt(p.transform_limit_hz), _fmt(p.termination_consistent),
        _fmt(p.interface_field_ratio),
    ]


def _infer_termination(t_d_nm: float, n_d: float, lam_nm: float) -> str:
    """Nearest quarter-wave count of the membrane: even -> antinode at the
    diamond-air interface, odd -> node."""
    quarters = round(n_d * t_d_nm / (lam_nm / 4.0))
    return "antinode" if quarters % 2 == 0 else "node"


def _parse_single(tokens: list) -> dict:
    out = {}
    for tok in tokens:
        if "=" not in tok:
            raise ConfigError(f"--single expects key=value, got {tok!r}")
        k, v = tok.split("=", 1)
        if k not in {"t_d_nm", "L_nm", "termination"}:
            raise ConfigError(f"--single: unknown key {k!r}")
        out[k] = v
    for req in ("t_d_nm", "L_nm"):
        if req not in out:
            raise ConfigError(f"--single requires {req}=...")
    return out


def cmd_design(args) -> int:
    cfg = _load_run_config(args) if (args.config or args.paper_baseline) else None
    emitter = cfg.emitter if cfg else parse_config(paper_baseline_dict()).emitter
    sweep_cfg = cfg.sweep if cfg else {}
    R_um = float(args.r_um if args.r_um is not None
                 else sweep_cfg.get("R_um", design_mod.DESIGN_RADIUS_UM))

    if args.single:
        spec = _parse_single(args.single)
        t_d = float(spec["t_d_nm"])
        L = float(spec["L_nm"])
        term = spec.get("termination") or _infer_termination(
            t_d, emitter.host_index, emitter.zpl_wavelength)
        point = design_mod.evaluate_design(
            design_mod.DesignPoint(t_d_nm=t_d, L_nm=L, termination=term),
            emitter, R_um=R_um)
        points, pareto = [point], ([0] if point.valid else [])
        if not point.valid:
            print(f"design point invalid: {point.reason}", file=sys.stderr)
            return EXIT_PHYSICS
        provenance = {"single": {"t_d_nm": t_d, "L_nm": L, "termination": term,
                                 "R_um": R_um}}
    else:
        t_d_values = args.t_d_nm or sweep_cfg.get("t_d_nm")
        L_values = args.l_nm or sweep_cfg.get("L_nm")
        terminations = args.terminations or sweep_cfg.get("terminations",
                                                          ["node", "antinode"])
        if not t_d_values or not L_values:
            raise ConfigError("sweep needs --t-d-nm and --l-nm grids "
                              "(or a config 'sweep' block)")
        result = design_mod.sweep([float(v) for v in t_d_values],
                                  [float(v) for v in L_values],
                                  list(terminations), emitter, R_um=R_um)
        points, pareto, provenance = result.points, result.pareto, result.provenance

    fh, close = _open_out(args.output)
    try:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(_DESIGN_COLUMNS)
        for p in points:
            writer.writerow(_design_row(p))
    finally:
        if close:
            fh.close()

    if args.pareto_json:
        _write_json({
            "provenance": provenance,
            "pareto": [
                {"index": i,
                 "t_d_nm": points[i].t_d_nm,
                 "L_nm": points[i].L_nm,
                 "termination": points[i].termination,
                 "eta_zpl": points[i].eta_zpl,
                 "Q_required": points[i].Q_required,
                 "F_P_zpl": points[i].F_P_zpl,
                 "transform_limit_hz": points[i].transform_limit_hz}
                for i in pareto
            ],
        }, args.pareto_json)
    return EXIT_OK


# --------------------------------------------------------------------- synth

def cmd_synth(args) -> int:
    if args.kind == "resonance":
        s = synthetic.voigt_resonance(noise_frac=args.noise_frac, seed=args.seed)
    elif args.kind == "lorentzian":
        s = synthetic.lorentzian_rate_curve(noise_frac=args.noise_frac, seed=args.seed)
    elif args.kind == "lateral":
        s = synthetic.gaussian_rate_curve(noise_frac=args.noise_frac, seed=args.seed)
    elif args.kind == "lifetime":
        h = synthetic.decay_histogram(poisson=args.noise_frac > 0, seed=args.seed)
        s = XYSeries(h.t_ns, h.counts, x_unit="t_ns", y_unit="counts")
    else:
        s = synthetic.g2_histogram(poisson=args.noise_frac > 0, seed=args.seed)
    fh, close = _open_out(args.output)
    try:
        fh.write(f"{s.x_unit},{s.y_unit}\n")
        for xi, yi in zip(s.x, s.y):
            fh.write(f"{_fmt(xi)},{_fmt(yi)}\n")
    finally:
        if close:
            fh.close()
    return EXIT_OK


# ---------------------------------------------------------------------- main

def _add_config_args(p):
    p.add_argument("--config", help="JSON run configuration")
    p.add_argument("--paper-baseline", action="store_true",
                   help="use the built-in measured-device configuration")
    p.add_argument("--threads", type=int, default=None,
                   help="worker threads (default: CAVITYFORGE_THREADS or all cores)")
    p.add_argument("-o", "--output", default=None, help="output file (default stdout)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="cavityforge",
        description="Diamond-membrane microcavity simulation and analysis")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("dispersion", help="mode dispersion map lambda_res(L) as CSV")
    _add_config_args(p)
    p.add_argument("--l-min-um", type=float, default=1.5)
    p.add_argument("--l-max-um", type=float, default=4.5)
    p.add_argument("--l-step-nm", type=float, default=20.0)
    p.add_argument("--lambda-min-nm", type=float, default=600.0)
    p.add_argument("--lambda-max-nm", type=float, default=700.0)
    p.add_argument("--scan-step-nm", type=float, default=0.005)
    p.add_argument("--max-transverse-order", type=int, default=0)
    p.set_defaults(func=cmd_dispersion)

    p = sub.add_parser("report", help="full coupling report at the ZPL-resonant length")
    _add_config_args(p)
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("fit", help="fit a CSV dataset")
    _add_config_args(p)
    p.add_argument("kind", choices=["voigt", "lorentzian", "gaussian",
                                    "lifetime", "g2"])
    p.add_argument("data", help="two-column CSV with unit-declaring header")
    p.add_argument("--irf-sigma-ns", type=float, default=0.2)
    p.add_argument("--window-start-ns", type=float, default=3.0)
    p.add_argument("--period-ns", type=float, default=100.0)
    p.add_argument("--window-ns", type=float, default=20.0)
    p.add_argument("--norm-delay-ns", type=float, default=None)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("design", help="evaluate membrane/air-gap design points")
    _add_config_args(p)
    p.add_argument("--single", nargs="+", metavar="KEY=VALUE",
                   help="one design point, e.g. --single t_d_nm=132 L_nm=637")
    p.add_argument("--t-d-nm", type=float, nargs="+", default=None)
    p.add_argument("--l-nm", type=float, nargs="+", default=None)
    p.add_argument("--terminations", nargs="+", default=None,
                   choices=["node", "antinode"])
    p.add_argument("--r-um", type=float, default=None)
    p.add_argument("--pareto-json", default=None,
                   help="also write the non-dominated set as JSON")
    p.set_defaults(func=cmd_design)

    p = sub.add_parser("synth", help="generate seeded synthetic datasets")
    _add_config_args(p)
    p.add_argument("kind", choices=["resonance", "lorentzian", "lateral",
                                    "lifetime", "g2"])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--noise-frac", type=float, default=0.0)
    p.set_defaults(func=cmd_synth)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        _set_threads(args.threads)
        return args.func(args)
    except (ConfigError, FitError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ResonanceError, GeometryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PHYSICS
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
