"""Command-line front end writing the tuning, spectrum and map CSV files.

Exit status: 0 on success, 1 for physics/range errors, 2 for usage or
configuration errors.
"""

from __future__ import annotations

import argparse
import contextlib
import logging
import sys

import numpy as np

from . import __version__
from .config import RunConfig, load_config, parse_floats, parse_ints, parse_range
from .csvio import fmt, write_table
from .dispersion import load_sellmeier, ppln_e, refractive_index
from .errors import ConfigError, QPMError
from .qpm import InteractionConfig, TuningCurve, tuning_sweep
from .spectrum import bandwidth_ratio_sweep, slice_around, spectral_map, spectrum_slice

TUNING_COLUMNS = ["axis_value", "order_m", "lambda_s_nm", "lambda_i_nm", "period_um", "theta_deg", "residual", "feasible"]


class UsageError(Exception):
    pass


def _typed(func, label):
    def convert(text):
        try:
            return func(text)
        except ValueError as exc:
            raise argparse.ArgumentTypeError(f"invalid {label} {text!r}: {exc}") from None

    convert.__name__ = label
    return convert


def _angle(text):
    value = float(text)
    if not 0.0 <= value <= 90.0:
        raise ValueError("pump angle must lie in [0, 90] degrees")
    return value


def _common_parser():
    p = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    g = p.add_argument_group("configuration")
    g.add_argument("--config", help="key = value configuration file (flags override it)")
    g.add_argument("--sellmeier", dest="sellmeier_path", help="Sellmeier data file (default: shipped LiNbO3 set)")
    g.add_argument("--pump-nm", dest="pump_wavelength_nm", type=_typed(float, "wavelength"))
    g.add_argument("--theta-deg", dest="theta_deg", type=_typed(_angle, "angle"))
    g.add_argument("--poling-um", dest="poling_period_um", type=_typed(float, "period"))
    g.add_argument("--orders", type=_typed(parse_ints, "orders"), help="comma-separated grating orders, e.g. --orders=-1,1")
    g.add_argument("--length-mm", dest="length_mm", type=_typed(float, "length"))
    g.add_argument("--alpha", "--grin-alpha-per-m", dest="grin_alpha_per_m", type=_typed(float, "alpha"))
    g.add_argument("--beta-mode", choices=("bulk", "guided"))
    g.add_argument("--dirs", dest="directions", choices=("co", "counter"))
    g.add_argument("--bracket", choices=("squared", "linear"))
    g.add_argument("-o", "--output", dest="output_path", help="output CSV path ('-' for stdout)")
    g.add_argument("--signal-nm", dest="signal_nm", type=_typed(float, "wavelength"))
    g.add_argument("--idler-nm", dest="idler_nm", type=_typed(float, "wavelength"))
    g.add_argument("--window", dest="window_nm", type=_typed(parse_range, "window"), help="start:stop:step in nm")
    g.add_argument("--theta-range", dest="theta_range_deg", type=_typed(parse_range, "range"), help="start:stop:step in deg")
    g.add_argument("--period-range", dest="period_range_um", type=_typed(parse_range, "range"), help="start:stop:step in um")
    g.add_argument("--theta-step", dest="theta_step_deg", type=_typed(float, "step"))
    g.add_argument("--lambda-step", dest="lambda_step_nm", type=_typed(float, "step"))
    g.add_argument("-v", "--verbose", action="store_true")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    parser = argparse.ArgumentParser(prog="qpmspdc", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("index", parents=[common], help="extraordinary refractive index")
    p.add_argument("--wavelength-nm", dest="wavelengths_nm", type=_typed(parse_floats, "wavelengths"), default=argparse.SUPPRESS)

    tuning = sub.add_parser("tuning", help="perfect quasi-phase-matching solutions")
    tsub = tuning.add_subparsers(dest="tuning_command", required=True)
    tsub.add_parser("period", parents=[common], help="poling period for a signal/idler pair at the pump angle")
    tsub.add_parser("angles", parents=[common], help="pump angles for a signal/idler pair at the poling period")
    tsub.add_parser("pairs", parents=[common], help="signal/idler pairs at the pump angle")
    p = tsub.add_parser("sweep", parents=[common], help="tuning curve over pump angle or poling period")
    p.add_argument("--solve", choices=("pairs", "period", "angles"), default=argparse.SUPPRESS)

    sub.add_parser("spectrum", parents=[common], help="normalised SPDC spectrum vs signal wavelength")
    p = sub.add_parser("bandwidth-ratio", parents=[common], help="FWHM ratio vs normalised signal wavelength")
    p.add_argument("--signals", dest="signals_nm", type=_typed(parse_floats, "signals"), default=argparse.SUPPRESS)
    p.add_argument("--reference-nm", dest="reference_nm", type=_typed(float, "wavelength"), default=argparse.SUPPRESS)
    sub.add_parser("specmap", parents=[common], help="spectrum vs pump angle and signal wavelength")
    return parser


def interaction(cfg: RunConfig) -> InteractionConfig:
    model = load_sellmeier(cfg.sellmeier_path) if cfg.sellmeier_path else ppln_e()
    return InteractionConfig.build(
        model=model,
        pump_nm=cfg.pump_wavelength_nm,
        theta_deg=cfg.theta_deg,
        period_um=cfg.poling_period_um,
        orders=cfg.orders,
        length_mm=cfg.length_mm,
        alpha=cfg.grin_alpha_per_m,
        dirs=cfg.directions,
        beta_mode=cfg.beta_mode,
    )


def _meta(cfg: RunConfig, inter: InteractionConfig, command: str, **extra) -> dict:
    meta = {"command": command, "sellmeier_name": inter.model.name, "sellmeier_source": inter.model.source}
    meta.update(cfg.provenance())
    meta.update(extra)
    return meta


def _tuning_rows(curve: TuningCurve):
    for row in curve.rows:
        s = row.solution
        if row.error is not None:
            yield [row.axis_value, row.order, None, None, None, None, None, "error"]
        elif s is None:
            yield [row.axis_value, row.order, None, None, None, None, None, "NA"]
        else:
            yield [row.axis_value, row.order, s.lambda_s, s.lambda_i, s.period_um, s.theta_deg, s.residual, s.feasible_poling]


def _need_signal(cfg):
    if cfg.signal_nm is None:
        raise UsageError("this command needs --signal-nm (and optionally --idler-nm)")
    return cfg.signal_nm


def _summarize_tuning(curve: TuningCurve) -> str:
    sols = curve.solutions()
    parts = []
    for s in sols:
        if curve.solve == "pairs":
            parts.append(f"m={s.order:+d} signal={s.lambda_s:.2f} nm idler={s.lambda_i:.2f} nm")
        elif curve.solve == "period":
            parts.append(f"m={s.order:+d} period={s.period_um:.4g} um feasible={fmt(s.feasible_poling)}")
        else:
            parts.append(f"m={s.order:+d} theta={s.theta_deg:.4f} deg")
    text = f"{len(sols)} root(s)"
    if curve.failed:
        text += f", {len(curve.failed)} failed row(s)"
    if parts and len(parts) <= 12:
        text += ": " + "; ".join(parts)
    return text


def cmd_index(cfg, inter, out):
    if cfg.window_nm is not None:
        start, stop, step = cfg.window_nm
        lams = start + step * np.arange(int(np.floor((stop - start) / step + 1e-9)) + 1)
    else:
        lams = np.asarray(cfg.wavelengths_nm or (1064.0,), dtype=float)
    n = np.atleast_1d(refractive_index(inter.model, lams))
    write_table(out, _meta(cfg, inter, "index"), ["lambda_nm", "n_e"], zip(lams, n))
    return f"n_e({lams[0]:g} nm) = {fmt(n[0])}" + (f" ... {len(lams)} wavelengths" if len(lams) > 1 else "")


def cmd_tuning(cfg, inter, out, which):
    solve = cfg.solve if which == "sweep" else which
    if which == "sweep":
        if solve == "angles":
            lo, hi, step = cfg.period_range_um
        else:
            lo, hi, step = cfg.theta_range_deg
        values = lo + step * np.arange(int(np.floor((hi - lo) / step + 1e-9)) + 1)
    elif solve == "angles":
        values = [cfg.poling_period_um]
    else:
        values = [cfg.theta_deg]
    lambda_s = None if solve == "pairs" else _need_signal(cfg)
    window = None if cfg.window_nm is None else cfg.window_nm[:2]
    step_nm = cfg.lambda_step_nm if cfg.window_nm is None else cfg.window_nm[2]
    curve = tuning_sweep(
        inter, solve, values, orders=cfg.orders, lambda_s=lambda_s, lambda_i=cfg.idler_nm,
        window=window, step_nm=step_nm, step_deg=cfg.theta_step_deg,
    )
    if which != "sweep" and curve.failed:
        raise QPMError(curve.failed[0].error)
    meta = _meta(cfg, inter, f"tuning {which}", solve=solve, axis=curve.axis_name)
    write_table(out, meta, TUNING_COLUMNS, _tuning_rows(curve))
    return _summarize_tuning(curve)


def cmd_spectrum(cfg, inter, out):
    if cfg.window_nm is not None:
        s = spectrum_slice(inter, *cfg.window_nm, mode=cfg.bracket)
    else:
        center = cfg.signal_nm if cfg.signal_nm is not None else 2 * cfg.pump_wavelength_nm
        s = slice_around(inter, center, mode=cfg.bracket)
    meta = _meta(
        cfg, inter, "spectrum",
        fingerprint=s.fingerprint, clamp_mode="clamped-at-zero" if cfg.bracket == "linear" else "none",
        fwhm_nm=fmt(s.fwhm), peak_lambda_nm=fmt(s.peak_lambda), has_root=fmt(s.has_root),
        prefactor_variation=fmt(s.prefactor_variation), points_in_fwhm=s.points_in_fwhm,
    )
    write_table(out, meta, ["lambda_s_nm", "intensity_norm"], zip(s.lambda_s_grid, s.values))
    if s.fwhm is None:
        return "no resolved peak in window (FWHM unset)"
    return f"FWHM = {s.fwhm:.6g} nm, peak at {s.peak_lambda:.6g} nm"


def default_signals(pump_nm: float, reference_nm: float) -> tuple[float, ...]:
    """Reference wavelength plus lambda_s / 2 lambda_p = 0.83, 0.84, ..., 1.00."""
    grid = [round(a, 2) * 2 * pump_nm for a in np.arange(0.83, 1.0 + 1e-9, 0.01)]
    return tuple(sorted(set([reference_nm] + grid)))


def cmd_bandwidth(cfg, inter, out):
    signals = cfg.signals_nm or default_signals(cfg.pump_wavelength_nm, cfg.reference_nm)
    rows = bandwidth_ratio_sweep(inter, signals, cfg.reference_nm, mode=cfg.bracket)
    columns = [
        "lambda_s_nm", "abscissa", "fwhm_co_nm", "fwhm_counter_nm", "ratio_co", "ratio_counter",
        "period_co_um", "theta_counter_deg", "merged_co", "error",
    ]
    body = (
        [r.lambda_s, r.abscissa, r.fwhm_co, r.fwhm_counter, r.ratio_co, r.ratio_counter,
         r.period_co_um, r.theta_counter_deg, r.merged_co, "NA" if r.error is None else r.error.replace(",", ";")]
        for r in rows
    )
    write_table(out, _meta(cfg, inter, "bandwidth-ratio"), columns, body)
    last = rows[-1]
    flagged = sum(r.error is not None for r in rows)
    return (
        f"{len(rows)} rows ({flagged} flagged); at abscissa {last.abscissa:.3f}: "
        f"co ratio {fmt(last.ratio_co)}, counter ratio {fmt(last.ratio_counter)}"
    )


def cmd_specmap(cfg, inter, out):
    window = cfg.window_nm or (650.0, 1150.0, 0.05)
    m = spectral_map(inter, cfg.theta_range_deg, window, orders=cfg.orders, mode=cfg.bracket)
    meta = _meta(cfg, inter, "specmap", fingerprint=m.fingerprint, failed_cells=m.failed_cells, layout="first row = signal wavelength grid (nm); first column = pump angle grid (deg)")
    for line in (f"# {k} = {v}" for k, v in meta.items()):
        out.write(line + "\n")
    out.write(",".join(["theta_deg\\lambda_s_nm"] + [fmt(x) for x in m.lambda_grid]) + "\n")
    for theta, row in zip(m.theta_grid, m.values):
        out.write(",".join([fmt(theta)] + [fmt(v) for v in row]) + "\n")
    return f"map {len(m.theta_grid)} x {len(m.lambda_grid)}, {m.failed_cells} failed cell(s)"


@contextlib.contextmanager
def _open_output(path):
    if path == "-":
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            yield fh


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)  # exits 2 on usage errors
    opts = vars(args)
    command = opts.pop("command")
    which = opts.pop("tuning_command", None)
    config_path = opts.pop("config", None)
    verbose = opts.pop("verbose", False)
    logging.basicConfig(level=logging.INFO if verbose else logging.ERROR, format="%(levelname)s: %(message)s")
    try:
        cfg = load_config(config_path, opts)
        inter = interaction(cfg)
        with _open_output(cfg.output_path) as out:
            if command == "index":
                summary = cmd_index(cfg, inter, out)
            elif command == "tuning":
                summary = cmd_tuning(cfg, inter, out, which)
            elif command == "spectrum":
                summary = cmd_spectrum(cfg, inter, out)
            elif command == "bandwidth-ratio":
                summary = cmd_bandwidth(cfg, inter, out)
            else:
                summary = cmd_specmap(cfg, inter, out)
    except (ConfigError, UsageError) as exc:
        parser.print_usage(sys.stderr)
        print(f"qpmspdc: usage error: {exc}", file=sys.stderr)
        return 2
    except QPMError as exc:
        print(f"qpmspdc: error ({type(exc).__name__}): {exc}", file=sys.stderr)
        return 1
    print(summary, file=sys.stderr if cfg.output_path == "-" else sys.stdout)
    return 0


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
