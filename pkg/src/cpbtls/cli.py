"""Command-line interface.

Subcommands: ``simulate`` (spectrum tables and SVG previews), ``sweep``
(the same over several flux points), ``fit`` (ridge data to model
parameters), ``analyze`` (derived junction/defect quantities), and
``selftest`` (built-in verification). Exit codes: 0 success, 1 usage
error, 2 config/data/convergence error.
"""

import argparse
import dataclasses
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import derived_report
from .eigen import ConvergenceError
from .fitting import FitProblem, fit, multistart
from .io import (
    ConfigError,
    DataFormatError,
    emit_spectrum_svg,
    format_fit_report,
    format_residuals_csv,
    parse_config,
    read_ridge_csv,
    write_spectrum_csv,
)
from .spectra import spectrum

_DEFAULT_HALF_WIDTH = 0.25


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _build_parser():
    common = _Parser(add_help=False)
    common.add_argument(
        "--threads", type=int, default=1, metavar="N",
        help="compute threads to use (currently single-threaded; "
             "N is validated and reserved)",
    )
    parser = _Parser(prog="cpbtls", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", parents=[common],
                       help="write a spectrum table (and optional SVG)")
    p.add_argument("--config", required=True, help="run configuration file")
    p.add_argument("--svg", help="also render an SVG to this path")
    p.set_defaults(handler=_cmd_simulate)

    p = sub.add_parser("sweep", parents=[common],
                       help="spectrum tables for several flux points")
    p.add_argument("--config", required=True)
    p.add_argument("--flux", required=True, metavar="R1,R2,...",
                   help="comma-separated flux ratios")
    p.set_defaults(handler=_cmd_sweep)

    p = sub.add_parser("fit", parents=[common],
                       help="fit ridge data to the configured model")
    p.add_argument("--config", required=True)
    p.add_argument("--data", required=True, help="ridge CSV file")
    p.set_defaults(handler=_cmd_fit)

    p = sub.add_parser("analyze", parents=[common],
                       help="derived junction and defect quantities")
    p.add_argument("--config", required=True)
    p.set_defaults(handler=_cmd_analyze)

    p = sub.add_parser("selftest", parents=[common],
                       help="run the built-in verification checks")
    p.set_defaults(handler=_cmd_selftest)
    return parser


def main(argv=None) -> int:
    """Run the CLI; returns the process exit code instead of exiting."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    try:
        if args.threads < 1:
            raise _UsageError(f"--threads must be >= 1, got {args.threads}")
        return args.handler(args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (ConfigError, DataFormatError, ConvergenceError, OSError,
            ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entry():
    raise SystemExit(main())


def _load_config(path):
    return parse_config(Path(path).read_text())


def _required_output(cfg, name, command):
    path = cfg.outputs.get(name)
    if path is None:
        raise ConfigError(f"output.{name} is required for {command}")
    return path


def _write_text(path, text):
    p = Path(path)
    if p.parent != Path(""):
        p.parent.mkdir(parents=True, exist_ok=True)
    p.write_text(text)


def _cmd_simulate(args):
    cfg = _load_config(args.config)
    table = spectrum(cfg.model, cfg.grid, cfg.max_states)
    path = _required_output(cfg, "spectrum_csv", "simulate")
    _write_text(path, write_spectrum_csv(table))
    print(f"wrote {path}: {len(table.grid)} gate points x "
          f"{cfg.max_states} states")
    svg_path = args.svg or cfg.outputs.get("svg")
    if svg_path:
        _write_text(svg_path, emit_spectrum_svg(table))
        print(f"wrote {svg_path}")
    return 0


def _with_flux_token(path, token):
    p = Path(path)
    return str(p.with_name(f"{p.stem}_flux{token}{p.suffix}"))


def _cmd_sweep(args):
    cfg = _load_config(args.config)
    tokens = [t.strip() for t in args.flux.split(",") if t.strip()]
    if not tokens:
        raise _UsageError("--flux needs at least one flux ratio")
    ratios = []
    for t in tokens:
        try:
            ratios.append(float(t))
        except ValueError:
            raise _UsageError(f"--flux value {t!r} is not a number") from None
    base = _required_output(cfg, "spectrum_csv", "sweep")
    for token, ratio in zip(tokens, ratios):
        model = dataclasses.replace(cfg.model, flux_ratio=ratio)
        table = spectrum(model, cfg.grid, cfg.max_states)
        path = _with_flux_token(base, token)
        _write_text(path, write_spectrum_csv(table))
        print(f"wrote {path}: flux_ratio {token}, e_j {model.e_j:.9g} GHz")
    return 0


def _default_bounds(value):
    half = max(0.5 * abs(value), _DEFAULT_HALF_WIDTH)
    return (value - half, value + half)


def _fit_bounds(cfg):
    """Search box: config overrides, else +-50% around the config values
    (with a 0.25 GHz floor); tunneling amplitudes default to [0, 0.2]."""
    model = cfg.model
    bounds = {"e_c": _default_bounds(model.cpb.e_c),
              "e_j": _default_bounds(model.e_j)}
    for i, t in enumerate(model.tls, 1):
        bounds[f"e_r{i}"] = _default_bounds(t.e_r)
        bounds[f"e_int{i}"] = _default_bounds(t.e_int)
        bounds[f"delta_e_j{i}"] = _default_bounds(t.delta_e_j)
    allowed = set(bounds)
    allowed.update(f"t_lr{i}" for i in range(1, model.n_tls + 1))
    if model.n_tls == 2:
        allowed.add("t_12")
    for name in cfg.fit_bounds:
        if name not in allowed:
            raise ConfigError(
                f"fit.bounds.{name} does not apply to model {cfg.model_kind!r}"
            )
    bounds.update(cfg.fit_bounds)
    return bounds


def _initial_vector(cfg, problem):
    model = cfg.model
    values = {"e_c": model.cpb.e_c}
    for i, t in enumerate(model.tls, 1):
        values[f"e_r{i}"] = t.e_r
        values[f"e_int{i}"] = t.e_int
        values[f"t_lr{i}"] = t.t_lr
    if model.n_tls == 2:
        values["t_12"] = model.t_12
    for label, _ in problem.datasets:
        values[f"e_j[{label}]"] = model.e_j
        for i, t in enumerate(model.tls, 1):
            values[f"delta_e_j{i}[{label}]"] = t.delta_e_j
    lo, hi = problem.bounds_arrays()
    return np.minimum(np.maximum(problem.pack(values), lo), hi)


def _cmd_fit(args):
    cfg = _load_config(args.config)
    if cfg.model.n_tls == 0:
        raise ConfigError(
            "model 'cpb' has no defect parameters to fit; "
            "use single_tls or two_tls"
        )
    datasets = read_ridge_csv(Path(args.data).read_text())
    problem = FitProblem(
        datasets=datasets,
        bounds=_fit_bounds(cfg),
        n_tls=cfg.model.n_tls,
        n_charge_states=cfg.model.cpb.n_charge_states,
        policy=cfg.fit_policy,
        max_states=cfg.fit_max_states,
    )
    report_path = _required_output(cfg, "fit_report", "fit")
    residuals_path = _required_output(cfg, "residuals_csv", "fit")
    if cfg.fit_seeds > 1:
        result = multistart(problem, seed_count=cfg.fit_seeds,
                            rng_seed=cfg.fit_rng_seed)
    else:
        result = fit(problem, _initial_vector(cfg, problem))
    _write_text(report_path, format_fit_report(result))
    _write_text(residuals_path, format_residuals_csv(datasets, result))
    print(f"wrote {report_path}")
    print(f"wrote {residuals_path}")
    print(f"objective {result.objective:.9g} GHz^2 after "
          f"{result.iterations} iterations "
          f"({'converged' if result.converged else 'not converged'})")
    return 0


def _cmd_analyze(args):
    cfg = _load_config(args.config)
    if cfg.model.n_tls == 0:
        raise ConfigError("model 'cpb' has no defect to analyze")
    if cfg.geometry is None:
        raise ConfigError("geometry.area_nm2 is required for analyze")
    path = _required_output(cfg, "report", "analyze")
    model = cfg.model
    out = [
        f"e_c_ghz = {model.cpb.e_c:.9g}",
        f"e_j_ghz = {model.e_j:.9g}",
        f"e_j_max_ghz = {model.cpb.e_j_max:.9g}",
    ]
    for i, t in enumerate(model.tls, 1):
        rep = derived_report(
            model.cpb.e_c, model.e_j, model.cpb.e_j_max, t, cfg.geometry,
            alpha_inv=cfg.alpha_inv, temperature_mk=cfg.temperature_mk,
        )
        if i == 1:
            out += [
                f"i0_na = {rep.i0_na:.9g}",
                f"c_sigma_ff = {rep.c_sigma_ff:.9g}",
                f"current_density_a_cm2 = {rep.current_density_a_cm2:.9g}",
            ]
        t1 = "inf" if rep.t1_bound_us is None else f"{rep.t1_bound_us:.9g}"
        out += [
            f"tls{i}.delta_i0_na = {rep.delta_i0_na:.9g}",
            f"tls{i}.fractional_delta_ej = {rep.fractional_delta_ej:.9g}",
            f"tls{i}.a_eff_nm2 = {rep.a_eff_nm2:.9g}",
            f"tls{i}.hop_distance_angstrom = {rep.hop_distance_angstrom:.9g}",
            f"tls{i}.island_shift_uv = {rep.island_shift_uv:.9g}",
            f"tls{i}.tls_freq_ghz = {rep.tls_freq_ghz:.9g}",
            f"tls{i}.t1_bound_us = {t1}",
        ]
    text = "\n".join(out) + "\n"
    _write_text(path, text)
    print(f"wrote {path}")
    return 0


def _selftest_eigensolver():
    from .eigen import eigendecompose, residual_norm

    rng = np.random.default_rng(12345)
    for _ in range(20):
        a = rng.normal(size=(16, 16))
        h = a + a.T
        system = eigendecompose(h)
        if residual_norm(system, h) >= 1e-10:
            raise AssertionError("residual norm too large")
        gram = system.vectors.T @ system.vectors
        if np.max(np.abs(gram - np.eye(16))) >= 1e-10:
            raise AssertionError("eigenvectors not orthonormal")
        tr = float(np.trace(h))
        if abs(float(np.sum(system.values)) - tr) > 1e-9 * max(1.0, abs(tr)):
            raise AssertionError("eigenvalue sum does not match trace")


def _selftest_closed_form():
    from .hamiltonian import CpbParams, ModelConfig
    from .spectra import transitions_at, two_level_closed_form

    config = ModelConfig(cpb=CpbParams(e_c=4.5, e_j_max=6.33,
                                       n_charge_states=2))
    for n_g in np.linspace(0.5, 1.5, 21):
        line = transitions_at(config, float(n_g), max_states=1)[0]
        expected = two_level_closed_form(4.5, 6.33, float(n_g))
        if abs(line.freq - expected) >= 1e-9:
            raise AssertionError("two-state spectrum disagrees with closed form")


def _selftest_round_trips():
    from .io import read_ridge_csv, read_spectrum_csv, write_spectrum_csv
    from .presets import single_defect_config

    config = single_defect_config(4)
    table = spectrum(config, np.linspace(0.9, 1.1, 5))
    text = write_spectrum_csv(table)
    again = write_spectrum_csv(read_spectrum_csv(text))
    if text != again:
        raise AssertionError("spectrum CSV round trip is not byte-identical")
    ridge = ("dataset,n_g,freq_ghz,weight,branch_hint\n"
             "a,1.0,7.25,,\n" "a,1.05,7.3,2.0,3\n")
    datasets = read_ridge_csv(ridge)
    if len(datasets) != 1 or len(datasets[0][1]) != 2:
        raise AssertionError("ridge CSV parse failed")


def _cmd_selftest(args):
    checks = [
        ("eigensolver on 20 seeded 16x16 matrices", _selftest_eigensolver),
        ("two-state closed form", _selftest_closed_form),
        ("serialization round trips", _selftest_round_trips),
    ]
    failures = 0
    for name, check in checks:
        try:
            check()
        except Exception as exc:
            failures += 1
            print(f"FAIL - {name}: {exc}")
        else:
            print(f"ok - {name}")
    if failures:
        print(f"{failures} of {len(checks)} checks failed")
        return 2
    print(f"all {len(checks)} checks passed")
    return 0
