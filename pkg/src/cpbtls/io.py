"""Config parsing, CSV formats, and SVG rendering.

Formats are plain text and deterministic: the same inputs always serialize
to the same bytes. Floats are written with 9 significant digits (%.9g),
which round-trips every value the package itself writes.

Config files are ``key = value`` lines; ``#`` starts a comment line and
blank lines are ignored. Ridge data and spectrum tables are CSV with fixed
headers (see ``RIDGE_HEADER`` and ``SPECTRUM_HEADER``).
"""

import math
import re
from dataclasses import dataclass

import numpy as np

from .analysis import JunctionGeometry
from .hamiltonian import CpbParams, ModelConfig, TlsParams
from .fitting import RidgePoint
from .spectra import ResonatorParams, SpectrumTable, TransitionLine

__all__ = [
    "ConfigError",
    "DataFormatError",
    "RunConfig",
    "parse_config",
    "read_ridge_csv",
    "write_spectrum_csv",
    "read_spectrum_csv",
    "SvgStyle",
    "emit_spectrum_svg",
    "format_fit_report",
    "format_residuals_csv",
    "RIDGE_HEADER",
    "SPECTRUM_HEADER",
]

RIDGE_HEADER = "dataset,n_g,freq_ghz,weight,branch_hint"
SPECTRUM_HEADER = "n_g,state_index,freq_ghz,cpb_fraction,tls1_flip,tls2_flip,visibility"

_FLOAT_RE = re.compile(r"[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?\Z")
_INT_RE = re.compile(r"[+-]?\d+\Z")

_MODEL_KINDS = ("cpb", "single_tls", "two_tls")

_BOUND_NAMES = (
    "e_c", "e_j", "delta_e_j1", "delta_e_j2", "e_r1", "e_int1", "t_lr1",
    "e_r2", "e_int2", "t_lr2", "t_12",
)

_TLS_FIELDS = ("e_r_ghz", "t_lr_ghz", "e_int_ghz", "delta_e_j_ghz")

_OUTPUT_KEYS = ("spectrum_csv", "svg", "fit_report", "residuals_csv", "report")

_KNOWN_KEYS = frozenset(
    ["model", "flux_ratio", "t_12_ghz", "max_states",
     "cpb.e_c_ghz", "cpb.e_j_max_ghz", "cpb.n_charge_states",
     "grid.start", "grid.stop", "grid.step",
     "resonator.omega_r_ghz", "resonator.g_ghz",
     "geometry.area_nm2", "geometry.barrier_thickness_nm",
     "geometry.tls_charge_e", "geometry.n_junctions",
     "analysis.alpha_inv", "analysis.temperature_mk",
     "fit.policy", "fit.seeds", "fit.rng_seed", "fit.max_states"]
    + [f"tls{i}.{f}" for i in (1, 2) for f in _TLS_FIELDS]
    + [f"output.{k}" for k in _OUTPUT_KEYS]
    + [f"fit.bounds.{n}.{side}" for n in _BOUND_NAMES for side in ("lo", "hi")]
)


class ConfigError(ValueError):
    """Malformed or inconsistent run configuration."""


class DataFormatError(ValueError):
    """Malformed CSV payload."""


@dataclass
class RunConfig:
    """Everything a command-line run needs, parsed and validated."""

    model_kind: str
    model: ModelConfig
    grid: np.ndarray
    max_states: int
    outputs: dict
    resonator: ResonatorParams
    geometry: JunctionGeometry
    alpha_inv: float
    temperature_mk: float
    fit_policy: str
    fit_seeds: int
    fit_rng_seed: int
    fit_max_states: int
    fit_bounds: dict


class _Raw:
    """Scanned key/value pairs with line numbers for error messages."""

    def __init__(self, text):
        self.values = {}
        self.lines = {}
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ConfigError(
                    f"line {lineno}: expected 'key = value', got {line!r}"
                )
            key, _, value = line.partition("=")
            key = key.strip()
            value = value.strip()
            if not key:
                raise ConfigError(f"line {lineno}: empty key")
            if key not in _KNOWN_KEYS:
                raise ConfigError(f"line {lineno}: unknown key {key!r}")
            if key in self.values:
                raise ConfigError(
                    f"line {lineno}: duplicate key {key!r} "
                    f"(first given on line {self.lines[key]})"
                )
            if not value:
                raise ConfigError(f"line {lineno}: empty value for key {key!r}")
            self.values[key] = value
            self.lines[key] = lineno

    def __contains__(self, key):
        return key in self.values

    def error(self, key, message):
        return ConfigError(f"line {self.lines[key]}: key {key!r} {message}")

    def string(self, key, default=None):
        return self.values.get(key, default)

    def enum(self, key, choices, default=None):
        v = self.values.get(key)
        if v is None:
            return default
        if v not in choices:
            raise self.error(key, f"must be one of {', '.join(choices)}; got {v!r}")
        return v

    def number(self, key, default=None, lo=None, hi=None, lo_open=False):
        v = self.values.get(key)
        if v is None:
            return default
        if not _FLOAT_RE.match(v):
            raise self.error(key, f"must be a number, got {v!r}")
        x = float(v)
        if lo is not None and (x < lo or (lo_open and x == lo)):
            raise self.error(key, f"must be {'>' if lo_open else '>='} {lo}, got {v}")
        if hi is not None and x > hi:
            raise self.error(key, f"must be <= {hi}, got {v}")
        return x

    def integer(self, key, default=None, lo=None, hi=None):
        v = self.values.get(key)
        if v is None:
            return default
        if not _INT_RE.match(v):
            raise self.error(key, f"must be an integer, got {v!r}")
        x = int(v)
        if lo is not None and x < lo:
            raise self.error(key, f"must be >= {lo}, got {v}")
        if hi is not None and x > hi:
            raise self.error(key, f"must be <= {hi}, got {v}")
        return x


def parse_config(text: str) -> RunConfig:
    """Parse and validate a run configuration.

    Raises
    ------
    ConfigError
        Naming the line number and key for unknown, duplicate, or malformed
        entries; listing every missing required key at once.
    """
    raw = _Raw(text)

    required = ["model", "cpb.e_c_ghz", "cpb.e_j_max_ghz",
                "grid.start", "grid.stop", "grid.step"]
    kind = raw.enum("model", _MODEL_KINDS)
    n_tls = 0 if kind in (None, "cpb") else (1 if kind == "single_tls" else 2)
    if n_tls >= 1:
        required += [f"tls1.{f}" for f in _TLS_FIELDS]
    if n_tls == 2:
        required += [f"tls2.{f}" for f in _TLS_FIELDS] + ["t_12_ghz"]
    missing = [k for k in required if k not in raw]
    if missing:
        raise ConfigError(f"missing required keys: {', '.join(missing)}")

    for i in (1, 2):
        if i > n_tls:
            for f in _TLS_FIELDS:
                if f"tls{i}.{f}" in raw:
                    raise raw.error(
                        f"tls{i}.{f}", f"is not allowed for model {kind!r}"
                    )
    if n_tls < 2 and "t_12_ghz" in raw:
        raise raw.error("t_12_ghz", f"is not allowed for model {kind!r}")

    cpb = CpbParams(
        e_c=raw.number("cpb.e_c_ghz", lo=0.0, lo_open=True),
        e_j_max=raw.number("cpb.e_j_max_ghz", lo=0.0, lo_open=True),
        n_charge_states=raw.integer("cpb.n_charge_states", default=4, lo=2, hi=8),
    )
    tls = tuple(
        TlsParams(
            e_r=raw.number(f"tls{i}.e_r_ghz"),
            t_lr=raw.number(f"tls{i}.t_lr_ghz", lo=0.0),
            e_int=raw.number(f"tls{i}.e_int_ghz"),
            delta_e_j=raw.number(f"tls{i}.delta_e_j_ghz"),
        )
        for i in range(1, n_tls + 1)
    )
    try:
        model = ModelConfig(
            cpb=cpb,
            flux_ratio=raw.number("flux_ratio", default=0.0),
            tls=tls,
            t_12=raw.number("t_12_ghz", default=0.0),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    start = raw.number("grid.start", lo=0.0, hi=2.0)
    stop = raw.number("grid.stop", lo=0.0, hi=2.0)
    step = raw.number("grid.step", lo=0.0, lo_open=True)
    if not start < stop:
        raise raw.error("grid.stop", f"must exceed grid.start = {start}")
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    grid = start + step * np.arange(n)

    max_states = raw.integer("max_states", default=0, lo=1, hi=model.dim - 1) or None
    if max_states is None:
        max_states = min(model.dim - 1, 2 << n_tls)

    outputs = {}
    for name in _OUTPUT_KEYS:
        v = raw.string(f"output.{name}")
        if v is not None:
            outputs[name] = v

    omega_r = raw.number("resonator.omega_r_ghz", lo=0.0, lo_open=True)
    g = raw.number("resonator.g_ghz", lo=0.0)
    if (omega_r is None) != (g is None):
        raise ConfigError(
            "resonator.omega_r_ghz and resonator.g_ghz must be given together"
        )
    resonator = None if omega_r is None else ResonatorParams(omega_r=omega_r, g=g)

    area = raw.number("geometry.area_nm2", lo=0.0, lo_open=True)
    geometry = None
    if area is None:
        for key in ("geometry.barrier_thickness_nm", "geometry.tls_charge_e",
                    "geometry.n_junctions"):
            if key in raw:
                raise raw.error(key, "requires geometry.area_nm2")
    else:
        geometry = JunctionGeometry(
            area_nm2=area,
            barrier_thickness_nm=raw.number(
                "geometry.barrier_thickness_nm", default=1.0, lo=0.0, lo_open=True
            ),
            tls_charge_e=raw.number(
                "geometry.tls_charge_e", default=1.0, lo=0.0, lo_open=True
            ),
            n_junctions=raw.integer("geometry.n_junctions", default=2, lo=1),
        )

    bounds = {}
    for name in _BOUND_NAMES:
        lo_key = f"fit.bounds.{name}.lo"
        hi_key = f"fit.bounds.{name}.hi"
        lo_v = raw.number(lo_key)
        hi_v = raw.number(hi_key)
        if (lo_v is None) != (hi_v is None):
            given, absent = (lo_key, hi_key) if hi_v is None else (hi_key, lo_key)
            raise raw.error(given, f"requires {absent}")
        if lo_v is not None:
            if lo_v > hi_v:
                raise raw.error(hi_key, f"must be >= fit.bounds.{name}.lo = {lo_v}")
            bounds[name] = (lo_v, hi_v)

    return RunConfig(
        model_kind=kind,
        model=model,
        grid=grid,
        max_states=max_states,
        outputs=outputs,
        resonator=resonator,
        geometry=geometry,
        alpha_inv=raw.number("analysis.alpha_inv", default=100.0, lo=0.0,
                             lo_open=True),
        temperature_mk=raw.number("analysis.temperature_mk", default=25.0,
                                  lo=0.0, lo_open=True),
        fit_policy=raw.enum("fit.policy", ("nearest", "hinted"),
                            default="nearest"),
        fit_seeds=raw.integer("fit.seeds", default=1, lo=1),
        fit_rng_seed=raw.integer("fit.rng_seed", default=0, lo=0),
        fit_max_states=raw.integer("fit.max_states", default=0, lo=1,
                                   hi=model.dim - 1) or None,
        fit_bounds=bounds,
    )


def _fmt(x: float) -> str:
    return f"{x:.9g}"


def read_ridge_csv(text: str) -> list:
    """Parse ridge data into labeled datasets.

    Expects the exact header ``dataset,n_g,freq_ghz,weight,branch_hint``.
    An empty weight field means 1.0; an empty branch_hint means no hint.
    Datasets keep their order of first appearance.

    Returns
    -------
    list of (str, list of RidgePoint)

    Raises
    ------
    DataFormatError
        Naming the offending line.
    """
    lines = text.splitlines()
    if not lines or lines[0].strip() != RIDGE_HEADER:
        raise DataFormatError(
            f"line 1: expected header {RIDGE_HEADER!r}, "
            f"got {(lines[0].strip() if lines else '')!r}"
        )
    groups = {}
    for lineno, row in enumerate(lines[1:], 2):
        if not row.strip():
            continue
        fields = [f.strip() for f in row.split(",")]
        if len(fields) != 5:
            raise DataFormatError(
                f"line {lineno}: expected 5 fields, got {len(fields)}"
            )
        label, ng_s, freq_s, weight_s, hint_s = fields
        if not label:
            raise DataFormatError(f"line {lineno}: empty dataset label")
        ng = _data_float(ng_s, lineno, "n_g")
        freq = _data_float(freq_s, lineno, "freq_ghz")
        weight = 1.0 if not weight_s else _data_float(weight_s, lineno, "weight")
        if hint_s:
            if not _INT_RE.match(hint_s) or int(hint_s) < 1:
                raise DataFormatError(
                    f"line {lineno}: branch_hint must be a positive integer, "
                    f"got {hint_s!r}"
                )
            hint = int(hint_s)
        else:
            hint = None
        try:
            point = RidgePoint(n_g=ng, freq=freq, weight=weight, branch_hint=hint)
        except ValueError as exc:
            raise DataFormatError(f"line {lineno}: {exc}") from exc
        groups.setdefault(label, []).append(point)
    if not groups:
        raise DataFormatError("no data rows")
    return list(groups.items())


def _data_float(s, lineno, what):
    if not _FLOAT_RE.match(s):
        raise DataFormatError(f"line {lineno}: {what} must be a number, got {s!r}")
    return float(s)


def write_spectrum_csv(table: SpectrumTable) -> str:
    """Serialize a spectrum table; 9 significant digits, one line per row."""
    out = [SPECTRUM_HEADER]
    for ln in table.lines:
        flips = ln.tls_flip_fractions
        f1 = flips[0] if len(flips) > 0 else 0.0
        f2 = flips[1] if len(flips) > 1 else 0.0
        out.append(",".join((
            _fmt(ln.n_g), str(ln.state_index), _fmt(ln.freq),
            _fmt(ln.cpb_fraction), _fmt(f1), _fmt(f2), _fmt(ln.visibility),
        )))
    return "\n".join(out) + "\n"


def read_spectrum_csv(text: str) -> SpectrumTable:
    """Inverse of :func:`write_spectrum_csv`.

    Rows must stay grouped by gate charge with state_index counting up
    from 1 inside each group. Parsed lines always carry two defect flip
    fractions (absent defects read back as 0).
    """
    rows = text.splitlines()
    if not rows or rows[0].strip() != SPECTRUM_HEADER:
        raise DataFormatError(
            f"line 1: expected header {SPECTRUM_HEADER!r}, "
            f"got {(rows[0].strip() if rows else '')!r}"
        )
    lines = []
    grid = []
    expect_state = 1
    for lineno, row in enumerate(rows[1:], 2):
        if not row.strip():
            continue
        fields = [f.strip() for f in row.split(",")]
        if len(fields) != 7:
            raise DataFormatError(
                f"line {lineno}: expected 7 fields, got {len(fields)}"
            )
        ng = _data_float(fields[0], lineno, "n_g")
        if not _INT_RE.match(fields[1]) or int(fields[1]) < 1:
            raise DataFormatError(
                f"line {lineno}: state_index must be a positive integer, "
                f"got {fields[1]!r}"
            )
        k = int(fields[1])
        freq, cpbf, f1, f2, vis = (
            _data_float(fields[i], lineno, name)
            for i, name in zip(
                range(2, 7),
                ("freq_ghz", "cpb_fraction", "tls1_flip", "tls2_flip",
                 "visibility"),
            )
        )
        if not grid or ng != grid[-1]:
            if grid and any(g == ng for g in grid):
                raise DataFormatError(
                    f"line {lineno}: rows for n_g = {fields[0]} are not contiguous"
                )
            grid.append(ng)
            expect_state = 1
        if k != expect_state:
            raise DataFormatError(
                f"line {lineno}: expected state_index {expect_state}, got {k}"
            )
        expect_state += 1
        lines.append(TransitionLine(
            n_g=ng, state_index=k, freq=freq, cpb_fraction=cpbf,
            tls_flip_fractions=(f1, f2), visibility=vis,
        ))
    if not lines:
        raise DataFormatError("no data rows")
    return SpectrumTable(grid=np.array(grid), lines=tuple(lines))


@dataclass(frozen=True)
class SvgStyle:
    """Rendering knobs for :func:`emit_spectrum_svg` (canvas is 800x600)."""

    margin: float = 60.0
    point_radius: float = 2.5
    palette: tuple = (
        "#1f77b4", "#d62728", "#2ca02c", "#9467bd",
        "#ff7f0e", "#8c564b", "#e377c2", "#17becf",
    )


def emit_spectrum_svg(table: SpectrumTable, style: SvgStyle = None) -> str:
    """Render a spectrum table as a deterministic scatter SVG.

    Each transition line gets a palette color by state index; point opacity
    scales with visibility relative to the brightest line in the table, so
    dark states fade out exactly as they do in measured spectroscopy.
    """
    if style is None:
        style = SvgStyle()
    if not table.lines:
        raise ValueError("cannot render an empty spectrum table")
    width, height = 800.0, 600.0
    mg = style.margin
    x0, x1 = float(table.grid[0]), float(table.grid[-1])
    if x1 == x0:
        x0, x1 = x0 - 0.5, x1 + 0.5
    freqs = [ln.freq for ln in table.lines]
    y0, y1 = min(freqs), max(freqs)
    pad = 0.05 * (y1 - y0) if y1 > y0 else 0.5
    y0, y1 = y0 - pad, y1 + pad
    vmax = max(ln.visibility for ln in table.lines)

    def sx(x):
        return mg + (x - x0) / (x1 - x0) * (width - 2 * mg)

    def sy(y):
        return height - mg - (y - y0) / (y1 - y0) * (height - 2 * mg)

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:g}" '
        f'height="{height:g}" viewBox="0 0 {width:g} {height:g}">',
        f'<rect x="0" y="0" width="{width:g}" height="{height:g}" fill="#ffffff"/>',
        f'<rect x="{mg:g}" y="{mg:g}" width="{width - 2 * mg:g}" '
        f'height="{height - 2 * mg:g}" fill="none" stroke="#333333"/>',
    ]
    for frac in (0.0, 0.5, 1.0):
        xv = x0 + frac * (x1 - x0)
        yv = y0 + frac * (y1 - y0)
        out.append(
            f'<text x="{sx(xv):.2f}" y="{height - mg + 20:.2f}" '
            f'font-size="12" text-anchor="middle">{xv:.9g}</text>'
        )
        out.append(
            f'<text x="{mg - 8:.2f}" y="{sy(yv) + 4:.2f}" '
            f'font-size="12" text-anchor="end">{yv:.9g}</text>'
        )
    out.append(
        f'<text x="{width / 2:.2f}" y="{height - mg + 40:.2f}" '
        f'font-size="14" text-anchor="middle">gate charge n_g</text>'
    )
    out.append(
        f'<text x="18" y="{height / 2:.2f}" font-size="14" text-anchor="middle" '
        f'transform="rotate(-90 18 {height / 2:.2f})">transition frequency (GHz)</text>'
    )
    palette = style.palette
    for ln in table.lines:
        color = palette[(ln.state_index - 1) % len(palette)]
        opacity = ln.visibility / vmax if vmax > 0.0 else 1.0
        out.append(
            f'<circle cx="{sx(ln.n_g):.2f}" cy="{sy(ln.freq):.2f}" '
            f'r="{style.point_radius:g}" fill="{color}" '
            f'fill-opacity="{opacity:.4f}"/>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def format_fit_report(result) -> str:
    """Key = value fit summary, deterministic ordering."""
    n_points = sum(len(r) for r in result.residuals)
    n_penalized = sum(int(np.sum(p)) for p in result.penalized)
    out = [
        f"converged = {'true' if result.converged else 'false'}",
        f"iterations = {result.iterations}",
        f"objective_ghz2 = {_fmt(result.objective)}",
        f"points = {n_points}",
        f"penalized = {n_penalized}",
    ]
    for name, value in zip(result.parameter_names, result.parameters):
        out.append(f"param.{name} = {_fmt(value)}")
    if result.parameter_spread is not None:
        for name, value in zip(result.parameter_names, result.parameter_spread):
            out.append(f"spread.{name} = {_fmt(value)}")
    return "\n".join(out) + "\n"


def format_residuals_csv(datasets, result) -> str:
    """Per-point residual table for fitted datasets.

    Penalized points (no bright model line) leave the model frequency and
    residual fields empty.
    """
    out = ["dataset,n_g,freq_ghz,model_freq_ghz,residual_ghz,weight,penalized"]
    for d, (label, points) in enumerate(datasets):
        res = result.residuals[d]
        pen = result.penalized[d]
        for i, p in enumerate(points):
            if pen[i]:
                model_s = resid_s = ""
            else:
                model_s = _fmt(p.freq - res[i])
                resid_s = _fmt(res[i])
            out.append(",".join((
                label, _fmt(p.n_g), _fmt(p.freq), model_s, resid_s,
                _fmt(p.weight), "1" if pen[i] else "0",
            )))
    return "\n".join(out) + "\n"
