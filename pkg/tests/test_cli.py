"""Command-line interface: exit codes, file outputs, and stdout contracts."""

import numpy as np
import pytest

from cpbtls import (
    CpbParams,
    ModelConfig,
    TlsParams,
    derived_report,
    read_ridge_csv,
    read_spectrum_csv,
    synthetic_ridges,
)
from cpbtls.analysis import JunctionGeometry
from cpbtls.cli import main

BARE_CONFIG = """\
model = cpb
cpb.e_c_ghz = 4.5
cpb.e_j_max_ghz = 6.33
cpb.n_charge_states = 2
grid.start = 0.9
grid.stop = 1.1
grid.step = 0.05
"""

SINGLE_LINES = """\
model = single_tls
cpb.e_c_ghz = 4.5
cpb.e_j_max_ghz = 6.33
cpb.n_charge_states = 2
tls1.e_r_ghz = 0.62
tls1.t_lr_ghz = 0.06
tls1.e_int_ghz = 0.35
tls1.delta_e_j_ghz = 2.02
grid.start = 0.9
grid.stop = 1.1
grid.step = 0.02
"""


def write(path, text):
    path.write_text(text)
    return str(path)


def single_tls_model():
    return ModelConfig(
        cpb=CpbParams(e_c=4.5, e_j_max=6.33, n_charge_states=2),
        tls=(TlsParams(e_r=0.62, t_lr=0.06, e_int=0.35, delta_e_j=2.02),),
    )


def ridge_csv(points, label="d"):
    rows = ["dataset,n_g,freq_ghz,weight,branch_hint"]
    rows += [f"{label},{p.n_g:.9g},{p.freq:.9g},," for p in points]
    return "\n".join(rows) + "\n"


def parse_report(text):
    out = {}
    for line in text.splitlines():
        key, _, value = line.partition(" = ")
        out[key] = value
    return out


def test_version_and_help(capsys):
    assert main(["--version"]) == 0
    assert "0.1.0" in capsys.readouterr().out
    assert main(["--help"]) == 0
    assert "simulate" in capsys.readouterr().out


def test_usage_errors(tmp_path, capsys):
    cfg = write(tmp_path / "run.cfg", BARE_CONFIG)
    assert main([]) == 1
    assert main(["bogus"]) == 1
    assert main(["simulate"]) == 1
    assert main(["simulate", "--config", cfg, "--unknown"]) == 1
    assert main(["selftest", "--threads", "0"]) == 1
    assert "usage error" in capsys.readouterr().err
    assert main(["sweep", "--config", cfg, "--flux", "abc"]) == 1
    assert main(["sweep", "--config", cfg, "--flux", ","]) == 1


def test_config_and_data_errors_exit_2(tmp_path, capsys):
    missing = str(tmp_path / "nope.cfg")
    assert main(["simulate", "--config", missing]) == 2

    bad = write(tmp_path / "bad.cfg", BARE_CONFIG + "volume = 11\n")
    assert main(["simulate", "--config", bad]) == 2
    assert "unknown key" in capsys.readouterr().err

    no_output = write(tmp_path / "no_out.cfg", BARE_CONFIG)
    assert main(["simulate", "--config", no_output]) == 2
    assert "output.spectrum_csv is required" in capsys.readouterr().err

    assert main(["sweep", "--config", no_output, "--flux", "0.5"]) == 2

    ridge = write(tmp_path / "r.csv", "dataset,n_g\n")
    fit_cpb = write(
        tmp_path / "fit_cpb.cfg",
        BARE_CONFIG
        + f"output.fit_report = {tmp_path / 'rep.txt'}\n"
        + f"output.residuals_csv = {tmp_path / 'res.csv'}\n",
    )
    assert main(["fit", "--config", fit_cpb, "--data", ridge]) == 2
    assert "no defect parameters to fit" in capsys.readouterr().err

    no_geom = write(
        tmp_path / "an.cfg",
        SINGLE_LINES + f"output.report = {tmp_path / 'a.txt'}\n",
    )
    assert main(["analyze", "--config", no_geom]) == 2
    assert "geometry.area_nm2 is required" in capsys.readouterr().err


def test_fit_rejects_bad_data_and_foreign_bounds(tmp_path, capsys):
    cfg_text = SINGLE_LINES + (
        f"output.fit_report = {tmp_path / 'rep.txt'}\n"
        f"output.residuals_csv = {tmp_path / 'res.csv'}\n"
    )
    cfg = write(tmp_path / "fit.cfg", cfg_text)
    bad_data = write(tmp_path / "bad.csv", "dataset,n_g,freq_ghz\n")
    assert main(["fit", "--config", cfg, "--data", bad_data]) == 2
    assert "expected header" in capsys.readouterr().err

    points = synthetic_ridges(single_tls_model(), np.linspace(0.9, 1.1, 11))
    data = write(tmp_path / "d.csv", ridge_csv(points))
    foreign = write(
        tmp_path / "foreign.cfg",
        cfg_text + "fit.bounds.e_r2.lo = 0\nfit.bounds.e_r2.hi = 1\n",
    )
    assert main(["fit", "--config", foreign, "--data", data]) == 2
    assert "does not apply to model 'single_tls'" in capsys.readouterr().err


def test_simulate_writes_deterministic_table(tmp_path, capsys):
    out1 = tmp_path / "a" / "spec1.csv"
    svg = tmp_path / "spec.svg"
    cfg = write(
        tmp_path / "run.cfg", BARE_CONFIG + f"output.spectrum_csv = {out1}\n"
    )
    assert main(["simulate", "--config", cfg, "--svg", str(svg)]) == 0
    stdout = capsys.readouterr().out
    assert f"wrote {out1}: 5 gate points x 1 states" in stdout
    assert f"wrote {svg}" in stdout
    table = read_spectrum_csv(out1.read_text())
    assert len(table.grid) == 5
    assert len(table.lines) == 5
    assert table.at(1.0)[0].freq == pytest.approx(6.33, abs=1e-8)
    assert svg.read_text().count("<circle") == 5

    out2 = tmp_path / "spec2.csv"
    cfg2 = write(
        tmp_path / "run2.cfg", BARE_CONFIG + f"output.spectrum_csv = {out2}\n"
    )
    assert main(["simulate", "--config", cfg2]) == 0
    capsys.readouterr()
    assert out2.read_bytes() == out1.read_bytes()


def test_sweep_writes_one_table_per_flux_point(tmp_path, capsys):
    base = tmp_path / "spec.csv"
    cfg = write(
        tmp_path / "run.cfg",
        BARE_CONFIG.replace("cpb.e_j_max_ghz = 6.33", "cpb.e_j_max_ghz = 7.33")
        + f"output.spectrum_csv = {base}\n",
    )
    assert main(["sweep", "--config", cfg, "--flux", "0,0.2"]) == 0
    stdout = capsys.readouterr().out
    assert "flux_ratio 0, e_j 7.33 GHz" in stdout
    assert "flux_ratio 0.2, e_j 5.93009457 GHz" in stdout
    zero = read_spectrum_csv((tmp_path / "spec_flux0.csv").read_text())
    tuned = read_spectrum_csv((tmp_path / "spec_flux0.2.csv").read_text())
    assert zero.at(1.0)[0].freq == pytest.approx(7.33, abs=1e-8)
    assert tuned.at(1.0)[0].freq == pytest.approx(5.93009457, abs=1e-6)


def test_fit_from_config_start_recovers_generator(tmp_path, capsys):
    report_path = tmp_path / "rep.txt"
    residual_path = tmp_path / "res.csv"
    cfg = write(
        tmp_path / "fit.cfg",
        SINGLE_LINES
        + f"output.fit_report = {report_path}\n"
        + f"output.residuals_csv = {residual_path}\n",
    )
    grid = np.array([float(f"{x:.9g}") for x in np.linspace(0.9, 1.1, 11)])
    points = synthetic_ridges(single_tls_model(), grid)
    data = write(tmp_path / "d.csv", ridge_csv(points))
    assert main(["fit", "--config", cfg, "--data", data]) == 0
    stdout = capsys.readouterr().out
    assert "(converged)" in stdout
    report = parse_report(report_path.read_text())
    assert report["converged"] == "true"
    # the CSV stores 9 significant digits, so the refit lands at the
    # generator values up to that quantization
    assert float(report["objective_ghz2"]) < 1e-12
    assert abs(float(report["param.e_j[d]"]) - 6.33) < 1e-3
    assert abs(float(report["param.e_c"]) - 4.5) < 1e-3
    assert abs(float(report["param.delta_e_j1[d]"]) - 2.02) < 1e-3
    rows = residual_path.read_text().splitlines()
    assert rows[0] == "dataset,n_g,freq_ghz,model_freq_ghz,residual_ghz,weight,penalized"
    assert len(rows) == 1 + len(points)
    assert all(row.endswith(",0") for row in rows[1:])


def test_fit_multistart_reports_parameter_spread(tmp_path, capsys):
    pins = {
        "e_c": 4.5, "e_r1": 0.62, "e_int1": 0.35,
        "t_lr1": 0.06, "delta_e_j1": 2.02,
    }
    pin_lines = "".join(
        f"fit.bounds.{n}.lo = {v}\nfit.bounds.{n}.hi = {v}\n"
        for n, v in pins.items()
    )
    cfg = write(
        tmp_path / "fit.cfg",
        SINGLE_LINES
        + f"output.fit_report = {tmp_path / 'rep.txt'}\n"
        + f"output.residuals_csv = {tmp_path / 'res.csv'}\n"
        + "fit.seeds = 2\nfit.rng_seed = 0\n"
        + "fit.bounds.e_j.lo = 6.0\nfit.bounds.e_j.hi = 6.6\n"
        + pin_lines,
    )
    grid = np.array([float(f"{x:.9g}") for x in np.linspace(0.9, 1.1, 11)])
    points = synthetic_ridges(single_tls_model(), grid)
    data = write(tmp_path / "d.csv", ridge_csv(points))
    assert main(["fit", "--config", cfg, "--data", data]) == 0
    capsys.readouterr()
    report = parse_report((tmp_path / "rep.txt").read_text())
    assert "spread.e_j[d]" in report
    assert float(report["spread.e_j[d]"]) < 1e-3
    assert abs(float(report["param.e_j[d]"]) - 6.33) < 1e-3


def test_analyze_writes_derived_report(tmp_path, capsys):
    report_path = tmp_path / "analysis.txt"
    cfg = write(
        tmp_path / "an.cfg",
        SINGLE_LINES
        + "geometry.area_nm2 = 52500\n"
        + f"output.report = {report_path}\n",
    )
    assert main(["analyze", "--config", cfg]) == 0
    capsys.readouterr()
    text = report_path.read_text()
    expected = derived_report(
        4.5, 6.33, 6.33,
        TlsParams(e_r=0.62, t_lr=0.06, e_int=0.35, delta_e_j=2.02),
        JunctionGeometry(area_nm2=52500.0),
    )
    assert "e_j_ghz = 6.33" in text
    assert f"i0_na = {expected.i0_na:.9g}" in text
    assert f"tls1.a_eff_nm2 = {expected.a_eff_nm2:.9g}" in text
    assert f"tls1.t1_bound_us = {expected.t1_bound_us:.9g}" in text

    frozen = write(
        tmp_path / "frozen.cfg",
        SINGLE_LINES.replace("tls1.t_lr_ghz = 0.06", "tls1.t_lr_ghz = 0")
        + "geometry.area_nm2 = 52500\n"
        + f"output.report = {tmp_path / 'frozen.txt'}\n",
    )
    assert main(["analyze", "--config", frozen]) == 0
    capsys.readouterr()
    assert "tls1.t1_bound_us = inf" in (tmp_path / "frozen.txt").read_text()


def test_selftest_passes(capsys):
    assert main(["selftest"]) == 0
    out = capsys.readouterr().out
    assert out.count("ok - ") == 3
    assert "all 3 checks passed" in out
    assert "FAIL" not in out
