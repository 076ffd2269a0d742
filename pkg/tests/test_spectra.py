"""Transition spectra: frequencies, line composition, and resonator shifts."""

import math

import numpy as np
import pytest

from cpbtls import (
    CpbParams,
    ModelConfig,
    ResonatorParams,
    TlsParams,
    build_hamiltonian,
    chi_eff_multilevel,
    dispersive_shift,
    eigendecompose,
    resolve_max_states,
    spectrum,
    transitions_at,
    two_level_closed_form,
)
from cpbtls.presets import double_defect_config, single_defect_config

BARE_M2 = ModelConfig(cpb=CpbParams(e_c=4.5, e_j_max=6.33, n_charge_states=2))
BARE_M4 = ModelConfig(cpb=CpbParams(e_c=4.5, e_j_max=6.33, n_charge_states=4))


def test_closed_form_reference_values():
    assert two_level_closed_form(4.5, 6.33, 1.0) == 6.33
    assert two_level_closed_form(4.5, 6.33, 0.9) == pytest.approx(
        6.580949779477123, abs=1e-12
    )
    assert two_level_closed_form(4.5, 6.33, 0.9) == math.hypot(1.8, 6.33)
    assert two_level_closed_form(4.5, 6.33, 1.02) == pytest.approx(
        6.340228702499619, abs=1e-12
    )


def test_closed_form_validation():
    with pytest.raises(ValueError):
        two_level_closed_form(0.0, 6.33, 1.0)
    with pytest.raises(ValueError):
        two_level_closed_form(4.5, -1.0, 1.0)
    with pytest.raises(ValueError):
        two_level_closed_form(4.5, 6.33, 2.5)


def test_two_state_solver_matches_closed_form():
    for e_j in (3.64, 6.33):
        config = ModelConfig(cpb=CpbParams(e_c=4.5, e_j_max=e_j, n_charge_states=2))
        for n_g in np.linspace(0.5, 1.5, 21):
            line = transitions_at(config, n_g)[0]
            assert line.freq == pytest.approx(
                two_level_closed_form(4.5, e_j, n_g), abs=1e-9
            )


def test_bare_line_at_degeneracy():
    line = transitions_at(BARE_M2, 1.0)[0]
    assert line.state_index == 1
    assert line.freq == pytest.approx(6.33, abs=1e-12)
    assert line.cpb_fraction == pytest.approx(1.0, abs=1e-12)
    assert line.tls_flip_fractions == ()
    assert line.visibility == pytest.approx(1.0, abs=1e-12)


def test_single_defect_composition_at_degeneracy():
    # strongly hybridized point: the two bright branches share the box
    # excitation while the lowest line is almost a pure defect flip
    lines = transitions_at(single_defect_config(4), 1.0)
    assert [ln.state_index for ln in lines] == [1, 2, 3, 4]
    freqs = [ln.freq for ln in lines]
    assert freqs[0] == pytest.approx(1.764970376, abs=1e-6)
    assert freqs[1] == pytest.approx(7.081942613, abs=1e-6)
    assert freqs[2] == pytest.approx(7.286643403, abs=1e-6)
    assert freqs[3] == pytest.approx(39.773119260, abs=1e-6)
    vis = [ln.visibility for ln in lines]
    assert vis[0] == pytest.approx(2.2378e-5, abs=1e-8)
    assert vis[1] == pytest.approx(0.119426429, abs=1e-6)
    assert vis[2] == pytest.approx(0.921232717, abs=1e-6)
    assert lines[0].cpb_fraction == pytest.approx(0.001151796, abs=1e-6)
    assert lines[1].cpb_fraction == pytest.approx(0.094345214, abs=1e-6)
    assert lines[2].cpb_fraction == pytest.approx(0.905654576, abs=1e-6)
    for ln in lines:
        # one defect: block weights split between kept and flipped
        assert ln.tls_flip_fractions[0] == pytest.approx(
            1.0 - ln.cpb_fraction, abs=1e-12
        )


def test_composition_matches_direct_eigenvector_sums():
    config = double_defect_config(1)
    n_g = 0.93
    m = 4
    system = eigendecompose(build_hamiltonian(config, n_g))
    weights = np.add.reduce(
        system.vectors.reshape(4, m, 16) ** 2, axis=1
    )  # block x state
    b0 = int(np.argmax(weights[:, 0]))
    q = 2.0 * (-1 + np.arange(16) % m) - n_g
    for line in transitions_at(config, n_g):
        k = line.state_index
        assert line.freq == pytest.approx(
            system.values[k] - system.values[0], abs=1e-12
        )
        overlap = float(system.vectors[:, k] @ (q * system.vectors[:, 0]))
        assert line.visibility == pytest.approx(overlap**2, abs=1e-12)
        assert line.cpb_fraction == pytest.approx(weights[b0, k], abs=1e-12)
        for d in range(2):
            flipped = [b for b in range(4) if (b ^ b0) & (1 << d)]
            assert line.tls_flip_fractions[d] == pytest.approx(
                float(np.sum(weights[flipped, k])), abs=1e-12
            )


def test_zero_tunneling_decouples_blocks():
    config = ModelConfig(
        cpb=BARE_M4.cpb,
        tls=(TlsParams(e_r=0.62, t_lr=0.0, e_int=0.35, delta_e_j=2.02),),
    )
    n_g = 0.95
    lines = transitions_at(config, n_g, max_states=7)
    for ln in lines:
        flip = ln.tls_flip_fractions[0]
        assert min(abs(flip), abs(flip - 1.0)) < 1e-12
    # frequencies must be the union of the two uncoupled block spectra
    h = build_hamiltonian(config, n_g)
    left = np.linalg.eigvalsh(h[:4, :4])
    right = np.linalg.eigvalsh(h[4:, 4:])
    union = np.sort(np.concatenate([left, right]))
    expected = union[1:] - union[0]
    freqs = np.array([ln.freq for ln in lines])
    assert np.max(np.abs(freqs - expected)) < 1e-9


def test_default_state_counts():
    assert resolve_max_states(BARE_M4) == 2
    assert resolve_max_states(single_defect_config(1)) == 4
    assert resolve_max_states(double_defect_config(1)) == 8
    assert resolve_max_states(double_defect_config(1, n_charge_states=2)) == 7
    assert len(transitions_at(BARE_M4, 0.8)) == 2


def test_max_states_validation():
    with pytest.raises(ValueError):
        resolve_max_states(BARE_M4, 4)
    with pytest.raises(ValueError):
        resolve_max_states(BARE_M4, 0)
    with pytest.raises(ValueError):
        resolve_max_states(BARE_M4, 2.0)
    with pytest.raises(ValueError):
        transitions_at(BARE_M2, 1.0, max_states=2)


def test_spectrum_table_layout_and_lookup():
    grid = np.linspace(0.8, 1.2, 5)
    table = spectrum(single_defect_config(4), grid)
    assert np.array_equal(table.grid, grid)
    assert len(table.lines) == 5 * 4
    assert table.lines[0].n_g == grid[0]
    assert table.lines[4].n_g == grid[1]   # grid-major ordering
    rows = table.at(grid[2])
    assert len(rows) == 4
    assert all(ln.n_g == grid[2] for ln in rows)
    assert [ln.state_index for ln in rows] == [1, 2, 3, 4]
    assert table.at(0.123) == ()


def test_spectrum_grid_validation():
    config = BARE_M4
    with pytest.raises(ValueError):
        spectrum(config, [])
    with pytest.raises(ValueError):
        spectrum(config, [[0.9, 1.0]])
    with pytest.raises(ValueError):
        spectrum(config, [1.0, 0.9])
    with pytest.raises(ValueError):
        spectrum(config, [0.9, 0.9])
    with pytest.raises(ValueError):
        spectrum(config, [-0.1, 1.0])
    with pytest.raises(ValueError):
        spectrum(config, [0.9, 2.3])
    with pytest.raises(ValueError):
        spectrum(config, [0.9, math.nan])


def test_gate_reflection_symmetry_without_charge_coupling():
    config = ModelConfig(
        cpb=BARE_M4.cpb,
        tls=(TlsParams(e_r=0.62, t_lr=0.06, e_int=0.0, delta_e_j=2.02),),
    )
    for offset in (0.05, 0.1, 0.2, 0.35):
        low = transitions_at(config, 1.0 - offset)
        high = transitions_at(config, 1.0 + offset)
        for a, b in zip(low, high):
            assert abs(a.freq - b.freq) < 1e-9
            assert abs(a.visibility - b.visibility) < 1e-9


def test_defect_line_visibility_grows_with_tunneling():
    def defect_line(t_lr):
        config = ModelConfig(
            cpb=BARE_M4.cpb,
            tls=(TlsParams(e_r=0.62, t_lr=t_lr, e_int=0.0, delta_e_j=2.02),),
        )
        return transitions_at(config, 0.95)[0]

    strong = defect_line(0.06)
    weak = defect_line(0.01)
    dark = defect_line(0.0)
    assert strong.tls_flip_fractions[0] > 0.99
    assert strong.visibility == pytest.approx(2.283e-6, abs=2e-9)
    assert weak.visibility == pytest.approx(6.364e-8, abs=1e-10)
    assert dark.visibility == 0.0
    assert strong.visibility > weak.visibility > dark.visibility


def test_line_fields_are_physical():
    rng = np.random.default_rng(17)
    for _ in range(10):
        n_tls = int(rng.integers(1, 3))
        tls = tuple(
            TlsParams(
                e_r=float(rng.uniform(-1, 1)),
                t_lr=float(rng.uniform(0, 0.1)),
                e_int=float(rng.uniform(-0.4, 0.4)),
                delta_e_j=float(rng.uniform(-1.5, 1.5)),
            )
            for _ in range(n_tls)
        )
        config = ModelConfig(
            cpb=CpbParams(
                e_c=float(rng.uniform(3, 6)),
                e_j_max=float(rng.uniform(3, 8)),
                n_charge_states=4,
            ),
            tls=tls,
        )
        for line in transitions_at(config, float(rng.uniform(0.5, 1.5))):
            assert line.freq >= 0.0
            assert line.visibility >= 0.0
            assert -1e-12 <= line.cpb_fraction <= 1.0 + 1e-12
            assert len(line.tls_flip_fractions) == n_tls
            for f in line.tls_flip_fractions:
                assert -1e-12 <= f <= 1.0 + 1e-12


def test_resonator_params_validation():
    with pytest.raises(ValueError):
        ResonatorParams(omega_r=0.0, g=0.1)
    with pytest.raises(ValueError):
        ResonatorParams(omega_r=5.47, g=-0.1)


def test_two_level_dispersive_shift():
    res = ResonatorParams(omega_r=5.47, g=0.1)
    assert dispersive_shift(res, 6.33) == 0.1 * 0.1 / (6.33 - 5.47)
    assert dispersive_shift(res, 4.0) < 0.0
    with pytest.raises(ValueError, match="resonant"):
        dispersive_shift(res, 5.47)
    with pytest.raises(ValueError):
        dispersive_shift(res, -1.0)


def test_multilevel_shift_reduces_to_two_pole_form():
    res = ResonatorParams(omega_r=5.47, g=0.05)
    chi0 = chi_eff_multilevel(BARE_M2, res, 1.0, state_index=0)
    chi1 = chi_eff_multilevel(BARE_M2, res, 1.0, state_index=1)
    expected = 0.05**2 * 2.0 * 6.33 / (6.33**2 - 5.47**2)
    assert chi0 == pytest.approx(expected, rel=1e-9)
    assert chi0 == pytest.approx(0.003118841150965707, rel=1e-9)
    assert chi1 == pytest.approx(-chi0, rel=1e-9)


def test_multilevel_shift_with_defect_is_state_dependent():
    res = ResonatorParams(omega_r=5.47, g=0.1)
    config = single_defect_config(4)
    chi1 = chi_eff_multilevel(config, res, 1.0, state_index=1)
    chi2 = chi_eff_multilevel(config, res, 1.0, state_index=2)
    assert chi1 == pytest.approx(-0.03360498498634285, abs=1e-9)
    assert chi2 == pytest.approx(0.05470747439502435, abs=1e-9)
    zero = chi_eff_multilevel(config, ResonatorParams(omega_r=5.47, g=0.0), 1.0)
    assert zero == 0.0


def test_multilevel_shift_flags_resonant_transitions():
    config = ModelConfig(cpb=CpbParams(e_c=4.5, e_j_max=5.47, n_charge_states=2))
    res = ResonatorParams(omega_r=5.47, g=0.1)
    with pytest.raises(ValueError, match="0->1"):
        chi_eff_multilevel(config, res, 1.0)


def test_multilevel_shift_validation():
    res = ResonatorParams(omega_r=5.47, g=0.1)
    with pytest.raises(ValueError):
        chi_eff_multilevel(BARE_M2, res, 1.0, state_index=2)
    with pytest.raises(ValueError):
        chi_eff_multilevel(BARE_M2, res, 1.0, state_index=-1)
    with pytest.raises(ValueError):
        chi_eff_multilevel(BARE_M2, "resonator", 1.0)
