"""Transition spectra, line composition, and dispersive resonator shifts.

A transition line at gate charge n_g connects the ground state to excited
state k and carries, besides its frequency, a decomposition of state k over
the defect-position blocks: the weight in the ground state's dominant block
(cpb_fraction), the weight in blocks where a given defect has flipped
position (tls_flip_fractions), and a drive visibility proportional to
``|<k| Q |0>|**2`` with Q the island charge operator ``2n - n_g``.
"""

import math
from dataclasses import dataclass

import numpy as np

from ._accel import jit_kernel
from .eigen import MAX_SWEEPS, REL_TOL, SIGN_TOL, ConvergenceError, _eig_sorted
from .hamiltonian import ModelConfig, build_hamiltonian

__all__ = [
    "TransitionLine",
    "SpectrumTable",
    "ResonatorParams",
    "two_level_closed_form",
    "transitions_at",
    "spectrum",
    "dispersive_shift",
    "chi_eff_multilevel",
]


@dataclass(frozen=True)
class TransitionLine:
    """One ground-to-excited transition at a single gate charge.

    Attributes
    ----------
    n_g : float
        Reduced gate charge.
    state_index : int
        Index k >= 1 of the excited state (energy-ordered, ground is 0).
    freq : float
        Transition frequency E_k - E_0 in GHz.
    cpb_fraction : float
        Weight of state k inside the ground state's dominant defect block.
    tls_flip_fractions : tuple of float
        Per defect, the weight of state k in blocks where that defect sits
        on the opposite side from the ground state's dominant block. Empty
        without defects.
    visibility : float
        ``|<k| Q |0>|**2`` for the island charge operator Q = 2n - n_g;
        proportional to the line's drive strength in spectroscopy.
    """

    n_g: float
    state_index: int
    freq: float
    cpb_fraction: float
    tls_flip_fractions: tuple
    visibility: float


@dataclass(frozen=True)
class SpectrumTable:
    """Transition lines over a gate-charge grid, grid-major then state-major."""

    grid: np.ndarray
    lines: tuple

    def at(self, n_g: float) -> tuple:
        """Lines at one grid value (exact float match)."""
        return tuple(ln for ln in self.lines if ln.n_g == n_g)


@dataclass(frozen=True)
class ResonatorParams:
    """Readout resonator frequency omega_r and coupling g, both in GHz."""

    omega_r: float
    g: float

    def __post_init__(self):
        if not (math.isfinite(self.omega_r) and self.omega_r > 0.0):
            raise ValueError(f"omega_r must be positive, got {self.omega_r}")
        if not (math.isfinite(self.g) and self.g >= 0.0):
            raise ValueError(f"g must be >= 0, got {self.g}")


def two_level_closed_form(e_c: float, e_j: float, n_g: float) -> float:
    """Two-state transition frequency ``sqrt((4 e_c (1 - n_g))**2 + e_j**2)``.

    Exact for a two-charge-state box; near n_g = 1 it reduces to the
    parabola ``e_j + 8 e_c**2 (1 - n_g)**2 / e_j``.
    """
    if not (math.isfinite(e_c) and e_c > 0.0):
        raise ValueError(f"e_c must be positive, got {e_c}")
    if not (math.isfinite(e_j) and e_j > 0.0):
        raise ValueError(f"e_j must be positive, got {e_j}")
    if not (math.isfinite(n_g) and 0.0 <= n_g <= 2.0):
        raise ValueError(f"n_g must lie in [0, 2], got {n_g}")
    return math.hypot(4.0 * e_c * (1.0 - n_g), e_j)


@jit_kernel
def _transition_data(h, m, n_tls, n_g, n_lo, max_states,
                     rel_tol, max_sweeps, sign_tol):
    # Shared by the public spectrum API and the fit objective so both see
    # bit-identical numbers. Destroys h. Returns
    # (converged, off_norm, freqs, visibility, cpb_fraction, flip1, flip2),
    # each spectral array of length max_states.
    freqs = np.zeros(max_states)
    vis = np.zeros(max_states)
    cpbf = np.zeros(max_states)
    flip1 = np.zeros(max_states)
    flip2 = np.zeros(max_states)
    converged, off, sweeps, values, vectors = _eig_sorted(
        h, rel_tol, max_sweeps, sign_tol
    )
    if not converged:
        return False, off, freqs, vis, cpbf, flip1, flip2
    nb = 1 << n_tls
    dim = nb * m
    b0 = 0
    w_best = -1.0
    for b in range(nb):
        w = 0.0
        for i in range(m):
            x = vectors[b * m + i, 0]
            w += x * x
        if w > w_best:
            w_best = w
            b0 = b
    for k in range(1, max_states + 1):
        freqs[k - 1] = values[k] - values[0]
        overlap = 0.0
        for i in range(dim):
            q = 2.0 * (n_lo + i % m) - n_g
            overlap += vectors[i, k] * q * vectors[i, 0]
        vis[k - 1] = overlap * overlap
        for b in range(nb):
            w = 0.0
            for i in range(m):
                x = vectors[b * m + i, k]
                w += x * x
            flipped = b ^ b0
            if flipped == 0:
                cpbf[k - 1] = w
            if flipped & 1:
                flip1[k - 1] += w
            if flipped & 2:
                flip2[k - 1] += w
    return True, off, freqs, vis, cpbf, flip1, flip2


def _lines_at(config, n_g, max_states):
    m = config.cpb.n_charge_states
    h = build_hamiltonian(config, n_g)
    converged, off, freqs, vis, cpbf, flip1, flip2 = _transition_data(
        h, m, config.n_tls, float(n_g), 1 - (m + 1) // 2, max_states,
        REL_TOL, MAX_SWEEPS, SIGN_TOL,
    )
    if not converged:
        raise ConvergenceError(off, MAX_SWEEPS)
    lines = []
    for k in range(max_states):
        if config.n_tls == 0:
            flips = ()
        elif config.n_tls == 1:
            flips = (float(flip1[k]),)
        else:
            flips = (float(flip1[k]), float(flip2[k]))
        lines.append(TransitionLine(
            n_g=float(n_g),
            state_index=k + 1,
            freq=float(freqs[k]),
            cpb_fraction=float(cpbf[k]),
            tls_flip_fractions=flips,
            visibility=float(vis[k]),
        ))
    return lines


def resolve_max_states(config: ModelConfig, max_states=None) -> int:
    """Default state count: all defect-split branches of the first CPB
    transition (``2**n_tls * 2``) capped at dim - 1."""
    if max_states is None:
        return min(config.dim - 1, 2 << config.n_tls)
    if not isinstance(max_states, int) or isinstance(max_states, bool):
        raise ValueError("max_states must be an int")
    if not 1 <= max_states < config.dim:
        raise ValueError(
            f"max_states must lie in [1, {config.dim - 1}], got {max_states}"
        )
    return max_states


def transitions_at(config: ModelConfig, n_g: float, max_states=None) -> list:
    """Transition lines from the ground state at one gate charge.

    Parameters
    ----------
    config : ModelConfig
    n_g : float
        Reduced gate charge in [0, 2].
    max_states : int, optional
        Number of excited states to report, 1 <= max_states < config.dim.
        Defaults to the defect-split multiplet count ``2**(n_tls+1)``
        capped at dim - 1.

    Returns
    -------
    list of TransitionLine
        Ordered by state_index (ascending frequency).
    """
    max_states = resolve_max_states(config, max_states)
    return _lines_at(config, n_g, max_states)


def spectrum(config: ModelConfig, n_g_grid, max_states=None) -> SpectrumTable:
    """Transition lines over an ascending gate-charge grid.

    Parameters
    ----------
    config : ModelConfig
    n_g_grid : array_like
        Strictly ascending gate charges, all in [0, 2].
    max_states : int, optional
        As in :func:`transitions_at`.

    Returns
    -------
    SpectrumTable
        ``lines`` holds ``len(grid) * max_states`` entries, grid-major.
    """
    grid = np.asarray(n_g_grid, dtype=np.float64)
    if grid.ndim != 1 or grid.size == 0:
        raise ValueError("n_g_grid must be a non-empty 1-d array")
    if np.any(~np.isfinite(grid)) or grid[0] < 0.0 or grid[-1] > 2.0:
        raise ValueError("grid values must be finite and lie in [0, 2]")
    if grid.size > 1 and np.any(np.diff(grid) <= 0.0):
        raise ValueError("grid must be strictly ascending")
    max_states = resolve_max_states(config, max_states)
    lines = []
    for n_g in grid:
        lines.extend(_lines_at(config, n_g, max_states))
    return SpectrumTable(grid=grid, lines=tuple(lines))


def dispersive_shift(res: ResonatorParams, qubit_freq: float) -> float:
    """Two-level dispersive pull ``g**2 / (qubit_freq - omega_r)`` in GHz."""
    if not (math.isfinite(qubit_freq) and qubit_freq > 0.0):
        raise ValueError(f"qubit_freq must be positive, got {qubit_freq}")
    detuning = qubit_freq - res.omega_r
    if detuning == 0.0:
        raise ValueError("qubit and resonator are exactly resonant")
    return res.g * res.g / detuning


def chi_eff_multilevel(
    config: ModelConfig, res: ResonatorParams, n_g: float, state_index: int = 0
) -> float:
    """Multilevel dispersive shift of the resonator for one qubit state.

    Sums ``g**2 w_jk * 2 omega_kj / (omega_kj**2 - omega_r**2)`` over all
    other eigenstates k, with omega_kj = E_k - E_j (signed) and matrix
    element weights ``w_jk = |<k| Q |j>|**2`` normalized to the bare-box
    ground-to-first charge matrix element at n_g = 1 for the same charge
    window and Josephson energy.

    Raises
    ------
    ValueError
        If any |omega_kj| sits within 1e-6 GHz of omega_r (the dispersive
        expansion breaks down); the message names the offending pair.
    """
    from .eigen import eigendecompose

    if not isinstance(res, ResonatorParams):
        raise ValueError("res must be a ResonatorParams")
    if not isinstance(state_index, int) or isinstance(state_index, bool):
        raise ValueError("state_index must be an int")
    if not 0 <= state_index < config.dim:
        raise ValueError(
            f"state_index must lie in [0, {config.dim - 1}], got {state_index}"
        )
    system = eigendecompose(build_hamiltonian(config, n_g))
    m = config.cpb.n_charge_states
    n_lo = 1 - (m + 1) // 2
    q = 2.0 * (n_lo + np.arange(config.dim) % m) - float(n_g)

    bare = ModelConfig(cpb=config.cpb, flux_ratio=config.flux_ratio)
    bare_sys = eigendecompose(build_hamiltonian(bare, 1.0))
    q_bare = 2.0 * (n_lo + np.arange(m)) - 1.0
    norm = float(bare_sys.vectors[:, 1] @ (q_bare * bare_sys.vectors[:, 0])) ** 2

    j = state_index
    elements = system.vectors.T @ (q * system.vectors[:, j])
    chi = 0.0
    for k in range(config.dim):
        if k == j:
            continue
        omega_kj = system.values[k] - system.values[j]
        if abs(abs(omega_kj) - res.omega_r) < 1e-6:
            raise ValueError(
                f"transition {j}->{k} at {omega_kj:.9g} GHz is resonant with "
                f"omega_r = {res.omega_r:.9g} GHz"
            )
        w = elements[k] ** 2 / norm
        chi += res.g * res.g * w * 2.0 * omega_kj / (omega_kj**2 - res.omega_r**2)
    return chi
