"""Charge-basis Hamiltonians for a Cooper-pair box coupled to tunneling defects.

All energies are in GHz (E/h). The island charge basis counts excess Cooper
pairs n inside a window of ``m = n_charge_states`` states centered on the
operating point, ``n = 1 - ceil(m/2), ..., floor(m/2)``, so that the two
states closest to the n_g = 1 degeneracy are always included (m = 2 keeps
{0, 1}, m = 4 keeps {-1, 0, 1, 2}).

Each two-level defect (TLS) tunnels between a left (L) and a right (R)
position. The combined basis is the tensor product of defect positions and
island charge, ordered with the defect-2 position outermost (L before R),
then the defect-1 position, then charge ascending. For one defect the
blocks are therefore [L, R]; for two defects [LL, RL, LR, RR] where the
first letter is defect 1. Within a block the island sees a shifted
Josephson energy (+delta_e_j/2 in L, -delta_e_j/2 in R) and, in R, a charge
coupling ``e_int * (2n - n_g)`` plus the bare defect asymmetry ``e_r``.
When both defects sit in R the island also mediates a defect-defect
interaction ``e_int_1 * e_int_2 / (2 e_c)``. Defect tunneling amplitudes
enter as identity couplings between blocks: t_lr of defect 1 between blocks
differing in the first letter, t_lr of defect 2 between blocks differing in
the second, and the direct pair amplitude t_12 between blocks differing in
both.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np

from ._accel import jit_kernel

__all__ = [
    "CpbParams",
    "TlsParams",
    "ModelConfig",
    "charge_window",
    "ej_from_flux",
    "build_cpb_block",
    "build_single_tls",
    "build_two_tls",
    "build_hamiltonian",
]


@dataclass(frozen=True)
class CpbParams:
    """Cooper-pair box parameters.

    Parameters
    ----------
    e_c : float
        Single-electron charging energy E_C/h in GHz, > 0.
    e_j_max : float
        Maximum (zero-flux) Josephson energy E_J/h in GHz, > 0.
    n_charge_states : int
        Number of island charge states kept, between 2 and 8.
    """

    e_c: float
    e_j_max: float
    n_charge_states: int = 4

    def __post_init__(self):
        if not (math.isfinite(self.e_c) and self.e_c > 0.0):
            raise ValueError(f"e_c must be a positive finite energy, got {self.e_c}")
        if not (math.isfinite(self.e_j_max) and self.e_j_max > 0.0):
            raise ValueError(
                f"e_j_max must be a positive finite energy, got {self.e_j_max}"
            )
        if not isinstance(self.n_charge_states, int) or isinstance(
            self.n_charge_states, bool
        ):
            raise ValueError("n_charge_states must be an int")
        if not 2 <= self.n_charge_states <= 8:
            raise ValueError(
                f"n_charge_states must be between 2 and 8, got {self.n_charge_states}"
            )


@dataclass(frozen=True)
class TlsParams:
    """Parameters of one two-level defect, all in GHz.

    Parameters
    ----------
    e_r : float
        Energy offset of the right defect position relative to the left.
    t_lr : float
        Defect tunneling amplitude between the two positions, >= 0.
    e_int : float
        Defect-island charge coupling; enters the right-position block as
        ``e_int * (2n - n_g)``.
    delta_e_j : float
        Josephson energy difference between the defect positions; the
        island sees e_j + delta_e_j/2 in L and e_j - delta_e_j/2 in R.
    """

    e_r: float
    t_lr: float
    e_int: float
    delta_e_j: float

    def __post_init__(self):
        for name in ("e_r", "t_lr", "e_int", "delta_e_j"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise ValueError(f"{name} must be finite, got {v}")
        if self.t_lr < 0.0:
            raise ValueError(f"t_lr must be >= 0, got {self.t_lr}")


@dataclass(frozen=True)
class ModelConfig:
    """A Cooper-pair box with zero, one, or two defects at fixed flux.

    Parameters
    ----------
    cpb : CpbParams
        Island parameters.
    flux_ratio : float
        Applied flux through the SQUID loop in units of the flux quantum;
        the working Josephson energy is ``e_j_max * cos(pi * flux_ratio)``.
    tls : tuple of TlsParams
        Zero, one, or two defects.
    t_12 : float
        Direct pair tunneling amplitude between the two defects; only
        meaningful with two defects present.
    """

    cpb: CpbParams
    flux_ratio: float = 0.0
    tls: tuple = ()
    t_12: float = 0.0

    def __post_init__(self):
        if not isinstance(self.cpb, CpbParams):
            raise ValueError("cpb must be a CpbParams")
        if not math.isfinite(self.flux_ratio):
            raise ValueError(f"flux_ratio must be finite, got {self.flux_ratio}")
        tls = tuple(self.tls)
        object.__setattr__(self, "tls", tls)
        if len(tls) > 2 or any(not isinstance(t, TlsParams) for t in tls):
            raise ValueError("tls must hold at most two TlsParams")
        if not math.isfinite(self.t_12):
            raise ValueError(f"t_12 must be finite, got {self.t_12}")
        if self.t_12 != 0.0 and len(tls) < 2:
            raise ValueError("t_12 requires two defects")
        # cos(pi/2) is ~6e-17 in floating point, so compare against the
        # zero-flux scale rather than literal zero.
        if abs(self.e_j) < 1e-9 * self.cpb.e_j_max:
            raise ValueError(
                f"flux_ratio {self.flux_ratio} tunes the Josephson energy to zero"
            )

    @property
    def n_tls(self) -> int:
        return len(self.tls)

    @property
    def e_j(self) -> float:
        """Working Josephson energy at the configured flux, in GHz."""
        return ej_from_flux(self.cpb.e_j_max, self.flux_ratio)

    @property
    def dim(self) -> int:
        """Hilbert-space dimension, ``n_charge_states * 2**n_tls``."""
        return self.cpb.n_charge_states * (1 << len(self.tls))


def charge_window(m: int) -> np.ndarray:
    """Island charge values kept for an m-state truncation.

    Returns the integers ``1 - ceil(m/2), ..., floor(m/2)`` so the window is
    centered on the n_g = 1 operating point. For even m the window maps onto
    itself under n -> 1 - n, which makes the spectrum exactly symmetric
    about n_g = 1; odd m breaks that symmetry by construction.
    """
    if not isinstance(m, int) or isinstance(m, bool) or m < 1:
        raise ValueError(f"m must be a positive int, got {m}")
    lo = 1 - (m + 1) // 2
    return np.arange(lo, m // 2 + 1)


def ej_from_flux(e_j_max: float, flux_ratio: float) -> float:
    """Flux-tuned Josephson energy ``e_j_max * cos(pi * flux_ratio)``, signed."""
    if not (math.isfinite(e_j_max) and e_j_max > 0.0):
        raise ValueError(f"e_j_max must be a positive finite energy, got {e_j_max}")
    if not math.isfinite(flux_ratio):
        raise ValueError(f"flux_ratio must be finite, got {flux_ratio}")
    return e_j_max * math.cos(math.pi * flux_ratio)


@jit_kernel
def _fill_block(h, base, m, n_lo, e_c, n_g, e_j_eff, e_int_sum, e_offset):
    for i in range(m):
        q = 2.0 * (n_lo + i) - n_g
        h[base + i, base + i] = e_c * q * q + e_int_sum * q + e_offset
    for i in range(m - 1):
        h[base + i, base + i + 1] = -0.5 * e_j_eff
        h[base + i + 1, base + i] = -0.5 * e_j_eff


@jit_kernel
def _build_matrix(m, n_lo, e_c, e_j, n_g, n_tls, tls, t_12):
    # tls rows: (e_r, t_lr, e_int, delta_e_j); block index b has bit i set
    # when defect i+1 sits in R, so b enumerates L/R patterns with defect 1
    # fastest: [L, R] or [LL, RL, LR, RR].
    nb = 1 << n_tls
    dim = nb * m
    h = np.zeros((dim, dim))
    for b in range(nb):
        e_j_eff = e_j
        e_int_sum = 0.0
        e_offset = 0.0
        for i in range(n_tls):
            if (b >> i) & 1:
                e_j_eff -= 0.5 * tls[i, 3]
                e_int_sum += tls[i, 2]
                e_offset += tls[i, 0]
            else:
                e_j_eff += 0.5 * tls[i, 3]
        if nb == 4 and b == 3:
            e_offset += tls[0, 2] * tls[1, 2] / (2.0 * e_c)
        _fill_block(h, b * m, m, n_lo, e_c, n_g, e_j_eff, e_int_sum, e_offset)
    for a in range(nb):
        for b in range(a + 1, nb):
            x = a ^ b
            if x == 1:
                t = tls[0, 1]
            elif x == 2:
                t = tls[1, 1]
            else:
                t = t_12
            for i in range(m):
                h[a * m + i, b * m + i] = t
                h[b * m + i, a * m + i] = t
    return h


def _tls_array(config: ModelConfig) -> np.ndarray:
    tls = np.zeros((2, 4))
    for i, t in enumerate(config.tls):
        tls[i] = (t.e_r, t.t_lr, t.e_int, t.delta_e_j)
    return tls


def _warn_negative_wells(config: ModelConfig):
    # A negative effective Josephson energy in some block is legal (the
    # eigenvalues only depend on |e_j_eff| within a block) but usually means
    # the flux point or delta_e_j is outside the intended regime.
    n_tls = config.n_tls
    e_j = config.e_j
    for b in range(1 << n_tls):
        e_j_eff = e_j
        for i in range(n_tls):
            sign = -1.0 if (b >> i) & 1 else 1.0
            e_j_eff += 0.5 * sign * config.tls[i].delta_e_j
        if e_j_eff < 0.0:
            warnings.warn(
                f"effective Josephson energy {e_j_eff:.6g} GHz in defect "
                f"block {b} is negative",
                RuntimeWarning,
                stacklevel=3,
            )


def build_cpb_block(
    cpb: CpbParams,
    n_g: float,
    e_j_eff: float,
    e_int_sum: float = 0.0,
    e_offset: float = 0.0,
) -> np.ndarray:
    """One m x m island block at gate charge n_g.

    Diagonal entries are ``e_c*(2n - n_g)**2 + e_int_sum*(2n - n_g) +
    e_offset`` over the charge window; entries adjacent in n carry
    ``-e_j_eff/2``.
    """
    if not isinstance(cpb, CpbParams):
        raise ValueError("cpb must be a CpbParams")
    _check_gate(n_g)
    for name, v in (("e_j_eff", e_j_eff), ("e_int_sum", e_int_sum),
                    ("e_offset", e_offset)):
        if not math.isfinite(v):
            raise ValueError(f"{name} must be finite, got {v}")
    m = cpb.n_charge_states
    n_lo = 1 - (m + 1) // 2
    h = np.zeros((m, m))
    _fill_block(h, 0, m, n_lo, cpb.e_c, float(n_g), e_j_eff, e_int_sum, e_offset)
    if e_j_eff < 0.0:
        warnings.warn(
            f"effective Josephson energy {e_j_eff:.6g} GHz is negative",
            RuntimeWarning,
            stacklevel=2,
        )
    return h


def build_single_tls(config: ModelConfig, n_g: float) -> np.ndarray:
    """The 2m x 2m Hamiltonian for one defect; blocks ordered [L, R]."""
    if config.n_tls != 1:
        raise ValueError(f"expected exactly one defect, got {config.n_tls}")
    return build_hamiltonian(config, n_g)


def build_two_tls(config: ModelConfig, n_g: float) -> np.ndarray:
    """The 4m x 4m Hamiltonian for two defects; blocks ordered [LL, RL, LR, RR]."""
    if config.n_tls != 2:
        raise ValueError(f"expected exactly two defects, got {config.n_tls}")
    return build_hamiltonian(config, n_g)


def build_hamiltonian(config: ModelConfig, n_g: float) -> np.ndarray:
    """Full symmetric Hamiltonian of the configured model at gate charge n_g.

    Parameters
    ----------
    config : ModelConfig
    n_g : float
        Reduced gate charge in [0, 2].

    Returns
    -------
    ndarray
        Real symmetric matrix of shape ``(config.dim, config.dim)``.
    """
    if not isinstance(config, ModelConfig):
        raise ValueError("config must be a ModelConfig")
    _check_gate(n_g)
    _warn_negative_wells(config)
    m = config.cpb.n_charge_states
    return _build_matrix(
        m,
        1 - (m + 1) // 2,
        config.cpb.e_c,
        config.e_j,
        float(n_g),
        config.n_tls,
        _tls_array(config),
        config.t_12,
    )


def _check_gate(n_g):
    if not (math.isfinite(n_g) and 0.0 <= n_g <= 2.0):
        raise ValueError(f"n_g must lie in [0, 2], got {n_g}")
