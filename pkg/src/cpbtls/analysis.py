"""Derived junction and defect quantities from fitted model parameters.

Converts the spectroscopic energies (GHz) into material-level numbers:
critical currents, junction capacitance, current density, the defect's
effective junction area and charge hop distance, its level splitting, and
a bound on the qubit relaxation time set by phonon emission of the defect.
Exact SI constants (2019 redefinition) are used throughout.
"""

import math
from dataclasses import dataclass

__all__ = [
    "PLANCK",
    "E_CHARGE",
    "FLUX_QUANTUM",
    "BOLTZMANN_GHZ_PER_MK",
    "JunctionGeometry",
    "DerivedReport",
    "critical_current",
    "josephson_energy",
    "capacitance_from_charging_energy",
    "current_density",
    "fractional_and_area",
    "hop_distance",
    "island_potential_shift",
    "tls_frequency",
    "t1_bound",
    "derived_report",
]

PLANCK = 6.62607015e-34  # J s
E_CHARGE = 1.602176634e-19  # C
FLUX_QUANTUM = PLANCK / (2.0 * E_CHARGE)  # Wb
BOLTZMANN_GHZ_PER_MK = 1.380649e-23 / PLANCK / 1e9 / 1e3  # (k_B/h) in GHz per mK


@dataclass(frozen=True)
class JunctionGeometry:
    """Junction and defect geometry.

    Parameters
    ----------
    area_nm2 : float
        Area of a single junction in nm^2.
    barrier_thickness_nm : float
        Tunnel barrier thickness in nm.
    tls_charge_e : float
        Magnitude of the hopping defect charge in units of e.
    n_junctions : int
        Number of junctions sharing the critical current (2 for a SQUID).
    """

    area_nm2: float
    barrier_thickness_nm: float = 1.0
    tls_charge_e: float = 1.0
    n_junctions: int = 2

    def __post_init__(self):
        for name in ("area_nm2", "barrier_thickness_nm", "tls_charge_e"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0.0):
                raise ValueError(f"{name} must be positive, got {v}")
        if not isinstance(self.n_junctions, int) or self.n_junctions < 1:
            raise ValueError(
                f"n_junctions must be a positive int, got {self.n_junctions}"
            )

    @property
    def total_area_nm2(self) -> float:
        return self.area_nm2 * self.n_junctions


def critical_current(e_j_ghz: float) -> float:
    """Critical current I_0 = 2 pi E_J / Phi_0 in nA from E_J/h in GHz.

    Linear in E_J, so it applies equally to differences such as the
    defect-induced delta E_J (which maps to a delta I_0).
    """
    if not (math.isfinite(e_j_ghz) and e_j_ghz >= 0.0):
        raise ValueError(f"e_j_ghz must be >= 0, got {e_j_ghz}")
    return 2.0 * math.pi * PLANCK * e_j_ghz * 1e9 / FLUX_QUANTUM * 1e9


def josephson_energy(i0_na: float) -> float:
    """Inverse of :func:`critical_current`: E_J/h in GHz from I_0 in nA."""
    if not (math.isfinite(i0_na) and i0_na >= 0.0):
        raise ValueError(f"i0_na must be >= 0, got {i0_na}")
    return i0_na * 1e-9 * FLUX_QUANTUM / (2.0 * math.pi * PLANCK) / 1e9


def capacitance_from_charging_energy(e_c_ghz: float) -> float:
    """Total island capacitance C_Sigma = e^2 / (2 h E_C) in fF."""
    if not (math.isfinite(e_c_ghz) and e_c_ghz > 0.0):
        raise ValueError(f"e_c_ghz must be positive, got {e_c_ghz}")
    return E_CHARGE**2 / (2.0 * PLANCK * e_c_ghz * 1e9) * 1e15


def current_density(e_j_max_ghz: float, geom: JunctionGeometry) -> float:
    """Critical current density I_0 / A_total in A/cm^2.

    Uses the zero-flux Josephson energy and the combined area of all
    junctions.
    """
    i0_na = critical_current(e_j_max_ghz)
    return i0_na * 1e5 / geom.total_area_nm2


def fractional_and_area(e_j_ghz: float, delta_e_j_ghz: float,
                        area_nm2: float) -> tuple:
    """Fractional critical-current change and effective defect area.

    Returns ``(|delta_e_j| / e_j, fraction * area_nm2)``: the defect
    modulates the junction transparency over an effective area
    ``a_eff = (delta I_0 / I_0) * A_junction``.
    """
    if not (math.isfinite(e_j_ghz) and e_j_ghz > 0.0):
        raise ValueError(f"e_j_ghz must be positive, got {e_j_ghz}")
    if not math.isfinite(delta_e_j_ghz):
        raise ValueError(f"delta_e_j_ghz must be finite, got {delta_e_j_ghz}")
    if not (math.isfinite(area_nm2) and area_nm2 > 0.0):
        raise ValueError(f"area_nm2 must be positive, got {area_nm2}")
    fraction = abs(delta_e_j_ghz) / e_j_ghz
    return fraction, fraction * area_nm2


def hop_distance(e_int_ghz: float, e_c_ghz: float,
                 geom: JunctionGeometry) -> float:
    """Defect charge hop distance along the field direction, in Angstrom.

    The charge coupling e_int equals ``2 e_c (q/e) (d_hop / d_barrier)``,
    so ``d_hop = |e_int| d_barrier / (2 e_c q/e)``.
    """
    if not math.isfinite(e_int_ghz):
        raise ValueError(f"e_int_ghz must be finite, got {e_int_ghz}")
    if not (math.isfinite(e_c_ghz) and e_c_ghz > 0.0):
        raise ValueError(f"e_c_ghz must be positive, got {e_c_ghz}")
    d_hop_nm = abs(e_int_ghz) * geom.barrier_thickness_nm / (
        2.0 * e_c_ghz * geom.tls_charge_e
    )
    return d_hop_nm * 10.0


def island_potential_shift(geom: JunctionGeometry, c_sigma_ff: float,
                           hop_nm: float) -> float:
    """Island potential change when the defect hops, in microvolts.

    The hopping charge ``q = tls_charge_e * e`` moves a fraction
    ``hop_nm / barrier_thickness_nm`` of the way across the barrier, so the
    induced island voltage is ``(q / C_Sigma) * (hop / thickness)``.
    """
    if not (math.isfinite(c_sigma_ff) and c_sigma_ff > 0.0):
        raise ValueError(f"c_sigma_ff must be positive, got {c_sigma_ff}")
    if not (math.isfinite(hop_nm) and hop_nm >= 0.0):
        raise ValueError(f"hop_nm must be >= 0, got {hop_nm}")
    q = geom.tls_charge_e * E_CHARGE
    volts = q / (c_sigma_ff * 1e-15) * (hop_nm / geom.barrier_thickness_nm)
    return volts * 1e6


def tls_frequency(e_r_ghz: float, t_lr_ghz: float) -> float:
    """Defect level splitting ``sqrt(e_r**2 + 4 t_lr**2)`` in GHz."""
    if not math.isfinite(e_r_ghz):
        raise ValueError(f"e_r_ghz must be finite, got {e_r_ghz}")
    if not (math.isfinite(t_lr_ghz) and t_lr_ghz >= 0.0):
        raise ValueError(f"t_lr_ghz must be >= 0, got {t_lr_ghz}")
    return math.hypot(e_r_ghz, 2.0 * t_lr_ghz)


def t1_bound(alpha_inv: float, omega_ghz: float, t_lr_ghz: float,
             temperature_mk: float) -> float:
    """Relaxation-time bound from defect phonon emission, in microseconds.

    ``T_1 = alpha_inv / (omega * t_lr**2 * coth(omega / (2 k_B T / h)))``
    with energies in GHz; alpha_inv is the inverse of the dimensionless
    defect-phonon coupling. Diverges as t_lr -> 0 (a frozen defect cannot
    relax the qubit), so t_lr = 0 is rejected; report the bound as
    unbounded in that case.
    """
    if not (math.isfinite(alpha_inv) and alpha_inv > 0.0):
        raise ValueError(f"alpha_inv must be positive, got {alpha_inv}")
    if not (math.isfinite(omega_ghz) and omega_ghz > 0.0):
        raise ValueError(f"omega_ghz must be positive, got {omega_ghz}")
    if not (math.isfinite(temperature_mk) and temperature_mk > 0.0):
        raise ValueError(f"temperature_mk must be positive, got {temperature_mk}")
    if not (math.isfinite(t_lr_ghz) and t_lr_ghz > 0.0):
        raise ValueError(f"t_lr_ghz must be positive, got {t_lr_ghz}")
    kbt_ghz = BOLTZMANN_GHZ_PER_MK * temperature_mk
    coth = 1.0 / math.tanh(omega_ghz / (2.0 * kbt_ghz))
    return alpha_inv / (omega_ghz * t_lr_ghz**2 * coth)


@dataclass(frozen=True)
class DerivedReport:
    """Derived quantities for one defect on one device.

    ``t1_bound_us`` is None when the defect tunneling amplitude is zero
    (the bound diverges).
    """

    i0_na: float
    c_sigma_ff: float
    current_density_a_cm2: float
    delta_i0_na: float
    fractional_delta_ej: float
    a_eff_nm2: float
    hop_distance_angstrom: float
    island_shift_uv: float
    tls_freq_ghz: float
    t1_bound_us: float


def derived_report(e_c_ghz: float, e_j_ghz: float, e_j_max_ghz: float,
                   tls, geom: JunctionGeometry, alpha_inv: float = 100.0,
                   temperature_mk: float = 25.0) -> DerivedReport:
    """All derived quantities for one defect.

    Parameters
    ----------
    e_c_ghz, e_j_ghz, e_j_max_ghz : float
        Charging energy, working Josephson energy at the measurement flux,
        and zero-flux Josephson energy, all in GHz.
    tls : TlsParams
        Fitted defect parameters.
    geom : JunctionGeometry
    alpha_inv : float
        Inverse defect-phonon coupling for the T_1 bound.
    temperature_mk : float
        Device temperature in mK.
    """
    c_sigma = capacitance_from_charging_energy(e_c_ghz)
    hop_a = hop_distance(tls.e_int, e_c_ghz, geom)
    freq = tls_frequency(tls.e_r, tls.t_lr)
    if tls.t_lr > 0.0:
        t1 = t1_bound(alpha_inv, freq, tls.t_lr, temperature_mk)
    else:
        t1 = None
    frac, a_eff = fractional_and_area(e_j_ghz, tls.delta_e_j, geom.area_nm2)
    return DerivedReport(
        i0_na=critical_current(e_j_ghz),
        c_sigma_ff=c_sigma,
        current_density_a_cm2=current_density(e_j_max_ghz, geom),
        delta_i0_na=critical_current(abs(tls.delta_e_j)),
        fractional_delta_ej=frac,
        a_eff_nm2=a_eff,
        hop_distance_angstrom=hop_a,
        island_shift_uv=island_potential_shift(geom, c_sigma, hop_a / 10.0),
        tls_freq_ghz=freq,
        t1_bound_us=t1,
    )
