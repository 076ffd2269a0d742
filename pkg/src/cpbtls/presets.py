"""Reference parameter sets from a characterized CPB device.

Four single-defect sets (one per measured flux point) and two two-defect
sets from a second cooldown of the same device, plus the device-level
constants used by the derived-quantity analysis. These feed the demos and
regression tests; energies are in GHz.
"""

from .analysis import JunctionGeometry
from .hamiltonian import CpbParams, ModelConfig, TlsParams
from .spectra import ResonatorParams

__all__ = [
    "SINGLE_DEFECT_E_C",
    "DOUBLE_DEFECT_E_C",
    "single_defect_config",
    "double_defect_config",
    "DEVICE_E_J_MAX",
    "DEVICE_RESONATOR",
    "DEVICE_GEOMETRY",
    "DEVICE_TEMPERATURE_MK",
    "DEVICE_ALPHA_INV",
]

SINGLE_DEFECT_E_C = 4.5
DOUBLE_DEFECT_E_C = 4.3

# (e_j, delta_e_j, e_r, e_int, t_lr) per flux point.
_SINGLE_SETS = (
    (3.64, 1.50, 0.62, 0.35, 0.01),
    (4.16, 1.54, 0.62, 0.35, 0.01),
    (5.93, 1.84, 0.62, 0.35, 0.06),
    (6.33, 2.02, 0.62, 0.35, 0.06),
)

# (e_j, tls1 params, tls2 params, t_12) per flux point;
# each tls tuple is (delta_e_j, e_r, e_int, t_lr).
_DOUBLE_SETS = (
    (2.79, (1.36, 0.62, -0.40, 0.00), (-1.00, -0.82, 0.13, 0.04), 0.04),
    (3.43, (1.40, 0.62, -0.40, 0.00), (-0.68, -0.69, 0.15, 0.04), 0.04),
)

DEVICE_E_J_MAX = 7.33
DEVICE_RESONATOR = ResonatorParams(omega_r=5.47, g=0.1)
DEVICE_GEOMETRY = JunctionGeometry(
    area_nm2=350.0 * 150.0, barrier_thickness_nm=1.0,
    tls_charge_e=1.0, n_junctions=2,
)
DEVICE_TEMPERATURE_MK = 25.0
DEVICE_ALPHA_INV = 100.0


def single_defect_config(index: int, n_charge_states: int = 4) -> ModelConfig:
    """Single-defect model for flux point ``index`` in 1..4."""
    if index not in (1, 2, 3, 4):
        raise ValueError(f"index must be 1..4, got {index}")
    e_j, delta_e_j, e_r, e_int, t_lr = _SINGLE_SETS[index - 1]
    return ModelConfig(
        cpb=CpbParams(e_c=SINGLE_DEFECT_E_C, e_j_max=e_j,
                      n_charge_states=n_charge_states),
        tls=(TlsParams(e_r=e_r, t_lr=t_lr, e_int=e_int, delta_e_j=delta_e_j),),
    )


def double_defect_config(index: int, n_charge_states: int = 4) -> ModelConfig:
    """Two-defect model for flux point ``index`` in 1..2."""
    if index not in (1, 2):
        raise ValueError(f"index must be 1 or 2, got {index}")
    e_j, tls1, tls2, t_12 = _DOUBLE_SETS[index - 1]

    def mk(t):
        delta_e_j, e_r, e_int, t_lr = t
        return TlsParams(e_r=e_r, t_lr=t_lr, e_int=e_int, delta_e_j=delta_e_j)

    return ModelConfig(
        cpb=CpbParams(e_c=DOUBLE_DEFECT_E_C, e_j_max=e_j,
                      n_charge_states=n_charge_states),
        tls=(mk(tls1), mk(tls2)),
        t_12=t_12,
    )
