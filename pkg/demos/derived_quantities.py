"""From fitted energies to junction and defect numbers.

Translates the spectroscopic energy scales into laboratory quantities:
junction critical current and capacitance, the defect's share of the
critical current and its effective junction area, the charge hop distance
across the barrier, the island potential shift it causes, the defect's own
transition frequency, and an order-of-magnitude relaxation-time bound for
the qubit via its coupling to the defect.
"""

from cpbtls import derived_report
from cpbtls.presets import (
    DEVICE_ALPHA_INV,
    DEVICE_E_J_MAX,
    DEVICE_GEOMETRY,
    DEVICE_TEMPERATURE_MK,
    single_defect_config,
)


def main():
    config = single_defect_config(4)
    geom = DEVICE_GEOMETRY
    print("== device inputs ==")
    print(f"e_c = {config.cpb.e_c} GHz, e_j = {config.e_j} GHz "
          f"(max {DEVICE_E_J_MAX} GHz)")
    print(f"junctions: {geom.n_junctions} x {geom.area_nm2:.0f} nm^2, "
          f"barrier {geom.barrier_thickness_nm} nm, "
          f"defect charge {geom.tls_charge_e} e")
    print(f"bath: {DEVICE_TEMPERATURE_MK} mK, "
          f"1/alpha = {DEVICE_ALPHA_INV} us GHz^3")

    report = derived_report(
        config.cpb.e_c,
        config.e_j,
        DEVICE_E_J_MAX,
        config.tls[0],
        geom,
        alpha_inv=DEVICE_ALPHA_INV,
        temperature_mk=DEVICE_TEMPERATURE_MK,
    )
    print("\n== junction ==")
    print(f"critical current i0          = {report.i0_na:10.4f} nA")
    print(f"island capacitance c_sigma   = {report.c_sigma_ff:10.4f} fF")
    print(f"critical current density     = {report.current_density_a_cm2:10.4f} A/cm^2")
    print("\n== defect ==")
    print(f"critical-current modulation  = {report.delta_i0_na:10.4f} nA")
    print(f"fractional e_j modulation    = {report.fractional_delta_ej:10.4f}")
    print(f"effective defect area        = {report.a_eff_nm2:10.1f} nm^2")
    print(f"charge hop distance          = {report.hop_distance_angstrom:10.4f} angstrom")
    print(f"island potential shift       = {report.island_shift_uv:10.4f} uV")
    print(f"defect transition frequency  = {report.tls_freq_ghz:10.4f} GHz")
    if report.t1_bound_us is None:
        print("qubit t1 bound               =        inf (defect decoupled)")
    else:
        print(f"qubit t1 bound               = {report.t1_bound_us:10.1f} us")


if __name__ == "__main__":
    main()
