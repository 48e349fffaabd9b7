//! Reference parameter sets: the measured 180 nm power-gating switch, scaled
//! CMOS projections, the extracted NEMS switches and the harvesting setup.

use crate::consts::EPSILON_0;
use crate::devices::{Environment, MosDevice, NemsCapacitiveSwitch, NemsOhmicSwitch};

/// Super cut-off bias at the leakage minimum for the thick-oxide devices, V.
pub const V_GSP_OPT: f64 = 0.3;
/// Leakage reduction at the optimum for the 180 nm switch.
pub const REDUCTION_180NM: f64 = 186.0;
/// Leakage reduction at the optimum for the 28 nm projection.
pub const REDUCTION_28NM: f64 = 518.0;
/// Static (parallel-plate) pull-in of the reference capacitive switch, V.
pub const NEMS_STATIC_PULL_IN: f64 = 2.8;

fn uncalibrated_180nm() -> MosDevice {
    MosDevice {
        beta: 33.9,
        n: 1.5,
        v_th: 0.5,
        v_sg_max: 3.3,
        gidl_i0: 0.0,
        gidl_slope: 0.1,
        gate_leak_density: 10e-15 / 1e-6,
        width: 15e-3,
    }
}

/// Thick-oxide 180 nm PMOS header switch (15 mm wide), GIDL fitted to the
/// measured optimum at room temperature.
pub fn mos_180nm() -> MosDevice {
    uncalibrated_180nm()
        .calibrate_gidl(V_GSP_OPT, REDUCTION_180NM, &Environment::room())
        .expect("180 nm calibration targets are feasible")
}

/// 180 nm switch with GIDL disabled.
pub fn mos_180nm_no_gidl() -> MosDevice {
    uncalibrated_180nm()
}

/// 28 nm thick-oxide projection (20 mm wide, 0.9 V supply).
pub fn mos_28nm() -> MosDevice {
    MosDevice {
        beta: 60.0,
        n: 1.5,
        v_th: 0.45,
        v_sg_max: 1.8,
        gidl_i0: 0.0,
        gidl_slope: 0.1,
        gate_leak_density: 10e-15 / 1e-6,
        width: 20e-3,
    }
    .calibrate_gidl(V_GSP_OPT, REDUCTION_28NM, &Environment::room())
    .expect("28 nm calibration targets are feasible")
}

/// 65 nm header switch used for the super turn-on example (1.2 V supply,
/// 2.5 V oxide limit). GIDL off.
pub fn mos_65nm() -> MosDevice {
    MosDevice {
        beta: 20.0,
        n: 1.5,
        v_th: 0.5,
        v_sg_max: 2.5,
        gidl_i0: 0.0,
        gidl_slope: 0.1,
        gate_leak_density: 10e-15 / 1e-6,
        width: 10e-3,
    }
}

/// Extracted capacitive switch with a geometry consistent with both gains.
///
/// The plate area reproduces `c_off`, `gamma` maps the theoretical gain onto
/// the extracted one, and `k_eff` places the parallel-plate pull-in at
/// [`NEMS_STATIC_PULL_IN`]. The hysteresis thresholds are the extracted ones.
pub fn nems_capacitive_reference() -> NemsCapacitiveSwitch {
    let (g0, t_d, eps_d) = (124.8e-9, 100e-9, 7.5);
    let c_off = 1.30e-15;
    let d0 = g0 + t_d / eps_d;
    let area = c_off * d0 / EPSILON_0;
    let gamma = 5.1 / (1.0 + g0 * eps_d / t_d);
    let k_eff = 27.0 * EPSILON_0 * area * NEMS_STATIC_PULL_IN.powi(2) / (8.0 * d0.powi(3));
    NemsCapacitiveSwitch::from_geometry(g0, t_d, eps_d, area, k_eff, gamma, 3.2, 1.8, 250e-9)
        .expect("reference geometry is consistent")
}

/// Extracted ohmic relay used as the sampling switch.
pub fn nems_ohmic_reference() -> NemsOhmicSwitch {
    NemsOhmicSwitch {
        v_pi: 1.5,
        v_po: 1.5,
        r_on: 10.0,
        t_mech: 600e-9,
        c_gs_on: 1e-15,
        c_gd_on: 1e-15,
        c_gb_on: 7e-15,
        c_gs_off: 0.13e-15,
        c_gd_off: 0.13e-15,
    }
}
