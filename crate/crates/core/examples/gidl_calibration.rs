//! Fits the GIDL branch of a PMOS header to a target optimum bias and leakage
//! reduction, then shows how the optimum moves with temperature.

use lowpower::devices::Environment;
use lowpower::presets;

fn main() -> lowpower::Result<()> {
    let env = Environment::room();
    let fitted = presets::mos_180nm_no_gidl().calibrate_gidl(0.3, 186.0, &env)?;
    println!(
        "gidl_i0 = {:.3e} A, slope = {:.4} V",
        fitted.gidl_i0, fitted.gidl_slope
    );
    for kelvin in [300.0, 330.0, 360.0] {
        let env = Environment::new(kelvin)?;
        println!(
            "{kelvin} K: optimum {:.4} V, reduction {:.1}x",
            fitted.optimal_super_cutoff_bias(&env)?,
            fitted.max_reduction_ratio(&env)?
        );
    }
    Ok(())
}
