//! Gate-bias budget of switched-capacitor power gating: diode and refresh
//! errors, refresh sizing and the bias that minimizes header leakage.

use lowpower::devices::Environment;
use lowpower::presets;
use lowpower::swcap::{self, SwCapConfig, Variant};

fn main() -> lowpower::Result<()> {
    let env = Environment::room();
    let dev = presets::mos_180nm();
    for variant in [Variant::Cmos, Variant::Mems] {
        let cfg = SwCapConfig {
            variant,
            ..SwCapConfig::default()
        };
        let err = swcap::voltage_error(&cfg, &env)?;
        let v_b = swcap::optimal_v_b_off(&cfg, &dev, &env)?;
        println!(
            "{variant:?}: error {:.1} mV (diode {:.1}, refresh {:.2}), optimal v_b_off {v_b:.3} V",
            err.total() * 1e3,
            err.diode_term * 1e3,
            err.refresh_term * 1e3
        );
    }

    let leaky = SwCapConfig {
        c_x: 5e-12,
        v_dd: 0.7,
        v_b_off: 0.5,
        i_dis: 100e-12,
        ..SwCapConfig::default()
    };
    println!(
        "refresh for 5% droop: {:.1} Hz",
        swcap::required_refresh_frequency(&leaky, 0.05)?
    );

    let cfg = SwCapConfig::default();
    let show = |x: Option<f64>| x.map_or("beyond stress limit".to_string(), |v| format!("{v:.3e}"));
    println!("v_b_V  leakage_A  r_on_ohm");
    for k in 0..=6 {
        let p = swcap::bias_point(&cfg, &dev, 0.25 * k as f64, &env)?;
        println!("{:.2}  {}  {}", p.v_b, show(p.leakage), show(p.r_on));
    }
    Ok(())
}
