//! NEMS discrete-time amplifier: loaded gain, range, noise, power and gain
//! droop against amplitude.

use lowpower::devices::Environment;
use lowpower::dt_amp::{self, AmpConfig};

fn main() -> lowpower::Result<()> {
    let cfg = AmpConfig::default();
    println!("loaded gain {:.3}", dt_amp::loaded_gain(&cfg));
    println!("max input {:.3} V", dt_amp::max_input(&cfg));
    let (n_single, n_diff) = dt_amp::output_noise(&cfg, &Environment::room());
    println!(
        "output noise {:.3e} V (differential {:.3e} V)",
        n_single, n_diff
    );
    let (p_amp, p_sw) = dt_amp::dynamic_power(&cfg);
    println!(
        "power: amplifier {:.3} uW, switches {:.3} uW",
        p_amp * 1e6,
        p_sw * 1e6
    );

    for g in dt_amp::gain_vs_amplitude(&cfg, &[0.001, 0.1, 0.2, 0.325])? {
        println!(
            "{:.3} V: single {:.3}, differential {:.3}",
            g.amplitude, g.gain_single, g.gain_differential
        );
    }
    let out = dt_amp::simulate(&cfg, &[0.05, -0.05, 0.1])?;
    for s in out {
        println!(
            "in {:+.3} V -> out {:+.4} V, faults {:#x}",
            s.v_in, s.v_out, s.faults
        );
    }
    Ok(())
}
