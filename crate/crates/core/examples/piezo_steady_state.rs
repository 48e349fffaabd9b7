//! Output-rail voltage that balances harvested power against a 100 kΩ load,
//! with and without pre-charge.

use lowpower::harvester::{steady_state_vout, RectifierConfig};

fn main() -> lowpower::Result<()> {
    for (label, v_pc) in [("accumulate only", 0.0), ("pre-charge 1.5 V", 1.5)] {
        for (kind, base) in [
            ("lossless", RectifierConfig::lossless()),
            ("calibrated", RectifierConfig::calibrated()),
        ] {
            let cfg = RectifierConfig {
                v_pc_target: v_pc,
                ..base
            };
            let ss = steady_state_vout(&cfg, 150)?;
            println!(
                "{label:<17} {kind:<10} V_out {:.3} V, P {:.2} uW ({} iterations)",
                ss.v_out,
                ss.p_net * 1e6,
                ss.iterations
            );
        }
    }
    Ok(())
}
