//! Event-driven run of the pre-charge/accumulate rectifier with the calibrated
//! loss bundle, printing the energy ledger and the first few events.

use lowpower::harvester::{self, analytic, RectifierConfig};

fn main() -> lowpower::Result<()> {
    let cfg = RectifierConfig {
        v_pc_target: 1.5,
        ..RectifierConfig::calibrated()
    };
    let trace = harvester::simulate(&cfg, 100)?;
    let l = &trace.ledger;
    let p = l.net_power();
    println!(
        "net power {:.2} uW, FoM {:.2}",
        p * 1e6,
        analytic::fom(p, &cfg.xdcr)
    );
    println!(
        "out {:.3e} J, invested {:.3e} J, losses {:.3e} J (audit residual {:.1e} J)",
        l.e_out,
        l.e_inv,
        l.total_loss(),
        l.audit_residual()
    );
    println!(
        "mean harvest period {:.3} ms, of which accumulation {:.3} ms",
        trace.mean_cycle_time() * 1e3,
        trace.mean_accumulation_time() * 1e3
    );
    for e in trace.events.iter().filter(|e| e.t > 0.0).take(12) {
        println!(
            "{:.6} s {:<8} v_pz {:+.3} V i_l {:+.4} A",
            e.t,
            e.state.to_string(),
            e.v_pz,
            e.i_l
        );
    }
    Ok(())
}
