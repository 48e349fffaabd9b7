//! Gate voltage of a power-gating header through OFF, SUPER_OFF, SUPER_ON and
//! ON, with refresh ripple.

use lowpower::devices::Environment;
use lowpower::swcap::{simulate_gate_bias, PgState, SwCapConfig};

fn main() -> lowpower::Result<()> {
    let cfg = SwCapConfig::default();
    let schedule = [
        (0.0, PgState::Off),
        (0.5, PgState::SuperOff),
        (1.5, PgState::SuperOn),
        (2.5, PgState::On),
    ];
    let trace = simulate_gate_bias(&cfg, &Environment::room(), &schedule, 3.0)?;
    println!("refresh events: {}", trace.refresh_events.len());
    println!(
        "mean SUPER_OFF bias: {:.4} V",
        trace.window_average(0.5, 1.5)
    );
    println!(
        "mean SUPER_ON bias: {:.4} V",
        trace.window_average(1.5, 2.5)
    );
    for (t, v, s) in trace.samples(1).iter().step_by(12) {
        println!("{t:.4} s  {v:+.4} V  {s}");
    }
    Ok(())
}
