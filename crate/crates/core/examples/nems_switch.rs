//! Capacitive NEMS switch: gains, pull-in/pull-out design voltages, the
//! hysteretic C(V) loop and geometric scaling.

use lowpower::devices::{pull_voltage_ratio, Scalable};
use lowpower::presets;

fn main() -> lowpower::Result<()> {
    let sw = presets::nems_capacitive_reference();
    println!(
        "gain: ideal {:.2}, theoretical {:.2}, practical {:.2}",
        sw.ideal_gain(),
        sw.theoretical_gain(),
        sw.practical_gain()
    );
    let (v_pi, v_po) = sw.design_pull_voltages();
    println!(
        "design V_PI {v_pi:.3} V, V_PO {v_po:.3} V, ratio {:.3}",
        pull_voltage_ratio(sw.theoretical_gain())
    );

    let mut closed = false;
    for v in [0.0, 1.0, 2.0, 3.0, 3.3, 2.5, 1.9, 1.7, 0.5] {
        let (c, now) = sw.capacitance(v, closed);
        closed = now;
        println!(
            "{v:.1} V -> {:.3} fF ({})",
            c * 1e15,
            if closed { "closed" } else { "open" }
        );
    }

    let half = sw.scaled(0.5)?;
    println!(
        "scaled by 0.5: V_PI {:.2} V, C_ON {:.3} fF",
        half.v_pi,
        half.c_on * 1e15
    );
    Ok(())
}
