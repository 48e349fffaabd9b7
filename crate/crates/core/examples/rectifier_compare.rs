//! Closed-form output power of inductor-based rectifiers and the accumulation
//! time penalty of a lossy bias flip.

use lowpower::devices::PiezoTransducer;
use lowpower::harvester::analytic::{self, Architecture};

fn main() -> lowpower::Result<()> {
    let x = PiezoTransducer::default();
    for arch in [
        Architecture::Fbr,
        Architecture::Sece,
        Architecture::BiasFlip { v_out: 1.0 },
        Architecture::Investment { v_inv: 1.0 },
        Architecture::PreCharge { v_pc: 1.0 },
        Architecture::DoublePileUp { v_init: 1.0 },
        Architecture::Proposed {
            v_max: 3.3,
            v_pc: 1.5,
        },
    ] {
        let p = analytic::analytic_pout(&arch, &x);
        println!(
            "{:<15} {:7.3} uW  FoM {:5.2}",
            arch.name(),
            p * 1e6,
            analytic::fom(p, &x)
        );
    }
    let t_pz = x.period();
    let base = analytic::accumulation_time(3.3, 0.0, 1.0, t_pz, 0.0)?;
    for loss in [0.2, 0.4, 0.8] {
        let t = analytic::accumulation_time(3.3, 0.0, 1.0, t_pz, loss)?;
        println!(
            "flip loss {loss} V: accumulation +{:.1}%",
            (t / base - 1.0) * 100.0
        );
    }
    Ok(())
}
