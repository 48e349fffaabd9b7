//! Energy gain of NEMS over FinFET power-gating headers: per-node savings,
//! break-even duty and a mobile SoC breakdown.

use lowpower::devices::Environment;
use lowpower::nems_pg::{self, DutySpec, LogicBlockSpec, DEFAULT_F_PG, NODE_NAMES};

fn main() -> lowpower::Result<()> {
    let env = Environment::room();
    for node in NODE_NAMES {
        let p = nems_pg::node_preset(node)?;
        let block = LogicBlockSpec {
            alpha: 0.1,
            ..p.block
        };
        let duty = DutySpec {
            t_on_over_t_off: 0.05,
            f_pg: DEFAULT_F_PG,
        };
        let e_g = nems_pg::energy_gain(&block, &p.finfet, &p.nems, &duty, &env);
        let r = nems_pg::breakeven_duty(&block, &p.finfet, &p.nems, DEFAULT_F_PG, 10.0, &env)?;
        println!(
            "{node}: E_G {e_g:.4} ({:.2}% saved), 10% saving up to r = {:.2}%",
            nems_pg::energy_saving_percent(e_g),
            r * 100.0
        );
    }

    let hot = Environment::from_celsius(40.0)?;
    let p = nems_pg::node_preset("14nm")?;
    for row in nems_pg::soc_report(&nems_pg::mobile_soc_units(), &p, DEFAULT_F_PG, &hot) {
        println!("{:<22} {:6.2}%", row.unit.name, row.saving_pct);
    }
    Ok(())
}
