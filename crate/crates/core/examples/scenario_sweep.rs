//! Parses a scenario, sweeps one parameter in parallel and prints the CSV.

use lowpower::scenario::Scenario;

const SCENARIO: &str = r#"{
  "name": "r_tot sweep",
  "module": "piezo",
  "parameters": {
    "rectifier": { "r_tot": 1.0, "flip_loss_v": 0.8, "p_ctrl": 7.5e-7, "v_pc_target": 1.5 },
    "cycles": 100
  },
  "sweep": { "parameter": "rectifier.r_tot", "start": 0.0, "stop": 4.0, "steps": 5 },
  "output": "-"
}"#;

fn main() -> lowpower::Result<()> {
    let sc = Scenario::parse(SCENARIO)?;
    print!("{}", sc.run(0)?.to_csv());
    Ok(())
}
