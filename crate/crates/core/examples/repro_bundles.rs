//! Runs every reproduction bundle and prints its checks.

use lowpower::scenario::repro;

fn main() -> lowpower::Result<()> {
    let mut failed = 0;
    for target in repro::TARGETS {
        let r = repro::repro(target, 0)?;
        println!("== {target} ({} rows)", r.table.rows.len());
        for c in &r.checks {
            println!("  {c}");
        }
        failed += r.checks.iter().filter(|c| !c.pass).count();
    }
    println!("{failed} failing checks");
    Ok(())
}
