use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use lowpower::scenario::{self, repro, CompareParams, ModuleKind, ModuleParams, Scenario, Table};
use lowpower::Error;

/// Behavioral models of energy-saving circuit techniques.
#[derive(Parser)]
#[command(version, about)]
struct Cli {
    /// Worker threads for sweeps (0 = one per core). LOWPOWER_WORKERS overrides it.
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Io {
    /// Scenario JSON; module defaults are used when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output CSV path (`-` for stdout); overrides the scenario's `output`.
    #[arg(long)]
    out: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Switched-capacitor power gating bias analysis or gate-bias trace.
    Swcap(Io),
    /// NEMS versus FinFET power-gating energy gain.
    NemsPg(Io),
    /// NEMS discrete-time amplifier waveform or gain sweep.
    DtAmp(Io),
    /// Piezoelectric rectifier summary, trace or steady state.
    Piezo(Io),
    /// Theoretical figure-of-merit grid for six rectifier architectures.
    Compare {
        /// JSON object with v_max, v_oc, v_out, start, stop, steps.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<String>,
    },
    /// Run a named reproduction bundle (or `all`) and check its values.
    Repro {
        target: String,
        /// CSV path, or a directory when the target is `all`.
        #[arg(long)]
        out: Option<String>,
    },
    /// Run any scenario file.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<String>,
    },
}

enum Failure {
    Checks,
    Err(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Err(e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let workers = scenario::resolve_workers(cli.workers);
    match dispatch(cli.command, workers) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Checks) => ExitCode::from(1),
        Err(Failure::Err(e)) => {
            let kind = if e.is_config() {
                "config"
            } else {
                "simulation"
            };
            eprintln!(
                "error kind={kind} message={}",
                serde_json::Value::String(e.to_string())
            );
            ExitCode::from(if e.is_config() { 2 } else { 3 })
        }
    }
}

fn dispatch(cmd: Command, workers: usize) -> Result<(), Failure> {
    match cmd {
        Command::Swcap(io) => module(ModuleKind::Swcap, io, workers),
        Command::NemsPg(io) => module(ModuleKind::NemsPg, io, workers),
        Command::DtAmp(io) => module(ModuleKind::DtAmp, io, workers),
        Command::Piezo(io) => module(ModuleKind::Piezo, io, workers),
        Command::Run { config, out } => {
            let sc = scenario::load_scenario(&config)?;
            let dest = out.unwrap_or_else(|| sc.output.clone());
            Ok(write(&sc.run(workers)?, &dest)?)
        }
        Command::Compare { config, out } => {
            let params: CompareParams = match config {
                Some(p) => {
                    let text = std::fs::read_to_string(&p)
                        .map_err(|e| Error::Config(format!("{}: {e}", p.display())))?;
                    let de = &mut serde_json::Deserializer::from_str(&text);
                    serde_path_to_error::deserialize(de).map_err(|e| {
                        Error::Config(format!("{}: {}: {}", p.display(), e.path(), e.inner()))
                    })?
                }
                None => CompareParams::default(),
            };
            Ok(write(&params.evaluate()?, out.as_deref().unwrap_or("-"))?)
        }
        Command::Repro { target, out } => {
            let targets: Vec<&str> = if target == "all" {
                repro::TARGETS.to_vec()
            } else {
                vec![target.as_str()]
            };
            let mut ok = true;
            for t in targets {
                let r = repro::repro(t, workers)?;
                let dest = match (&out, target == "all") {
                    (Some(dir), true) => PathBuf::from(dir)
                        .join(format!("{t}.csv"))
                        .display()
                        .to_string(),
                    (Some(path), false) => path.clone(),
                    (None, _) => format!("{t}.csv"),
                };
                write(&r.table, &dest)?;
                println!("== {t} -> {dest}");
                for c in &r.checks {
                    println!("{c}");
                }
                ok &= r.passed();
            }
            if ok {
                Ok(())
            } else {
                Err(Failure::Checks)
            }
        }
    }
}

fn module(kind: ModuleKind, io: Io, workers: usize) -> Result<(), Failure> {
    let sc = match &io.config {
        Some(p) => scenario::load_scenario(p)?,
        None => Scenario::new(kind.name(), ModuleParams::default_for(kind)),
    };
    if sc.params.kind() != kind {
        return Err(Error::Config(format!(
            "scenario is for module `{}`, not `{}`",
            sc.params.kind().name(),
            kind.name()
        ))
        .into());
    }
    let dest = io.out.unwrap_or_else(|| sc.output.clone());
    Ok(write(&sc.run(workers)?, &dest)?)
}

fn write(table: &Table, dest: &str) -> Result<(), Error> {
    if dest == "-" {
        let stdout = io::stdout();
        let mut lock = stdout.lock();
        table.write_csv(&mut lock)?;
        return lock
            .flush()
            .map_err(|e| Error::Config(format!("stdout: {e}")));
    }
    let file = File::create(dest).map_err(|e| Error::Config(format!("{dest}: {e}")))?;
    table.write_csv(BufWriter::new(file))
}
