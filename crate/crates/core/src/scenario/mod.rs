//! JSON scenarios, parameter sweeps, CSV output and reproduction bundles.
//!
//! A scenario names a module, a parameter tree for it, an optional linear
//! sweep over one numeric leaf and an output path (`-` for stdout).
//!
//! ```
//! use lowpower::scenario::Scenario;
//! let s = Scenario::parse(r#"{"name": "p", "module": "piezo", "output": "-"}"#).unwrap();
//! assert_eq!(s.params.kind().name(), "piezo");
//! ```

mod params;
pub mod repro;
mod table;

use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

pub use params::{
    mos_preset, CompareParams, DtAmpParams, GateTraceSpec, InputSpec, NemsPgParams, PiezoParams,
    PiezoReport, ScheduleStep, SwcapParams,
};
pub use table::{Cell, Table};

/// Environment variable that overrides the worker count.
pub const WORKERS_ENV: &str = "LOWPOWER_WORKERS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModuleKind {
    Swcap,
    NemsPg,
    DtAmp,
    Piezo,
}

impl ModuleKind {
    pub fn name(self) -> &'static str {
        match self {
            ModuleKind::Swcap => "swcap",
            ModuleKind::NemsPg => "nems-pg",
            ModuleKind::DtAmp => "dt-amp",
            ModuleKind::Piezo => "piezo",
        }
    }
}

/// Typed parameter tree of one module.
#[derive(Debug, Clone, PartialEq)]
pub enum ModuleParams {
    Swcap(SwcapParams),
    NemsPg(NemsPgParams),
    DtAmp(DtAmpParams),
    Piezo(PiezoParams),
}

impl ModuleParams {
    pub fn default_for(kind: ModuleKind) -> Self {
        match kind {
            ModuleKind::Swcap => ModuleParams::Swcap(SwcapParams::default()),
            ModuleKind::NemsPg => ModuleParams::NemsPg(NemsPgParams::default()),
            ModuleKind::DtAmp => ModuleParams::DtAmp(DtAmpParams::default()),
            ModuleKind::Piezo => ModuleParams::Piezo(PiezoParams::default()),
        }
    }

    pub fn kind(&self) -> ModuleKind {
        match self {
            ModuleParams::Swcap(_) => ModuleKind::Swcap,
            ModuleParams::NemsPg(_) => ModuleKind::NemsPg,
            ModuleParams::DtAmp(_) => ModuleKind::DtAmp,
            ModuleParams::Piezo(_) => ModuleKind::Piezo,
        }
    }

    /// Parses and validates a parameter tree. Errors carry the key path.
    pub fn from_value(kind: ModuleKind, v: Value) -> Result<Self> {
        fn typed<T: serde::de::DeserializeOwned>(v: Value) -> Result<T> {
            serde_path_to_error::deserialize(v)
                .map_err(|e| Error::Config(format!("parameters.{}: {}", e.path(), e.inner())))
        }
        let p = match kind {
            ModuleKind::Swcap => ModuleParams::Swcap(typed(v)?),
            ModuleKind::NemsPg => ModuleParams::NemsPg(typed(v)?),
            ModuleKind::DtAmp => ModuleParams::DtAmp(typed(v)?),
            ModuleKind::Piezo => ModuleParams::Piezo(typed(v)?),
        };
        p.validate()?;
        Ok(p)
    }

    pub fn to_value(&self) -> Value {
        let v = match self {
            ModuleParams::Swcap(p) => serde_json::to_value(p),
            ModuleParams::NemsPg(p) => serde_json::to_value(p),
            ModuleParams::DtAmp(p) => serde_json::to_value(p),
            ModuleParams::Piezo(p) => serde_json::to_value(p),
        };
        v.expect("parameter trees serialize")
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ModuleParams::Swcap(p) => p.validate(),
            ModuleParams::NemsPg(p) => p.validate(),
            ModuleParams::DtAmp(p) => p.validate(),
            ModuleParams::Piezo(p) => p.validate(),
        }
    }

    pub fn evaluate(&self) -> Result<Table> {
        match self {
            ModuleParams::Swcap(p) => p.evaluate(),
            ModuleParams::NemsPg(p) => p.evaluate(),
            ModuleParams::DtAmp(p) => p.evaluate(),
            ModuleParams::Piezo(p) => p.evaluate(),
        }
    }
}

/// Linear sweep of one numeric parameter, addressed by a dotted path inside
/// `parameters`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub parameter: String,
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

impl Sweep {
    pub fn values(&self) -> Vec<f64> {
        crate::numeric::linspace(self.start, self.stop, self.steps)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    name: String,
    module: ModuleKind,
    #[serde(default)]
    parameters: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sweep: Option<Sweep>,
    output: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub params: ModuleParams,
    pub sweep: Option<Sweep>,
    /// Output CSV path; `-` writes to stdout.
    pub output: String,
}

impl Scenario {
    pub fn new(name: &str, params: ModuleParams) -> Self {
        Self {
            name: name.to_string(),
            params,
            sweep: None,
            output: "-".into(),
        }
    }

    /// Parses and fully validates a scenario, including every sweep point.
    pub fn parse(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let raw: RawScenario = serde_path_to_error::deserialize(de).map_err(|e| {
            let inner = e.inner();
            let path = e.path().to_string();
            if inner.is_syntax() || inner.is_eof() {
                Error::Config(format!(
                    "parse error at line {} column {}: {inner}",
                    inner.line(),
                    inner.column()
                ))
            } else {
                Error::Config(format!("{path}: {inner}"))
            }
        })?;
        let tree = raw
            .parameters
            .unwrap_or_else(|| Value::Object(Default::default()));
        let params = ModuleParams::from_value(raw.module, tree)?;
        let sc = Scenario {
            name: raw.name,
            params,
            sweep: raw.sweep,
            output: raw.output,
        };
        if let Some(sw) = &sc.sweep {
            if sw.steps < 2 {
                return Err(Error::Config("sweep.steps: must be >= 2".into()));
            }
            for v in [sw.start, sw.stop] {
                sc.point(v)?;
            }
        }
        Ok(sc)
    }

    pub fn to_json(&self) -> String {
        let raw = RawScenario {
            name: self.name.clone(),
            module: self.params.kind(),
            parameters: Some(self.params.to_value()),
            sweep: self.sweep.clone(),
            output: self.output.clone(),
        };
        serde_json::to_string_pretty(&raw).expect("scenario serializes") + "\n"
    }

    /// Parameters with the sweep leaf set to `value`.
    pub fn point(&self, value: f64) -> Result<ModuleParams> {
        let sw = self
            .sweep
            .as_ref()
            .ok_or_else(|| Error::Config("scenario has no sweep".into()))?;
        let mut tree = self.params.to_value();
        set_numeric(&mut tree, &sw.parameter, value)?;
        ModuleParams::from_value(self.params.kind(), tree)
    }

    /// Runs every point on up to `workers` threads; rows keep sweep order.
    pub fn run(&self, workers: usize) -> Result<Table> {
        let Some(sw) = &self.sweep else {
            return self.params.evaluate();
        };
        let points: Vec<(f64, ModuleParams)> = sw
            .values()
            .into_iter()
            .map(|v| self.point(v).map(|p| (v, p)))
            .collect::<Result<_>>()?;
        let tables = with_workers(workers, || {
            points
                .par_iter()
                .map(|(_, p)| p.evaluate())
                .collect::<Vec<Result<Table>>>()
        })?;
        let mut out: Option<Table> = None;
        for ((v, _), t) in points.iter().zip(tables) {
            let t = t?;
            let dst = out.get_or_insert_with(|| {
                let mut h = vec!["sweep_value".to_string()];
                h.extend(t.headers.iter().cloned());
                Table::new(&h)
            });
            for row in t.rows {
                let mut r = vec![Cell::Num(*v)];
                r.extend(row);
                dst.push(r);
            }
        }
        Ok(out.unwrap_or_default())
    }
}

/// Reads and validates a scenario file.
pub fn load_scenario(path: &Path) -> Result<Scenario> {
    let text =
        fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    Scenario::parse(&text).map_err(|e| match e {
        Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
        other => other,
    })
}

fn set_numeric(tree: &mut Value, path: &str, value: f64) -> Result<()> {
    let keys: Vec<&str> = path.split('.').collect();
    let (leaf, parents) = keys.split_last().expect("split yields one item");
    let mut node = tree;
    for k in parents {
        node = node
            .get_mut(*k)
            .ok_or_else(|| Error::Config(format!("sweep.parameter: unknown path `{path}`")))?;
    }
    let obj = node.as_object_mut().ok_or_else(|| {
        Error::Config(format!("sweep.parameter: `{path}` is not inside an object"))
    })?;
    match obj.get(*leaf) {
        Some(Value::Number(_)) | None => {}
        Some(Value::String(s)) if s == "inf" => {}
        Some(other) => {
            return Err(Error::Config(format!(
                "sweep.parameter: `{path}` is not numeric (found {other})"
            )))
        }
    }
    let num = serde_json::Number::from_f64(value)
        .ok_or_else(|| Error::Config(format!("sweep value {value} is not finite")))?;
    obj.insert(leaf.to_string(), Value::Number(num));
    Ok(())
}

/// Worker count: the environment variable wins over `requested`; zero means
/// one per core.
pub fn resolve_workers(requested: Option<usize>) -> usize {
    std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .or(requested)
        .unwrap_or(0)
}

pub(crate) fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(format!("worker pool: {e}")))?;
    Ok(pool.install(f))
}
