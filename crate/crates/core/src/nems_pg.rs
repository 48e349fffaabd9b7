//! Net energy gain of NEMS power gating over FinFET power gating.
//!
//! Energies are compared over one gating period normalized to the off time:
//! switch gate charging at `f_pg`, the block's active energy over the on time
//! and, for the FinFET header only, off-state leakage.

use serde::{Deserialize, Serialize};

use crate::devices::Environment;
use crate::error::{ensure, Error, Result};

/// Temperature law shared by the logic and header leakage currents.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LeakageLaw {
    pub n: f64,
    pub v_th: f64,
}

impl Default for LeakageLaw {
    fn default() -> Self {
        Self { n: 1.5, v_th: 0.36 }
    }
}

impl LeakageLaw {
    /// Leakage multiplier relative to 300 K.
    pub fn factor(&self, env: &Environment) -> f64 {
        let vt0 = Environment::room().thermal_voltage();
        let vt = env.thermal_voltage();
        (self.v_th / self.n * (1.0 / vt0 - 1.0 / vt)).exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LogicBlockSpec {
    pub v_dd: f64,
    pub f_logic: f64,
    /// Total switched capacitance, F.
    pub c_l: f64,
    /// On-state leakage of the logic at 300 K, A.
    pub i_static_on: f64,
    pub alpha: f64,
    /// On-state capacitance multiplier for stacked gates.
    #[serde(default = "one")]
    pub stacking_factor: f64,
    #[serde(default)]
    pub leakage_law: LeakageLaw,
}

fn one() -> f64 {
    1.0
}

impl LogicBlockSpec {
    pub fn validate(&self) -> Result<()> {
        ensure(self.v_dd > 0.0, "v_dd", "must be > 0")?;
        ensure(self.f_logic > 0.0, "f_logic", "must be > 0")?;
        ensure(self.c_l >= 0.0, "c_l", "must be >= 0")?;
        ensure(self.i_static_on >= 0.0, "i_static_on", "must be >= 0")?;
        ensure(
            (0.0..=1.0).contains(&self.alpha),
            "alpha",
            "must lie in [0, 1]",
        )?;
        ensure(
            self.stacking_factor >= 1.0,
            "stacking_factor",
            "must be >= 1",
        )
    }
}

/// Average power of the running block at the given temperature, W.
pub fn active_power(block: &LogicBlockSpec, env: &Environment) -> f64 {
    let i_dyn = block.alpha * block.c_l * block.stacking_factor * block.v_dd * block.f_logic;
    block.v_dd * (i_dyn + block.i_static_on * block.leakage_law.factor(env))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SwitchKind {
    #[serde(rename = "FINFET")]
    FinFet,
    #[serde(rename = "NEMS")]
    Nems,
}

/// Power-gating header: the aggregate values plus the per-unit values used
/// for sizing. For FinFETs a unit is one micrometre of width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PgSwitchSpec {
    pub kind: SwitchKind,
    pub c_gate: f64,
    pub drive_voltage: f64,
    pub r_on: f64,
    /// Off-state leakage at 300 K, A.
    pub i_leak_off: f64,
    pub unit_r_on: f64,
    pub unit_c_gate: f64,
    pub unit_area: f64,
    #[serde(default)]
    pub unit_i_leak: f64,
    #[serde(default = "one_count")]
    pub count: u64,
}

fn one_count() -> u64 {
    1
}

impl PgSwitchSpec {
    pub fn validate(&self) -> Result<()> {
        ensure(self.c_gate >= 0.0, "c_gate", "must be >= 0")?;
        ensure(self.drive_voltage > 0.0, "drive_voltage", "must be > 0")?;
        ensure(self.r_on > 0.0, "r_on", "must be > 0")?;
        ensure(self.i_leak_off >= 0.0, "i_leak_off", "must be >= 0")?;
        if self.kind == SwitchKind::Nems {
            ensure(
                self.i_leak_off == 0.0,
                "i_leak_off",
                "must be 0 for a NEMS switch",
            )?;
        }
        Ok(())
    }

    pub fn area(&self) -> f64 {
        self.unit_area * self.count as f64
    }
}

/// Parallels enough units to reach `target_r_on`.
pub fn size_pg_switch(unit: &PgSwitchSpec, target_r_on: f64) -> Result<(u64, PgSwitchSpec)> {
    ensure(target_r_on > 0.0, "target_r_on", "must be > 0")?;
    ensure(unit.unit_r_on > 0.0, "unit_r_on", "must be > 0")?;
    let count = ((unit.unit_r_on / target_r_on) * (1.0 - 1e-12))
        .ceil()
        .max(1.0) as u64;
    let n = count as f64;
    let i_leak = match unit.kind {
        SwitchKind::FinFet => unit.unit_i_leak * n,
        SwitchKind::Nems => 0.0,
    };
    Ok((
        count,
        PgSwitchSpec {
            c_gate: unit.unit_c_gate * n,
            r_on: unit.unit_r_on / n,
            i_leak_off: i_leak,
            count,
            ..*unit
        },
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DutySpec {
    /// On time over off time.
    pub t_on_over_t_off: f64,
    /// Gating frequency, Hz.
    pub f_pg: f64,
}

impl DutySpec {
    pub fn validate(&self) -> Result<()> {
        ensure(self.t_on_over_t_off > 0.0, "t_on_over_t_off", "must be > 0")?;
        ensure(self.f_pg > 0.0, "f_pg", "must be > 0")
    }
}

pub fn energy_gain(
    block: &LogicBlockSpec,
    finfet: &PgSwitchSpec,
    nems: &PgSwitchSpec,
    duty: &DutySpec,
    env: &Environment,
) -> f64 {
    let r = duty.t_on_over_t_off;
    let p = active_power(block, env);
    let i_leak = finfet.i_leak_off * block.leakage_law.factor(env);
    let sw_f = finfet.c_gate * finfet.drive_voltage.powi(2) * duty.f_pg * (1.0 + r);
    let sw_n = nems.c_gate * nems.drive_voltage.powi(2) * duty.f_pg * (1.0 + r);
    (sw_f + p * r + block.v_dd * i_leak) / (sw_n + p * r)
}

/// Percentage of energy saved for a given energy gain.
pub fn energy_saving_percent(e_g: f64) -> f64 {
    100.0 * (1.0 - 1.0 / e_g)
}

/// Largest on/off ratio that still saves `target_saving` percent. A target of
/// zero or less returns infinity.
pub fn breakeven_duty(
    block: &LogicBlockSpec,
    finfet: &PgSwitchSpec,
    nems: &PgSwitchSpec,
    f_pg: f64,
    target_saving: f64,
    env: &Environment,
) -> Result<f64> {
    if target_saving <= 0.0 {
        return Ok(f64::INFINITY);
    }
    let saving = |r: f64| {
        let duty = DutySpec {
            t_on_over_t_off: r,
            f_pg,
        };
        energy_saving_percent(energy_gain(block, finfet, nems, &duty, env))
    };
    let s0 = saving(0.0);
    if target_saving >= s0 {
        return Err(Error::Infeasible(format!(
            "target saving {target_saving}% exceeds the {s0:.6}% available as T_ON/T_OFF -> 0"
        )));
    }
    let mut hi = 1e-6;
    while saving(hi) > target_saving {
        hi *= 2.0;
        if hi > 1e12 {
            return Err(Error::Divergence("saving never drops to target".into()));
        }
    }
    let mut lo = 0.0;
    while hi - lo > 1e-9 * hi {
        let mid = 0.5 * (lo + hi);
        if saving(mid) > target_saving {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// A technology node: the logic block at unit activity plus both headers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodePreset {
    pub name: String,
    pub block: LogicBlockSpec,
    pub finfet: PgSwitchSpec,
    pub nems: PgSwitchSpec,
}

/// Default NEMS gate drive, V.
pub const DEFAULT_V_PG: f64 = 2.5;
/// Default gating frequency, Hz.
pub const DEFAULT_F_PG: f64 = 1e3;
/// Supply current of every node's block at unit activity, A.
const I_AVERAGE_FULL: f64 = 535e-3;

struct NodeData {
    name: &'static str,
    f_logic: f64,
    i_static: f64,
    i_leak_fin: f64,
    c_g_fin: f64,
    r_on_fin: f64,
    width_fin: f64,
    area_fin: f64,
    n_nems: u64,
    c_g_nems: f64,
    r_on_nems: f64,
    area_nems: f64,
}

const NODES: [NodeData; 3] = [
    NodeData {
        name: "20nm",
        f_logic: 2.0e9,
        i_static: 340e-6,
        i_leak_fin: 99e-6,
        c_g_fin: 13.9e-12,
        r_on_fin: 22e-3,
        width_fin: 10.05e-3,
        area_fin: 351e-12,
        n_nems: 4505,
        c_g_nems: 225e-15,
        r_on_nems: 22.2e-3,
        area_nems: 1802e-12,
    },
    NodeData {
        name: "17nm",
        f_logic: 2.75e9,
        i_static: 1170e-6,
        i_leak_fin: 315e-6,
        c_g_fin: 12.3e-12,
        r_on_fin: 20.6e-3,
        width_fin: 11.43e-3,
        area_fin: 355e-12,
        n_nems: 4840,
        c_g_nems: 242e-15,
        r_on_nems: 20.7e-3,
        area_nems: 1936e-12,
    },
    NodeData {
        name: "14nm",
        f_logic: 3.5e9,
        i_static: 1710e-6,
        i_leak_fin: 502e-6,
        c_g_fin: 10.2e-12,
        r_on_fin: 23.3e-3,
        width_fin: 10.24e-3,
        area_fin: 278e-12,
        n_nems: 4310,
        c_g_nems: 215e-15,
        r_on_nems: 23.2e-3,
        area_nems: 1724e-12,
    },
];

/// Names accepted by [`node_preset`].
pub const NODE_NAMES: [&str; 3] = ["20nm", "17nm", "14nm"];

/// FinFET logic block and headers for `"20nm"`, `"17nm"` or `"14nm"` at unit
/// activity. The switched capacitance is back-solved from the full-activity
/// supply current and the ungated leakage.
pub fn node_preset(name: &str) -> Result<NodePreset> {
    let d = NODES.iter().find(|d| d.name == name).ok_or_else(|| {
        Error::invalid(
            "preset",
            format!("unknown node `{name}`; expected one of {NODE_NAMES:?}"),
        )
    })?;
    let v_dd = 0.7;
    let microns = d.width_fin / 1e-6;
    let n = d.n_nems as f64;
    Ok(NodePreset {
        name: d.name.to_string(),
        block: LogicBlockSpec {
            v_dd,
            f_logic: d.f_logic,
            c_l: (I_AVERAGE_FULL - d.i_static) / (v_dd * d.f_logic),
            i_static_on: d.i_static,
            alpha: 1.0,
            stacking_factor: 1.0,
            leakage_law: LeakageLaw::default(),
        },
        finfet: PgSwitchSpec {
            kind: SwitchKind::FinFet,
            c_gate: d.c_g_fin,
            drive_voltage: v_dd,
            r_on: d.r_on_fin,
            i_leak_off: d.i_leak_fin,
            unit_r_on: d.r_on_fin * microns,
            unit_c_gate: d.c_g_fin / microns,
            unit_area: d.area_fin / microns,
            unit_i_leak: d.i_leak_fin / microns,
            count: microns.round() as u64,
        },
        nems: PgSwitchSpec {
            kind: SwitchKind::Nems,
            c_gate: d.c_g_nems,
            drive_voltage: DEFAULT_V_PG,
            r_on: d.r_on_nems,
            i_leak_off: 0.0,
            unit_r_on: d.r_on_nems * n,
            unit_c_gate: d.c_g_nems / n,
            unit_area: d.area_nems / n,
            unit_i_leak: 0.0,
            count: d.n_nems,
        },
    })
}

/// One functional unit of a system on chip.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SocUnit {
    pub name: String,
    pub alpha: f64,
    pub t_on_over_t_off: f64,
    pub f_logic: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SocRow {
    pub unit: SocUnit,
    pub e_g: f64,
    pub saving_pct: f64,
}

/// Mobile SoC units evaluated on the 14 nm node.
pub fn mobile_soc_units() -> Vec<SocUnit> {
    [
        ("application processor", 0.1, 0.10, 3.5e9),
        ("cache memory", 0.05, 0.10, 3.5e9),
        ("clock distribution", 1.0, 0.10, 3.5e9),
        ("DSP/GPU", 0.1, 0.10, 1.0e9),
        ("baseband processor", 0.5, 0.05, 1.0e9),
    ]
    .into_iter()
    .map(|(name, alpha, r, f)| SocUnit {
        name: name.to_string(),
        alpha,
        t_on_over_t_off: r,
        f_logic: f,
    })
    .collect()
}

/// Energy saving of each unit on a shared node, in input order.
pub fn soc_report(
    units: &[SocUnit],
    preset: &NodePreset,
    f_pg: f64,
    env: &Environment,
) -> Vec<SocRow> {
    units
        .iter()
        .map(|u| {
            let block = LogicBlockSpec {
                alpha: u.alpha,
                f_logic: u.f_logic,
                ..preset.block
            };
            let duty = DutySpec {
                t_on_over_t_off: u.t_on_over_t_off,
                f_pg,
            };
            let e_g = energy_gain(&block, &preset.finfet, &preset.nems, &duty, env);
            SocRow {
                unit: u.clone(),
                e_g,
                saving_pct: energy_saving_percent(e_g),
            }
        })
        .collect()
}
