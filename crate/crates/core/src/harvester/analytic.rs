//! Closed-form output power of inductor-based rectifiers.

use serde::{Deserialize, Serialize};

use crate::devices::PiezoTransducer;
use crate::error::{Error, Result};

/// Rectifier architecture with its operating voltage, V.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "arch", rename_all = "snake_case")]
pub enum Architecture {
    /// Full-bridge rectifier with ideal diodes.
    Fbr,
    /// Energy invested on top of the flipped voltage.
    Investment { v_inv: f64 },
    /// Pre-charged once per half cycle, harvested every half cycle.
    PreCharge { v_pc: f64 },
    /// Double pile-up resonance, flipping from `v_max` down to `v_init`.
    DoublePileUp { v_init: f64 },
    /// Bias-flip (SSHI) rectifier into `v_out`.
    BiasFlip { v_out: f64 },
    /// Synchronous electrical charge extraction.
    Sece,
    /// Pre-charge to `v_pc`, accumulate to `v_max`, then harvest.
    Proposed { v_max: f64, v_pc: f64 },
}

impl Architecture {
    pub fn name(&self) -> &'static str {
        match self {
            Architecture::Fbr => "fbr",
            Architecture::Investment { .. } => "investment",
            Architecture::PreCharge { .. } => "pre_charge",
            Architecture::DoublePileUp { .. } => "double_pile_up",
            Architecture::BiasFlip { .. } => "bias_flip",
            Architecture::Sece => "sece",
            Architecture::Proposed { .. } => "proposed",
        }
    }
}

/// Ideal extracted power, W.
pub fn analytic_pout(arch: &Architecture, x: &PiezoTransducer) -> f64 {
    let (c, v, f) = (x.c_pz, x.v_oc, x.f_pz);
    match *arch {
        Architecture::Fbr => c * v * v * f,
        Architecture::Investment { v_inv } => 2.0 * c * v * (v_inv + 4.0 * v) * f,
        Architecture::PreCharge { v_pc } => 4.0 * c * v * (v_pc + v) * f,
        Architecture::DoublePileUp { v_init } => 4.0 * c * v * (v_init + v) * f,
        Architecture::BiasFlip { v_out } => 4.0 * c * v * v_out * f,
        Architecture::Sece => 4.0 * c * v * v * f,
        Architecture::Proposed { v_max, v_pc } => 2.0 * c * v * (v_max + v_pc) * f,
    }
}

/// Output power normalized to the ideal full-bridge rectifier.
pub fn fom(p_out: f64, x: &PiezoTransducer) -> f64 {
    p_out / x.fbr_reference_power()
}

/// Transducer voltage reached by dumping an inductor energized for `t_eng`
/// from `v_out`, V.
pub fn precharge_voltage(v_out: f64, t_eng: f64, l: f64, c_pz: f64) -> f64 {
    v_out * t_eng / (l * c_pz).sqrt()
}

/// Energize time for a pre-charge level `v_pc`, s.
pub fn precharge_time(v_out: f64, v_pc: f64, l: f64, c_pz: f64) -> f64 {
    v_pc * (l * c_pz).sqrt() / v_out
}

/// Inductor current after energizing from `v_out` for `t_eng`, A.
pub fn energize_current(v_out: f64, t_eng: f64, l: f64) -> f64 {
    v_out * t_eng / l
}

/// Time to accumulate from `v_pc` to `v_max`, s.
///
/// Each half cycle adds `2 v_oc`; every flip except the last then loses
/// `flip_loss_v`. The last half cycle is counted fractionally.
pub fn accumulation_time(
    v_max: f64,
    v_pc: f64,
    v_oc: f64,
    t_pz: f64,
    flip_loss_v: f64,
) -> Result<f64> {
    if v_max <= v_pc {
        return Ok(0.0);
    }
    let rise = 2.0 * v_oc;
    let mut v = v_pc;
    let mut halves = 0.0;
    loop {
        let need = v_max - v;
        if need <= rise {
            halves += need / rise;
            return Ok(halves * t_pz / 2.0);
        }
        if rise <= flip_loss_v {
            return Err(Error::Divergence(format!(
                "v_max = {v_max} V unreachable: half-cycle rise {rise} V does not exceed flip loss {flip_loss_v} V"
            )));
        }
        v = (v + rise - flip_loss_v).max(0.0);
        halves += 1.0;
    }
}

/// One grid point of an architecture comparison. `None` marks a setting that
/// would swing the transducer beyond `v_max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComparisonRow {
    /// Common operating voltage (V_PC, V_INV or V_INIT), V.
    pub x: f64,
    pub investment: Option<f64>,
    pub pre_charge: Option<f64>,
    pub double_pile_up: Option<f64>,
    pub bias_flip: f64,
    pub sece: f64,
    pub proposed: Option<f64>,
}

impl ComparisonRow {
    pub fn best_baseline(&self) -> f64 {
        [self.investment, self.pre_charge, self.double_pile_up]
            .into_iter()
            .flatten()
            .chain([self.bias_flip, self.sece])
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Theoretical figures of merit over a grid of operating voltages.
pub fn compare_architectures(
    v_max: f64,
    v_oc: f64,
    v_out: f64,
    grid: &[f64],
) -> Vec<ComparisonRow> {
    let x = PiezoTransducer {
        v_oc,
        ..PiezoTransducer::default()
    };
    let f = |a: Architecture| fom(analytic_pout(&a, &x), &x);
    grid.iter()
        .map(|&g| ComparisonRow {
            x: g,
            investment: (g + 4.0 * v_oc <= v_max).then(|| f(Architecture::Investment { v_inv: g })),
            pre_charge: (g + 2.0 * v_oc <= v_max).then(|| f(Architecture::PreCharge { v_pc: g })),
            double_pile_up: (g + 2.0 * v_oc <= v_max)
                .then(|| f(Architecture::DoublePileUp { v_init: g })),
            bias_flip: f(Architecture::BiasFlip { v_out }),
            sece: f(Architecture::Sece),
            proposed: (g < v_max).then(|| f(Architecture::Proposed { v_max, v_pc: g })),
        })
        .collect()
}
