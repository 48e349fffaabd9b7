//! Pre-charge/accumulate inductive rectifier for piezoelectric harvesting.
//!
//! [`simulate`] runs the self-timed state machine with piecewise-analytic
//! segments; [`analytic`] holds the closed-form baselines and figures of
//! merit.

pub mod analytic;
mod sim;
mod steady;
mod tank;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::devices::PiezoTransducer;
use crate::error::{ensure, Result};
use crate::numeric::extended_f64;

pub use sim::{simulate, simulate_with, SimOptions, SimTrace, TraceEvent};
pub use steady::{steady_state_vout, SteadyState};
pub use tank::Tank;

/// Required ratio between the LC tank resonance and the vibration frequency.
pub const RESONANCE_RATIO: f64 = 100.0;

/// Power stage and controller configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RectifierConfig {
    pub xdcr: PiezoTransducer,
    /// Inductance, H.
    pub l: f64,
    /// Technology voltage limit on the transducer, V.
    pub v_max: f64,
    /// Pre-charge target, V. Ignored when `t_eng` is set.
    pub v_pc_target: f64,
    /// Inductor energize time, s. When present it sets the pre-charge level.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_eng: Option<f64>,
    /// Output rail, V.
    pub v_out: f64,
    /// Load resistance, Ω. `"inf"` for an unloaded output.
    #[serde(with = "extended_f64")]
    pub r_l: f64,
    pub c_out: f64,
    /// Series resistance of the power stage and inductor, Ω.
    pub r_tot: f64,
    /// Momentary voltage lost after every bias flip, V.
    pub flip_loss_v: f64,
    /// Controller power drawn from the output, W.
    pub p_ctrl: f64,
    /// Delay of the peak and voltage-limit detectors, s.
    pub detector_delay: f64,
}

impl Default for RectifierConfig {
    /// Lossless power stage with the default transducer and inductor.
    fn default() -> Self {
        Self {
            xdcr: PiezoTransducer::default(),
            l: 47e-6,
            v_max: 3.3,
            v_pc_target: 0.0,
            t_eng: None,
            v_out: 1.0,
            r_l: 100e3,
            c_out: 20e-6,
            r_tot: 0.0,
            flip_loss_v: 0.0,
            p_ctrl: 0.0,
            detector_delay: 0.0,
        }
    }
}

/// Calibrated series resistance of the power stage, Ω.
pub const CALIBRATED_R_TOT: f64 = 1.0;
/// Calibrated voltage lost after each flip, V.
pub const CALIBRATED_FLIP_LOSS: f64 = 0.8;
/// Calibrated controller power, W.
pub const CALIBRATED_P_CTRL: f64 = 0.75e-6;

impl RectifierConfig {
    /// Ideal power stage: no resistance, no flip loss, no controller power,
    /// no detector delay and an ideal transducer.
    pub fn lossless() -> Self {
        let mut c = Self::default();
        c.xdcr.r_pz = f64::INFINITY;
        c
    }

    /// Power stage with the calibrated loss bundle and a 2 MΩ transducer leak.
    pub fn calibrated() -> Self {
        Self {
            r_tot: CALIBRATED_R_TOT,
            flip_loss_v: CALIBRATED_FLIP_LOSS,
            p_ctrl: CALIBRATED_P_CTRL,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.xdcr.validate()?;
        ensure(self.l > 0.0, "l", "must be > 0")?;
        ensure(
            self.resonance_frequency() >= RESONANCE_RATIO * self.xdcr.f_pz,
            "l",
            "LC resonance must be at least 100x the vibration frequency",
        )?;
        ensure(self.v_max > 0.0, "v_max", "must be > 0")?;
        ensure(
            self.v_pc_target >= 0.0 && self.v_pc_target < self.v_max,
            "v_pc_target",
            "must satisfy 0 <= v_pc_target < v_max",
        )?;
        if let Some(t) = self.t_eng {
            ensure(t >= 0.0, "t_eng", "must be >= 0")?;
            ensure(
                self.v_pc() < self.v_max,
                "t_eng",
                "pre-charge level must stay below v_max",
            )?;
        }
        ensure(self.v_out > 0.0, "v_out", "must be > 0")?;
        ensure(self.r_l > 0.0, "r_l", "must be > 0")?;
        ensure(self.c_out > 0.0, "c_out", "must be > 0")?;
        ensure(self.r_tot >= 0.0, "r_tot", "must be >= 0")?;
        ensure(
            self.r_tot < 2.0 * (self.l / self.xdcr.c_pz).sqrt(),
            "r_tot",
            "tank must be underdamped",
        )?;
        ensure(self.flip_loss_v >= 0.0, "flip_loss_v", "must be >= 0")?;
        ensure(self.p_ctrl >= 0.0, "p_ctrl", "must be >= 0")?;
        ensure(self.detector_delay >= 0.0, "detector_delay", "must be >= 0")
    }

    /// LC tank resonance, Hz.
    pub fn resonance_frequency(&self) -> f64 {
        1.0 / (2.0 * std::f64::consts::PI * (self.l * self.xdcr.c_pz).sqrt())
    }

    /// Energize time, either configured or derived from the pre-charge target.
    pub fn effective_t_eng(&self) -> f64 {
        self.t_eng.unwrap_or_else(|| {
            analytic::precharge_time(self.v_out, self.v_pc_target, self.l, self.xdcr.c_pz)
        })
    }

    /// Pre-charge level, V.
    pub fn v_pc(&self) -> f64 {
        match self.t_eng {
            Some(t) => analytic::precharge_voltage(self.v_out, t, self.l, self.xdcr.c_pz),
            None => self.v_pc_target,
        }
    }
}

/// Charge polarity on the transducer. `P` holds the positive terminal above
/// the grounded negative one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Polarity {
    P,
    N,
}

impl Polarity {
    pub fn sign(self) -> f64 {
        match self {
            Polarity::P => 1.0,
            Polarity::N => -1.0,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Polarity::P => Polarity::N,
            Polarity::N => Polarity::P,
        }
    }

    pub fn of(x: f64) -> Self {
        if x < 0.0 {
            Polarity::N
        } else {
            Polarity::P
        }
    }
}

/// Controller step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Phase {
    /// Source current integrates on the transducer.
    Int,
    /// Bias flip through the inductor.
    Bf,
    /// Transducer drained into the inductor.
    Trans,
    /// Inductor discharged into the output.
    Har,
    /// Inductor energized from the output.
    Eng,
    /// Inductor discharged into the transducer.
    Pc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FsmState {
    pub phase: Phase,
    pub polarity: Polarity,
}

impl FsmState {
    pub fn new(phase: Phase, polarity: Polarity) -> Self {
        Self { phase, polarity }
    }
}

impl fmt::Display for FsmState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = match self.phase {
            Phase::Int => "INT",
            Phase::Bf => "BF",
            Phase::Trans => "TRANS",
            Phase::Har => "HAR",
            Phase::Eng => "ENG",
            Phase::Pc => "PC",
        };
        let s = match self.polarity {
            Polarity::P => "P",
            Polarity::N => "N",
        };
        write!(f, "{p}_{s}")
    }
}

/// Energy bookkeeping, J.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EnergyLedger {
    /// Work done by the source current on the transducer.
    pub w_src: f64,
    /// Energy delivered to the output rail.
    pub e_out: f64,
    /// Energy drawn back from the output to pre-charge.
    pub e_inv: f64,
    pub e_loss_rtot: f64,
    pub e_loss_rpz: f64,
    /// Energy discarded by the per-flip voltage loss.
    pub e_loss_flip: f64,
    pub e_ctrl: f64,
    /// Energy stored in the transducer and inductor at the end.
    pub e_stored_end: f64,
    /// Energy stored at the start.
    pub e_stored_start: f64,
    pub t_span: f64,
}

impl EnergyLedger {
    /// Power delivered to the load, W.
    pub fn net_power(&self) -> f64 {
        (self.e_out - self.e_inv - self.e_ctrl) / self.t_span
    }

    pub fn total_loss(&self) -> f64 {
        self.e_loss_rtot + self.e_loss_rpz + self.e_loss_flip
    }

    /// Source work plus investment minus everything accounted for, J.
    pub fn audit_residual(&self) -> f64 {
        self.w_src + self.e_inv
            - self.e_out
            - self.total_loss()
            - (self.e_stored_end - self.e_stored_start)
    }

    /// Difference of two cumulative ledgers, `self - earlier`.
    pub fn since(&self, earlier: &EnergyLedger) -> EnergyLedger {
        EnergyLedger {
            w_src: self.w_src - earlier.w_src,
            e_out: self.e_out - earlier.e_out,
            e_inv: self.e_inv - earlier.e_inv,
            e_loss_rtot: self.e_loss_rtot - earlier.e_loss_rtot,
            e_loss_rpz: self.e_loss_rpz - earlier.e_loss_rpz,
            e_loss_flip: self.e_loss_flip - earlier.e_loss_flip,
            e_ctrl: self.e_ctrl - earlier.e_ctrl,
            e_stored_end: self.e_stored_end,
            e_stored_start: earlier.e_stored_end,
            t_span: self.t_span - earlier.t_span,
        }
    }
}
