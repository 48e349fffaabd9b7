//! Switched-capacitor-assisted power gating.
//!
//! A PMOS header is biased through flying capacitors that are refreshed from
//! the supply every half clock period. Between refreshes the stored bias
//! droops under the lumped discharge current; in the CMOS variant the refresh
//! path additionally loses two diode-connected drops.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::devices::{Environment, MosDevice};
use crate::error::{ensure, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Variant {
    /// Diode-connected MOS refresh switches.
    #[serde(rename = "CMOS")]
    Cmos,
    /// Lossless MEMS refresh switches.
    #[serde(rename = "MEMS")]
    Mems,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SwCapConfig {
    pub variant: Variant,
    /// Capacitance of each flying capacitor, F.
    pub c_x: f64,
    /// Refresh clock, Hz.
    pub f_clk: f64,
    pub v_dd: f64,
    /// Extra gate bias above the supply in super turn-off, V.
    pub v_b_off: f64,
    /// Extra gate bias below ground in super turn-on, V.
    pub v_b_on: f64,
    /// Total discharge current of the stored bias, A.
    pub i_dis: f64,
    pub diode_beta: f64,
    pub diode_v_th: f64,
    pub diode_n: f64,
}

impl Default for SwCapConfig {
    /// The 180 nm test-chip operating point.
    fn default() -> Self {
        Self {
            variant: Variant::Cmos,
            c_x: 5e-12,
            f_clk: 24.0,
            v_dd: 1.8,
            v_b_off: 0.75,
            v_b_on: 0.75,
            i_dis: 10e-12,
            diode_beta: 60e-6,
            diode_v_th: 0.5,
            diode_n: 1.5,
        }
    }
}

impl SwCapConfig {
    pub fn validate(&self) -> Result<()> {
        ensure(self.c_x > 0.0, "c_x", "must be > 0")?;
        ensure(self.f_clk > 0.0, "f_clk", "must be > 0")?;
        ensure(self.v_dd > 0.0, "v_dd", "must be > 0")?;
        ensure(self.v_b_off >= 0.0, "v_b_off", "must be >= 0")?;
        ensure(self.v_b_on >= 0.0, "v_b_on", "must be >= 0")?;
        ensure(self.i_dis >= 0.0, "i_dis", "must be >= 0")?;
        if self.variant == Variant::Cmos {
            ensure(self.diode_beta > 0.0, "diode_beta", "must be > 0")?;
            ensure(self.diode_v_th > 0.0, "diode_v_th", "must be > 0")?;
            ensure(self.diode_n > 1.0, "diode_n", "must be > 1")?;
        }
        Ok(())
    }

    /// Refresh period, s.
    pub fn period(&self) -> f64 {
        1.0 / self.f_clk
    }

    /// Droop rate of the stored bias, V/s.
    pub fn droop_rate(&self) -> f64 {
        self.i_dis / self.c_x
    }
}

/// Breakdown of the average gate-bias error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VoltageError {
    /// Fraction of the diode threshold dropped per diode; `None` for MEMS.
    pub alpha: Option<f64>,
    /// Two diode drops, V.
    pub diode_term: f64,
    /// Average droop between refreshes, V.
    pub refresh_term: f64,
}

impl VoltageError {
    pub fn total(&self) -> f64 {
        self.diode_term + self.refresh_term
    }
}

/// Subthreshold drop fraction of a diode-connected device carrying `i_sub`.
pub fn diode_alpha(beta: f64, n: f64, v_th: f64, i_sub: f64, env: &Environment) -> Result<f64> {
    let vt = env.thermal_voltage();
    let alpha = 1.0 - (n * vt / v_th) * (beta * (n - 1.0) * vt * vt / i_sub).ln();
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain(format!(
            "diode not in subthreshold; model invalid (alpha = {alpha})"
        )));
    }
    Ok(alpha)
}

pub fn voltage_error(cfg: &SwCapConfig, env: &Environment) -> Result<VoltageError> {
    cfg.validate()?;
    let refresh_term = cfg.i_dis * cfg.period() / (4.0 * cfg.c_x);
    match cfg.variant {
        Variant::Mems => Ok(VoltageError {
            alpha: None,
            diode_term: 0.0,
            refresh_term,
        }),
        Variant::Cmos => {
            let alpha = diode_alpha(cfg.diode_beta, cfg.diode_n, cfg.diode_v_th, cfg.i_dis, env)?;
            Ok(VoltageError {
                alpha: Some(alpha),
                diode_term: 2.0 * alpha * cfg.diode_v_th,
                refresh_term,
            })
        }
    }
}

/// Average gate voltage while in super turn-off, V.
pub fn avg_gate_voltage_super_off(cfg: &SwCapConfig, env: &Environment) -> Result<f64> {
    Ok(cfg.v_dd + cfg.v_b_off - voltage_error(cfg, env)?.total())
}

/// Average gate voltage while in super turn-on, V.
pub fn avg_gate_voltage_super_on(cfg: &SwCapConfig, env: &Environment) -> Result<f64> {
    Ok(-cfg.v_b_on + voltage_error(cfg, env)?.total())
}

/// Refresh clock that keeps the average droop `i_dis * T / (4 c_x)` below
/// `max_error_fraction` of the stored super cut-off level, Hz.
pub fn required_refresh_frequency(cfg: &SwCapConfig, max_error_fraction: f64) -> Result<f64> {
    ensure(
        max_error_fraction > 0.0 && max_error_fraction <= 1.0,
        "max_error_fraction",
        "must lie in (0, 1]",
    )?;
    ensure(cfg.c_x > 0.0, "c_x", "must be > 0")?;
    Ok(cfg.i_dis / (4.0 * max_error_fraction * (cfg.v_dd + cfg.v_b_off) * cfg.c_x))
}

/// Off-state leakage of the header with its gate held at `v_g_avg_off`, A.
pub fn swcap_leakage(
    dev: &MosDevice,
    v_g_avg_off: f64,
    v_dd: f64,
    env: &Environment,
) -> Result<f64> {
    let v_gsp = v_g_avg_off - v_dd;
    if v_gsp > dev.v_sg_max {
        return Err(Error::Domain(format!(
            "gate-source stress {v_gsp} V exceeds v_sg_max = {} V",
            dev.v_sg_max
        )));
    }
    Ok(dev.total_off_leakage(v_gsp, env))
}

/// On-resistance with the gate held at `v_g_avg_on` (at or below ground), Ω.
pub fn swcap_r_on(dev: &MosDevice, v_g_avg_on: f64, v_dd: f64) -> Result<f64> {
    let v_sg = v_dd - v_g_avg_on;
    if v_sg > dev.v_sg_max {
        return Err(Error::Domain(format!(
            "source-gate stress {v_sg} V exceeds v_sg_max = {} V",
            dev.v_sg_max
        )));
    }
    dev.on_resistance(v_sg)
}

/// `v_b_off` that lands the average gate bias on the leakage minimum, V.
pub fn optimal_v_b_off(cfg: &SwCapConfig, dev: &MosDevice, env: &Environment) -> Result<f64> {
    Ok(dev.optimal_super_cutoff_bias(env)? + voltage_error(cfg, env)?.total())
}

/// One point of a bias sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BiasPoint {
    pub v_b: f64,
    pub v_g_avg_off: f64,
    pub v_g_avg_on: f64,
    pub leakage: Option<f64>,
    pub r_on: Option<f64>,
}

/// Evaluates leakage and on-resistance with both extra biases set to `v_b`.
/// Points beyond the device stress limit carry `None`.
pub fn bias_point(
    cfg: &SwCapConfig,
    dev: &MosDevice,
    v_b: f64,
    env: &Environment,
) -> Result<BiasPoint> {
    let c = SwCapConfig {
        v_b_off: v_b,
        v_b_on: v_b,
        ..*cfg
    };
    let off = avg_gate_voltage_super_off(&c, env)?;
    let on = avg_gate_voltage_super_on(&c, env)?;
    Ok(BiasPoint {
        v_b,
        v_g_avg_off: off,
        v_g_avg_on: on,
        leakage: swcap_leakage(dev, off, c.v_dd, env).ok(),
        r_on: swcap_r_on(dev, on, c.v_dd).ok(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PgState {
    #[serde(rename = "ON")]
    On,
    #[serde(rename = "OFF")]
    Off,
    #[serde(rename = "SUPER_ON")]
    SuperOn,
    #[serde(rename = "SUPER_OFF")]
    SuperOff,
}

impl fmt::Display for PgState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PgState::On => "ON",
            PgState::Off => "OFF",
            PgState::SuperOn => "SUPER_ON",
            PgState::SuperOff => "SUPER_OFF",
        })
    }
}

/// Affine stretch of gate voltage, `v(t) = v0 + slope * (t - t0)` on `[t0, t1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub t0: f64,
    pub t1: f64,
    pub v0: f64,
    pub slope: f64,
    pub state: PgState,
}

impl Segment {
    pub fn at(&self, t: f64) -> f64 {
        self.v0 + self.slope * (t - self.t0)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct GateBiasTrace {
    pub segments: Vec<Segment>,
    pub refresh_events: Vec<f64>,
}

impl GateBiasTrace {
    /// Exact time average of `v_g` over `[a, b]`.
    pub fn window_average(&self, a: f64, b: f64) -> f64 {
        let mut area = 0.0;
        for s in &self.segments {
            let lo = s.t0.max(a);
            let hi = s.t1.min(b);
            if hi > lo {
                area += 0.5 * (s.at(lo) + s.at(hi)) * (hi - lo);
            }
        }
        area / (b - a)
    }

    /// Gate voltage at `t`, taking the post-refresh value at discontinuities.
    pub fn value_at(&self, t: f64) -> Option<f64> {
        self.segments
            .iter()
            .rev()
            .find(|s| s.t0 <= t && t <= s.t1)
            .map(|s| s.at(t))
    }

    /// Samples with strictly increasing time stamps: `per_segment` points from
    /// each segment start, plus the final end point.
    pub fn samples(&self, per_segment: usize) -> Vec<(f64, f64, PgState)> {
        let m = per_segment.max(1);
        let mut out = Vec::with_capacity(self.segments.len() * m + 1);
        for s in &self.segments {
            let dt = (s.t1 - s.t0) / m as f64;
            for k in 0..m {
                let t = s.t0 + dt * k as f64;
                out.push((t, s.at(t), s.state));
            }
        }
        if let Some(s) = self.segments.last() {
            out.push((s.t1, s.at(s.t1), s.state));
        }
        out
    }
}

/// Piecewise-affine gate voltage for a power-gating schedule.
///
/// Conventional states hold the gate at the rail (`v_dd` off, 0 on). Super
/// states refresh at entry and then every half clock period, alternating the
/// two flying capacitors; between refreshes the bias droops toward the
/// conventional level at `i_dis / c_x`.
pub fn simulate_gate_bias(
    cfg: &SwCapConfig,
    env: &Environment,
    schedule: &[(f64, PgState)],
    duration: f64,
) -> Result<GateBiasTrace> {
    cfg.validate()?;
    ensure(!schedule.is_empty(), "schedule", "must not be empty")?;
    ensure(schedule[0].0 >= 0.0, "schedule", "times must be >= 0")?;
    ensure(
        schedule.windows(2).all(|w| w[1].0 > w[0].0),
        "schedule",
        "times must be strictly increasing",
    )?;
    let t_end = schedule[0].0 + duration;
    ensure(duration > 0.0, "duration", "must be > 0")?;
    let err = voltage_error(cfg, env)?;
    let diode = err.diode_term;
    let half = 0.5 * cfg.period();
    let rate = cfg.droop_rate();
    let mut trace = GateBiasTrace::default();

    for (k, &(start, state)) in schedule.iter().enumerate() {
        if start >= t_end {
            break;
        }
        let stop = schedule.get(k + 1).map_or(t_end, |n| n.0).min(t_end);
        let (level, slope) = match state {
            PgState::Off => (cfg.v_dd, 0.0),
            PgState::On => (0.0, 0.0),
            PgState::SuperOff => (cfg.v_dd + cfg.v_b_off - diode, -rate),
            PgState::SuperOn => (-cfg.v_b_on + diode, rate),
        };
        if slope == 0.0 && matches!(state, PgState::Off | PgState::On) {
            trace.segments.push(Segment {
                t0: start,
                t1: stop,
                v0: level,
                slope: 0.0,
                state,
            });
            continue;
        }
        let mut t = start;
        let mut n = 0u64;
        while t < stop {
            trace.refresh_events.push(t);
            let next = (start + half * (n + 1) as f64).min(stop);
            trace.segments.push(Segment {
                t0: t,
                t1: next,
                v0: level,
                slope,
                state,
            });
            n += 1;
            t = next;
        }
    }
    Ok(trace)
}
