//! NEMS discrete-time parametric amplifier.
//!
//! Two banks of `n_parallel` capacitive switches sample `v_in ± v_bias` while
//! pulled in. In hold the banks are shorted, the bias charge cancels and the
//! switches release, so the remaining signal charge sits on the much smaller
//! open-state capacitance.

use serde::{Deserialize, Serialize};

use crate::devices::{Environment, NemsCapacitiveSwitch, NemsOhmicSwitch};
use crate::error::{ensure, Error, Result};
use crate::presets;

/// Hold-phase capacitance model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CapModel {
    /// Open switches sit at `c_off` regardless of bias.
    Linear,
    /// Open switches follow the static beam deflection.
    Deflection,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AmpConfig {
    pub cap_switch: NemsCapacitiveSwitch,
    pub n_parallel: u32,
    pub ohmic: NemsOhmicSwitch,
    pub v_bias: f64,
    pub f_clk: f64,
    pub c_large: f64,
    pub differential: bool,
    /// Ohmic switch gate drive amplitude, V.
    #[serde(default = "default_v_gb")]
    pub v_gb: f64,
    /// Non-overlap clock generator power, W.
    #[serde(default = "default_p_clk")]
    pub p_clk: f64,
    #[serde(default = "default_cap_model")]
    pub cap_model: CapModel,
}

fn default_v_gb() -> f64 {
    2.0
}

fn default_p_clk() -> f64 {
    0.1e-6
}

fn default_cap_model() -> CapModel {
    CapModel::Deflection
}

impl Default for AmpConfig {
    /// Ten extracted switches per bank, 4 V bias, 100 kHz clock, differential.
    fn default() -> Self {
        Self {
            cap_switch: presets::nems_capacitive_reference(),
            n_parallel: 10,
            ohmic: presets::nems_ohmic_reference(),
            v_bias: 4.0,
            f_clk: 100e3,
            c_large: 30e-12,
            differential: true,
            v_gb: default_v_gb(),
            p_clk: default_p_clk(),
            cap_model: CapModel::Deflection,
        }
    }
}

impl AmpConfig {
    pub fn validate(&self) -> Result<()> {
        self.cap_switch.validate()?;
        self.ohmic.validate()?;
        ensure(self.n_parallel >= 1, "n_parallel", "must be >= 1")?;
        ensure(self.v_bias > 0.0, "v_bias", "must be > 0")?;
        ensure(self.f_clk >= 0.0, "f_clk", "must be >= 0")?;
        ensure(self.c_large > 0.0, "c_large", "must be > 0")?;
        Ok(())
    }

    /// True when each clock phase outlasts both mechanical delays.
    pub fn timing_ok(&self) -> bool {
        self.f_clk > 0.0 && 0.5 / self.f_clk > self.cap_switch.t_mech.max(self.ohmic.t_mech)
    }

    /// Parasitic loading per bank.
    pub fn parasitic(&self) -> f64 {
        self.ohmic.c_gsd_on() + self.ohmic.c_gsd_off()
    }

    fn n(&self) -> f64 {
        self.n_parallel as f64
    }

    /// Total pulled-in capacitance of one bank, parasitics excluded.
    pub fn total_c_on(&self) -> f64 {
        self.n() * self.cap_switch.c_on
    }
}

pub fn ideal_gain(sw: &NemsCapacitiveSwitch) -> f64 {
    sw.ideal_gain()
}

pub fn theoretical_gain(sw: &NemsCapacitiveSwitch) -> f64 {
    sw.theoretical_gain()
}

pub fn practical_gain(sw: &NemsCapacitiveSwitch) -> f64 {
    sw.practical_gain()
}

/// Gain with the sampling switches' parasitics loading each bank.
pub fn loaded_gain(cfg: &AmpConfig) -> f64 {
    let p = cfg.parasitic();
    let n = cfg.n();
    (n * cfg.cap_switch.c_on + p) / (n * cfg.cap_switch.c_off + p)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RangeReport {
    /// `v_bias - v_pi - v_in_max`; must be >= 0.
    pub bias_margin: f64,
    pub bias_ok: bool,
    pub v_out_max: f64,
    /// `v_po - v_out_max`; must be > 0.
    pub output_margin: f64,
    pub output_ok: bool,
}

impl RangeReport {
    pub fn ok(&self) -> bool {
        self.bias_ok && self.output_ok
    }
}

pub fn validate_voltage_range(cfg: &AmpConfig, v_in_max: f64) -> RangeReport {
    let bias_margin = cfg.v_bias - cfg.cap_switch.v_pi - v_in_max;
    let v_out_max = loaded_gain(cfg) * v_in_max;
    let output_margin = cfg.cap_switch.v_po - v_out_max;
    RangeReport {
        bias_margin,
        bias_ok: bias_margin >= 0.0,
        v_out_max,
        output_margin,
        output_ok: output_margin > 0.0,
    }
}

/// Largest single-ended input keeping the output below pull-out, V.
pub fn max_input(cfg: &AmpConfig) -> f64 {
    cfg.cap_switch.v_po / loaded_gain(cfg)
}

/// Integrated hold-phase output noise, V²: `(single_ended, differential)`.
pub fn output_noise(cfg: &AmpConfig, env: &Environment) -> (f64, f64) {
    let single = 2.0 * env.kt() / cfg.total_c_on() * (1.0 + loaded_gain(cfg));
    (single, 2.0 * single)
}

/// Amplifier and switch-drive power of the differential implementation, W.
pub fn dynamic_power(cfg: &AmpConfig) -> (f64, f64) {
    let o = &cfg.ohmic;
    let p_amp = 2.0
        * (2.0 * cfg.total_c_on() + 4.0 * o.c_gsd_on() + 4.0 * o.c_gsd_off())
        * cfg.v_bias.powi(2)
        * cfg.f_clk;
    let p_sw = 2.0 * (6.0 * o.c_par_on() + 3.0 * o.c_gb_on) * cfg.v_gb.powi(2) * cfg.f_clk;
    (p_amp, p_sw)
}

/// Per-sample fault bits.
pub mod fault {
    /// A bank failed to pull in during sampling.
    pub const PULL_IN: u8 = 1;
    /// The held output would exceed pull-out, so the switches did not fully
    /// release.
    pub const PULL_OUT: u8 = 2;
    /// A clock phase is shorter than a mechanical delay.
    pub const TIMING: u8 = 4;
}

/// State of one single-ended amplifier instance at the end of a phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseState {
    pub q_top_a: f64,
    pub q_top_b: f64,
    pub contact_a: bool,
    pub contact_b: bool,
    pub v_a: f64,
    pub v_b: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HoldResult {
    pub v_out: f64,
    /// Charge on both banks after release, C.
    pub q_after: f64,
    /// Charge sampled onto both banks, C.
    pub q_before: f64,
    pub faults: u8,
}

impl HoldResult {
    /// Relative charge mismatch across the release.
    pub fn charge_drift(&self) -> f64 {
        if self.q_before == 0.0 {
            self.q_after.abs()
        } else {
            ((self.q_after - self.q_before) / self.q_before).abs()
        }
    }
}

const RELAX: f64 = 0.5;
const FIXED_POINT_TOL: f64 = 1e-6;
const MAX_ITER: usize = 100;

fn bank_capacitance(cfg: &AmpConfig, v: f64) -> f64 {
    let c = match cfg.cap_model {
        CapModel::Linear => cfg.cap_switch.c_off,
        CapModel::Deflection => cfg.cap_switch.open_capacitance(v),
    };
    cfg.n() * c + cfg.parasitic()
}

/// One sample and hold of a single-ended instance.
pub fn sample_and_hold(cfg: &AmpConfig, v_in: f64) -> Result<(PhaseState, HoldResult)> {
    let sw = &cfg.cap_switch;
    let n = cfg.n();
    let p = cfg.parasitic();
    let mut faults = 0u8;
    if !cfg.timing_ok() {
        faults |= fault::TIMING;
    }

    // Sample: both banks pulled in through the bias source.
    let va = v_in + cfg.v_bias;
    let vb = v_in - cfg.v_bias;
    let (ca, closed_a) = sw.capacitance(va, false);
    let (cb, closed_b) = sw.capacitance(vb, false);
    if !(closed_a && closed_b) {
        faults |= fault::PULL_IN;
    }
    let q_a = (n * ca + p) * va;
    let q_b = (n * cb + p) * vb;
    let q = q_a + q_b;
    let sample = PhaseState {
        q_top_a: q_a,
        q_top_b: q_b,
        contact_a: closed_a,
        contact_b: closed_b,
        v_a: va,
        v_b: vb,
    };

    // Hold: banks shorted, switches release unless the level stays above pull-out.
    let c_closed = 2.0 * (n * sw.c_on + p);
    let v_closed = q / c_closed;
    if v_closed.abs() >= sw.v_po {
        return Ok((
            sample,
            HoldResult {
                v_out: v_closed,
                q_after: c_closed * v_closed,
                q_before: q,
                faults: faults | fault::PULL_OUT,
            },
        ));
    }
    let charge = |v: f64| 2.0 * bank_capacitance(cfg, v) * v;
    let mut v = q / (2.0 * bank_capacitance(cfg, 0.0));
    let mut settled = false;
    for _ in 0..MAX_ITER {
        let next = q / (2.0 * bank_capacitance(cfg, v));
        let step = RELAX * (next - v);
        v += step;
        if step.abs() < FIXED_POINT_TOL {
            settled = true;
            break;
        }
    }
    if !settled {
        return Err(Error::Divergence(format!(
            "hold fixed point did not settle for v_in = {v_in} V"
        )));
    }
    // Polish: charge(v) is monotone in v, so bisection pins it to rounding.
    if q != 0.0 {
        let (mut lo, mut hi) = (v - 10.0 * FIXED_POINT_TOL, v + 10.0 * FIXED_POINT_TOL);
        let f = |x: f64| charge(x) - q;
        if f(lo).signum() != f(hi).signum() {
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid == lo || mid == hi {
                    break;
                }
                if f(mid).signum() == f(lo).signum() {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            v = if f(lo).abs() < f(hi).abs() { lo } else { hi };
        }
    }
    if v.abs() >= sw.v_po {
        faults |= fault::PULL_OUT;
        v = sw.v_po.copysign(v);
    }
    Ok((
        sample,
        HoldResult {
            v_out: v,
            q_after: if faults & fault::PULL_OUT != 0 {
                q
            } else {
                charge(v)
            },
            q_before: q,
            faults,
        },
    ))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmpSample {
    pub v_in: f64,
    pub v_out: f64,
    pub faults: u8,
    /// Worst relative charge drift across the release in this sample.
    pub charge_drift: f64,
}

/// Amplifies one input per clock cycle. In differential mode two instances
/// see `+v_in` and `-v_in` and the output is their difference.
pub fn simulate(cfg: &AmpConfig, inputs: &[f64]) -> Result<Vec<AmpSample>> {
    cfg.validate()?;
    inputs
        .iter()
        .map(|&v_in| {
            let (_, p) = sample_and_hold(cfg, v_in)?;
            if cfg.differential {
                let (_, m) = sample_and_hold(cfg, -v_in)?;
                Ok(AmpSample {
                    v_in,
                    v_out: p.v_out - m.v_out,
                    faults: p.faults | m.faults,
                    charge_drift: p.charge_drift().max(m.charge_drift()),
                })
            } else {
                Ok(AmpSample {
                    v_in,
                    v_out: p.v_out,
                    faults: p.faults,
                    charge_drift: p.charge_drift(),
                })
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainPoint {
    /// Signal amplitude, V (differential amplitude for the differential gain).
    pub amplitude: f64,
    pub gain_single: f64,
    pub gain_differential: f64,
}

/// Gain against amplitude. Single-ended: one instance driven at `amplitude`.
/// Differential: the amplitude is split as `±amplitude/2` across the pair.
pub fn gain_vs_amplitude(cfg: &AmpConfig, amplitudes: &[f64]) -> Result<Vec<GainPoint>> {
    cfg.validate()?;
    amplitudes
        .iter()
        .map(|&a| {
            ensure(a != 0.0, "amplitude", "must be non-zero")?;
            let (_, s) = sample_and_hold(cfg, a)?;
            let (_, p) = sample_and_hold(cfg, 0.5 * a)?;
            let (_, m) = sample_and_hold(cfg, -0.5 * a)?;
            Ok(GainPoint {
                amplitude: a,
                gain_single: s.v_out / a,
                gain_differential: (p.v_out - m.v_out) / a,
            })
        })
        .collect()
}

/// Relative gain loss at `amplitude` against a 1 mV reference:
/// `(single_ended, differential)`.
pub fn droop(cfg: &AmpConfig, amplitude: f64) -> Result<(f64, f64)> {
    let g = gain_vs_amplitude(cfg, &[1e-3, amplitude])?;
    Ok((
        1.0 - g[1].gain_single / g[0].gain_single,
        1.0 - g[1].gain_differential / g[0].gain_differential,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bare(cfg: AmpConfig) -> AmpConfig {
        let mut c = cfg;
        c.ohmic.c_gs_on = 0.0;
        c.ohmic.c_gd_on = 0.0;
        c.ohmic.c_gs_off = 0.0;
        c.ohmic.c_gd_off = 0.0;
        c
    }

    #[test]
    fn gains() {
        let cfg = AmpConfig::default();
        assert!((loaded_gain(&cfg) - 4.77).abs() < 0.01);
        assert!((loaded_gain(&bare(cfg)) - ideal_gain(&cfg.cap_switch)).abs() < 1e-12);
        let big = AmpConfig {
            n_parallel: 1_000_000,
            ..cfg
        };
        assert!((loaded_gain(&big) - 5.1).abs() < 1e-4);
    }

    #[test]
    fn range_report() {
        let cfg = AmpConfig::default();
        let r = validate_voltage_range(&cfg, 0.2);
        assert!((r.bias_margin - 0.6).abs() < 1e-12 && r.bias_ok);
        assert!((max_input(&cfg) - 0.377).abs() < 1e-3);
        assert!(!validate_voltage_range(&cfg, max_input(&cfg)).output_ok);
    }

    #[test]
    fn noise() {
        let cfg = AmpConfig::default();
        let (s, d) = output_noise(&cfg, &Environment::room());
        assert!((d - 1.44e-6).abs() < 0.01e-6, "{d}");
        assert_eq!(d, 2.0 * s);
    }

    #[test]
    fn power() {
        let cfg = AmpConfig::default();
        let (p_amp, p_sw) = dynamic_power(&cfg);
        assert!((p_amp / 0.44e-6 - 1.0).abs() < 0.02, "{p_amp}");
        assert!((p_sw + cfg.p_clk - 0.16e-6).abs() < 1e-9);
        let off = AmpConfig { f_clk: 0.0, ..cfg };
        assert_eq!(dynamic_power(&off), (0.0, 0.0));
    }

    #[test]
    fn linear_dc_gain() {
        let cfg = AmpConfig {
            cap_model: CapModel::Linear,
            differential: false,
            ..bare(AmpConfig::default())
        };
        let out = simulate(&cfg, &[0.2, -0.2, 0.0]).unwrap();
        assert!((out[0].v_out - 1.02).abs() < 1e-9);
        assert!((out[1].v_out + 1.02).abs() < 1e-9);
        assert_eq!(out[2].v_out, 0.0);
        assert!(out.iter().all(|s| s.faults == 0 && s.charge_drift < 1e-12));
    }

    #[test]
    fn droop_ordering() {
        let cfg = AmpConfig::default();
        let (s, d) = droop(&cfg, 0.325).unwrap();
        assert!(d <= s);
        assert!((0.005..=0.07).contains(&s), "{s}");
        assert!((0.005..=0.07).contains(&d), "{d}");
    }

    #[test]
    fn pull_out_fault() {
        let cfg = AmpConfig {
            differential: false,
            ..AmpConfig::default()
        };
        let out = simulate(&cfg, &[0.5]).unwrap();
        assert!(out[0].faults & fault::PULL_OUT != 0);
        assert!((out[0].v_out - 1.8).abs() < 1e-12);
        let high = AmpConfig { v_bias: 6.0, ..cfg };
        let out = simulate(&high, &[2.0]).unwrap();
        assert!(out[0].faults & fault::PULL_OUT != 0);
        assert!((out[0].v_out - 2.0).abs() < 1e-12);
    }

    #[test]
    fn pull_in_and_timing_faults() {
        let cfg = AmpConfig {
            v_bias: 3.0,
            differential: false,
            ..AmpConfig::default()
        };
        assert!(simulate(&cfg, &[0.1]).unwrap()[0].faults & fault::PULL_IN != 0);
        let fast = AmpConfig {
            f_clk: 5e6,
            ..AmpConfig::default()
        };
        assert!(simulate(&fast, &[0.1]).unwrap()[0].faults & fault::TIMING != 0);
    }
}
