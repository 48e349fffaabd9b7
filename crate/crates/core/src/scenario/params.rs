//! Per-module parameter trees and their result tables.

use serde::{Deserialize, Serialize};

use super::table::{Cell, Table};
use crate::devices::{Environment, MosDevice};
use crate::dt_amp::{self, AmpConfig};
use crate::error::{ensure, Error, Result};
use crate::harvester::{self, analytic, RectifierConfig, SimOptions};
use crate::nems_pg::{self, DutySpec, LogicBlockSpec};
use crate::presets;
use crate::swcap::{self, PgState, SwCapConfig};

fn room() -> f64 {
    crate::consts::ROOM_TEMPERATURE
}

/// Named MOS header presets.
pub fn mos_preset(name: &str) -> Result<MosDevice> {
    match name {
        "180nm" => Ok(presets::mos_180nm()),
        "180nm-no-gidl" => Ok(presets::mos_180nm_no_gidl()),
        "28nm" => Ok(presets::mos_28nm()),
        "65nm" => Ok(presets::mos_65nm()),
        _ => Err(Error::invalid(
            "device",
            format!("unknown preset `{name}`; expected 180nm, 180nm-no-gidl, 28nm or 65nm"),
        )),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleStep {
    pub t: f64,
    pub state: PgState,
}

/// Gate-bias trace request.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GateTraceSpec {
    pub schedule: Vec<ScheduleStep>,
    pub duration: f64,
    #[serde(default = "two")]
    pub samples_per_segment: usize,
}

fn two() -> usize {
    2
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SwcapParams {
    pub config: SwCapConfig,
    /// Header preset name, used unless `custom_device` is given.
    pub device: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub custom_device: Option<MosDevice>,
    /// Temperature, K.
    pub temperature: f64,
    /// Allowed average droop as a fraction of the stored level.
    pub refresh_error_fraction: f64,
    /// When present the run emits the gate-bias trace instead of the summary.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<GateTraceSpec>,
}

impl Default for SwcapParams {
    fn default() -> Self {
        Self {
            config: SwCapConfig::default(),
            device: "180nm".into(),
            custom_device: None,
            temperature: room(),
            refresh_error_fraction: 0.05,
            trace: None,
        }
    }
}

impl SwcapParams {
    pub fn device(&self) -> Result<MosDevice> {
        match self.custom_device {
            Some(d) => d.validate().map(|_| d),
            None => mos_preset(&self.device),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.config.validate()?;
        self.device()?;
        Environment::new(self.temperature)?;
        ensure(
            self.refresh_error_fraction > 0.0 && self.refresh_error_fraction <= 1.0,
            "refresh_error_fraction",
            "must lie in (0, 1]",
        )
    }

    pub fn evaluate(&self) -> Result<Table> {
        let env = Environment::new(self.temperature)?;
        let cfg = &self.config;
        if let Some(spec) = &self.trace {
            let schedule: Vec<(f64, PgState)> =
                spec.schedule.iter().map(|s| (s.t, s.state)).collect();
            let trace = swcap::simulate_gate_bias(cfg, &env, &schedule, spec.duration)?;
            let mut t = Table::new(&["t_s", "v_g_V", "state"]);
            for (time, v, state) in trace.samples(spec.samples_per_segment) {
                t.push(vec![time.into(), v.into(), Cell::Text(state.to_string())]);
            }
            return Ok(t);
        }
        let dev = self.device()?;
        let err = swcap::voltage_error(cfg, &env)?;
        let off = swcap::avg_gate_voltage_super_off(cfg, &env)?;
        let on = swcap::avg_gate_voltage_super_on(cfg, &env)?;
        let mut t = Table::new(&[
            "v_b_off_V",
            "v_b_on_V",
            "alpha",
            "diode_term_V",
            "refresh_term_V",
            "voltage_error_V",
            "v_g_avg_off_V",
            "v_g_avg_on_V",
            "leakage_A",
            "leakage_conventional_A",
            "r_on_ohm",
            "r_on_conventional_ohm",
            "f_refresh_Hz",
            "v_b_off_opt_V",
        ]);
        t.push(vec![
            cfg.v_b_off.into(),
            cfg.v_b_on.into(),
            Cell::opt(err.alpha),
            err.diode_term.into(),
            err.refresh_term.into(),
            err.total().into(),
            off.into(),
            on.into(),
            Cell::opt(swcap::swcap_leakage(&dev, off, cfg.v_dd, &env).ok()),
            dev.total_off_leakage(0.0, &env).into(),
            Cell::opt(swcap::swcap_r_on(&dev, on, cfg.v_dd).ok()),
            Cell::opt(dev.on_resistance(cfg.v_dd).ok()),
            swcap::required_refresh_frequency(cfg, self.refresh_error_fraction)?.into(),
            Cell::opt(swcap::optimal_v_b_off(cfg, &dev, &env).ok()),
        ]);
        Ok(t)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NemsPgParams {
    /// `"20nm"`, `"17nm"` or `"14nm"`.
    pub node: String,
    pub t_on_over_t_off: f64,
    pub alpha: f64,
    /// Temperature, K.
    pub temperature: f64,
    /// Gating frequency, Hz.
    pub f_pg: f64,
    /// Saving used for the break-even duty column, percent.
    pub target_saving_pct: f64,
}

impl Default for NemsPgParams {
    fn default() -> Self {
        Self {
            node: "14nm".into(),
            t_on_over_t_off: 0.05,
            alpha: 0.1,
            temperature: room(),
            f_pg: nems_pg::DEFAULT_F_PG,
            target_saving_pct: 10.0,
        }
    }
}

impl NemsPgParams {
    fn block(&self) -> Result<(LogicBlockSpec, nems_pg::NodePreset)> {
        let preset = nems_pg::node_preset(&self.node)?;
        let block = LogicBlockSpec {
            alpha: self.alpha,
            ..preset.block
        };
        block.validate()?;
        Ok((block, preset))
    }

    pub fn validate(&self) -> Result<()> {
        self.block()?;
        Environment::new(self.temperature)?;
        DutySpec {
            t_on_over_t_off: self.t_on_over_t_off,
            f_pg: self.f_pg,
        }
        .validate()?;
        ensure(
            (0.0..100.0).contains(&self.target_saving_pct),
            "target_saving_pct",
            "must lie in [0, 100)",
        )
    }

    pub fn evaluate(&self) -> Result<Table> {
        let env = Environment::new(self.temperature)?;
        let (block, p) = self.block()?;
        let duty = DutySpec {
            t_on_over_t_off: self.t_on_over_t_off,
            f_pg: self.f_pg,
        };
        let e_g = nems_pg::energy_gain(&block, &p.finfet, &p.nems, &duty, &env);
        let breakeven = nems_pg::breakeven_duty(
            &block,
            &p.finfet,
            &p.nems,
            self.f_pg,
            self.target_saving_pct,
            &env,
        )
        .ok();
        let mut t = Table::new(&[
            "node",
            "r",
            "alpha",
            "T_K",
            "e_g",
            "saving_pct",
            "breakeven_r",
        ]);
        t.push(vec![
            Cell::Text(p.name.clone()),
            self.t_on_over_t_off.into(),
            self.alpha.into(),
            self.temperature.into(),
            e_g.into(),
            nems_pg::energy_saving_percent(e_g).into(),
            Cell::opt(breakeven),
        ]);
        Ok(t)
    }
}

/// Amplifier input waveform sampled once per clock.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum InputSpec {
    Dc { value: f64 },
    Sine { amplitude: f64, f_in: f64 },
}

impl InputSpec {
    pub fn at(&self, t: f64) -> f64 {
        match *self {
            InputSpec::Dc { value } => value,
            InputSpec::Sine { amplitude, f_in } => {
                amplitude * (2.0 * std::f64::consts::PI * f_in * t).sin()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DtAmpParams {
    pub amp: AmpConfig,
    pub input: InputSpec,
    /// Number of clock cycles to simulate.
    pub samples: usize,
    /// When present the run emits gain against these amplitudes instead of
    /// a waveform.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub amplitudes: Option<Vec<f64>>,
}

impl Default for DtAmpParams {
    fn default() -> Self {
        Self {
            amp: AmpConfig::default(),
            input: InputSpec::Sine {
                amplitude: 0.1,
                f_in: 1e3,
            },
            samples: 100,
            amplitudes: None,
        }
    }
}

impl DtAmpParams {
    pub fn validate(&self) -> Result<()> {
        self.amp.validate()?;
        ensure(self.samples >= 1, "samples", "must be >= 1")?;
        if let InputSpec::Sine { f_in, .. } = self.input {
            ensure(f_in > 0.0, "input.f_in", "must be > 0")?;
        }
        if let Some(a) = &self.amplitudes {
            ensure(!a.is_empty(), "amplitudes", "must not be empty")?;
            ensure(
                a.iter().all(|&x| x != 0.0),
                "amplitudes",
                "must be non-zero",
            )?;
        }
        Ok(())
    }

    pub fn evaluate(&self) -> Result<Table> {
        if let Some(amps) = &self.amplitudes {
            let mut t = Table::new(&["amplitude_V", "gain_single", "gain_differential"]);
            for g in dt_amp::gain_vs_amplitude(&self.amp, amps)? {
                t.push(vec![
                    g.amplitude.into(),
                    g.gain_single.into(),
                    g.gain_differential.into(),
                ]);
            }
            return Ok(t);
        }
        let dt = 1.0 / self.amp.f_clk;
        let times: Vec<f64> = (0..self.samples).map(|k| k as f64 * dt).collect();
        let inputs: Vec<f64> = times.iter().map(|&t| self.input.at(t)).collect();
        let out = dt_amp::simulate(&self.amp, &inputs)?;
        let mut t = Table::new(&["sample_index", "t_s", "v_in_V", "v_out_V", "fault_flags"]);
        for (k, (s, time)) in out.iter().zip(&times).enumerate() {
            t.push(vec![
                Cell::Int(k as i64),
                (*time).into(),
                s.v_in.into(),
                s.v_out.into(),
                Cell::Int(s.faults as i64),
            ]);
        }
        Ok(t)
    }
}

/// What a rectifier run reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum PiezoReport {
    /// Energy ledger and output power at the configured rail.
    #[default]
    Summary,
    /// Every state-machine event and segment sample.
    Trace,
    /// Output voltage settled against the resistive load.
    Steady,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PiezoParams {
    pub rectifier: RectifierConfig,
    /// Measured harvest cycles.
    pub cycles: usize,
    pub report: PiezoReport,
}

impl Default for PiezoParams {
    fn default() -> Self {
        Self {
            rectifier: RectifierConfig::default(),
            cycles: 200,
            report: PiezoReport::Summary,
        }
    }
}

impl PiezoParams {
    pub fn validate(&self) -> Result<()> {
        self.rectifier.validate()?;
        ensure(self.cycles >= 1, "cycles", "must be >= 1")
    }

    pub fn evaluate(&self) -> Result<Table> {
        let cfg = &self.rectifier;
        let x = &cfg.xdcr;
        match self.report {
            PiezoReport::Steady => {
                let ss = harvester::steady_state_vout(cfg, self.cycles)?;
                let mut t = Table::new(&["v_out_V", "p_out_W", "fom", "iterations"]);
                t.push(vec![
                    ss.v_out.into(),
                    ss.p_net.into(),
                    analytic::fom(ss.p_net, x).into(),
                    Cell::Int(ss.iterations as i64),
                ]);
                Ok(t)
            }
            PiezoReport::Trace => {
                let tr = harvester::simulate_with(
                    cfg,
                    &SimOptions {
                        cycles: self.cycles,
                        ..SimOptions::default()
                    },
                )?;
                let mut t = Table::new(&["t_s", "state", "v_pz_V", "v_pzp_V", "v_pzn_V", "i_l_A"]);
                for e in &tr.events {
                    t.push(vec![
                        e.t.into(),
                        Cell::Text(e.state.to_string()),
                        e.v_pz.into(),
                        e.v_pzp.into(),
                        e.v_pzn.into(),
                        e.i_l.into(),
                    ]);
                }
                Ok(t)
            }
            PiezoReport::Summary => {
                let tr = harvester::simulate_with(
                    cfg,
                    &SimOptions {
                        cycles: self.cycles,
                        record: false,
                        ..SimOptions::default()
                    },
                )?;
                let l = &tr.ledger;
                let p = l.net_power();
                let mut t = Table::new(&[
                    "p_out_W",
                    "fom",
                    "e_out_J",
                    "e_inv_J",
                    "e_loss_rtot_J",
                    "e_loss_rpz_J",
                    "e_loss_flip_J",
                    "e_ctrl_J",
                    "t_span_s",
                    "cycle_time_s",
                    "accumulation_time_s",
                    "audit_residual_J",
                ]);
                t.push(vec![
                    p.into(),
                    analytic::fom(p, x).into(),
                    l.e_out.into(),
                    l.e_inv.into(),
                    l.e_loss_rtot.into(),
                    l.e_loss_rpz.into(),
                    l.e_loss_flip.into(),
                    l.e_ctrl.into(),
                    l.t_span.into(),
                    tr.mean_cycle_time().into(),
                    tr.mean_accumulation_time().into(),
                    l.audit_residual().into(),
                ]);
                Ok(t)
            }
        }
    }
}

/// Architecture comparison grid over a common operating voltage.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CompareParams {
    pub v_max: f64,
    pub v_oc: f64,
    pub v_out: f64,
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

impl Default for CompareParams {
    fn default() -> Self {
        Self {
            v_max: 12.0,
            v_oc: 1.0,
            v_out: 1.0,
            start: 0.0,
            stop: 12.0,
            steps: 25,
        }
    }
}

impl CompareParams {
    pub fn validate(&self) -> Result<()> {
        ensure(self.v_max > 0.0, "v_max", "must be > 0")?;
        ensure(self.v_oc > 0.0, "v_oc", "must be > 0")?;
        ensure(self.v_out > 0.0, "v_out", "must be > 0")?;
        ensure(
            self.start >= 0.0 && self.stop >= self.start,
            "stop",
            "must satisfy 0 <= start <= stop",
        )?;
        ensure(self.steps >= 2, "steps", "must be >= 2")
    }

    pub fn evaluate(&self) -> Result<Table> {
        self.validate()?;
        let grid = crate::numeric::linspace(self.start, self.stop, self.steps);
        let mut t = Table::new(&[
            "x_V",
            "fom_investment",
            "fom_pre_charge",
            "fom_double_pile_up",
            "fom_bias_flip",
            "fom_sece",
            "fom_proposed",
        ]);
        for r in analytic::compare_architectures(self.v_max, self.v_oc, self.v_out, &grid) {
            t.push(vec![
                r.x.into(),
                Cell::opt(r.investment),
                Cell::opt(r.pre_charge),
                Cell::opt(r.double_pile_up),
                r.bias_flip.into(),
                r.sece.into(),
                Cell::opt(r.proposed),
            ]);
        }
        Ok(t)
    }
}
