//! Named reproduction bundles: each runs a fixed scenario, returns its table
//! and checks the published or derived values it covers.

use std::fmt;

use rayon::prelude::*;

use super::table::{Cell, Table};
use super::with_workers;
use crate::devices::{Environment, MosDevice};
use crate::dt_amp::{self, AmpConfig};
use crate::error::{Error, Result};
use crate::harvester::{self, analytic, RectifierConfig};
use crate::nems_pg::{self, DutySpec, LogicBlockSpec, DEFAULT_F_PG};
use crate::numeric::linspace;
use crate::presets;
use crate::swcap::{self, SwCapConfig};

pub const TARGETS: [&str; 10] = [
    "table-2.4-trends",
    "table-3.5",
    "table-3.6",
    "fig-2.22",
    "fig-3.7",
    "fig-4.17",
    "fig-5.9a",
    "fig-5.9b",
    "table-5.1",
    "fom-summary",
];

/// One verified quantity.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub actual: f64,
    pub expected: String,
    pub tolerance: String,
    pub pass: bool,
}

impl Check {
    pub fn abs(name: &str, actual: f64, expected: f64, tol: f64) -> Self {
        Self {
            name: name.into(),
            actual,
            expected: short(expected),
            tolerance: format!("±{}", short(tol)),
            pass: (actual - expected).abs() <= tol,
        }
    }

    pub fn rel(name: &str, actual: f64, expected: f64, tol: f64) -> Self {
        Self {
            name: name.into(),
            actual,
            expected: short(expected),
            tolerance: format!("±{}%", tol * 100.0),
            pass: (actual / expected - 1.0).abs() <= tol,
        }
    }

    pub fn range(name: &str, actual: f64, lo: f64, hi: f64) -> Self {
        Self {
            name: name.into(),
            actual,
            expected: format!("[{}, {}]", short(lo), short(hi)),
            tolerance: "inclusive".into(),
            pass: (lo..=hi).contains(&actual),
        }
    }

    /// A property check; `actual` is 1 when it holds.
    pub fn holds(name: &str, cond: bool, what: &str) -> Self {
        Self {
            name: name.into(),
            actual: if cond { 1.0 } else { 0.0 },
            expected: what.into(),
            tolerance: "exact".into(),
            pass: cond,
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}: actual={} expected={} tol={}",
            if self.pass { "PASS" } else { "FAIL" },
            self.name,
            short(self.actual),
            self.expected,
            self.tolerance
        )
    }
}

fn short(x: f64) -> String {
    if x == 0.0 || (1e-3..1e5).contains(&x.abs()) {
        format!("{x:.6}")
    } else {
        format!("{x:.6e}")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Repro {
    pub target: String,
    pub table: Table,
    pub checks: Vec<Check>,
}

impl Repro {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Runs the bundle `target` with up to `workers` threads (0 = per core).
pub fn repro(target: &str, workers: usize) -> Result<Repro> {
    let (table, checks) = with_workers(workers, || match target {
        "table-2.4-trends" => table_2_4(),
        "table-3.5" => table_3_5(),
        "table-3.6" => table_3_6(),
        "fig-2.22" => fig_2_22(),
        "fig-3.7" => fig_3_7(),
        "fig-4.17" => fig_4_17(),
        "fig-5.9a" => fig_5_9(12.0, 1.0, true),
        "fig-5.9b" => fig_5_9(3.3, 0.5, false),
        "table-5.1" => table_5_1(),
        "fom-summary" => fom_summary(),
        _ => Err(Error::Config(format!(
            "unknown repro target `{target}`; expected one of {}",
            TARGETS.join(", ")
        ))),
    })??;
    Ok(Repro {
        target: target.into(),
        table,
        checks,
    })
}

type Bundle = Result<(Table, Vec<Check>)>;

fn table_2_4() -> Bundle {
    let env = Environment::room();
    let mut t = Table::new(&[
        "node",
        "v_dd_V",
        "width_m",
        "v_gsp_opt_V",
        "reduction_ratio",
        "leakage_conventional_A",
        "leakage_super_cutoff_A",
    ]);
    let mut checks = Vec::new();
    let mut ratios = Vec::new();
    for (name, dev, v_dd, target) in [
        ("180nm", presets::mos_180nm(), 1.8, presets::REDUCTION_180NM),
        ("28nm", presets::mos_28nm(), 0.9, presets::REDUCTION_28NM),
    ] {
        let v_opt = dev.optimal_super_cutoff_bias(&env)?;
        let ratio = dev.max_reduction_ratio(&env)?;
        t.push(vec![
            name.into(),
            v_dd.into(),
            dev.width.into(),
            v_opt.into(),
            ratio.into(),
            dev.total_off_leakage(0.0, &env).into(),
            dev.total_off_leakage(v_opt, &env).into(),
        ]);
        checks.push(Check::abs(
            &format!("{name} optimal bias V"),
            v_opt,
            0.3,
            0.01,
        ));
        checks.push(Check::rel(
            &format!("{name} leakage reduction"),
            ratio,
            target,
            0.01,
        ));
        ratios.push(ratio);
    }
    checks.push(Check::holds(
        "reduction grows with scaling",
        ratios[1] > ratios[0],
        "28nm ratio > 180nm ratio",
    ));
    Ok((t, checks))
}

fn fig_2_22() -> Bundle {
    let env = Environment::room();
    let dev = presets::mos_180nm();
    let cfg = SwCapConfig::default();
    let mut t = Table::new(&[
        "v_b_V",
        "v_g_avg_off_V",
        "v_g_avg_on_V",
        "leakage_A",
        "r_on_ohm",
    ]);
    for v_b in linspace(0.0, 1.5, 31) {
        let p = swcap::bias_point(&cfg, &dev, v_b, &env)?;
        t.push(vec![
            v_b.into(),
            p.v_g_avg_off.into(),
            p.v_g_avg_on.into(),
            Cell::opt(p.leakage),
            Cell::opt(p.r_on),
        ]);
    }
    let v_opt = dev.optimal_super_cutoff_bias(&env)?;
    let mut checks = vec![
        Check::abs("optimal bias V", v_opt, presets::V_GSP_OPT, 0.01),
        Check::rel(
            "leakage reduction",
            dev.max_reduction_ratio(&env)?,
            presets::REDUCTION_180NM,
            0.01,
        ),
        Check::range(
            "optimal v_b_off V",
            swcap::optimal_v_b_off(&cfg, &dev, &env)?,
            0.7,
            0.8,
        ),
    ];
    let opts: Vec<f64> = [300.0, 330.0, 360.0]
        .iter()
        .map(|&k| dev.optimal_super_cutoff_bias(&Environment::new(k)?))
        .collect::<Result<_>>()?;
    checks.push(Check::holds(
        "optimum rises with temperature",
        opts.windows(2).all(|w| w[1] > w[0]),
        "strictly increasing over 300/330/360 K",
    ));
    let scaled: MosDevice = dev.with_corner_factor(10.0);
    checks.push(Check::abs(
        "argmin under common scaling V",
        scaled.optimal_super_cutoff_bias(&env)?,
        v_opt,
        1e-4,
    ));
    Ok((t, checks))
}

fn at_alpha(p: &nems_pg::NodePreset, alpha: f64) -> LogicBlockSpec {
    LogicBlockSpec { alpha, ..p.block }
}

fn table_3_5() -> Bundle {
    let env = Environment::room();
    let mut t = Table::new(&["node", "saving_pct_r5", "breakeven_r_10pct"]);
    let mut checks = Vec::new();
    for (node, be) in [("20nm", 0.017), ("17nm", 0.052), ("14nm", 0.084)] {
        let p = nems_pg::node_preset(node)?;
        let b = at_alpha(&p, 0.1);
        let duty = DutySpec {
            t_on_over_t_off: 0.05,
            f_pg: DEFAULT_F_PG,
        };
        let s = nems_pg::energy_saving_percent(nems_pg::energy_gain(
            &b, &p.finfet, &p.nems, &duty, &env,
        ));
        let r = nems_pg::breakeven_duty(&b, &p.finfet, &p.nems, DEFAULT_F_PG, 10.0, &env)?;
        t.push(vec![node.into(), s.into(), r.into()]);
        checks.push(Check::abs(&format!("{node} break-even duty"), r, be, 0.01));
        if node == "14nm" {
            checks.push(Check::abs("14nm saving at r=5% pct", s, 15.54, 1.0));
        }
    }
    Ok((t, checks))
}

fn table_3_6() -> Bundle {
    let env = Environment::from_celsius(40.0)?;
    let p = nems_pg::node_preset("14nm")?;
    let rows = nems_pg::soc_report(&nems_pg::mobile_soc_units(), &p, DEFAULT_F_PG, &env);
    let mut t = Table::new(&["unit", "alpha", "r", "f_logic_Hz", "e_g", "saving_pct"]);
    for r in &rows {
        t.push(vec![
            r.unit.name.as_str().into(),
            r.unit.alpha.into(),
            r.unit.t_on_over_t_off.into(),
            r.unit.f_logic.into(),
            r.e_g.into(),
            r.saving_pct.into(),
        ]);
    }
    let dsp = rows
        .iter()
        .find(|r| r.unit.name == "DSP/GPU")
        .expect("DSP row");
    let min = rows
        .iter()
        .min_by(|a, b| a.saving_pct.total_cmp(&b.saving_pct))
        .expect("rows");
    let checks = vec![
        Check::abs("DSP/GPU saving pct", dsp.saving_pct, 29.5, 3.0),
        Check::holds(
            "clock distribution saves least",
            min.unit.name == "clock distribution",
            "minimum saving row is clock distribution",
        ),
    ];
    Ok((t, checks))
}

fn fig_3_7() -> Bundle {
    let env = Environment::room();
    let presets: Vec<_> = nems_pg::NODE_NAMES
        .iter()
        .map(|n| nems_pg::node_preset(n))
        .collect::<Result<_>>()?;
    let mut headers = vec!["r".to_string()];
    headers.extend(presets.iter().map(|p| format!("e_g_{}", p.name)));
    let mut t = Table::new(&headers);
    let rs: Vec<f64> = linspace(-3.0, 2.0, 26)
        .into_iter()
        .map(|e| 10f64.powf(e))
        .collect();
    let gain = |p: &nems_pg::NodePreset, r: f64, f_pg: f64| {
        let duty = DutySpec {
            t_on_over_t_off: r,
            f_pg,
        };
        nems_pg::energy_gain(&at_alpha(p, 0.1), &p.finfet, &p.nems, &duty, &env)
    };
    for &r in &rs {
        let mut row = vec![Cell::Num(r)];
        row.extend(presets.iter().map(|p| Cell::Num(gain(p, r, DEFAULT_F_PG))));
        t.push(row);
    }
    let mut checks = Vec::new();
    for p in &presets {
        checks.push(Check::range(
            &format!("{} E_G at r=100", p.name),
            gain(p, 100.0, DEFAULT_F_PG),
            1.0,
            1.01,
        ));
        let col: Vec<f64> = rs.iter().map(|&r| gain(p, r, DEFAULT_F_PG)).collect();
        checks.push(Check::holds(
            &format!("{} E_G falls with r", p.name),
            col.windows(2).all(|w| w[1] < w[0]),
            "strictly decreasing",
        ));
        let g: Vec<f64> = (0..=6).map(|k| gain(p, 0.05, 10f64.powi(k))).collect();
        let lo = g.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = g.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        checks.push(Check::range(
            &format!("{} E_G spread over f_pg 1 Hz..1 MHz", p.name),
            hi / lo - 1.0,
            0.0,
            0.01,
        ));
    }
    Ok((t, checks))
}

fn fig_4_17() -> Bundle {
    let cfg = AmpConfig::default();
    let amps: Vec<f64> = linspace(1e-3, 325e-3, 28);
    let pts = dt_amp::gain_vs_amplitude(&cfg, &amps)?;
    let mut t = Table::new(&["amplitude_V", "gain_single", "gain_differential"]);
    for g in &pts {
        t.push(vec![
            g.amplitude.into(),
            g.gain_single.into(),
            g.gain_differential.into(),
        ]);
    }
    let (single, diff) = dt_amp::droop(&cfg, 325e-3)?;
    let (p_amp, _) = dt_amp::dynamic_power(&cfg);
    let checks = vec![
        Check::abs("ideal gain", dt_amp::ideal_gain(&cfg.cap_switch), 5.1, 1e-9),
        Check::abs("loaded gain", dt_amp::loaded_gain(&cfg), 4.77, 0.01),
        Check::rel("amplifier power W", p_amp, 0.44e-6, 0.02),
        Check::range("single-ended droop at 325 mV", single, 0.005, 0.07),
        Check::range("differential droop at 325 mV", diff, 0.005, 0.07),
        Check::holds(
            "differential droops less",
            diff <= single,
            "differential <= single-ended",
        ),
    ];
    Ok((t, checks))
}

fn fig_5_9(v_max: f64, v_oc: f64, anchors: bool) -> Bundle {
    let grid = super::CompareParams {
        v_max,
        v_oc,
        v_out: 1.0,
        start: 0.0,
        stop: v_max,
        steps: 34,
    };
    let t = grid.evaluate()?;
    let rows = analytic::compare_architectures(v_max, v_oc, 1.0, &linspace(0.0, v_max, 34));
    let dominant = rows
        .iter()
        .all(|r| r.proposed.is_none_or(|p| p >= r.best_baseline() - 1e-12));
    let mut checks = vec![Check::holds(
        "proposed dominates",
        dominant,
        "proposed >= every baseline",
    )];
    if anchors {
        checks.push(Check::abs("bias-flip FoM", rows[0].bias_flip, 4.0, 1e-12));
        checks.push(Check::abs("SECE FoM", rows[0].sece, 4.0, 1e-12));
        checks.push(Check::abs(
            "proposed FoM at 0 V",
            rows[0].proposed.unwrap_or(f64::NAN),
            24.0,
            1e-12,
        ));
    }
    Ok((t, checks))
}

fn table_5_1() -> Bundle {
    let mut t = Table::new(&["case", "v_max_V", "p_closed_form_W", "p_simulated_W", "fom"]);
    let mut checks = Vec::new();
    let cases = [("A", 2.0, 4.0), ("B", 4.0, 8.0)];
    let sims: Vec<Result<f64>> = cases
        .par_iter()
        .map(|&(_, k, _)| {
            let cfg = RectifierConfig {
                v_max: k,
                ..RectifierConfig::lossless()
            };
            harvester::simulate(&cfg, 200).map(|tr| tr.net_power())
        })
        .collect();
    for ((case, k, mult), sim) in cases.into_iter().zip(sims) {
        let x = RectifierConfig::lossless().xdcr;
        let v = x.v_oc * k;
        let p = analytic::analytic_pout(
            &analytic::Architecture::Proposed {
                v_max: v,
                v_pc: 0.0,
            },
            &x,
        );
        let sim = sim?;
        t.push(vec![
            case.into(),
            v.into(),
            p.into(),
            sim.into(),
            analytic::fom(p, &x).into(),
        ]);
        checks.push(Check::abs(
            &format!("case {case} closed form / FBR"),
            analytic::fom(p, &x),
            mult,
            1e-12,
        ));
        checks.push(Check::rel(
            &format!("case {case} simulated power W"),
            sim,
            p,
            0.01,
        ));
    }
    Ok((t, checks))
}

fn fom_summary() -> Bundle {
    let x = RectifierConfig::default().xdcr;
    let fbr = analytic::analytic_pout(&analytic::Architecture::Fbr, &x);
    let theory = analytic::fom(
        analytic::analytic_pout(
            &analytic::Architecture::Proposed {
                v_max: 3.3,
                v_pc: 1.5,
            },
            &x,
        ),
        &x,
    );
    let lossless = RectifierConfig {
        v_pc_target: 1.5,
        ..RectifierConfig::lossless()
    };
    let calibrated_pc = RectifierConfig {
        v_pc_target: 1.5,
        ..RectifierConfig::calibrated()
    };
    let jobs: Vec<RectifierConfig> = vec![lossless, calibrated_pc];
    let foms: Vec<Result<f64>> = jobs
        .par_iter()
        .map(|c| harvester::simulate(c, 200).map(|tr| analytic::fom(tr.net_power(), &c.xdcr)))
        .collect();
    let steady_jobs = [RectifierConfig::calibrated(), calibrated_pc];
    let steady: Vec<Result<f64>> = steady_jobs
        .par_iter()
        .map(|c| harvester::steady_state_vout(c, 150).map(|s| s.v_out))
        .collect();
    let f_lossless = foms[0].clone()?;
    let f_cal = foms[1].clone()?;
    let v_no_pc = steady[0].clone()?;
    let v_pc = steady[1].clone()?;
    let t_pz = x.period();
    let t0 = analytic::accumulation_time(3.3, 0.0, 1.0, t_pz, 0.0)?;
    let t1 = analytic::accumulation_time(3.3, 0.0, 1.0, t_pz, 0.8)?;
    let increase = t1 / t0 - 1.0;

    let mut t = Table::new(&["quantity", "value"]);
    for (name, v) in [
        ("fbr_power_W", fbr),
        ("fom_theoretical", theory),
        ("fom_simulated_lossless", f_lossless),
        ("fom_simulated_calibrated", f_cal),
        ("v_out_steady_no_precharge_V", v_no_pc),
        ("v_out_steady_precharge_V", v_pc),
        ("accumulation_time_increase", increase),
    ] {
        t.push(vec![name.into(), v.into()]);
    }
    let checks = vec![
        Check::rel("FBR power W", fbr, 2.774e-6, 0.005),
        Check::abs("theoretical FoM", theory, 9.6, 1e-9),
        Check::rel("lossless simulated FoM", f_lossless, theory, 0.01),
        Check::range("calibrated FoM", f_cal, 3.3, 4.1),
        Check::rel("steady V_out without pre-charge V", v_no_pc, 0.921, 0.10),
        Check::rel("steady V_out with pre-charge V", v_pc, 1.01, 0.10),
        Check::abs("accumulation time increase", increase, 0.485, 0.005),
    ];
    Ok((t, checks))
}
