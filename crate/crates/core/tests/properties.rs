//! Invariants of the device models, the power-gating and amplifier analyses and
//! the rectifier simulator, checked over randomized inputs.

use proptest::prelude::*;

use lowpower::devices::{Environment, MosDevice, NemsCapacitiveSwitch, PiezoTransducer};
use lowpower::dt_amp::{self, AmpConfig};
use lowpower::harvester::{self, analytic, RectifierConfig, SimOptions};
use lowpower::nems_pg::{self, DutySpec, LogicBlockSpec};
use lowpower::swcap::{self, PgState, SwCapConfig, Variant};

const EPS0: f64 = 8.8541878128e-12;

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn mos() -> impl Strategy<Value = MosDevice> {
    (1e-6..1e-2f64, 1.1..2.0f64, 0.25..0.6f64).prop_map(|(beta, n, v_th)| MosDevice {
        beta,
        n,
        v_th,
        v_sg_max: 2.5,
        gidl_i0: 0.0,
        gidl_slope: 0.1,
        gate_leak_density: 0.0,
        width: 1e-6,
    })
}

/// A device calibrated to a random feasible (v_opt, ratio) target.
fn calibrated_mos() -> impl Strategy<Value = MosDevice> {
    (mos(), 0.12..0.6f64, 0.05..0.95f64).prop_map(|(d, v_opt, frac)| {
        let env = Environment::room();
        let bound = (v_opt / (d.n * env.thermal_voltage())).exp();
        let ratio = 1.0 + frac * (bound - 1.0);
        d.calibrate_gidl(v_opt, ratio, &env)
            .expect("feasible target")
    })
}

fn geometry() -> impl Strategy<Value = NemsCapacitiveSwitch> {
    (
        20e-9..500e-9f64,
        5e-9..200e-9f64,
        2.0..30.0f64,
        1e-13..1e-10f64,
        0.1..100.0f64,
        0.3..1.0f64,
    )
        .prop_map(
            |(g0, t_d, eps_d, area, k_eff, gamma)| NemsCapacitiveSwitch {
                g0,
                t_d,
                eps_d,
                area,
                k_eff,
                gamma,
                c_on: gamma * EPS0 * area * eps_d / t_d,
                c_off: EPS0 * area / (g0 + t_d / eps_d),
                v_pi: 2.0,
                v_po: 1.0,
                t_mech: 1e-7,
            },
        )
        .prop_filter("contact must raise the capacitance", |s| s.c_on > s.c_off)
}

fn swcap_cfg() -> impl Strategy<Value = SwCapConfig> {
    (
        any::<bool>(),
        1e-12..20e-12f64,
        10.0..1000.0f64,
        0.7..1.8f64,
        0.2..0.9f64,
        0.2..0.9f64,
        1e-12..50e-12f64,
    )
        .prop_map(
            |(mems, c_x, f_clk, v_dd, v_b_off, v_b_on, i_dis)| SwCapConfig {
                variant: if mems { Variant::Mems } else { Variant::Cmos },
                c_x,
                f_clk,
                v_dd,
                v_b_off,
                v_b_on,
                i_dis,
                ..SwCapConfig::default()
            },
        )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn subthreshold_is_log_linear(d in mos(), v in -1.0..1.0f64, kelvin in 250.0..400.0f64) {
        let env = Environment::new(kelvin).unwrap();
        let h = 1e-3;
        let ln = |x: f64| d.subthreshold_current(x, &env).ln();
        let slope = (ln(v + h) - ln(v - h)) / (2.0 * h);
        let want = 1.0 / (d.n * env.thermal_voltage());
        prop_assert!(rel(slope, want) < 1e-9);
        prop_assert!((ln(v + h) - 2.0 * ln(v) + ln(v - h)).abs() < 1e-9);
    }

    #[test]
    fn optimum_matches_fine_grid(d in calibrated_mos()) {
        let env = Environment::room();
        let v_opt = d.optimal_super_cutoff_bias(&env).unwrap();
        let grid = (0..=25_000)
            .map(|k| k as f64 * 1e-4)
            .min_by(|a, b| d.total_off_leakage(*a, &env).total_cmp(&d.total_off_leakage(*b, &env)))
            .unwrap();
        prop_assert!((grid - v_opt).abs() <= 1e-4, "{} vs {}", grid, v_opt);
    }

    #[test]
    fn pull_voltage_forms_agree(sw in geometry()) {
        let (pi, po) = sw.design_pull_voltages();
        let (pi_f, po_f) = sw.design_pull_voltages_factored();
        prop_assert!(rel(pi_f, pi) < 1e-12 && rel(po_f, po) < 1e-12);
        let a = sw.theoretical_gain();
        let ratio = (27.0f64 / 4.0).sqrt() * ((a - 1.0) / a.powi(3)).sqrt();
        prop_assert!(rel(po / pi, ratio) < 1e-12);
        prop_assert!(rel(lowpower::devices::pull_voltage_ratio(a), ratio) < 1e-12);
    }

    #[test]
    fn open_branch_capacitance_monotone(sw in geometry()) {
        let (pi, _) = sw.design_pull_voltages();
        let mut prev = sw.open_capacitance(0.0);
        prop_assert!(rel(prev, sw.c_off) < 1e-12);
        for k in 1..=200 {
            let v = 1.2 * pi * k as f64 / 200.0;
            let c = sw.open_capacitance(v);
            prop_assert!(c >= prev * (1.0 - 1e-12));
            prop_assert!(c.is_finite() && c < 1.5 * sw.c_off / sw.gamma.max(0.0) + sw.c_on);
            // A small step in bias moves the capacitance by a small amount.
            prop_assert!((c - prev) / prev < 0.2);
            prev = c;
        }
    }

    #[test]
    fn hysteresis_loop_area_non_negative(sw in geometry(), pi in 1.0..5.0f64, frac in 0.1..0.9f64) {
        // The deflected open branch reaches 1.5 c_off at the instability point.
        prop_assume!(sw.c_on >= 1.5 * sw.c_off);
        let sw = NemsCapacitiveSwitch { v_pi: pi, v_po: frac * pi, ..sw };
        let n = 400;
        let vs: Vec<f64> = (0..=n).map(|k| 1.2 * pi * k as f64 / n as f64).collect();
        let mut closed = false;
        let up: Vec<f64> = vs.iter().map(|&v| { let (c, s) = sw.capacitance(v, closed); closed = s; c }).collect();
        prop_assert!(closed);
        let down: Vec<f64> = vs.iter().rev().map(|&v| { let (c, s) = sw.capacitance(v, closed); closed = s; c }).collect();
        prop_assert!(!closed);
        let area: f64 = up.iter().zip(down.iter().rev()).map(|(u, d)| d - u).sum();
        prop_assert!(area >= 0.0);
    }

    #[test]
    fn ideal_source_swings_v_oc(c_pz in 1e-9..100e-9f64, f_pz in 10.0..1000.0f64, v_oc in 0.1..5.0f64, v0 in -2.0..2.0f64) {
        let x = PiezoTransducer { c_pz, f_pz, r_pz: f64::INFINITY, v_oc };
        let t = x.period();
        let vs: Vec<f64> = (0..=2000).map(|k| x.open_circuit_voltage(v0, 0.0, 3.0 * t + t * k as f64 / 2000.0)).collect();
        let hi = vs.iter().cloned().fold(f64::MIN, f64::max);
        let lo = vs.iter().cloned().fold(f64::MAX, f64::min);
        prop_assert!(rel(0.5 * (hi - lo), v_oc) < 5e-3);
    }

    #[test]
    fn leaky_source_settles_to_norton_amplitude(r_pz in 1e5..1e8f64, v0 in -2.0..2.0f64) {
        let x = PiezoTransducer { r_pz, ..PiezoTransducer::default() };
        let tau = r_pz * x.c_pz;
        let start = 40.0 * tau;
        let t = x.period();
        let vs: Vec<f64> = (0..=2000).map(|k| x.open_circuit_voltage(v0, 0.0, start + t * k as f64 / 2000.0)).collect();
        let amp = 0.5 * (vs.iter().cloned().fold(f64::MIN, f64::max) - vs.iter().cloned().fold(f64::MAX, f64::min));
        let w = 2.0 * std::f64::consts::PI * x.f_pz;
        let want = x.v_oc / (1.0 + (1.0 / (w * r_pz * x.c_pz)).powi(2)).sqrt();
        prop_assert!(rel(amp, want) < 5e-3);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn leakage_is_unimodal(d in calibrated_mos()) {
        let env = Environment::room();
        let ys: Vec<f64> = (0..=2500)
            .map(|k| d.total_off_leakage(k as f64 * 1e-3, &env))
            .take_while(|y| y.is_finite())
            .collect();
        let signs: Vec<bool> = ys.windows(2).map(|w| w[1] > w[0]).collect();
        let changes = signs.windows(2).filter(|w| w[0] != w[1]).count();
        prop_assert_eq!(changes, 1);
        prop_assert!(!signs[0] && signs[signs.len() - 1]);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn trace_average_matches_closed_form(cfg in swcap_cfg(), m_off in 1u32..12, m_on in 1u32..12) {
        let env = Environment::room();
        let half = 0.5 / cfg.f_clk;
        let t_on = m_off as f64 * half;
        let t_end = t_on + m_on as f64 * half;
        let tr = swcap::simulate_gate_bias(&cfg, &env, &[(0.0, PgState::SuperOff), (t_on, PgState::SuperOn)], t_end).unwrap();
        let off = swcap::avg_gate_voltage_super_off(&cfg, &env).unwrap();
        let on = swcap::avg_gate_voltage_super_on(&cfg, &env).unwrap();
        prop_assert!(rel(tr.window_average(0.0, t_on), off) < 1e-3);
        prop_assert!(rel(tr.window_average(t_on, t_end), on) < 1e-3);
    }

    #[test]
    fn mems_error_never_exceeds_cmos(cfg in swcap_cfg()) {
        let env = Environment::room();
        let cmos = swcap::voltage_error(&SwCapConfig { variant: Variant::Cmos, ..cfg }, &env).unwrap();
        let mems = swcap::voltage_error(&SwCapConfig { variant: Variant::Mems, ..cfg }, &env).unwrap();
        prop_assert!(cmos.diode_term >= 0.0);
        prop_assert!(mems.total() <= cmos.total());
    }

    #[test]
    fn refresh_frequency_halves_with_double_capacitance(cfg in swcap_cfg(), frac in 0.01..0.5f64) {
        let f1 = swcap::required_refresh_frequency(&cfg, frac).unwrap();
        let f2 = swcap::required_refresh_frequency(&SwCapConfig { c_x: 2.0 * cfg.c_x, ..cfg }, frac).unwrap();
        prop_assert!(rel(f2, 0.5 * f1) < 1e-15);
    }

    #[test]
    fn gidl_free_leakage_ratio_is_exponential(d in mos(), v_dd in 0.7..1.8f64, bias in 0.0..1.0f64) {
        let env = Environment::room();
        let base = swcap::swcap_leakage(&d, v_dd, v_dd, &env).unwrap();
        let biased = swcap::swcap_leakage(&d, v_dd + bias, v_dd, &env).unwrap();
        let want = (bias / (d.n * env.thermal_voltage())).exp();
        prop_assert!(rel(base / biased, want) < 1e-9);
    }

    #[test]
    fn optimal_v_b_off_minimizes_swcap_leakage(d in calibrated_mos(), cfg in swcap_cfg()) {
        let env = Environment::room();
        let v_b = swcap::optimal_v_b_off(&cfg, &d, &env).unwrap();
        let leak = |v: f64| {
            let c = SwCapConfig { v_b_off: v, ..cfg };
            let g = swcap::avg_gate_voltage_super_off(&c, &env).unwrap();
            swcap::swcap_leakage(&d, g, c.v_dd, &env).unwrap_or(f64::INFINITY)
        };
        let step = 1e-4;
        let lo = (v_b - 0.05).max(0.0);
        let best = (0..=1000)
            .map(|k| lo + k as f64 * step)
            .min_by(|a, b| leak(*a).total_cmp(&leak(*b)))
            .unwrap();
        prop_assert!((best - v_b).abs() <= step, "{} vs {}", best, v_b);
    }
}

fn node() -> impl Strategy<Value = nems_pg::NodePreset> {
    prop::sample::select(nems_pg::NODE_NAMES.to_vec())
        .prop_map(|n| nems_pg::node_preset(n).unwrap())
}

fn gain(
    p: &nems_pg::NodePreset,
    block: &LogicBlockSpec,
    r: f64,
    f_pg: f64,
    env: &Environment,
) -> f64 {
    nems_pg::energy_gain(
        block,
        &p.finfet,
        &p.nems,
        &DutySpec {
            t_on_over_t_off: r,
            f_pg,
        },
        env,
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn nems_never_loses(p in node(), alpha in 0.0..1.0f64, r in 1e-3..100.0f64, f_pg in 1.0..1e6f64, leak_scale in 0.0..10.0f64) {
        let env = Environment::room();
        let mut p = p;
        p.finfet.i_leak_off *= leak_scale;
        prop_assume!(p.nems.c_gate * p.nems.drive_voltage.powi(2) <= p.finfet.c_gate * p.finfet.drive_voltage.powi(2));
        let b = LogicBlockSpec { alpha, ..p.block };
        prop_assert!(gain(&p, &b, r, f_pg, &env) >= 1.0);
    }

    #[test]
    fn gain_falls_with_duty_and_rises_with_leakage(p in node(), alpha in 0.01..1.0f64, r in 1e-3..10.0f64) {
        let env = Environment::room();
        let b = LogicBlockSpec { alpha, ..p.block };
        let g = gain(&p, &b, r, 1e3, &env);
        prop_assert!(gain(&p, &b, r * 1.01, 1e3, &env) < g);
        let mut leaky = p.clone();
        leaky.finfet.i_leak_off *= 1.01;
        prop_assert!(gain(&leaky, &b, r, 1e3, &env) > g);
    }

    #[test]
    fn gain_insensitive_to_gating_frequency(p in node(), alpha in 0.05..1.0f64) {
        let env = Environment::room();
        let b = LogicBlockSpec { alpha, ..p.block };
        let gs: Vec<f64> = (0..=6).map(|k| gain(&p, &b, 0.05, 10f64.powi(k), &env)).collect();
        let hi = gs.iter().cloned().fold(f64::MIN, f64::max);
        let lo = gs.iter().cloned().fold(f64::MAX, f64::min);
        prop_assert!(hi / lo - 1.0 < 0.01);
    }

    #[test]
    fn gain_rises_with_temperature(p in node(), r in 0.01..0.2f64, k0 in 260.0..380.0f64) {
        let b = LogicBlockSpec { alpha: 0.1, ..p.block };
        let cold = gain(&p, &b, r, 1e3, &Environment::new(k0).unwrap());
        let hot = gain(&p, &b, r, 1e3, &Environment::new(k0 + 10.0).unwrap());
        prop_assert!(hot > cold);
    }

    #[test]
    fn soc_report_is_scale_free(p in node(), k in 1e-3..1e3f64, f_pg in 1.0..1e6f64) {
        let env = Environment::from_celsius(40.0).unwrap();
        let units = nems_pg::mobile_soc_units();
        let base = nems_pg::soc_report(&units, &p, f_pg, &env);
        let mut s = p.clone();
        s.block.c_l *= k;
        s.block.i_static_on *= k;
        s.finfet.i_leak_off *= k;
        s.finfet.c_gate *= k;
        s.nems.c_gate *= k;
        let scaled = nems_pg::soc_report(&units, &s, f_pg, &env);
        for (a, b) in base.iter().zip(&scaled) {
            prop_assert!(rel(b.e_g, a.e_g) < 1e-9);
            prop_assert!((b.saving_pct - a.saving_pct).abs() < 1e-7);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn loaded_gain_monotone_and_bounded(n in 1u32..500) {
        let cfg = AmpConfig { n_parallel: n, ..AmpConfig::default() };
        let more = AmpConfig { n_parallel: n + 1, ..cfg };
        let ideal = dt_amp::ideal_gain(&cfg.cap_switch);
        prop_assert!(dt_amp::loaded_gain(&more) > dt_amp::loaded_gain(&cfg));
        prop_assert!(dt_amp::loaded_gain(&more) <= ideal);
    }

    #[test]
    fn differential_output_is_odd(a in 1e-3..0.325f64) {
        let cfg = AmpConfig::default();
        let out = dt_amp::simulate(&cfg, &[a, -a]).unwrap();
        prop_assert_eq!(out[0].v_out, -out[1].v_out);
        let g = dt_amp::gain_vs_amplitude(&cfg, &[a, -a]).unwrap();
        prop_assert_eq!(g[0].gain_differential, g[1].gain_differential);
    }

    #[test]
    fn differential_nonlinearity_no_worse(a in 0.01..0.325f64) {
        let (single, diff) = dt_amp::droop(&AmpConfig::default(), a).unwrap();
        prop_assert!(diff.abs() <= single.abs() + 1e-12);
    }

    #[test]
    fn charge_conserved_across_release(v in -0.325..0.325f64, n in 1u32..40) {
        let cfg = AmpConfig { n_parallel: n, ..AmpConfig::default() };
        let (_, h) = dt_amp::sample_and_hold(&cfg, v).unwrap();
        prop_assert!(h.charge_drift() < 1e-12);
    }

    #[test]
    fn power_scaling(f in 1e3..1e7f64, v in 1.0..10.0f64, k in 1.1..10.0f64) {
        let cfg = AmpConfig { f_clk: f, v_bias: v, ..AmpConfig::default() };
        let (p, s) = dt_amp::dynamic_power(&cfg);
        let (pf, sf) = dt_amp::dynamic_power(&AmpConfig { f_clk: k * f, ..cfg });
        let (pv, _) = dt_amp::dynamic_power(&AmpConfig { v_bias: k * v, ..cfg });
        prop_assert!(rel(pf / p, k) < 1e-9 && rel(sf / s, k) < 1e-9);
        prop_assert!(rel(pv / p, k * k) < 1e-9);
    }
}

fn fast() -> SimOptions {
    SimOptions {
        cycles: 40,
        record: false,
        ..SimOptions::default()
    }
}

fn lossy() -> impl Strategy<Value = RectifierConfig> {
    (
        0.0..3.0f64,
        0.0..0.6f64,
        0.0..1.5f64,
        1e5..1e8f64,
        0.0..2e-6f64,
        0.0..3e-6f64,
    )
        .prop_map(|(r_tot, flip_loss_v, v_pc, r_pz, p_ctrl, delay)| {
            let mut c = RectifierConfig {
                r_tot,
                flip_loss_v,
                v_pc_target: v_pc,
                p_ctrl,
                detector_delay: delay,
                ..RectifierConfig::default()
            };
            c.xdcr.r_pz = r_pz;
            c
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn lossless_power_matches_closed_form(v_oc in 0.5..1.2f64, v_max in 2.5..5.0f64, c_pz in 5e-9..50e-9f64, f_pz in 50.0..400.0f64, pc in 0.0..1.0f64) {
        let v_pc = pc * (v_max - 2.0 * v_oc).max(0.0);
        let cfg = RectifierConfig {
            xdcr: PiezoTransducer { c_pz, f_pz, r_pz: f64::INFINITY, v_oc },
            v_max,
            v_pc_target: v_pc,
            ..RectifierConfig::lossless()
        };
        let tr = harvester::simulate_with(&cfg, &fast()).unwrap();
        let want = 2.0 * c_pz * v_oc * (v_max + v_pc) * f_pz;
        prop_assert!(rel(tr.net_power(), want) < 0.01);
    }

    #[test]
    fn audit_closes(cfg in lossy()) {
        let tr = harvester::simulate_with(&cfg, &fast()).unwrap();
        let l = tr.ledger;
        prop_assert!((l.audit_residual() / l.e_out).abs() < 5e-3);
        let t = tr.total;
        prop_assert!((t.audit_residual() / t.e_out).abs() < 5e-3);
    }

    #[test]
    fn terminals_stay_non_negative(cfg in lossy()) {
        let opts = SimOptions { cycles: 10, ..SimOptions::default() };
        let tr = harvester::simulate_with(&cfg, &opts).unwrap();
        for e in &tr.events {
            prop_assert!(e.v_pzp >= -1e-3 && e.v_pzn >= -1e-3);
        }
    }

    #[test]
    fn power_monotone_in_losses(cfg in lossy(), d_r in 0.05..1.0f64, d_flip in 0.02..0.3f64, k_rpz in 1.5..10.0f64) {
        let p = |c: &RectifierConfig| harvester::simulate_with(c, &fast()).unwrap().net_power();
        let base = p(&cfg);
        let resistive = RectifierConfig { r_tot: cfg.r_tot + d_r, ..cfg };
        let flippy = RectifierConfig { flip_loss_v: cfg.flip_loss_v + d_flip, ..cfg };
        prop_assert!(p(&resistive) <= base * (1.0 + 1e-3));
        prop_assert!(p(&flippy) <= base * (1.0 + 1e-3));
        let mut stiff = cfg;
        stiff.xdcr.r_pz *= k_rpz;
        prop_assert!(p(&stiff) >= base * (1.0 - 1e-3));
    }

    #[test]
    fn lossless_fom_ignores_output_voltage(v_out in 0.5..3.0f64) {
        let base = RectifierConfig { v_pc_target: 1.5, ..RectifierConfig::lossless() };
        let f = |c: &RectifierConfig| analytic::fom(harvester::simulate_with(c, &fast()).unwrap().net_power(), &c.xdcr);
        let moved = RectifierConfig { v_out, ..base };
        prop_assert!(rel(f(&moved), f(&base)) < 0.01);
    }
}

proptest! {
    #[test]
    fn accumulation_time_grows_with_flip_loss(v_max in 2.0..10.0f64, v_pc in 0.0..1.0f64, loss in 0.0..1.5f64, d in 0.01..0.4f64) {
        let t = PiezoTransducer::default().period();
        let a = analytic::accumulation_time(v_max, v_pc, 1.0, t, loss).unwrap();
        let b = analytic::accumulation_time(v_max, v_pc, 1.0, t, loss + d).unwrap();
        prop_assert!(b >= a);
        let lossless = (v_max - v_pc) / 4.0 * t;
        prop_assert!(rel(analytic::accumulation_time(v_max, v_pc, 1.0, t, 0.0).unwrap(), lossless) < 1e-12);
    }
}
