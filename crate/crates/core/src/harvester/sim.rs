//! Event-driven execution of the rectifier state machine.

use super::tank::Tank;
use super::{EnergyLedger, FsmState, Phase, Polarity, RectifierConfig};
use crate::error::{Error, Result};
use crate::numeric::{first_root, integrate};

/// Tolerated negative excursion of a transducer terminal, V.
const NEGATIVE_SWING_TOL: f64 = 1e-3;
const ROOT_SAMPLES: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimOptions {
    /// Completed harvest cycles between the first and last measured boundary.
    pub cycles: usize,
    /// Keep the event trace. Invariants are checked either way.
    pub record: bool,
    /// Interior samples per segment used for invariant checks and the trace.
    pub samples_per_segment: usize,
    /// Bias flips allowed without completing a harvest before giving up.
    pub max_flips_per_cycle: usize,
}

impl Default for SimOptions {
    fn default() -> Self {
        Self {
            cycles: 200,
            record: true,
            samples_per_segment: 8,
            max_flips_per_cycle: 10_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceEvent {
    pub t: f64,
    pub state: FsmState,
    /// Differential transducer voltage, V.
    pub v_pz: f64,
    pub v_pzp: f64,
    pub v_pzn: f64,
    pub i_l: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimTrace {
    pub events: Vec<TraceEvent>,
    /// Ledger between the first and last harvest-cycle boundary.
    pub ledger: EnergyLedger,
    /// Ledger from time zero to the end of the run.
    pub total: EnergyLedger,
    /// Times at which a harvest cycle completed, s.
    pub boundaries: Vec<f64>,
    /// Times at which the transducer reached `v_max` and transfer began, s.
    pub transfer_starts: Vec<f64>,
}

impl SimTrace {
    /// Net output power over the measurement window, W.
    pub fn net_power(&self) -> f64 {
        self.ledger.net_power()
    }

    /// Mean time between harvests, s.
    pub fn mean_cycle_time(&self) -> f64 {
        let n = self.boundaries.len();
        if n < 2 {
            return f64::NAN;
        }
        (self.boundaries[n - 1] - self.boundaries[0]) / (n - 1) as f64
    }

    /// Mean time from the start of accumulation to the `v_max` detection,
    /// over the measured cycles, s. Transfer segments are excluded.
    pub fn mean_accumulation_time(&self) -> f64 {
        let mut sum = 0.0;
        let mut n = 0usize;
        let mut ends = self.transfer_starts.iter().peekable();
        for w in self.boundaries.windows(2) {
            while ends.peek().is_some_and(|&&t| t <= w[0]) {
                ends.next();
            }
            if let Some(&&t) = ends.peek() {
                if t < w[1] {
                    sum += t - w[0];
                    n += 1;
                }
            }
        }
        if n == 0 {
            f64::NAN
        } else {
            sum / n as f64
        }
    }
}

/// Runs `n_cycles` measured harvest cycles with the default options.
pub fn simulate(cfg: &RectifierConfig, n_cycles: usize) -> Result<SimTrace> {
    simulate_with(
        cfg,
        &SimOptions {
            cycles: n_cycles,
            ..SimOptions::default()
        },
    )
}

pub fn simulate_with(cfg: &RectifierConfig, opts: &SimOptions) -> Result<SimTrace> {
    cfg.validate()?;
    if opts.cycles == 0 {
        return Err(Error::invalid("cycles", "must be >= 1"));
    }
    let mut sim = Sim::new(cfg, opts);
    sim.record(FsmState::new(Phase::Int, Polarity::P), 0.0, 0.0, 0.0)?;
    while sim.boundaries.len() < opts.cycles + 1 {
        sim.step()?;
    }
    let first = sim.boundaries[0];
    let last = *sim.boundaries.last().unwrap();
    Ok(SimTrace {
        events: sim.events,
        ledger: last.since(&first),
        total: last,
        boundaries: sim.boundaries.iter().map(|b| b.t_span).collect(),
        transfer_starts: sim.transfer_starts,
    })
}

/// Transducer voltage at `t` under source current and leakage alone.
fn int_voltage(cfg: &RectifierConfig, v0: f64, t0: f64, t: f64) -> f64 {
    cfg.xdcr.open_circuit_voltage(v0, t0, t)
}

/// Inductor current `tau` into a segment across a fixed voltage
/// `v_drive` from `i0`, with the stage resistance.
fn rl_current(cfg: &RectifierConfig, i0: f64, v_drive: f64, tau: f64) -> f64 {
    let (l, r) = (cfg.l, cfg.r_tot);
    if r == 0.0 {
        i0 + v_drive * tau / l
    } else {
        let inf = v_drive / r;
        inf + (i0 - inf) * (-r * tau / l).exp()
    }
}

struct Sim<'a> {
    cfg: &'a RectifierConfig,
    opts: &'a SimOptions,
    t: f64,
    v: f64,
    i: f64,
    state: FsmState,
    next_peak: u64,
    flips_since_boundary: usize,
    t_eng: f64,
    acc: EnergyLedger,
    boundaries: Vec<EnergyLedger>,
    transfer_starts: Vec<f64>,
    events: Vec<TraceEvent>,
}

impl<'a> Sim<'a> {
    fn new(cfg: &'a RectifierConfig, opts: &'a SimOptions) -> Self {
        Self {
            cfg,
            opts,
            t: 0.0,
            v: 0.0,
            i: 0.0,
            state: FsmState::new(Phase::Int, Polarity::P),
            next_peak: 1,
            flips_since_boundary: 0,
            t_eng: cfg.effective_t_eng(),
            acc: EnergyLedger::default(),
            boundaries: Vec::new(),
            transfer_starts: Vec::new(),
            events: Vec::new(),
        }
    }

    fn c(&self) -> f64 {
        self.cfg.xdcr.c_pz
    }

    fn half_period(&self) -> f64 {
        self.cfg.xdcr.period() / 2.0
    }

    fn tank(&self) -> Tank {
        Tank::new(
            self.cfg.l,
            self.c(),
            self.cfg.r_tot,
            self.cfg.xdcr.current(self.t),
        )
    }

    /// Advances the transducer alone from `self.t` to `t1`, booking source
    /// work and leakage.
    fn advance_transducer(&mut self, t1: f64) -> f64 {
        let cfg = self.cfg;
        let (t0, v0) = (self.t, self.v);
        let dt = t1 - t0;
        if dt <= 0.0 {
            return v0;
        }
        let x = self.cfg.xdcr;
        let panels = ((16.0 * dt / x.period()).ceil() as usize).max(2);
        let vt = |tau: f64| int_voltage(cfg, v0, t0, tau);
        self.acc.w_src += integrate(|tau| x.current(tau) * vt(tau), t0, t1, panels);
        let g = x.leak_conductance();
        if g > 0.0 {
            self.acc.e_loss_rpz += g * integrate(|tau| vt(tau).powi(2), t0, t1, panels);
        }
        int_voltage(cfg, v0, t0, t1)
    }

    fn stored(&self) -> f64 {
        0.5 * self.c() * self.v * self.v + 0.5 * self.cfg.l * self.i * self.i
    }

    fn advance_clock(&mut self, t1: f64) {
        self.acc.e_ctrl += self.cfg.p_ctrl * (t1 - self.t);
        self.t = t1;
        self.acc.t_span = t1;
    }

    fn terminals(state: FsmState, v: f64) -> (f64, f64) {
        let pol = match state.phase {
            Phase::Har | Phase::Eng | Phase::Pc => Polarity::of(v),
            _ => state.polarity,
        };
        match pol {
            Polarity::P => (v, 0.0),
            Polarity::N => (0.0, -v),
        }
    }

    fn record(&mut self, state: FsmState, t: f64, v: f64, i: f64) -> Result<()> {
        let (p, n) = Self::terminals(state, v);
        if p < -NEGATIVE_SWING_TOL || n < -NEGATIVE_SWING_TOL {
            return Err(Error::InvariantViolation(format!(
                "negative transducer terminal in {state} at t={t:.9e} s (v_pzp={p:.6e} V, v_pzn={n:.6e} V)"
            )));
        }
        if self.opts.record {
            self.events.push(TraceEvent {
                t,
                state,
                v_pz: v,
                v_pzp: p,
                v_pzn: n,
                i_l: i,
            });
        }
        Ok(())
    }

    /// Records interior samples of a segment on `(t0, t1)`.
    fn sample<F: Fn(f64) -> (f64, f64)>(
        &mut self,
        state: FsmState,
        t0: f64,
        t1: f64,
        f: F,
    ) -> Result<()> {
        let n = self.opts.samples_per_segment;
        for k in 1..=n {
            let tau = t0 + (t1 - t0) * k as f64 / (n + 1) as f64;
            let (v, i) = f(tau);
            self.record(state, tau, v, i)?;
        }
        Ok(())
    }

    fn deadlock(&self, detail: &str) -> Error {
        Error::Deadlock {
            state: self.state.to_string(),
            t: self.t,
            detail: format!("{detail} (v_pz={:.6e} V, i_l={:.6e} A)", self.v, self.i),
        }
    }

    fn boundary(&mut self) {
        self.flips_since_boundary = 0;
        let mut snap = self.acc;
        snap.e_stored_end = self.stored();
        self.boundaries.push(snap);
    }

    fn enter(&mut self, phase: Phase) -> Result<()> {
        self.state.phase = phase;
        self.record(self.state, self.t, self.v, self.i)
    }

    fn step(&mut self) -> Result<()> {
        match self.state.phase {
            Phase::Int => self.step_int(),
            Phase::Bf => self.step_bf(),
            Phase::Trans => self.step_trans(),
            Phase::Har => self.step_har(),
            Phase::Eng => self.step_eng(),
            Phase::Pc => self.step_pc(),
        }
    }

    fn peak_time(&self) -> f64 {
        self.next_peak as f64 * self.half_period() + self.cfg.detector_delay
    }

    fn step_int(&mut self) -> Result<()> {
        let cfg = self.cfg;
        let v_max = self.cfg.v_max;
        if self.v.abs() >= v_max {
            self.transfer_starts.push(self.t);
            return self.enter(Phase::Trans);
        }
        let t_peak = self.peak_time();
        if t_peak <= self.t {
            return self.enter(Phase::Bf);
        }
        let (t0, v0) = (self.t, self.v);
        let hit = first_root(
            |tau| int_voltage(cfg, v0, t0, tau).abs() - v_max,
            t0,
            t_peak,
            ROOT_SAMPLES,
        );
        let (t_end, next) = match hit {
            Some(th) if th + self.cfg.detector_delay < t_peak => {
                (th + self.cfg.detector_delay, Phase::Trans)
            }
            _ => (t_peak, Phase::Bf),
        };
        let zc = if v0 == 0.0 {
            None
        } else {
            first_root(|tau| int_voltage(cfg, v0, t0, tau), t0, t_end, ROOT_SAMPLES)
        };
        let st = self.state;
        match zc {
            Some(tz) if tz < t_end => {
                self.sample(st, t0, tz, |tau| (int_voltage(cfg, v0, t0, tau), 0.0))?;
                self.v = self.advance_transducer(tz);
                self.advance_clock(tz);
                self.v = 0.0;
                self.state.polarity = self.state.polarity.flipped();
                self.record(self.state, self.t, 0.0, 0.0)
            }
            _ => {
                self.sample(st, t0, t_end, |tau| (int_voltage(cfg, v0, t0, tau), 0.0))?;
                self.v = self.advance_transducer(t_end);
                self.advance_clock(t_end);
                if next == Phase::Trans {
                    self.v = self.v.signum() * self.v.abs().max(v_max);
                    self.transfer_starts.push(self.t);
                }
                self.enter(next)
            }
        }
    }

    fn step_bf(&mut self) -> Result<()> {
        let hp = self.half_period();
        self.next_peak = ((self.t - self.cfg.detector_delay) / hp).floor().max(0.0) as u64 + 1;
        while self.peak_time() <= self.t {
            self.next_peak += 1;
        }
        self.flips_since_boundary += 1;
        if self.flips_since_boundary > self.opts.max_flips_per_cycle {
            return Err(
                self.deadlock("no harvest reached; flip loss outweighs the per-half-cycle gain")
            );
        }
        let from = self.state.polarity;
        if self.v.abs() < 1e-9 {
            self.v = 0.0;
            self.state = FsmState::new(Phase::Int, from.flipped());
            return self.record(self.state, self.t, 0.0, 0.0);
        }
        let tank = self.tank();
        let (v0, t0) = (self.v, self.t);
        let dt = first_root(
            |tau| tank.state(v0, 0.0, tau).1,
            0.0,
            0.75 * tank.period(),
            ROOT_SAMPLES,
        )
        .ok_or_else(|| self.deadlock("bias-flip current never returned to zero"))?;
        let tz = first_root(|tau| tank.state(v0, 0.0, tau).0, 0.0, dt, ROOT_SAMPLES);
        let split = tz.unwrap_or(dt);
        self.sample(self.state, t0, t0 + split, |tau| {
            tank.state(v0, 0.0, tau - t0)
        })?;
        if tz.is_some() {
            self.state.polarity = from.flipped();
            self.record(self.state, t0 + split, 0.0, tank.state(v0, 0.0, split).1)?;
            self.sample(self.state, t0 + split, t0 + dt, |tau| {
                tank.state(v0, 0.0, tau - t0)
            })?;
        }
        let (w, loss) = tank.energies(v0, 0.0, dt);
        self.acc.w_src += w;
        self.acc.e_loss_rtot += loss;
        let (v1, _) = tank.state(v0, 0.0, dt);
        self.advance_clock(t0 + dt);
        self.i = 0.0;
        let mag = v1.abs();
        let kept = (mag - self.cfg.flip_loss_v).max(0.0);
        self.acc.e_loss_flip += 0.5 * self.c() * (mag * mag - kept * kept);
        self.v = v1.signum() * kept;
        self.record(self.state, self.t, v1, 0.0)?;
        self.enter(Phase::Int)
    }

    fn step_trans(&mut self) -> Result<()> {
        let tank = self.tank();
        let (v0, t0) = (self.v, self.t);
        let dt = first_root(
            |tau| tank.state(v0, 0.0, tau).0,
            0.0,
            0.75 * tank.period(),
            ROOT_SAMPLES,
        )
        .ok_or_else(|| self.deadlock("transducer never drained"))?;
        self.sample(self.state, t0, t0 + dt, |tau| tank.state(v0, 0.0, tau - t0))?;
        let (w, loss) = tank.energies(v0, 0.0, dt);
        self.acc.w_src += w;
        self.acc.e_loss_rtot += loss;
        let (_, i1) = tank.state(v0, 0.0, dt);
        self.advance_clock(t0 + dt);
        // The residual node energy is below rounding; it is booked as loss so
        // the ledger stays exact.
        let (v1, _) = tank.state(v0, 0.0, dt);
        self.acc.e_loss_rtot += 0.5 * self.c() * v1 * v1;
        self.v = 0.0;
        self.i = i1.abs();
        self.enter(Phase::Har)
    }

    /// Runs an inductor segment against `v_drive` for `dt`, returning
    /// `∫i dt` and booking resistive loss and transducer integration.
    fn rl_segment(&mut self, i0: f64, v_drive: f64, dt: f64) -> Result<f64> {
        let cfg = self.cfg;
        let (t0, v0) = (self.t, self.v);
        let panels = 4;
        let q = integrate(|tau| rl_current(cfg, i0, v_drive, tau), 0.0, dt, panels);
        if self.cfg.r_tot > 0.0 {
            self.acc.e_loss_rtot += self.cfg.r_tot
                * integrate(
                    |tau| rl_current(cfg, i0, v_drive, tau).powi(2),
                    0.0,
                    dt,
                    panels,
                );
        }
        self.sample(self.state, t0, t0 + dt, |tau| {
            (
                int_voltage(cfg, v0, t0, tau),
                rl_current(cfg, i0, v_drive, tau - t0),
            )
        })?;
        self.v = self.advance_transducer(t0 + dt);
        self.advance_clock(t0 + dt);
        self.i = rl_current(cfg, i0, v_drive, dt);
        Ok(q)
    }

    fn step_har(&mut self) -> Result<()> {
        let (l, r, vo) = (self.cfg.l, self.cfg.r_tot, self.cfg.v_out);
        let i0 = self.i;
        let dt = if r == 0.0 {
            l * i0 / vo
        } else {
            l / r * (1.0 + r * i0 / vo).ln()
        };
        let q = self.rl_segment(i0, -vo, dt)?;
        self.acc.e_out += vo * q;
        self.i = 0.0;
        if self.t_eng > 0.0 {
            self.enter(Phase::Eng)
        } else {
            self.finish_cycle()
        }
    }

    fn step_eng(&mut self) -> Result<()> {
        let vo = self.cfg.v_out;
        let q = self.rl_segment(0.0, vo, self.t_eng)?;
        self.acc.e_inv += vo * q;
        self.enter(Phase::Pc)
    }

    fn step_pc(&mut self) -> Result<()> {
        let s = self.state.polarity.sign();
        let tank = self.tank();
        let (v0, i0, t0) = (self.v, -s * self.i, self.t);
        let dt = first_root(
            |tau| tank.state(v0, i0, tau).1,
            0.0,
            0.75 * tank.period(),
            ROOT_SAMPLES,
        )
        .ok_or_else(|| self.deadlock("pre-charge current never returned to zero"))?;
        self.sample(self.state, t0, t0 + dt, |tau| tank.state(v0, i0, tau - t0))?;
        let (w, loss) = tank.energies(v0, i0, dt);
        self.acc.w_src += w;
        self.acc.e_loss_rtot += loss;
        let (v1, i1) = tank.state(v0, i0, dt);
        self.advance_clock(t0 + dt);
        self.acc.e_loss_rtot += 0.5 * self.cfg.l * i1 * i1;
        self.v = v1;
        self.i = 0.0;
        self.finish_cycle()
    }

    fn finish_cycle(&mut self) -> Result<()> {
        if self.v != 0.0 {
            self.state.polarity = Polarity::of(self.v);
        }
        self.state.phase = Phase::Int;
        self.boundary();
        self.record(self.state, self.t, self.v, 0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harvester::analytic;

    /// Lossless closed-form reference for a configuration, W.
    fn closed_form_power(cfg: &RectifierConfig) -> f64 {
        analytic::analytic_pout(
            &analytic::Architecture::Proposed {
                v_max: cfg.v_max,
                v_pc: cfg.v_pc(),
            },
            &cfg.xdcr,
        )
    }

    fn lossless(v_pc: f64) -> RectifierConfig {
        RectifierConfig {
            v_pc_target: v_pc,
            ..RectifierConfig::lossless()
        }
    }

    #[test]
    fn lossless_matches_closed_form() {
        for v_pc in [0.0, 1.5] {
            let cfg = lossless(v_pc);
            let tr = simulate(&cfg, 200).unwrap();
            let p = tr.net_power();
            let p_ref = closed_form_power(&cfg);
            assert!(
                (p / p_ref - 1.0).abs() < 0.01,
                "v_pc={v_pc}: {p} vs {p_ref}"
            );
            let audit = tr.ledger.audit_residual() / tr.ledger.e_out;
            assert!(audit.abs() < 0.005, "audit {audit}");
        }
    }

    #[test]
    fn lossless_accumulation_time() {
        let cfg = lossless(0.0);
        let tr = simulate(&cfg, 200).unwrap();
        let t_ref = analytic::accumulation_time(3.3, 0.0, 1.0, cfg.xdcr.period(), 0.0).unwrap();
        assert!((tr.mean_accumulation_time() / t_ref - 1.0).abs() < 0.005);
        assert!(tr.mean_cycle_time() > tr.mean_accumulation_time());
    }

    #[test]
    fn inductor_idle_in_int_and_terminals_non_negative() {
        let cfg = RectifierConfig {
            v_pc_target: 1.5,
            detector_delay: 2e-6,
            ..RectifierConfig::calibrated()
        };
        let tr = simulate(&cfg, 20).unwrap();
        for e in &tr.events {
            assert!(e.v_pzp >= -1e-3 && e.v_pzn >= -1e-3);
        }
        for w in tr.events.windows(2) {
            if w[1].state.phase == Phase::Int && w[0].state.phase != Phase::Int {
                assert!(w[1].i_l.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn unreachable_limit_deadlocks() {
        let cfg = RectifierConfig {
            flip_loss_v: 2.5,
            ..RectifierConfig::lossless()
        };
        let opts = SimOptions {
            max_flips_per_cycle: 200,
            ..SimOptions::default()
        };
        assert!(matches!(
            simulate_with(&cfg, &opts),
            Err(Error::Deadlock { .. })
        ));
    }
}
