//! Output-rail operating point with a resistive load.

use super::sim::{simulate_with, SimOptions};
use super::RectifierConfig;
use crate::error::{Error, Result};

const TOL: f64 = 1e-3;
const MAX_ITER: usize = 60;
const DAMPING: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyState {
    /// Settled output voltage, V.
    pub v_out: f64,
    /// Net power into the load at that voltage, W.
    pub p_net: f64,
    pub iterations: usize,
}

/// Solves `V = sqrt(P_net(V) · r_l)` by damped fixed-point iteration, starting
/// from `cfg.v_out`, to 1 mV.
pub fn steady_state_vout(cfg: &RectifierConfig, cycles: usize) -> Result<SteadyState> {
    cfg.validate()?;
    if cfg.r_l.is_infinite() {
        return Err(Error::Divergence(
            "unloaded output: no finite voltage balances the harvested power".into(),
        ));
    }
    let opts = SimOptions {
        cycles,
        record: false,
        ..SimOptions::default()
    };
    let mut c = *cfg;
    for k in 1..=MAX_ITER {
        let p = simulate_with(&c, &opts)?.net_power();
        if p <= 0.0 {
            return Err(Error::Divergence(format!(
                "net output power {p:.3e} W at v_out = {:.4} V is not positive",
                c.v_out
            )));
        }
        let target = (p * c.r_l).sqrt();
        let step = target - c.v_out;
        if step.abs() < TOL {
            return Ok(SteadyState {
                v_out: target,
                p_net: p,
                iterations: k,
            });
        }
        c.v_out += DAMPING * step;
    }
    Err(Error::Divergence(format!(
        "output voltage did not settle within {MAX_ITER} iterations (last {:.4} V)",
        c.v_out
    )))
}
