use serde::{Deserialize, Serialize};

use super::Environment;
use crate::error::{ensure, Error, Result};
use crate::numeric::{bisect, golden_min};

/// Optimizer tolerance on the super cut-off bias, V.
const BIAS_TOL: f64 = 1e-7;

/// PMOS power-gating switch.
///
/// `beta` lumps mobility, oxide capacitance and aspect ratio (A/V²). The GIDL
/// branch is a single exponential in the gate-to-source bias whose parameters
/// do not depend on temperature; only the channel current sees `V_t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MosDevice {
    /// Lumped transconductance factor, A/V².
    pub beta: f64,
    /// Subthreshold slope factor.
    pub n: f64,
    /// Threshold voltage magnitude, V.
    pub v_th: f64,
    /// Maximum allowed source-to-gate voltage (oxide stress limit), V.
    pub v_sg_max: f64,
    /// GIDL prefactor, A. Zero disables GIDL.
    pub gidl_i0: f64,
    /// GIDL exponential slope voltage, V.
    pub gidl_slope: f64,
    /// Gate leakage per unit width, A/m.
    pub gate_leak_density: f64,
    /// Device width, m.
    pub width: f64,
}

impl MosDevice {
    pub fn validate(&self) -> Result<()> {
        ensure(self.beta > 0.0, "beta", "must be > 0")?;
        ensure(self.n > 1.0, "n", "must be > 1")?;
        ensure(self.v_th > 0.0, "v_th", "must be > 0")?;
        ensure(self.v_sg_max > self.v_th, "v_sg_max", "must exceed v_th")?;
        ensure(self.gidl_i0 >= 0.0, "gidl_i0", "must be >= 0")?;
        ensure(self.gidl_slope > 0.0, "gidl_slope", "must be > 0")?;
        ensure(
            self.gate_leak_density >= 0.0,
            "gate_leak_density",
            "must be >= 0",
        )?;
        ensure(self.width > 0.0, "width", "must be > 0")
    }

    /// Subthreshold channel current at source-to-gate voltage `v_sg`, A.
    /// Negative `v_sg` is the super cut-off region.
    pub fn subthreshold_current(&self, v_sg: f64, env: &Environment) -> f64 {
        let vt = env.thermal_voltage();
        self.beta * (self.n - 1.0) * vt * vt * ((v_sg - self.v_th) / (self.n * vt)).exp()
    }

    /// Triode on-resistance, Ω.
    pub fn on_resistance(&self, v_sg: f64) -> Result<f64> {
        if v_sg <= self.v_th {
            return Err(Error::Domain(format!(
                "device not in triode conduction (v_sg = {v_sg} V <= v_th = {} V)",
                self.v_th
            )));
        }
        Ok(1.0 / (self.beta * (v_sg - self.v_th)))
    }

    /// GIDL current at gate-to-source bias `v_gsp`, A.
    pub fn gidl_current(&self, v_gsp: f64) -> f64 {
        self.gidl_i0 * (v_gsp / self.gidl_slope).exp()
    }

    /// Off-state leakage (channel plus GIDL) at gate-to-source bias `v_gsp`, A.
    ///
    /// `v_gsp >= 0` is the super cut-off depth; negative values are evaluated
    /// with the same closed form.
    pub fn total_off_leakage(&self, v_gsp: f64, env: &Environment) -> f64 {
        self.subthreshold_current(-v_gsp, env) + self.gidl_current(v_gsp)
    }

    /// Gate-to-source bias minimizing [`total_off_leakage`](Self::total_off_leakage)
    /// over `[0, v_sg_max]`.
    pub fn optimal_super_cutoff_bias(&self, env: &Environment) -> Result<f64> {
        if self.gidl_i0 <= 0.0 {
            return Err(Error::Domain(
                "no interior minimum: GIDL disabled".to_string(),
            ));
        }
        Ok(golden_min(
            |v| self.total_off_leakage(v, env).ln(),
            0.0,
            self.v_sg_max,
            BIAS_TOL,
        ))
    }

    /// Leakage reduction `I(0) / I(v_opt)` at the optimal bias.
    pub fn max_reduction_ratio(&self, env: &Environment) -> Result<f64> {
        let v = self.optimal_super_cutoff_bias(env)?;
        Ok(self.total_off_leakage(0.0, env) / self.total_off_leakage(v, env))
    }

    /// Gate leakage of the whole device, A.
    pub fn gate_leakage(&self) -> f64 {
        self.gate_leak_density * self.width
    }

    /// Same device at a different process corner: channel and GIDL currents
    /// share the common factor.
    pub fn with_corner_factor(&self, factor: f64) -> Self {
        Self {
            beta: self.beta * factor,
            gidl_i0: self.gidl_i0 * factor,
            ..*self
        }
    }

    /// Fits `(gidl_i0, gidl_slope)` so that the leakage minimum sits at
    /// `target_v_opt` with reduction ratio `target_ratio` relative to zero bias.
    ///
    /// The stationarity condition fixes `gidl_i0` as a function of the slope,
    /// which leaves a monotone one-dimensional equation in the slope.
    pub fn calibrate_gidl(
        &self,
        target_v_opt: f64,
        target_ratio: f64,
        env: &Environment,
    ) -> Result<MosDevice> {
        self.validate()?;
        if !(target_v_opt > 0.0 && target_v_opt < self.v_sg_max) {
            return Err(Error::Calibration(format!(
                "target v_opt {target_v_opt} V outside (0, v_sg_max = {} V)",
                self.v_sg_max
            )));
        }
        if !(target_ratio > 1.0) {
            return Err(Error::Calibration(format!(
                "target reduction ratio {target_ratio} must exceed 1"
            )));
        }
        let a = self.n * env.thermal_voltage();
        let bound = (target_v_opt / a).exp();
        if target_ratio >= bound {
            return Err(Error::Calibration(format!(
                "reduction ratio {target_ratio} infeasible: pure-subthreshold bound \
                 exp(v_opt/(n*V_t)) = {bound:.6} at v_opt = {target_v_opt} V"
            )));
        }
        let x = (-target_v_opt / a).exp();
        // Ratio achieved at the stationary point for a given slope s.
        let ratio_for = |s: f64| {
            let g = (s / a) * x * (-target_v_opt / s).exp();
            (1.0 + g) / (x * (1.0 + s / a))
        };
        let ln_s = bisect(
            |ln_s| ratio_for(ln_s.exp()).ln() - target_ratio.ln(),
            (1e-9f64).ln(),
            (1e6f64).ln(),
            1e-14,
        )
        .map_err(|e| Error::Calibration(format!("slope search failed: {e}")))?;
        let slope = ln_s.exp();
        let i_s = self.subthreshold_current(0.0, env);
        let i0 = (slope / a) * i_s * x * (-target_v_opt / slope).exp();
        let dev = MosDevice {
            gidl_i0: i0,
            gidl_slope: slope,
            ..*self
        };

        let v_opt = dev.optimal_super_cutoff_bias(env)?;
        let ratio = dev.max_reduction_ratio(env)?;
        if (v_opt - target_v_opt).abs() > 1e-3 || (ratio / target_ratio - 1.0).abs() > 0.01 {
            return Err(Error::Calibration(format!(
                "calibration did not round-trip: v_opt {v_opt} V, ratio {ratio}"
            )));
        }
        Ok(dev)
    }
}
