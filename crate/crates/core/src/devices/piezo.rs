use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Result};
use crate::numeric::extended_f64;

/// Norton model of a vibrating piezoelectric transducer: a sinusoidal current
/// source in parallel with `c_pz` and a leakage resistance `r_pz`.
///
/// Time zero is a positive-going zero crossing of the source current.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PiezoTransducer {
    /// Internal capacitance, F.
    pub c_pz: f64,
    /// Vibration frequency, Hz.
    pub f_pz: f64,
    /// Parallel leakage resistance, Ω. `"inf"` in JSON for an ideal source.
    #[serde(with = "extended_f64")]
    pub r_pz: f64,
    /// Open-circuit voltage amplitude, V.
    pub v_oc: f64,
}

impl Default for PiezoTransducer {
    fn default() -> Self {
        Self {
            c_pz: 19e-9,
            f_pz: 146.0,
            r_pz: 2e6,
            v_oc: 1.0,
        }
    }
}

impl PiezoTransducer {
    pub fn validate(&self) -> Result<()> {
        ensure(
            self.c_pz.is_finite() && self.c_pz > 0.0,
            "c_pz",
            "must be > 0",
        )?;
        ensure(
            self.f_pz.is_finite() && self.f_pz > 0.0,
            "f_pz",
            "must be > 0",
        )?;
        ensure(self.r_pz > 0.0, "r_pz", "must be > 0")?;
        ensure(
            self.v_oc.is_finite() && self.v_oc > 0.0,
            "v_oc",
            "must be > 0",
        )
    }

    pub fn omega(&self) -> f64 {
        2.0 * PI * self.f_pz
    }

    pub fn period(&self) -> f64 {
        1.0 / self.f_pz
    }

    /// Source current amplitude giving an open-circuit swing of `v_oc`, A.
    pub fn peak_current(&self) -> f64 {
        self.omega() * self.c_pz * self.v_oc
    }

    /// Source current at time `t`, A.
    pub fn current(&self, t: f64) -> f64 {
        self.peak_current() * (self.omega() * t).sin()
    }

    /// Charge delivered by the source over `[t0, t1]`, C.
    pub fn charge(&self, t0: f64, t1: f64) -> f64 {
        let w = self.omega();
        self.peak_current() / w * ((w * t0).cos() - (w * t1).cos())
    }

    /// Leak conductance, S (zero for an ideal source).
    pub fn leak_conductance(&self) -> f64 {
        if self.r_pz.is_infinite() {
            0.0
        } else {
            1.0 / self.r_pz
        }
    }

    /// Terminal voltage at `t` of the unloaded transducer that held `v0` at
    /// `t0`: the source current charging `c_pz` through the leak.
    pub fn open_circuit_voltage(&self, v0: f64, t0: f64, t: f64) -> f64 {
        let g = self.leak_conductance();
        if g == 0.0 {
            return v0 + self.charge(t0, t) / self.c_pz;
        }
        let (w, c, ip) = (self.omega(), self.c_pz, self.peak_current());
        let den = g * g + w * w * c * c;
        let (a, b) = (ip * g / den, -w * c * ip / den);
        let vp = |tau: f64| a * (w * tau).sin() + b * (w * tau).cos();
        vp(t) + (v0 - vp(t0)) * (-g * (t - t0) / c).exp()
    }

    /// Energy an ideal full-bridge rectifier extracts per second, W. This is
    /// the normalization used by the rectifier figure of merit.
    pub fn fbr_reference_power(&self) -> f64 {
        self.c_pz * self.v_oc * self.v_oc * self.f_pz
    }
}
