//! Series RLC tank driven by a constant current into the capacitor node.
//!
//! Orientation: `C dV/dt = i_s - i`, `L di/dt = V - R i`.

use crate::numeric::integrate;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tank {
    pub l: f64,
    pub c: f64,
    pub r: f64,
    /// Source current, held constant over the segment.
    pub i_s: f64,
}

impl Tank {
    pub fn new(l: f64, c: f64, r: f64, i_s: f64) -> Self {
        Self { l, c, r, i_s }
    }

    pub fn alpha(&self) -> f64 {
        self.r / (2.0 * self.l)
    }

    pub fn omega_d(&self) -> f64 {
        let w0sq = 1.0 / (self.l * self.c);
        (w0sq - self.alpha().powi(2)).sqrt()
    }

    /// Damped oscillation period, s.
    pub fn period(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.omega_d()
    }

    /// Node voltage and inductor current `t` after starting at `(v0, i0)`.
    pub fn state(&self, v0: f64, i0: f64, t: f64) -> (f64, f64) {
        let (a, w) = (self.alpha(), self.omega_d());
        let v_eq = self.r * self.i_s;
        let yv = v0 - v_eq;
        let yi = i0 - self.i_s;
        let (s, c) = (w * t).sin_cos();
        let e = (-a * t).exp();
        let v = e * (yv * c + (-yi / self.c + a * yv) / w * s);
        let i = e * (yi * c + (yv / self.l - a * yi) / w * s);
        (v + v_eq, i + self.i_s)
    }

    /// Work done by the source, resistive loss, J.
    pub fn energies(&self, v0: f64, i0: f64, dt: f64) -> (f64, f64) {
        let panels = 4;
        let w_src = self.i_s * integrate(|t| self.state(v0, i0, t).0, 0.0, dt, panels);
        let loss = if self.r == 0.0 {
            0.0
        } else {
            self.r * integrate(|t| self.state(v0, i0, t).1.powi(2), 0.0, dt, panels)
        };
        (w_src, loss)
    }

    /// Stored energy at a state, J.
    pub fn stored(&self, v: f64, i: f64) -> f64 {
        0.5 * self.c * v * v + 0.5 * self.l * i * i
    }
}
