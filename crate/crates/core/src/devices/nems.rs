use serde::{Deserialize, Serialize};

use crate::consts::EPSILON_0;
use crate::error::{ensure, Error, Result};
use crate::numeric::bisect;

/// Relative tolerance for the geometry/capacitance consistency check.
const CONSISTENCY_RTOL: f64 = 1e-6;

/// Uniform geometric scaling of a switch by a factor `eta`.
pub trait Scalable: Sized {
    fn scaled(&self, eta: f64) -> Result<Self>;
}

/// Electrostatic capacitive switch: a clamped beam over an air gap `g0` and a
/// dielectric layer of thickness `t_d`.
///
/// `v_pi`/`v_po` are the hysteresis thresholds used by the simulators and are
/// inputs in their own right; [`design_pull_voltages`](Self::design_pull_voltages)
/// gives the parallel-plate design-equation values, which need not agree.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NemsCapacitiveSwitch {
    /// Air gap, m.
    pub g0: f64,
    /// Dielectric thickness, m.
    pub t_d: f64,
    /// Dielectric relative permittivity.
    pub eps_d: f64,
    /// Plate overlap area, m².
    pub area: f64,
    /// Effective spring constant, N/m.
    pub k_eff: f64,
    /// Practical gain derating applied to the contact capacitance.
    pub gamma: f64,
    pub c_on: f64,
    pub c_off: f64,
    pub v_pi: f64,
    pub v_po: f64,
    /// Mechanical switching delay, s.
    pub t_mech: f64,
}

impl NemsCapacitiveSwitch {
    /// Builds a switch whose capacitances follow from the geometry.
    #[allow(clippy::too_many_arguments)]
    pub fn from_geometry(
        g0: f64,
        t_d: f64,
        eps_d: f64,
        area: f64,
        k_eff: f64,
        gamma: f64,
        v_pi: f64,
        v_po: f64,
        t_mech: f64,
    ) -> Result<Self> {
        let sw = Self {
            g0,
            t_d,
            eps_d,
            area,
            k_eff,
            gamma,
            c_on: gamma * EPSILON_0 * area * eps_d / t_d,
            c_off: EPSILON_0 * area / (g0 + t_d / eps_d),
            v_pi,
            v_po,
            t_mech,
        };
        sw.validate()?;
        Ok(sw)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("g0", self.g0),
            ("t_d", self.t_d),
            ("eps_d", self.eps_d),
            ("area", self.area),
            ("k_eff", self.k_eff),
            ("t_mech", self.t_mech),
        ] {
            ensure(v.is_finite() && v > 0.0, name, "must be > 0")?;
        }
        ensure(
            self.gamma > 0.0 && self.gamma <= 1.0,
            "gamma",
            "must lie in (0, 1]",
        )?;
        ensure(
            self.c_off > 0.0 && self.c_off < self.c_on,
            "c_off",
            "must satisfy 0 < c_off < c_on",
        )?;
        ensure(
            self.v_po > 0.0 && self.v_po < self.v_pi,
            "v_po",
            "must satisfy 0 < v_po < v_pi",
        )?;
        let c_off_geo = EPSILON_0 * self.area / self.effective_gap();
        let c_on_geo = self.gamma * EPSILON_0 * self.area * self.eps_d / self.t_d;
        ensure(
            (self.c_off / c_off_geo - 1.0).abs() < CONSISTENCY_RTOL,
            "c_off",
            "inconsistent with the plate geometry",
        )?;
        ensure(
            (self.c_on / c_on_geo - 1.0).abs() < CONSISTENCY_RTOL,
            "c_on",
            "inconsistent with the plate geometry and gamma",
        )
    }

    /// Dielectric thickness expressed as an equivalent air gap, m.
    pub fn dielectric_gap(&self) -> f64 {
        self.t_d / self.eps_d
    }

    /// Undeflected air gap plus the dielectric's equivalent gap, m.
    pub fn effective_gap(&self) -> f64 {
        self.g0 + self.dielectric_gap()
    }

    /// Gain set by the extracted capacitances.
    pub fn ideal_gain(&self) -> f64 {
        self.c_on / self.c_off
    }

    /// Gain of the ideal parallel-plate geometry.
    pub fn theoretical_gain(&self) -> f64 {
        1.0 + self.g0 * self.eps_d / self.t_d
    }

    pub fn practical_gain(&self) -> f64 {
        self.theoretical_gain() * self.gamma
    }

    /// Parallel-plate pull-in and pull-out voltages from the geometry, V.
    pub fn design_pull_voltages(&self) -> (f64, f64) {
        let d0 = self.effective_gap();
        let v_pi = (8.0 * self.k_eff * d0.powi(3) / (27.0 * EPSILON_0 * self.area)).sqrt();
        let v_po = (2.0 * self.k_eff * self.g0 * self.t_d.powi(2)
            / (self.eps_d.powi(2) * EPSILON_0 * self.area))
            .sqrt();
        (v_pi, v_po)
    }

    /// The same two voltages written in terms of the theoretical gain.
    pub fn design_pull_voltages_factored(&self) -> (f64, f64) {
        let a_v = self.theoretical_gain();
        let td = self.dielectric_gap();
        let stiffness = (self.k_eff / self.area).sqrt();
        let alpha1 = (8.0 / (27.0 * EPSILON_0)).sqrt();
        let alpha2 = (2.0 / EPSILON_0).sqrt();
        (
            alpha1 * (a_v * td).powi(3).sqrt() * stiffness,
            alpha2 * ((a_v - 1.0) * td.powi(3)).sqrt() * stiffness,
        )
    }

    /// Static (quasi-equilibrium) beam gap at bias `v` on the open branch, m.
    ///
    /// Beyond the static instability the gap is clamped at the instability
    /// point, so the result is continuous and non-increasing in `|v|`.
    pub fn static_gap(&self, v: f64) -> f64 {
        let td = self.dielectric_gap();
        let g_min = (2.0 * self.effective_gap() / 3.0 - td).max(0.0);
        if v == 0.0 {
            return self.g0;
        }
        let force = |g: f64| {
            self.k_eff * (self.g0 - g) - EPSILON_0 * self.area * v * v / (2.0 * (g + td).powi(2))
        };
        if force(g_min) <= 0.0 {
            return g_min;
        }
        bisect(force, g_min, self.g0, 0.0).unwrap_or(g_min)
    }

    /// Open-branch capacitance at bias `v`, F.
    pub fn open_capacitance(&self, v: f64) -> f64 {
        EPSILON_0 * self.area / (self.static_gap(v) + self.dielectric_gap())
    }

    /// Hysteretic capacitance at bias `v` given the prior contact state.
    /// Returns the capacitance and the new contact state.
    pub fn capacitance(&self, v: f64, closed: bool) -> (f64, bool) {
        let mag = v.abs();
        let closed_now = if closed {
            mag >= self.v_po
        } else {
            mag >= self.v_pi
        };
        if closed_now {
            (self.c_on, true)
        } else {
            (self.open_capacitance(v), false)
        }
    }
}

/// Pull-out to pull-in ratio of a parallel-plate switch as a function of its
/// theoretical gain.
pub fn pull_voltage_ratio(gain: f64) -> f64 {
    (27.0f64 / 4.0).sqrt() * ((gain - 1.0) / gain.powi(3)).sqrt()
}

impl Scalable for NemsCapacitiveSwitch {
    fn scaled(&self, eta: f64) -> Result<Self> {
        if !(eta > 0.0 && eta.is_finite()) {
            return Err(Error::invalid("eta", "scale factor must be > 0"));
        }
        let sw = Self {
            g0: self.g0 * eta,
            t_d: self.t_d * eta,
            eps_d: self.eps_d,
            area: self.area * eta * eta,
            k_eff: self.k_eff * eta,
            gamma: self.gamma,
            c_on: self.c_on * eta,
            c_off: self.c_off * eta,
            v_pi: self.v_pi * eta,
            v_po: self.v_po * eta,
            t_mech: self.t_mech * eta,
        };
        sw.validate()?;
        Ok(sw)
    }
}

/// Four-terminal ohmic NEMS relay (gate, body, source, drain).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NemsOhmicSwitch {
    pub v_pi: f64,
    pub v_po: f64,
    pub r_on: f64,
    pub t_mech: f64,
    pub c_gs_on: f64,
    pub c_gd_on: f64,
    pub c_gb_on: f64,
    pub c_gs_off: f64,
    pub c_gd_off: f64,
}

impl NemsOhmicSwitch {
    pub fn validate(&self) -> Result<()> {
        ensure(
            self.v_po > 0.0 && self.v_po <= self.v_pi,
            "v_po",
            "must satisfy 0 < v_po <= v_pi",
        )?;
        ensure(self.r_on > 0.0, "r_on", "must be > 0")?;
        ensure(self.t_mech > 0.0, "t_mech", "must be > 0")?;
        for (name, c) in [
            ("c_gs_on", self.c_gs_on),
            ("c_gd_on", self.c_gd_on),
            ("c_gb_on", self.c_gb_on),
            ("c_gs_off", self.c_gs_off),
            ("c_gd_off", self.c_gd_off),
        ] {
            ensure(c >= 0.0, name, "must be >= 0")?;
        }
        Ok(())
    }

    /// Per-terminal gate-to-source/drain capacitance, on state.
    pub fn c_gsd_on(&self) -> f64 {
        0.5 * (self.c_gs_on + self.c_gd_on)
    }

    /// Per-terminal gate-to-source/drain capacitance, off state.
    pub fn c_gsd_off(&self) -> f64 {
        0.5 * (self.c_gs_off + self.c_gd_off)
    }

    /// Total capacitance seen at the gate in the on state.
    pub fn c_par_on(&self) -> f64 {
        self.c_gs_on + self.c_gd_on + self.c_gb_on
    }
}

impl Scalable for NemsOhmicSwitch {
    fn scaled(&self, eta: f64) -> Result<Self> {
        if !(eta > 0.0 && eta.is_finite()) {
            return Err(Error::invalid("eta", "scale factor must be > 0"));
        }
        Ok(Self {
            v_pi: self.v_pi * eta,
            v_po: self.v_po * eta,
            r_on: self.r_on,
            t_mech: self.t_mech * eta,
            c_gs_on: self.c_gs_on * eta,
            c_gd_on: self.c_gd_on * eta,
            c_gb_on: self.c_gb_on * eta,
            c_gs_off: self.c_gs_off * eta,
            c_gd_off: self.c_gd_off * eta,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;

    #[test]
    fn reference_matches_extracted_values() {
        let sw = presets::nems_capacitive_reference();
        assert!((sw.c_on - 6.63e-15).abs() < 1e-20);
        assert!((sw.c_off - 1.30e-15).abs() < 1e-20);
        assert!((sw.ideal_gain() - 5.1).abs() < 1e-9);
        assert!((sw.theoretical_gain() - 10.36).abs() < 1e-9);
        assert!((sw.practical_gain() - 5.1).abs() < 1e-9);
    }

    #[test]
    fn design_ratio_at_reference_gain() {
        let sw = presets::nems_capacitive_reference();
        let (pi, po) = sw.design_pull_voltages();
        let expected = (27.0f64 / 4.0).sqrt() * (9.36f64 / 10.36f64.powi(3)).sqrt();
        assert!((po / pi - expected).abs() < 1e-12);
        assert!((expected - 0.238).abs() < 5e-4);
    }

    #[test]
    fn zero_bias_open_capacitance_is_c_off() {
        let sw = presets::nems_capacitive_reference();
        let (c, closed) = sw.capacitance(0.0, false);
        assert!(!closed);
        assert!((c / sw.c_off - 1.0).abs() < 1e-12);
    }

    #[test]
    fn soft_approach_below_pull_in() {
        let sw = presets::nems_capacitive_reference();
        let (v_static, _) = sw.design_pull_voltages();
        let v = 0.999 * v_static;
        let c = sw.open_capacitance(v);
        assert!(c > sw.c_off && c.is_finite());
        // Fine-bisection oracle on the normalized balance delta(1-delta)^2 = (4/27)(v/v_pi)^2.
        let rhs = 4.0 / 27.0 * (v / v_static).powi(2);
        let (mut lo, mut hi) = (0.0f64, 1.0 / 3.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid * (1.0 - mid).powi(2) < rhs {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let c_oracle = sw.c_off / (1.0 - lo);
        assert!((c / c_oracle - 1.0).abs() < 1e-9, "{c} vs {c_oracle}");
    }

    #[test]
    fn hysteresis_loop() {
        let sw = presets::nems_capacitive_reference();
        let mut closed = false;
        let mut up = Vec::new();
        let steps = 400;
        let top = sw.v_pi + 0.1;
        for k in 0..=steps {
            let v = top * k as f64 / steps as f64;
            let (c, s) = sw.capacitance(v, closed);
            closed = s;
            up.push((v, c, s));
        }
        let first_closed = up.iter().find(|p| p.2).unwrap().0;
        assert!(first_closed >= sw.v_pi && first_closed < sw.v_pi + top / steps as f64 + 1e-12);
        let mut reopened = None;
        for k in (0..=steps).rev() {
            let v = top * k as f64 / steps as f64;
            let (_, s) = sw.capacitance(v, closed);
            if closed && !s {
                reopened = Some(v);
            }
            closed = s;
        }
        let reopened = reopened.unwrap();
        assert!(reopened < sw.v_po && reopened > sw.v_po - top / steps as f64 - 1e-12);
    }

    #[test]
    fn scale_by_half() {
        let sw = presets::nems_capacitive_reference();
        let s = sw.scaled(0.5).unwrap();
        assert!((s.v_pi - 1.6).abs() < 1e-12);
        assert!((s.c_on - 3.315e-15).abs() < 1e-24);
        assert!((s.ideal_gain() - sw.ideal_gain()).abs() < 1e-12);
        assert_eq!(sw.scaled(1.0).unwrap(), sw);
        assert!(sw.scaled(0.0).is_err());
    }

    #[test]
    fn geometric_scaling_scales_design_voltages() {
        let sw = presets::nems_capacitive_reference();
        let s = sw.scaled(1.7).unwrap();
        let (a, b) = sw.design_pull_voltages();
        let (c, d) = s.design_pull_voltages();
        assert!((c / a - 1.7).abs() < 1e-12 && (d / b - 1.7).abs() < 1e-12);
    }

    #[test]
    fn inconsistent_capacitance_rejected() {
        let mut sw = presets::nems_capacitive_reference();
        sw.c_off *= 1.1;
        assert!(sw.validate().is_err());
    }
}
