use serde::{Deserialize, Serialize};

use crate::consts::{BOLTZMANN, ELECTRON_CHARGE, ROOM_TEMPERATURE};
use crate::error::{ensure, Result};

/// Operating environment. Temperature enters the models only through the
/// thermal voltage and the kT noise floor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Environment {
    /// Absolute temperature, K.
    pub temperature: f64,
}

impl Environment {
    pub fn new(temperature: f64) -> Result<Self> {
        let env = Self { temperature };
        env.validate()?;
        Ok(env)
    }

    pub fn room() -> Self {
        Self {
            temperature: ROOM_TEMPERATURE,
        }
    }

    pub fn from_celsius(celsius: f64) -> Result<Self> {
        Self::new(celsius + 273.15)
    }

    pub fn validate(&self) -> Result<()> {
        ensure(
            self.temperature.is_finite() && self.temperature > 0.0,
            "temperature",
            "must be a positive finite kelvin value",
        )
    }

    /// Thermal voltage kT/q, V.
    pub fn thermal_voltage(&self) -> f64 {
        BOLTZMANN * self.temperature / ELECTRON_CHARGE
    }

    /// kT, J.
    pub fn kt(&self) -> f64 {
        BOLTZMANN * self.temperature
    }
}

impl Default for Environment {
    fn default() -> Self {
        Self::room()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thermal_voltage_at_300k() {
        let vt = Environment::room().thermal_voltage();
        assert!((vt - 0.025_851_999_786).abs() < 1e-9);
    }

    #[test]
    fn rejects_non_positive_temperature() {
        assert!(Environment::new(0.0).is_err());
        assert!(Environment::new(-5.0).is_err());
        assert!(Environment::new(f64::NAN).is_err());
    }

    #[test]
    fn thermal_voltage_increases_with_temperature() {
        let a = Environment::new(250.0).unwrap().thermal_voltage();
        let b = Environment::new(251.0).unwrap().thermal_voltage();
        assert!(b > a && a > 0.0);
    }
}
