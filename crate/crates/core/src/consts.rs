//! Physical constants (SI, exact CODATA 2018 values where defined).

/// Vacuum permittivity, F/m.
pub const EPSILON_0: f64 = 8.8541878128e-12;
/// Boltzmann constant, J/K.
pub const BOLTZMANN: f64 = 1.380649e-23;
/// Elementary charge, C.
pub const ELECTRON_CHARGE: f64 = 1.602176634e-19;
/// Room temperature used for calibration and presets, K.
pub const ROOM_TEMPERATURE: f64 = 300.0;
