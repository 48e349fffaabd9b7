//! Parameterized behavioral device models: MOSFET leakage and on-resistance
//! with temperature and GIDL, electrostatic NEMS switches, and the piezo
//! source.

mod env;
mod mos;
mod nems;
mod piezo;

pub use env::Environment;
pub use mos::MosDevice;
pub use nems::{pull_voltage_ratio, NemsCapacitiveSwitch, NemsOhmicSwitch, Scalable};
pub use piezo::PiezoTransducer;
