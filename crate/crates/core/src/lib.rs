//! Behavioral models and event-driven simulators for four energy-saving
//! circuit techniques:
//!
//! * [`swcap`]: switched-capacitor-assisted power gating (super cut-off and
//!   super turn-on biasing of a PMOS header, refresh decay, diode drop).
//! * [`nems_pg`]: net energy gain of NEMS over FinFET power gating.
//! * [`dt_amp`]: the NEMS discrete-time parametric amplifier.
//! * [`harvester`]: the pre-charge/accumulate inductive piezo rectifier and
//!   closed-form baselines.
//!
//! Device models live in [`devices`]; [`scenario`] drives sweeps and the
//! `lowpower` command-line tool.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod consts;
pub mod devices;
pub mod dt_amp;
pub mod error;
pub mod harvester;
pub mod nems_pg;
pub mod numeric;
pub mod presets;
pub mod scenario;
pub mod swcap;

pub use error::{Error, Result};
