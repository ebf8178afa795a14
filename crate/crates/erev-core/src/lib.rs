//! Simulation and optimization toolkit for extended-range electric bus
//! powertrains.
//!
//! The crate models three powertrain layouts — a single-motor series
//! powertrain (SMSP), a dual-motor series powertrain (DMSP), and a
//! dual-motor parallel powertrain (DMPP) — all built around a four-speed
//! transmission. It provides:
//!
//! * drive-cycle ingestion and built-in cycles ([`cycles`]),
//! * longitudinal vehicle dynamics and brake-force allocation ([`vehicle`]),
//! * parametric component models: motors, generator, engine with fuel and
//!   emission maps, and a battery ([`components`]),
//! * architecture kinematics, operating modes, and optimal gear/split maps
//!   ([`powertrain`]),
//! * the component sizing procedure ([`sizing`]),
//! * a receding-horizon energy management strategy solved by forward
//!   dynamic programming ([`ems`]),
//! * a closed-loop simulation harness with energy auditing and comparison
//!   reports ([`sim`]),
//! * a JSON run configuration ([`config`]).
//!
//! All internal quantities are SI (m, s, kg, N, W, J, rad/s); state of
//! charge is a dimensionless fraction. Conversions to the external units
//! used in cycle files and reports (km/h, kWh, dm3) happen only at the
//! I/O boundary.

pub mod components;
pub mod config;
pub mod cycles;
pub mod ems;
pub mod powertrain;
pub mod report;
pub mod sim;
pub mod sizing;
pub mod units;
pub mod vehicle;

mod error;

pub use error::{Error, Result};
