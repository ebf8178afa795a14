//! Component models: gridded maps, motors, generator, engine, battery,
//! and the engine-generator unit operating line.
//!
//! The operating surfaces stand in for dynamometer data that is not
//! machine-readable here: they are generated from documented parametric
//! loss/consumption families and sampled onto regular grids, so measured
//! maps can be dropped in through the same CSV interface without touching
//! any consumer.

mod battery;
mod egu;
mod engine;
mod motor;

pub use battery::{
    battery_power_dual, battery_power_smsp, soc_derivative, BatterySpec, CurrentDirection,
};
pub use egu::{egu_max_electrical_power, egu_optimal_point, EguLine, EguPoint};
pub use engine::{
    engine_emission_rate, engine_fuel_rate, EmissionSpecies, EngineParams, EngineSpec,
};
pub use motor::{motor_max_torque, MotorLossCoefficients, MotorParams, MotorSpec};

use std::io::{BufRead, BufReader, Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// What a [`ComponentMap`]'s values represent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapKind {
    /// Dimensionless efficiency in (0, 1].
    Efficiency,
    /// Fuel mass flow, g/s.
    FuelRateGPerS,
    /// Emission mass flow, g/s.
    EmissionRateGPerS,
}

/// A 2D gridded surface over (speed, torque) with bilinear lookup.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentMap {
    kind: MapKind,
    /// Shaft speeds, rad/s, strictly ascending.
    speed_grid: Vec<f64>,
    /// Torques, N*m, strictly ascending.
    torque_grid: Vec<f64>,
    /// Row-major values, `values[i * torque_grid.len() + j]`.
    values: Vec<f64>,
}

fn strictly_ascending(grid: &[f64]) -> bool {
    grid.len() >= 2 && grid.windows(2).all(|w| w[0] < w[1])
}

impl ComponentMap {
    pub fn new(
        kind: MapKind,
        speed_grid: Vec<f64>,
        torque_grid: Vec<f64>,
        values: Vec<f64>,
    ) -> Result<Self> {
        if !strictly_ascending(&speed_grid) || !strictly_ascending(&torque_grid) {
            return Err(Error::Validation(
                "map grids must be strictly ascending with at least 2 points".into(),
            ));
        }
        if values.len() != speed_grid.len() * torque_grid.len() {
            return Err(Error::Validation(format!(
                "map has {} values for a {}x{} grid",
                values.len(),
                speed_grid.len(),
                torque_grid.len()
            )));
        }
        for v in &values {
            let ok = match kind {
                MapKind::Efficiency => *v > 0.0 && *v <= 1.0,
                _ => *v >= 0.0,
            };
            if !ok || !v.is_finite() {
                return Err(Error::Validation(format!(
                    "map value {v} invalid for kind {kind:?}"
                )));
            }
        }
        Ok(Self {
            kind,
            speed_grid,
            torque_grid,
            values,
        })
    }

    /// Samples `f(speed, torque)` on the given grids.
    pub fn from_fn(
        kind: MapKind,
        speed_grid: Vec<f64>,
        torque_grid: Vec<f64>,
        f: impl Fn(f64, f64) -> f64,
    ) -> Result<Self> {
        let mut values = Vec::with_capacity(speed_grid.len() * torque_grid.len());
        for &w in &speed_grid {
            for &t in &torque_grid {
                values.push(f(w, t));
            }
        }
        Self::new(kind, speed_grid, torque_grid, values)
    }

    pub fn kind(&self) -> MapKind {
        self.kind
    }

    pub fn speed_grid(&self) -> &[f64] {
        &self.speed_grid
    }

    pub fn torque_grid(&self) -> &[f64] {
        &self.torque_grid
    }

    pub fn value_at(&self, speed_idx: usize, torque_idx: usize) -> f64 {
        self.values[speed_idx * self.torque_grid.len() + torque_idx]
    }

    fn bracket(grid: &[f64], x: f64, axis: &'static str) -> Result<(usize, f64)> {
        let lo = grid[0];
        let hi = grid[grid.len() - 1];
        // Absorb 1-ulp arithmetic noise at the hull edges; anything
        // further out is a real range violation.
        let slack = 1e-9 * (hi - lo).abs().max(1.0);
        if x < lo - slack || x > hi + slack || !x.is_finite() {
            return Err(Error::MapRange {
                axis,
                value: x,
                lo,
                hi,
            });
        }
        let x = x.clamp(lo, hi);
        let i = grid.partition_point(|g| *g <= x).min(grid.len() - 1) - 1;
        let frac = (x - grid[i]) / (grid[i + 1] - grid[i]);
        Ok((i, frac))
    }

    /// Bilinear interpolation inside the grid hull.
    pub fn lookup(&self, speed: f64, torque: f64) -> Result<f64> {
        let (i, fs) = Self::bracket(&self.speed_grid, speed, "speed")?;
        let (j, ft) = Self::bracket(&self.torque_grid, torque, "torque")?;
        let nt = self.torque_grid.len();
        let v00 = self.values[i * nt + j];
        let v01 = self.values[i * nt + j + 1];
        let v10 = self.values[(i + 1) * nt + j];
        let v11 = self.values[(i + 1) * nt + j + 1];
        let a = v00 + (v01 - v00) * ft;
        let b = v10 + (v11 - v10) * ft;
        Ok(a + (b - a) * fs)
    }

    /// Writes the map in long CSV format: `speed_radps,torque_nm,value`.
    pub fn to_csv(&self, mut out: impl Write) -> Result<()> {
        writeln!(out, "speed_radps,torque_nm,value")?;
        for (i, w) in self.speed_grid.iter().enumerate() {
            for (j, t) in self.torque_grid.iter().enumerate() {
                writeln!(out, "{},{},{}", w, t, self.value_at(i, j))?;
            }
        }
        Ok(())
    }

    /// Reads a map from long CSV format. Every (speed, torque) grid
    /// combination must be present exactly once.
    pub fn from_csv(kind: MapKind, source: impl Read) -> Result<Self> {
        let reader = BufReader::new(source);
        let mut rows: Vec<(f64, f64, f64)> = Vec::new();
        for (idx, line) in reader.lines().enumerate() {
            let line_no = idx + 1;
            let line = line?;
            let trimmed = line.trim();
            if trimmed.is_empty() {
                continue;
            }
            if line_no == 1 {
                if trimmed != "speed_radps,torque_nm,value" {
                    return Err(Error::Format(format!(
                        "expected header `speed_radps,torque_nm,value`, got `{trimmed}`"
                    )));
                }
                continue;
            }
            let fields: Vec<&str> = trimmed.split(',').map(str::trim).collect();
            if fields.len() != 3 {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("expected 3 fields, got {}", fields.len()),
                });
            }
            let parse = |s: &str| -> Result<f64> {
                s.parse::<f64>().map_err(|e| Error::Parse {
                    line: line_no,
                    msg: format!("bad number `{s}`: {e}"),
                })
            };
            rows.push((parse(fields[0])?, parse(fields[1])?, parse(fields[2])?));
        }
        let mut speeds: Vec<f64> = rows.iter().map(|r| r.0).collect();
        speeds.sort_by(|a, b| a.total_cmp(b));
        speeds.dedup();
        let mut torques: Vec<f64> = rows.iter().map(|r| r.1).collect();
        torques.sort_by(|a, b| a.total_cmp(b));
        torques.dedup();
        if rows.len() != speeds.len() * torques.len() {
            return Err(Error::Format(format!(
                "map CSV has {} rows, expected a complete {}x{} grid",
                rows.len(),
                speeds.len(),
                torques.len()
            )));
        }
        let mut values = vec![f64::NAN; speeds.len() * torques.len()];
        for (w, t, v) in rows {
            let i = speeds.partition_point(|g| *g < w);
            let j = torques.partition_point(|g| *g < t);
            let slot = &mut values[i * torques.len() + j];
            if !slot.is_nan() {
                return Err(Error::Format(format!(
                    "duplicate map entry at speed {w}, torque {t}"
                )));
            }
            *slot = v;
        }
        Self::new(kind, speeds, torques, values)
    }
}

/// `n` evenly spaced points over `[lo, hi]` inclusive.
pub(crate) fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    debug_assert!(n >= 2 && hi > lo);
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

/// The full set of component specifications for one vehicle.
#[derive(Debug, Clone)]
pub struct ComponentCatalog {
    pub motor0: MotorSpec,
    pub motor1: MotorSpec,
    pub motor2: MotorSpec,
    pub generator: MotorSpec,
    pub engine: EngineSpec,
    pub battery: BatterySpec,
    /// DC/DC-and-inverter efficiency between machines and the battery bus.
    pub converter_eff: f64,
}

/// Serializable parameters from which a [`ComponentCatalog`] is built
/// (JSON config block `components`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ComponentParams {
    pub motor0: MotorParams,
    pub motor1: MotorParams,
    pub motor2: MotorParams,
    pub generator: MotorParams,
    pub engine: EngineParams,
    pub battery: BatterySpec,
    pub converter_eff: f64,
}

impl Default for ComponentParams {
    fn default() -> Self {
        Self {
            motor0: MotorParams::default_motor0(),
            motor1: MotorParams::default_motor_half(),
            motor2: MotorParams::default_motor_half(),
            generator: MotorParams::default_generator(),
            engine: EngineParams::default(),
            battery: BatterySpec::default(),
            converter_eff: 0.95,
        }
    }
}

impl ComponentParams {
    pub fn build(&self) -> Result<ComponentCatalog> {
        if !(self.converter_eff > 0.0 && self.converter_eff <= 1.0) {
            return Err(Error::Validation(
                "converter efficiency must be in (0, 1]".into(),
            ));
        }
        self.battery.validate()?;
        Ok(ComponentCatalog {
            motor0: self.motor0.build()?,
            motor1: self.motor1.build()?,
            motor2: self.motor2.build()?,
            generator: self.generator.build()?,
            engine: self.engine.build()?,
            battery: self.battery.clone(),
            converter_eff: self.converter_eff,
        })
    }
}
