//! Engine-generator unit: the optimal operating line that maps a
//! requested electrical power to the cheapest (speed, torque) pair.

use super::{engine_fuel_rate, linspace, EngineSpec, MotorSpec};
use crate::error::{Error, Result};

/// Number of shaft speeds scanned when building the line.
const SPEED_SCAN_POINTS: usize = 61;

/// One point on the EGU operating line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EguPoint {
    /// Shaft speed shared by engine and generator, rad/s.
    pub speed_radps: f64,
    /// Engine (and generator) torque, N*m.
    pub torque_nm: f64,
    /// Fuel mass flow at this point, g/s.
    pub fuel_g_per_s: f64,
    /// Generator electrical output, W.
    pub electrical_w: f64,
}

fn shaft_speed_range(engine: &EngineSpec, generator: &MotorSpec) -> (f64, f64) {
    (
        engine.idle_speed_radps,
        engine.max_speed_radps.min(generator.max_speed_radps),
    )
}

fn generator_torque_cap(engine: &EngineSpec, generator: &MotorSpec, w: f64) -> f64 {
    let t_engine = engine.peak_torque_nm.min(engine.max_power_w / w);
    let t_gen = generator.peak_torque_nm().min(generator.peak_power_w / w);
    t_engine.min(t_gen)
}

/// Electrical power produced at shaft point (w, t), W.
fn electrical_power(generator: &MotorSpec, w: f64, t: f64) -> Result<f64> {
    Ok(w * t * generator.efficiency(w, t)?)
}

/// Solves the shaft torque that produces `power_w` electrical at speed
/// `w`, or None when the point is beyond capability there.
fn torque_for_power(
    engine: &EngineSpec,
    generator: &MotorSpec,
    w: f64,
    power_w: f64,
) -> Result<Option<f64>> {
    let cap = generator_torque_cap(engine, generator, w);
    if cap <= 0.0 || electrical_power(generator, w, cap)? < power_w {
        return Ok(None);
    }
    let (mut lo, mut hi) = (0.0f64, cap);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if electrical_power(generator, w, mid)? < power_w {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Some(0.5 * (lo + hi)))
}

/// Largest electrical power the unit can produce anywhere on its speed
/// range, W.
pub fn egu_max_electrical_power(engine: &EngineSpec, generator: &MotorSpec) -> Result<f64> {
    let (w_lo, w_hi) = shaft_speed_range(engine, generator);
    let mut best: f64 = 0.0;
    for w in linspace(w_lo, w_hi, SPEED_SCAN_POINTS) {
        let cap = generator_torque_cap(engine, generator, w);
        if cap > 0.0 {
            best = best.max(electrical_power(generator, w, cap)?);
        }
    }
    Ok(best)
}

/// Finds the (speed, torque) pair delivering `power_w` electrical with
/// the lowest fuel rate, scanning the shaft-speed grid. Ties resolve to
/// the lower speed.
pub fn egu_optimal_point(
    engine: &EngineSpec,
    generator: &MotorSpec,
    power_w: f64,
) -> Result<EguPoint> {
    if !(power_w > 0.0) {
        return Err(Error::Argument(format!(
            "EGU power must be > 0, got {power_w}"
        )));
    }
    let (w_lo, w_hi) = shaft_speed_range(engine, generator);
    let mut best: Option<EguPoint> = None;
    for w in linspace(w_lo, w_hi, SPEED_SCAN_POINTS) {
        let Some(t) = torque_for_power(engine, generator, w, power_w)? else {
            continue;
        };
        let fuel = engine_fuel_rate(engine, w, t)?;
        let better = match &best {
            None => true,
            Some(b) => fuel < b.fuel_g_per_s,
        };
        if better {
            best = Some(EguPoint {
                speed_radps: w,
                torque_nm: t,
                fuel_g_per_s: fuel,
                electrical_w: power_w,
            });
        }
    }
    best.ok_or_else(|| {
        Error::Capability(format!(
            "EGU cannot deliver {:.1} kW electrical",
            power_w / 1e3
        ))
    })
}

/// A cached operating line over a fixed set of power levels.
#[derive(Debug, Clone)]
pub struct EguLine {
    /// Power levels, W, ascending; level 0 is always "off" (no entry).
    pub levels_w: Vec<f64>,
    pub points: Vec<EguPoint>,
    pub max_electrical_w: f64,
}

impl EguLine {
    /// Builds the line with `n_levels` evenly spaced powers over
    /// (0, max_electrical].
    pub fn build(engine: &EngineSpec, generator: &MotorSpec, n_levels: usize) -> Result<Self> {
        let max_electrical_w = egu_max_electrical_power(engine, generator)?;
        let mut levels_w = Vec::with_capacity(n_levels);
        let mut points = Vec::with_capacity(n_levels);
        for i in 1..=n_levels {
            let p = max_electrical_w * i as f64 / n_levels as f64;
            let point = egu_optimal_point(engine, generator, p)?;
            levels_w.push(p);
            points.push(point);
        }
        Ok(Self {
            levels_w,
            points,
            max_electrical_w,
        })
    }
}
