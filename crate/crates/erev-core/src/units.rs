//! Unit conversions between internal SI quantities and boundary units.

/// Standard gravity, m/s^2.
pub const G: f64 = 9.81;

/// Joules per kilowatt-hour.
pub const J_PER_KWH: f64 = 3.6e6;

pub fn kmh_to_mps(v: f64) -> f64 {
    v / 3.6
}

pub fn mps_to_kmh(v: f64) -> f64 {
    v * 3.6
}

pub fn rpm_to_radps(n: f64) -> f64 {
    n * std::f64::consts::PI / 30.0
}

pub fn radps_to_rpm(w: f64) -> f64 {
    w * 30.0 / std::f64::consts::PI
}
