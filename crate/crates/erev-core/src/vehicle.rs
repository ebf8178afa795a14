//! Longitudinal load model and braking-force allocation.
//!
//! The load model combines rolling resistance, inclination resistance,
//! and aerodynamic drag into a wheel torque demand; braking demand is
//! split between the front axle (friction only) and the rear axle
//! (regenerable) either rear-first or on the ideal equal-adhesion curve.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Vehicle-level parameters.
///
/// Defaults describe the 15 t urban bus studied throughout: the wheel
/// radius closes the top-speed kinematics (4th gear, 4500 rpm, 81.7 km/h)
/// and the remaining coefficients are calibrated so the sizing procedure
/// reproduces the reference gear ratios and grade ability.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VehicleParams {
    /// Gross mass, kg.
    pub mass_kg: f64,
    /// Combined rotational inertia coefficient (dimensionless, >= 1).
    pub inertia_coeff: f64,
    /// Gravitational acceleration, m/s^2.
    pub gravity: f64,
    /// Tyre rolling-resistance coefficient.
    pub rolling_coeff: f64,
    /// Aerodynamic drag coefficient.
    pub drag_coeff: f64,
    /// Air density, kg/m^3.
    pub air_density: f64,
    /// Frontal area, m^2.
    pub frontal_area_m2: f64,
    /// Wheel radius, m.
    pub wheel_radius_m: f64,
    /// Height of the centre of gravity, m.
    pub cg_height_m: f64,
    /// Wheelbase, m.
    pub wheelbase_m: f64,
    /// Distance from the centre of gravity to the rear axle, m.
    pub cg_to_rear_m: f64,
    /// Driveline efficiency between motor and wheel.
    pub driveline_eff: f64,
    /// Tyre-road adhesion coefficient available for braking.
    pub adhesion_coeff: f64,
    /// Deceleration above which braking is treated as emergency, m/s^2.
    pub emergency_decel_mps2: f64,
}

impl Default for VehicleParams {
    fn default() -> Self {
        Self {
            mass_kg: 15_000.0,
            inertia_coeff: 1.1,
            gravity: crate::units::G,
            rolling_coeff: 0.01,
            drag_coeff: 0.65,
            air_density: 1.2,
            frontal_area_m2: 7.5,
            wheel_radius_m: 0.526,
            cg_height_m: 1.2,
            wheelbase_m: 5.5,
            cg_to_rear_m: 2.6,
            driveline_eff: 0.92,
            adhesion_coeff: 0.8,
            emergency_decel_mps2: 3.0,
        }
    }
}

impl VehicleParams {
    pub fn validate(&self) -> Result<()> {
        let check = |ok: bool, msg: &str| {
            if ok {
                Ok(())
            } else {
                Err(Error::Validation(format!("vehicle: {msg}")))
            }
        };
        check(self.mass_kg > 0.0, "mass must be > 0")?;
        check(self.wheel_radius_m > 0.0, "wheel radius must be > 0")?;
        check(
            self.driveline_eff > 0.0 && self.driveline_eff <= 1.0,
            "driveline efficiency must be in (0, 1]",
        )?;
        check(self.inertia_coeff >= 1.0, "inertia coefficient must be >= 1")?;
        check(
            self.cg_to_rear_m >= 0.0 && self.cg_to_rear_m <= self.wheelbase_m,
            "cg-to-rear distance must lie within the wheelbase",
        )?;
        check(self.cg_height_m > 0.0, "cg height must be > 0")?;
        check(self.gravity > 0.0, "gravity must be > 0")?;
        check(self.adhesion_coeff > 0.0, "adhesion coefficient must be > 0")?;
        Ok(())
    }

    /// Gross weight, N.
    pub fn weight_n(&self) -> f64 {
        self.mass_kg * self.gravity
    }
}

/// Road-load torque at the wheels, N*m.
///
/// Rolling resistance, inclination resistance, and aerodynamic drag at
/// speed `v` on a slope of `grade` (rise/run). The inclination angle is
/// atan(grade), so a 50% grade maps to sin(phi) = 0.447.
pub fn load_torque(v: f64, grade: f64, p: &VehicleParams) -> f64 {
    let phi = grade.atan();
    let weight = p.weight_n();
    let force = weight * phi.sin()
        + weight * p.rolling_coeff * phi.cos()
        + 0.5 * p.air_density * p.drag_coeff * p.frontal_area_m2 * v * v;
    force * p.wheel_radius_m
}

/// Total demanded wheel torque, N*m; negative values signal braking.
pub fn required_wheel_torque(v: f64, accel: f64, grade: f64, p: &VehicleParams) -> f64 {
    p.inertia_coeff * p.mass_kg * accel * p.wheel_radius_m + load_torque(v, grade, p)
}

/// Front/rear braking-force allocation, N. Forces are magnitudes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BrakeSplit {
    /// Front-axle (friction-only) braking force, N.
    pub front_n: f64,
    /// Rear-axle (regenerable) braking force, N.
    pub rear_n: f64,
}

/// Rear force on the ideal equal-adhesion allocation curve for a given
/// front force.
///
/// F_xR = Mg/(2 h_g) * (sqrt(b^2 + 4 h_g L F_xF / (M g)) - b) - F_xF
pub fn ideal_rear_force(front_n: f64, p: &VehicleParams) -> f64 {
    let weight = p.weight_n();
    let b = p.cg_to_rear_m;
    let root = (b * b + 4.0 * p.cg_height_m * p.wheelbase_m * front_n / weight).sqrt();
    weight / (2.0 * p.cg_height_m) * (root - b) - front_n
}

/// Largest total braking force the rear axle can supply alone without
/// exceeding the adhesion limit under the matching load transfer.
pub fn rear_only_limit(p: &VehicleParams) -> f64 {
    let mu = p.adhesion_coeff;
    let weight = p.weight_n();
    mu * weight * (p.wheelbase_m - p.cg_to_rear_m) / (p.wheelbase_m + mu * p.cg_height_m)
}

/// Splits a total braking-force demand between the axles.
///
/// In slight and medium braking (`emergency` false and the demand within
/// both the rear-axle adhesion limit and `rear_cap_n`) the rear axle
/// takes everything so the motors can recover the energy. Otherwise the
/// demand is placed on the ideal allocation curve, solved numerically.
///
/// `rear_cap_n` carries the caller's regenerative capability bound for
/// the rear-first decision; pass `f64::INFINITY` when unconstrained.
pub fn split_braking(
    total_force_n: f64,
    p: &VehicleParams,
    emergency: bool,
    rear_cap_n: f64,
) -> Result<BrakeSplit> {
    if !(total_force_n >= 0.0) {
        return Err(Error::Argument(format!(
            "braking force must be >= 0, got {total_force_n}"
        )));
    }
    if total_force_n == 0.0 {
        return Ok(BrakeSplit {
            front_n: 0.0,
            rear_n: 0.0,
        });
    }
    if !emergency && total_force_n <= rear_only_limit(p).min(rear_cap_n) {
        return Ok(BrakeSplit {
            front_n: 0.0,
            rear_n: total_force_n,
        });
    }

    // Bisection on the front force: total(F_xF) = F_xF + ideal_rear(F_xF)
    // is strictly increasing from 0.
    let mut lo = 0.0_f64;
    let mut hi = total_force_n;
    while hi + ideal_rear_force(hi, p) < total_force_n {
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(Error::Argument(format!(
                "braking force {total_force_n} N beyond ideal-curve range"
            )));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid + ideal_rear_force(mid, p) < total_force_n {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-12 * total_force_n.max(1.0) {
            break;
        }
    }
    let front = 0.5 * (lo + hi);
    Ok(BrakeSplit {
        front_n: front,
        rear_n: total_force_n - front,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn p() -> VehicleParams {
        VehicleParams::default()
    }

    #[test]
    fn defaults_validate() {
        p().validate().unwrap();
    }

    #[test]
    fn load_torque_at_standstill() {
        // Rolling resistance only: M g f_r r_t = 147150 * 0.01 * 0.526.
        let t = load_torque(0.0, 0.0, &p());
        assert_relative_eq!(t, 147_150.0 * 0.01 * 0.526, max_relative = 1e-12);
        assert_relative_eq!(t, 774.009, epsilon = 5e-3);
    }

    #[test]
    fn load_torque_vanishes_without_resistances() {
        let mut params = p();
        params.rolling_coeff = 0.0;
        assert_eq!(load_torque(0.0, 0.0, &params), 0.0);
    }

    #[test]
    fn load_torque_at_design_grade() {
        // Term-by-term evaluation at 50% grade, 10 km/h:
        // phi = atan(0.5); Mg sin(phi) = 65807.5 N, Mg f_r cos(phi) = 1316.2 N,
        // drag = 22.57 N; times r_t = 0.526 m.
        let v = 10.0 / 3.6;
        let phi = 0.5_f64.atan();
        let expected = (147_150.0 * phi.sin()
            + 147_150.0 * 0.01 * phi.cos()
            + 0.5 * 1.2 * 0.65 * 7.5 * v * v)
            * 0.526;
        let t = load_torque(v, 0.5, &p());
        assert_relative_eq!(t, expected, max_relative = 1e-12);
        assert_relative_eq!(t, 35_318.9, max_relative = 1e-4);
    }

    #[test]
    fn wheel_torque_reduces_to_load_at_zero_accel() {
        let params = p();
        for &(v, grade) in &[(0.0, 0.0), (5.0, 0.02), (15.0, -0.01)] {
            assert_eq!(
                required_wheel_torque(v, 0.0, grade, &params),
                load_torque(v, grade, &params)
            );
        }
    }

    #[test]
    fn wheel_torque_inertia_term() {
        let params = p();
        let t = required_wheel_torque(10.0, 1.0, 0.0, &params);
        let inertia = 15_000.0 * 1.1 * 1.0 * 0.526;
        assert_relative_eq!(inertia, 8679.0, max_relative = 1e-12);
        assert_relative_eq!(
            t,
            inertia + load_torque(10.0, 0.0, &params),
            max_relative = 1e-12
        );
    }

    #[test]
    fn split_zero_force() {
        let s = split_braking(0.0, &p(), false, f64::INFINITY).unwrap();
        assert_eq!((s.front_n, s.rear_n), (0.0, 0.0));
    }

    #[test]
    fn split_rejects_negative() {
        assert!(split_braking(-1.0, &p(), false, f64::INFINITY).is_err());
    }

    #[test]
    fn slight_braking_is_rear_only() {
        // 0.5 m/s^2 deceleration demand.
        let params = p();
        let force = params.mass_kg * 0.5;
        let s = split_braking(force, &params, false, f64::INFINITY).unwrap();
        assert_eq!(s.front_n, 0.0);
        assert_eq!(s.rear_n, force);
    }

    #[test]
    fn emergency_split_sits_on_ideal_curve() {
        let params = p();
        let force = params.mass_kg * 4.0;
        let s = split_braking(force, &params, true, f64::INFINITY).unwrap();
        let residual = (ideal_rear_force(s.front_n, &params) - s.rear_n).abs();
        assert!(residual < 1e-6, "residual {residual}");
        assert!((s.front_n + s.rear_n - force).abs() < 1e-6);
    }

    #[test]
    fn ideal_solve_matches_closed_form() {
        // Closed-form inversion of the allocation curve as an
        // independent check on the bisection.
        let params = p();
        let weight = params.weight_n();
        for &force in &[5_000.0, 40_000.0, 100_000.0, 2.0 * weight] {
            let s = split_braking(force, &params, true, f64::INFINITY).unwrap();
            let b = params.cg_to_rear_m;
            let term = 2.0 * params.cg_height_m * force / weight + b;
            let front = (term * term - b * b) * weight
                / (4.0 * params.cg_height_m * params.wheelbase_m);
            assert_relative_eq!(s.front_n, front, max_relative = 1e-9);
        }
    }

    #[test]
    fn rear_cap_forces_ideal_curve() {
        let params = p();
        let force = 10_000.0;
        assert!(force < rear_only_limit(&params));
        let s = split_braking(force, &params, false, 5_000.0).unwrap();
        assert!(s.front_n > 0.0);
        let residual = (ideal_rear_force(s.front_n, &params) - s.rear_n).abs();
        assert!(residual < 1e-6);
    }

    proptest! {
        #[test]
        fn load_torque_monotone_in_speed_and_grade(
            v in 0.0f64..40.0,
            dv in 0.0f64..5.0,
            grade in 0.0f64..1.0,
            dg in 0.0f64..0.2,
        ) {
            let params = p();
            prop_assert!(load_torque(v + dv, grade, &params) >= load_torque(v, grade, &params));
            prop_assert!(
                load_torque(v, (grade + dg).min(1.0), &params) >= load_torque(v, grade, &params)
            );
        }

        #[test]
        fn wheel_torque_linear_in_accel(
            v in 0.0f64..30.0,
            a in -3.0f64..3.0,
        ) {
            let params = p();
            let lhs = required_wheel_torque(v, a, 0.0, &params)
                - required_wheel_torque(v, 0.0, 0.0, &params);
            let rhs = params.inertia_coeff * params.mass_kg * a * params.wheel_radius_m;
            prop_assert!((lhs - rhs).abs() <= 1e-9 * rhs.abs().max(1.0));
        }

        #[test]
        fn split_conserves_total(force in 0.0f64..294_300.0, emergency: bool) {
            let params = p();
            let s = split_braking(force, &params, emergency, f64::INFINITY).unwrap();
            prop_assert!(s.front_n >= 0.0 && s.rear_n >= 0.0);
            prop_assert!((s.front_n + s.rear_n - force).abs() < 1e-6);
        }

        #[test]
        fn rear_first_below_threshold(force in 0.0f64..294_300.0) {
            let params = p();
            let s = split_braking(force, &params, false, f64::INFINITY).unwrap();
            if force <= rear_only_limit(&params) {
                prop_assert_eq!(s.front_n, 0.0);
                prop_assert_eq!(s.rear_n, force);
            } else {
                let residual = (ideal_rear_force(s.front_n, &params) - s.rear_n).abs();
                prop_assert!(residual < 1e-6);
            }
        }
    }
}
