//! Equivalent-circuit battery model: open-circuit voltage in series with
//! an internal resistance, both SOC dependent.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Current direction through the pack.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurrentDirection {
    Discharge,
    Charge,
}

/// Battery pack parameters (JSON config block `components.battery`).
///
/// Defaults describe 200 lithium-ion cells in series: 680 V nominal,
/// 180 Ah. The OCV curve rises mildly with SOC (affine plus tanh) and
/// the internal resistance has a shallow U shape over SOC with distinct
/// charge/discharge values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BatterySpec {
    /// Capacity, ampere-seconds (180 Ah = 648000 A*s).
    pub capacity_as: f64,
    /// OCV at SOC 0.5, V.
    pub u_oc_nominal_v: f64,
    /// Affine OCV slope, V per unit SOC.
    pub u_oc_slope_v: f64,
    /// Amplitude of the tanh OCV term, V.
    pub u_oc_tanh_v: f64,
    /// Gain inside the tanh OCV term.
    pub u_oc_tanh_gain: f64,
    /// Mid-SOC internal resistance while discharging, ohm.
    pub r_discharge_ohm: f64,
    /// Mid-SOC internal resistance while charging, ohm.
    pub r_charge_ohm: f64,
    /// Strength of the U-shaped SOC dependence of the resistance.
    pub r_soc_curvature: f64,
    /// Allowed SOC window [min, max].
    pub soc_min: f64,
    pub soc_max: f64,
}

impl Default for BatterySpec {
    fn default() -> Self {
        Self {
            capacity_as: 648_000.0,
            u_oc_nominal_v: 680.0,
            u_oc_slope_v: 60.0,
            u_oc_tanh_v: 12.0,
            u_oc_tanh_gain: 5.0,
            r_discharge_ohm: 0.12,
            r_charge_ohm: 0.15,
            r_soc_curvature: 1.5,
            soc_min: 0.25,
            soc_max: 0.95,
        }
    }
}

impl BatterySpec {
    /// Open-circuit voltage at a given SOC, V.
    pub fn u_oc(&self, soc: f64) -> f64 {
        self.u_oc_nominal_v
            + self.u_oc_slope_v * (soc - 0.5)
            + self.u_oc_tanh_v * (self.u_oc_tanh_gain * (soc - 0.5)).tanh()
    }

    /// Internal resistance at a given SOC and current direction, ohm.
    pub fn r_int(&self, soc: f64, direction: CurrentDirection) -> f64 {
        let base = match direction {
            CurrentDirection::Discharge => self.r_discharge_ohm,
            CurrentDirection::Charge => self.r_charge_ohm,
        };
        base * (1.0 + self.r_soc_curvature * (2.0 * soc - 1.0).powi(4))
    }

    /// Largest terminal power the pack can source at a given SOC, W.
    pub fn max_discharge_power_w(&self, soc: f64) -> f64 {
        let u = self.u_oc(soc);
        u * u / (4.0 * self.r_int(soc, CurrentDirection::Discharge))
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.capacity_as > 0.0) {
            return Err(Error::Validation("battery capacity must be > 0".into()));
        }
        if !(self.soc_min < self.soc_max && self.soc_min >= 0.0 && self.soc_max <= 1.0) {
            return Err(Error::Validation(format!(
                "battery soc bounds [{}, {}] invalid",
                self.soc_min, self.soc_max
            )));
        }
        for i in 0..=20 {
            let soc = i as f64 / 20.0;
            if self.u_oc(soc) <= 0.0 {
                return Err(Error::Validation(format!(
                    "open-circuit voltage not positive at soc {soc}"
                )));
            }
            for dir in [CurrentDirection::Discharge, CurrentDirection::Charge] {
                if self.r_int(soc, dir) <= 0.0 {
                    return Err(Error::Validation(format!(
                        "internal resistance not positive at soc {soc}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// SOC time derivative at a terminal power demand, 1/s.
///
/// d(SOC)/dt = -(U_OC - sqrt(U_OC^2 - 4 P_bat R_bat)) / (2 C_bat R_bat)
///
/// Positive `p_bat_w` (discharge) gives a negative derivative. Demands
/// beyond the quadratic's discriminant are a power-limit error; the
/// caller must clamp its request.
pub fn soc_derivative(bat: &BatterySpec, soc: f64, p_bat_w: f64) -> Result<f64> {
    if p_bat_w == 0.0 {
        return Ok(0.0);
    }
    let direction = if p_bat_w > 0.0 {
        CurrentDirection::Discharge
    } else {
        CurrentDirection::Charge
    };
    let u = bat.u_oc(soc);
    let r = bat.r_int(soc, direction);
    let disc = u * u - 4.0 * p_bat_w * r;
    if disc < 0.0 {
        return Err(Error::BatteryPowerLimit {
            requested_w: p_bat_w,
            limit_w: u * u / (4.0 * r),
            soc,
        });
    }
    let current = (u - disc.sqrt()) / (2.0 * r);
    Ok(-current / bat.capacity_as)
}

/// Battery terminal power for the single-motor layout:
///
/// P_bat = P_m0 * (eta_m0 * eta_c)^(-sign(P_m0))
///
/// Driving power is divided by the efficiencies, regenerated power is
/// multiplied; sign(0) = 0, so zero motor power maps to exactly zero.
pub fn battery_power_smsp(p_m0: f64, eta_m0: f64, eta_c: f64) -> f64 {
    apply_sign_efficiency(p_m0, eta_m0 * eta_c)
}

/// Battery terminal power for the dual-motor layouts: per-motor
/// sign-dependent efficiency, then the converter efficiency applied with
/// the sign of the electrical sum.
pub fn battery_power_dual(p_m1: f64, eta_m1: f64, p_m2: f64, eta_m2: f64, eta_c: f64) -> f64 {
    let sum = apply_sign_efficiency(p_m1, eta_m1) + apply_sign_efficiency(p_m2, eta_m2);
    apply_sign_efficiency(sum, eta_c)
}

fn apply_sign_efficiency(p: f64, eta: f64) -> f64 {
    if p > 0.0 {
        p / eta
    } else if p < 0.0 {
        p * eta
    } else {
        0.0
    }
}
