//! Electric machine model: torque envelope and loss-based efficiency map.

use serde::{Deserialize, Serialize};

use super::{linspace, ComponentMap, MapKind};
use crate::error::{Error, Result};
use crate::units::rpm_to_radps;

/// Floor applied to generated efficiency values so maps stay in (0, 1]
/// at the zero-power grid edges.
const EFFICIENCY_FLOOR: f64 = 1e-3;

/// Grid resolution of generated efficiency maps.
const SPEED_POINTS: usize = 31;
const TORQUE_POINTS: usize = 31;

/// Loss-model coefficients for a permanent-magnet machine:
///
/// P_loss = kc*T^2 + ki*w + kw*w^3 + c0
///
/// kc captures copper losses, ki iron losses, kw windage, and c0 a
/// constant auxiliary draw. The efficiency surface is
/// P / (P + P_loss) with P = T*w.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MotorLossCoefficients {
    pub kc: f64,
    pub ki: f64,
    pub kw: f64,
    pub c0: f64,
}

impl MotorLossCoefficients {
    pub fn losses_w(&self, speed: f64, torque: f64) -> f64 {
        self.kc * torque * torque + self.ki * speed + self.kw * speed.powi(3) + self.c0
    }
}

/// Serializable motor description (JSON config).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MotorParams {
    pub peak_power_kw: f64,
    pub max_speed_rpm: f64,
    pub base_speed_rpm: f64,
    pub losses: MotorLossCoefficients,
    /// Optional long-format CSV file with a measured efficiency map that
    /// replaces the generated surface.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub efficiency_map_csv: Option<std::path::PathBuf>,
}

impl MotorParams {
    /// 224 kW traction machine. Loss coefficients are chosen so the
    /// machine averages in the low 70s percent efficiency over an urban
    /// bus cycle: it is oversized for the duty, so constant and
    /// speed-dependent losses dominate at part load.
    pub fn default_motor0() -> Self {
        Self {
            peak_power_kw: 224.0,
            max_speed_rpm: 4500.0,
            base_speed_rpm: 1500.0,
            losses: MotorLossCoefficients {
                kc: 0.0033,
                ki: 22.0,
                kw: 5.5e-4,
                c0: 1200.0,
            },
            efficiency_map_csv: None,
        }
    }

    /// 112 kW machine used in pairs; runs at roughly twice the per-unit
    /// load of the 224 kW machine for the same duty, with proportionally
    /// smaller no-load losses.
    pub fn default_motor_half() -> Self {
        Self {
            peak_power_kw: 112.0,
            max_speed_rpm: 4500.0,
            base_speed_rpm: 1500.0,
            losses: MotorLossCoefficients {
                kc: 0.0067,
                ki: 5.5,
                kw: 1.4e-4,
                c0: 250.0,
            },
            efficiency_map_csv: None,
        }
    }

    /// 76 kW generator of the series range extenders.
    pub fn default_generator() -> Self {
        Self {
            peak_power_kw: 76.0,
            max_speed_rpm: 3000.0,
            base_speed_rpm: 1000.0,
            losses: MotorLossCoefficients {
                kc: 0.00433,
                ki: 4.5,
                kw: 1.2e-4,
                c0: 200.0,
            },
            efficiency_map_csv: None,
        }
    }

    pub fn build(&self) -> Result<MotorSpec> {
        let peak_power_w = self.peak_power_kw * 1e3;
        let max_speed = rpm_to_radps(self.max_speed_rpm);
        let base_speed = rpm_to_radps(self.base_speed_rpm);
        if !(base_speed > 0.0 && base_speed < max_speed) {
            return Err(Error::Validation(format!(
                "motor base speed {} rpm must be positive and below max speed {} rpm",
                self.base_speed_rpm, self.max_speed_rpm
            )));
        }
        if !(peak_power_w > 0.0) {
            return Err(Error::Validation("motor peak power must be > 0".into()));
        }
        let peak_torque = peak_power_w / base_speed;
        let efficiency_map = match &self.efficiency_map_csv {
            Some(path) => {
                let file = std::fs::File::open(path)?;
                ComponentMap::from_csv(MapKind::Efficiency, file)?
            }
            None => {
                let losses = self.losses;
                ComponentMap::from_fn(
                    MapKind::Efficiency,
                    linspace(0.0, max_speed, SPEED_POINTS),
                    linspace(0.0, peak_torque, TORQUE_POINTS),
                    move |w, t| {
                        let p = w * t;
                        (p / (p + losses.losses_w(w, t))).max(EFFICIENCY_FLOOR)
                    },
                )?
            }
        };
        Ok(MotorSpec {
            peak_power_w,
            max_speed_radps: max_speed,
            base_speed_radps: base_speed,
            efficiency_map,
        })
    }
}

/// A built electric machine.
#[derive(Debug, Clone)]
pub struct MotorSpec {
    pub peak_power_w: f64,
    pub max_speed_radps: f64,
    pub base_speed_radps: f64,
    pub efficiency_map: ComponentMap,
}

impl MotorSpec {
    /// Constant-torque value below base speed, N*m.
    pub fn peak_torque_nm(&self) -> f64 {
        self.peak_power_w / self.base_speed_radps
    }

    /// Efficiency at an operating point; torque may be negative
    /// (generating), the map is symmetric in |T|.
    pub fn efficiency(&self, speed: f64, torque: f64) -> Result<f64> {
        self.efficiency_map.lookup(speed, torque.abs())
    }
}

/// Torque envelope: constant torque below base speed, constant power
/// above, up to `max_speed`.
pub fn motor_max_torque(spec: &MotorSpec, speed: f64) -> Result<f64> {
    if !(0.0..=spec.max_speed_radps * (1.0 + 1e-9)).contains(&speed) {
        return Err(Error::MapRange {
            axis: "speed",
            value: speed,
            lo: 0.0,
            hi: spec.max_speed_radps,
        });
    }
    if speed <= spec.base_speed_radps {
        Ok(spec.peak_torque_nm())
    } else {
        Ok(spec.peak_power_w / speed)
    }
}
