//! Diesel engine model: torque envelope, fuel map, and emission maps.
//!
//! The fuel surface is a Willans-line family: fuel power equals
//! (P_e + P_fric(w)) / e(w), with a speed-dependent indicated efficiency
//! peaking near 1800 rpm and a high-load consumption penalty above 80%
//! load, which places the best specific consumption near
//! (1800 rpm, 80% load) at about 210 g/kWh. Emission surfaces are
//! specific-emission families in g/kWh: NOx rises with load, HC falls
//! with load, and CO/PM concentrate in the low-speed high-load corner.

use serde::{Deserialize, Serialize};

use super::{linspace, ComponentMap, MapKind};
use crate::error::{Error, Result};
use crate::units::rpm_to_radps;

/// Lower heating value of diesel, J/g.
const DIESEL_LHV_J_PER_G: f64 = 42_800.0;

const SPEED_POINTS: usize = 33;
const TORQUE_POINTS: usize = 29;

/// Emission species tracked by the engine model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum EmissionSpecies {
    Hc,
    Co,
    NOx,
    Pm,
}

impl EmissionSpecies {
    pub const ALL: [EmissionSpecies; 4] = [
        EmissionSpecies::Hc,
        EmissionSpecies::Co,
        EmissionSpecies::NOx,
        EmissionSpecies::Pm,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            EmissionSpecies::Hc => "HC",
            EmissionSpecies::Co => "CO",
            EmissionSpecies::NOx => "NOx",
            EmissionSpecies::Pm => "PM",
        }
    }
}

/// Serializable engine description (JSON config).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EngineParams {
    pub max_power_kw: f64,
    pub max_speed_rpm: f64,
    pub idle_speed_rpm: f64,
    /// Flat torque ceiling of the envelope, N*m.
    pub peak_torque_nm: f64,
    /// Fuel density, g/dm^3, used to report fuel volume.
    pub fuel_density_g_per_dm3: f64,
    /// Peak indicated efficiency of the Willans line.
    pub peak_indicated_eff: f64,
    /// Engine speed of peak indicated efficiency, rpm.
    pub best_speed_rpm: f64,
    /// Quadratic efficiency falloff below / above the best speed.
    pub eff_falloff_low: f64,
    pub eff_falloff_high: f64,
    /// Friction power P_fric = kf*w + kf3*w^3, W.
    pub friction_kf: f64,
    pub friction_kf3: f64,
    /// High-load consumption penalty gain above 80% load.
    pub enrich_gain: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fuel_map_csv: Option<std::path::PathBuf>,
}

impl Default for EngineParams {
    fn default() -> Self {
        Self {
            max_power_kw: 88.0,
            max_speed_rpm: 4500.0,
            idle_speed_rpm: 800.0,
            peak_torque_nm: 280.0,
            fuel_density_g_per_dm3: 832.0,
            peak_indicated_eff: 0.43,
            best_speed_rpm: 1800.0,
            eff_falloff_low: 2.0,
            eff_falloff_high: 0.55,
            friction_kf: 10.0,
            friction_kf3: 1.826e-4,
            enrich_gain: 0.03,
            fuel_map_csv: None,
        }
    }
}

impl EngineParams {
    fn friction_w(&self, w: f64) -> f64 {
        self.friction_kf * w + self.friction_kf3 * w.powi(3)
    }

    fn indicated_eff(&self, w: f64) -> f64 {
        let best = rpm_to_radps(self.best_speed_rpm);
        let max = rpm_to_radps(self.max_speed_rpm);
        let x = (w - best) / max;
        let falloff = if w < best {
            self.eff_falloff_low
        } else {
            self.eff_falloff_high
        };
        self.peak_indicated_eff * (1.0 - falloff * x * x).max(0.2)
    }

    fn envelope(&self, w: f64) -> f64 {
        self.peak_torque_nm.min(self.max_power_kw * 1e3 / w)
    }

    fn fuel_rate_g_per_s(&self, w: f64, t: f64) -> f64 {
        let p = w * t;
        let tau = t / self.envelope(w);
        let enrich = 1.0 + self.enrich_gain * (((tau - 0.8) / 0.2).max(0.0)).powi(2);
        (p + self.friction_w(w)) / (self.indicated_eff(w) * DIESEL_LHV_J_PER_G) * enrich
    }

    fn specific_emission_g_per_kwh(&self, species: EmissionSpecies, w: f64, t: f64) -> f64 {
        let tau = t / self.envelope(w);
        let tau_c = tau.clamp(0.0, 1.0);
        // Lugging factor: 1 near idle, 0 above ~2200 rpm.
        let w_idle = rpm_to_radps(self.idle_speed_rpm);
        let w_lug = rpm_to_radps(2200.0);
        let lug = (((w_lug - w) / (w_lug - w_idle)).clamp(0.0, 1.0)).powi(2);
        match species {
            EmissionSpecies::NOx => 1.2 + 9.0 * tau.max(0.0).powf(2.2),
            EmissionSpecies::Hc => 0.03 + 0.55 * (1.0 - tau_c).powf(2.5),
            EmissionSpecies::Co => 0.9 + 1.2 * (1.0 - tau_c).powi(2) + 14.0 * tau_c.powi(3) * lug,
            EmissionSpecies::Pm => 0.04 + 0.10 * tau_c.powi(2) + 0.9 * tau_c.powi(4) * lug,
        }
    }

    pub fn build(&self) -> Result<EngineSpec> {
        let max_speed = rpm_to_radps(self.max_speed_rpm);
        let idle_speed = rpm_to_radps(self.idle_speed_rpm);
        if !(idle_speed > 0.0 && idle_speed < max_speed) {
            return Err(Error::Validation(
                "engine idle speed must be positive and below max speed".into(),
            ));
        }
        if !(self.max_power_kw > 0.0 && self.peak_torque_nm > 0.0) {
            return Err(Error::Validation(
                "engine power and torque must be > 0".into(),
            ));
        }
        let speed_grid = linspace(idle_speed, max_speed, SPEED_POINTS);
        let torque_grid = linspace(0.0, self.peak_torque_nm, TORQUE_POINTS);
        let fuel_map = match &self.fuel_map_csv {
            Some(path) => {
                let file = std::fs::File::open(path)?;
                ComponentMap::from_csv(MapKind::FuelRateGPerS, file)?
            }
            None => ComponentMap::from_fn(
                MapKind::FuelRateGPerS,
                speed_grid.clone(),
                torque_grid.clone(),
                |w, t| self.fuel_rate_g_per_s(w, t),
            )?,
        };
        let emission_map = |species: EmissionSpecies| -> Result<ComponentMap> {
            ComponentMap::from_fn(
                MapKind::EmissionRateGPerS,
                speed_grid.clone(),
                torque_grid.clone(),
                |w, t| self.specific_emission_g_per_kwh(species, w, t) * (w * t) / 3.6e6,
            )
        };
        Ok(EngineSpec {
            max_power_w: self.max_power_kw * 1e3,
            max_speed_radps: max_speed,
            idle_speed_radps: idle_speed,
            peak_torque_nm: self.peak_torque_nm,
            fuel_density_g_per_dm3: self.fuel_density_g_per_dm3,
            fuel_map,
            hc_map: emission_map(EmissionSpecies::Hc)?,
            co_map: emission_map(EmissionSpecies::Co)?,
            nox_map: emission_map(EmissionSpecies::NOx)?,
            pm_map: emission_map(EmissionSpecies::Pm)?,
        })
    }
}

/// A built engine model.
#[derive(Debug, Clone)]
pub struct EngineSpec {
    pub max_power_w: f64,
    pub max_speed_radps: f64,
    pub idle_speed_radps: f64,
    pub peak_torque_nm: f64,
    pub fuel_density_g_per_dm3: f64,
    pub fuel_map: ComponentMap,
    pub hc_map: ComponentMap,
    pub co_map: ComponentMap,
    pub nox_map: ComponentMap,
    pub pm_map: ComponentMap,
}

impl EngineSpec {
    /// Maximum torque at a given speed, N*m.
    pub fn torque_envelope(&self, speed: f64) -> Result<f64> {
        if !(self.idle_speed_radps..=self.max_speed_radps * (1.0 + 1e-9)).contains(&speed) {
            return Err(Error::MapRange {
                axis: "speed",
                value: speed,
                lo: self.idle_speed_radps,
                hi: self.max_speed_radps,
            });
        }
        Ok(self.peak_torque_nm.min(self.max_power_w / speed))
    }

    pub fn emission_map(&self, species: EmissionSpecies) -> &ComponentMap {
        match species {
            EmissionSpecies::Hc => &self.hc_map,
            EmissionSpecies::Co => &self.co_map,
            EmissionSpecies::NOx => &self.nox_map,
            EmissionSpecies::Pm => &self.pm_map,
        }
    }

    fn check_point(&self, speed: f64, torque: f64) -> Result<()> {
        let env = self.torque_envelope(speed)?;
        if torque < 0.0 || torque > env * (1.0 + 1e-9) {
            return Err(Error::Infeasible(format!(
                "engine torque {torque:.1} N*m outside envelope {env:.1} N*m at {speed:.1} rad/s"
            )));
        }
        Ok(())
    }
}

/// Fuel mass flow at an operating point inside the envelope, g/s.
///
/// An engine that is switched off consumes exactly zero; that case is
/// the caller's, not this function's.
pub fn engine_fuel_rate(spec: &EngineSpec, speed: f64, torque: f64) -> Result<f64> {
    spec.check_point(speed, torque)?;
    spec.fuel_map.lookup(speed, torque.min(spec.peak_torque_nm))
}

/// Emission mass flow for one species, g/s.
pub fn engine_emission_rate(
    spec: &EngineSpec,
    speed: f64,
    torque: f64,
    species: EmissionSpecies,
) -> Result<f64> {
    spec.check_point(speed, torque)?;
    spec.emission_map(species)
        .lookup(speed, torque.min(spec.peak_torque_nm))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn spec() -> EngineSpec {
        EngineParams::default().build().unwrap()
    }

    #[test]
    fn envelope_respects_power_cap() {
        let e = spec();
        let mut w = e.idle_speed_radps;
        while w <= e.max_speed_radps {
            let t = e.torque_envelope(w).unwrap();
            assert!(t * w <= e.max_power_w * (1.0 + 1e-6), "at {w} rad/s");
            w += 1.0;
        }
        // Flat region up to 3000 rpm, power-limited at redline.
        assert_eq!(e.torque_envelope(rpm_to_radps(2000.0)).unwrap(), 280.0);
        assert_relative_eq!(
            e.torque_envelope(e.max_speed_radps).unwrap(),
            88_000.0 / e.max_speed_radps,
            max_relative = 1e-9
        );
    }

    #[test]
    fn best_bsfc_near_calibration_point() {
        let e = spec();
        // Scan grid nodes for the minimum brake-specific consumption.
        let mut best = f64::INFINITY;
        let mut best_point = (0.0, 0.0);
        for (i, &w) in e.fuel_map.speed_grid().to_vec().iter().enumerate() {
            for (j, &t) in e.fuel_map.torque_grid().to_vec().iter().enumerate() {
                if t <= 0.0 || t > e.torque_envelope(w).unwrap() {
                    continue;
                }
                let bsfc = e.fuel_map.value_at(i, j) * 3.6e6 / (w * t);
                if bsfc < best {
                    best = bsfc;
                    best_point = (w, t);
                }
            }
        }
        assert!(
            (205.0..=215.0).contains(&best),
            "global minimum BSFC {best} g/kWh"
        );
        // The documented calibration point sits within 5% of the optimum.
        let w_cal = rpm_to_radps(1800.0);
        let t_cal = 0.8 * 280.0;
        let rate = engine_fuel_rate(&e, w_cal, t_cal).unwrap();
        let bsfc_cal = rate * 3.6e6 / (w_cal * t_cal);
        assert!(
            bsfc_cal <= best * 1.05,
            "calibration point {bsfc_cal} vs min {best}"
        );
        // And the optimum itself lies in the mid-speed, high-load region.
        assert!((150.0..250.0).contains(&best_point.0), "{best_point:?}");
        assert!(best_point.1 / 280.0 >= 0.6, "{best_point:?}");
    }

    #[test]
    fn zero_torque_row_is_positive_idle_floor() {
        let e = spec();
        let rate = engine_fuel_rate(&e, e.idle_speed_radps, 0.0).unwrap();
        assert!(rate > 0.0, "engine-on idle floor {rate}");
    }

    #[test]
    fn fuel_rate_rejects_points_outside_envelope() {
        let e = spec();
        assert!(engine_fuel_rate(&e, rpm_to_radps(4000.0), 280.0).is_err());
        assert!(engine_fuel_rate(&e, 10.0, 100.0).is_err());
        assert!(engine_fuel_rate(&e, rpm_to_radps(2000.0), -5.0).is_err());
    }

    #[test]
    fn emission_rate_zero_at_zero_power() {
        let e = spec();
        for s in EmissionSpecies::ALL {
            let r = engine_emission_rate(&e, rpm_to_radps(1500.0), 0.0, s).unwrap();
            assert_eq!(r, 0.0, "{s:?}");
        }
    }

    #[test]
    fn nox_increases_along_torque_sweep() {
        let e = spec();
        let w = rpm_to_radps(1800.0);
        let env = e.torque_envelope(w).unwrap();
        let mut prev = -1.0;
        for k in 0..=20 {
            let t = env * k as f64 / 20.0;
            let r = engine_emission_rate(&e, w, t, EmissionSpecies::NOx).unwrap();
            assert!(r > prev, "NOx not increasing at torque {t}");
            prev = r;
        }
    }

    #[test]
    fn co_concentrates_at_low_speed_high_load() {
        let e = spec();
        // Lugging point: low speed, >= 90% of envelope torque.
        let w_lug = rpm_to_radps(1100.0);
        let t_lug = 0.95 * e.torque_envelope(w_lug).unwrap();
        // Mid-speed 50% load point of comparable power.
        let w_mid = rpm_to_radps(2100.0);
        let t_mid = 0.5 * e.torque_envelope(w_mid).unwrap();
        let co_lug = engine_emission_rate(&e, w_lug, t_lug, EmissionSpecies::Co).unwrap();
        let co_mid = engine_emission_rate(&e, w_mid, t_mid, EmissionSpecies::Co).unwrap();
        assert!(
            co_lug > co_mid,
            "lugging CO {co_lug} should exceed mid-load CO {co_mid}"
        );
    }
}
